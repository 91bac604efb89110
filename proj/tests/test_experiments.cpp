#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"

using namespace immwit;

namespace {

class ThreadEnv {
 public:
  explicit ThreadEnv(const char* n) {
    const char* old = std::getenv("IMMWIT_THREADS");
    if (old) saved_ = old;
    had_ = old != nullptr;
    setenv("IMMWIT_THREADS", n, 1);
  }
  ~ThreadEnv() {
    if (had_) {
      setenv("IMMWIT_THREADS", saved_.c_str(), 1);
    } else {
      unsetenv("IMMWIT_THREADS");
    }
  }

 private:
  std::string saved_;
  bool had_ = false;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(IMMWIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("immwit_test_" + std::to_string(::getpid()) + "_" + name);
}

bool subset(const std::vector<char>& a, const std::vector<char>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

}  // namespace

TEST(Table1, RowsAreNestedAndInsidePpt) {
  Table1Config cfg;
  cfg.samples = 150;
  cfg.unitaries_per_state = 4;
  const auto r = run_table1(cfg);
  ASSERT_EQ(r.rows.size(), table1_labels().size());
  const auto& ppt = r.flags_of("ppt");
  for (const auto& label : table1_labels()) EXPECT_TRUE(subset(r.flags_of(label), ppt)) << label;
  EXPECT_TRUE(subset(r.flags_of("filter_A"), r.flags_of("filter_A_or_B")));
  EXPECT_TRUE(subset(r.flags_of("filter_A_or_B"), r.flags_of("pairs_A_or_B")));
  EXPECT_TRUE(subset(r.flags_of("pairs_A_or_B"), r.flags_of("pairs_haar_A_or_B")));
  EXPECT_GT(r.rate("filter_A"), r.rate("reduction"));
}

TEST(Table1, PerSampleFlagsMatchDirectEvaluation) {
  Table1Config cfg;
  cfg.samples = 40;
  cfg.seed = 5;
  cfg.unitaries_per_state = 1;
  const auto r = run_table1(cfg);
  const auto& ppt = r.flags_of("ppt");
  const auto& red = r.flags_of("reduction");
  for (long i = 0; i < cfg.samples; ++i) {
    RandomSource rng = RandomSource::derived(cfg.seed, static_cast<std::uint64_t>(i));
    const Matrix rho = ginibre_state({3, 3}, rng).matrix();
    EXPECT_EQ(ppt[i] != 0, oracle::min_eig(oracle::partial_transpose(rho, {3, 3}, {0})) < 0.0);
    // (tr_A rho) (x) 1 ... written out: 1_A (x) rho_B - rho.
    const Matrix rho_b = oracle::partial_trace(rho, {3, 3}, {1});
    const Matrix red_out = oracle::embed(rho_b, {1}, {3, 3}) - rho;
    EXPECT_EQ(red[i] != 0, oracle::min_eig(red_out) < 0.0) << i;
  }
}

TEST(Table1, QubitRowsCoincide) {
  Table1Config cfg;
  cfg.d = 2;
  cfg.samples = 100;
  cfg.unitaries_per_state = 2;
  const auto r = run_table1(cfg);
  for (const auto& label : table1_labels()) EXPECT_EQ(r.flags_of(label), r.flags_of("ppt")) << label;
}

TEST(Table1, ThreadCountDoesNotChangeResults) {
  Table1Config cfg;
  cfg.samples = 60;
  cfg.unitaries_per_state = 2;
  cfg.dump_trials = true;
  json a, b;
  {
    ThreadEnv env("1");
    a = run_table1(cfg).to_json(true);
  }
  {
    ThreadEnv env("3");
    b = run_table1(cfg).to_json(true);
  }
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a["min_eigenvalues"]["reduction"].size(), 60u);
  EXPECT_EQ(a["schema_version"], kReportSchemaVersion);
}

TEST(Table1, RejectsBadConfig) {
  Table1Config cfg;
  cfg.d = 7;
  EXPECT_THROW(run_table1(cfg), std::out_of_range);
  cfg.d = 3;
  cfg.samples = 0;
  EXPECT_THROW(run_table1(cfg), std::invalid_argument);
  EXPECT_THROW(run_table1(Table1Config{}).rate("nope"), std::out_of_range);
}

TEST(Simplex, GridShape) {
  const auto nodes = simplex_grid(5);
  EXPECT_EQ(nodes.size(), 15u);
  for (const auto& n : nodes) {
    EXPECT_NEAR(n.a + n.b + n.c, 1.0, 1e-15);
    EXPECT_GE(n.u(), 0.0);
    EXPECT_LE(n.u(), 1.0);
  }
  EXPECT_THROW(simplex_grid(1), std::invalid_argument);
}

TEST(Simplex, VerticesNeverDetectAndScaleIsIrrelevant) {
  SimplexConfig cfg;
  cfg.resolution = 3;
  cfg.samples = 200;
  const auto scan = run_simplex_scan(cfg);
  for (std::size_t i = 0; i < scan.nodes.size(); ++i) {
    const auto& n = scan.nodes[i];
    if (n.a == 1.0 || n.b == 1.0 || n.c == 1.0) EXPECT_EQ(n.detected, 0);
  }
  const auto counts = count_filter_detections(
      {diagonal_operator({0.5, 0.5, 0.0}), diagonal_operator({2.0, 2.0, 0.0}), pair_projector(3, 0, 1)}, 200, 1);
  EXPECT_EQ(counts[0], counts[1]);
  EXPECT_EQ(counts[0], counts[2]);
  // Same sample stream as the detection table.
  Table1Config t1;
  t1.samples = 200;
  t1.unitaries_per_state = 1;
  EXPECT_EQ(counts[0], run_table1(t1).rows[1].detected);
}

TEST(Simplex, CsvLayout) {
  SimplexConfig cfg;
  cfg.resolution = 2;
  cfg.samples = 5;
  const std::string csv = run_simplex_scan(cfg).to_csv();
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# schema_version=1", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "u,v,a,b,c,rate");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(Multicopy, SeparableStatesAreNeverDetected) {
  MulticopyConfig cfg;
  cfg.samples = 25;
  cfg.separable = true;
  const auto r = run_multicopy(cfg);
  EXPECT_EQ(r.rows[0].detected, 0);
  EXPECT_EQ(r.rows[1].detected, 0);
}

TEST(Multicopy, TwoCopyDominatesOnSmallSample) {
  MulticopyConfig cfg;
  cfg.samples = 40;
  const auto r = run_multicopy(cfg);
  EXPECT_GE(r.rate("multi_copy_det"), r.rate("single_copy_reduction"));
  EXPECT_EQ(r.to_json()["experiment"], r.experiment);
}

TEST(Table2, WitnessesMatchTheirDefinitions) {
  const int d = 3;
  const auto ws = table2_witnesses(d);
  ASSERT_EQ(ws.size(), 4u);
  const Matrix p3 = young_projector(Partition{3}, d).matrix();
  const Matrix p21 = young_projector(Partition{2, 1}, d).matrix();
  const Matrix p111 = young_projector(Partition{1, 1, 1}, d).matrix();
  const Matrix id = Matrix::Identity(27, 27);
  EXPECT_LT(oracle::max_abs_diff(ws[0].op.matrix(), 6.0 * p3 - id), 1e-12);
  EXPECT_LT(oracle::max_abs_diff(ws[1].op.matrix(), p3 - p21 / 4.0), 1e-12);
  EXPECT_LT(oracle::max_abs_diff(ws[2].op.matrix(), p21 / 4.0 - p111), 1e-12);
  EXPECT_LT(oracle::max_abs_diff(ws[3].op.matrix(), id - 6.0 * p111), 1e-12);
}

TEST(Table2, QubitColumnCertificates) {
  Table2Config cfg;
  cfg.dims = {2};
  const auto cells = run_table2(cfg);
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[0].profile.label(), "1");
  // P_111 vanishes on qubits, leaving positive operators.
  EXPECT_EQ(cells[2].profile.label(), "PSD");
  EXPECT_EQ(cells[3].profile.label(), "PSD");
  const auto ws = table2_witnesses(2);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& prof = cells[c].profile;
    for (std::size_t t = 0; t < prof.results.size(); ++t) {
      if (!prof.results[t].detected) continue;
      const auto cert = verify_certificate(ws[c].op, prof.results[t].state, prefix_transpose_sets(static_cast<int>(t)));
      EXPECT_LT(cert.value, 0.0);
      for (double r : cert.residuals) EXPECT_GE(r, -1e-10);
    }
  }
  const std::string csv = table2_to_csv(cells);
  EXPECT_NE(csv.find("witness,d,max_t,values"), std::string::npos);
  EXPECT_NE(csv.find("1-3!P_111,2,PSD,"), std::string::npos);
}

TEST(Young, JsonDump) {
  const json j = young_projectors_json(3, 2);
  ASSERT_EQ(j["projectors"].size(), 3u);
  double total = 0.0;
  for (const auto& p : j["projectors"]) {
    total += p["trace"].get<double>();
    const bool anti = p["partition"] == std::vector<int>{1, 1, 1};
    EXPECT_EQ(p["vanishes"].get<bool>(), anti);
  }
  EXPECT_NEAR(total, 8.0, 1e-12);
  EXPECT_EQ(j["factor_dims"], (std::vector<int>{2, 2, 2}));
}

TEST(Obs3, ContractedWitnessAgainstExplicitPartialTrace) {
  // Factors of the uncontracted operator: A1 A2 A3 B1 B2 B3.
  const Dims big(6, 3);
  const Matrix w = projector_combination(3, 3, {{Partition{2, 1}, 0.25}, {Partition{1, 1, 1}, -1.0}}).matrix();
  const Matrix p = young_projector(Partition{1, 1, 1}, 3).matrix();
  const Matrix tau = maximally_entangled_state(3).matrix();
  const Matrix full = oracle::embed(w, {0, 1, 2}, big) * oracle::embed(p, {3, 4, 5}, big) *
                      oracle::embed(tau, {2, 5}, big);
  const Matrix expect = oracle::partial_trace(full, big, {0, 1, 3, 4});
  EXPECT_LT(oracle::max_abs_diff(contracted_local_ppt_witness(maximally_entangled_state(3)).matrix(), expect), 1e-12);
}

TEST(Cli, DeterministicOutputAndErrors) {
  const auto a = temp_file("a.json"), b = temp_file("b.json");
  ASSERT_EQ(run_cli("table1 --n 12 --unitaries 1 --seed 9 --out " + a.string()), 0);
  {
    ThreadEnv env("2");
    ASSERT_EQ(run_cli("table1 --n 12 --unitaries 1 --seed 9 --out " + b.string()), 0);
  }
  EXPECT_EQ(slurp(a), slurp(b));
  const json j = json::parse(slurp(a));
  EXPECT_EQ(j["samples"], 12);
  EXPECT_EQ(j["rows"].size(), 6u);

  const auto y = temp_file("young.json");
  ASSERT_EQ(run_cli("young --k 2 --d 2 --dump " + y.string()), 0);
  EXPECT_EQ(json::parse(slurp(y))["projectors"].size(), 2u);

  EXPECT_NE(run_cli("table1 --d 9"), 0);
  EXPECT_NE(run_cli("nonsense"), 0);
  for (const auto& p : {a, b, y}) std::filesystem::remove(p);
}
