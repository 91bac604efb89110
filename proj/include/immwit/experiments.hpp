#pragma once

// Seeded Monte-Carlo and optimization studies: detection rates of filtered
// reduction maps on Ginibre states, the filter simplex scan, the two-copy
// antisymmetrizer criterion, the PPT-constrained witness table and the
// locally-PPT certificate for the contracted four-qutrit witness.
//
// Sample i of a run always draws from RandomSource::derived(seed, i), so
// results do not depend on the number of worker threads.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "immwit/io.hpp"
#include "immwit/linalg.hpp"
#include "immwit/maps.hpp"
#include "immwit/optimizer.hpp"
#include "immwit/random.hpp"
#include "immwit/symgroup.hpp"

namespace immwit {

inline constexpr int kReportSchemaVersion = 1;

// Worker count from IMMWIT_THREADS, else the hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("IMMWIT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs body(i) for i in [0, count) on `threads` workers; each worker takes a
// contiguous block of indices.
inline void parallel_for(long count, int threads, const std::function<void(long)>& body) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<long>(count, 1))));
  if (threads == 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const long chunk = (count + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        const long begin = w * chunk;
        const long end = std::min(count, begin + chunk);
        for (long i = begin; i < end; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline MultiOperator diagonal_operator(const std::vector<double>& diag) {
  const long n = static_cast<long>(diag.size());
  Matrix m = Matrix::Zero(n, n);
  for (long i = 0; i < n; ++i) m(i, i) = diag[i];
  return MultiOperator(std::move(m));
}

// diag with ones at a and b.
inline MultiOperator pair_projector(int d, int a, int b) {
  std::vector<double> diag(d, 0.0);
  diag[a] = 1.0;
  diag[b] = 1.0;
  return diagonal_operator(diag);
}

inline ImmanantCoefficients reduction_coefficients() { return determinant_coefficients(2); }

struct DetectionRow {
  std::string label;
  long detected = 0;
};

struct DetectionReport {
  std::string experiment;
  json config;
  long samples = 0;
  std::vector<DetectionRow> rows;
  // flags[r][i]: sample i detected by row r.
  std::vector<std::vector<char>> flags;
  // Optional per-trial minimum eigenvalues, keyed by row label.
  std::vector<std::pair<std::string, std::vector<double>>> min_eigenvalues;

  double rate(const std::string& label) const {
    for (const auto& r : rows) {
      if (r.label == label) return static_cast<double>(r.detected) / static_cast<double>(samples);
    }
    throw std::out_of_range("DetectionReport: no row '" + label + "'");
  }

  const std::vector<char>& flags_of(const std::string& label) const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].label == label) return flags[i];
    }
    throw std::out_of_range("DetectionReport: no row '" + label + "'");
  }

  json to_json(bool with_trials = false) const {
    json j = {{"schema_version", kReportSchemaVersion}, {"experiment", experiment}, {"config", config},
              {"samples", samples}};
    json rs = json::array();
    for (const auto& r : rows) {
      rs.push_back({{"label", r.label}, {"detected", r.detected},
                    {"rate", static_cast<double>(r.detected) / static_cast<double>(samples)}});
    }
    j["rows"] = rs;
    if (with_trials) {
      json trials = json::object();
      for (const auto& [label, values] : min_eigenvalues) trials[label] = values;
      j["min_eigenvalues"] = trials;
    }
    return j;
  }
};

// ---------------------------------------------------------------------------
// Ginibre detection table

struct Table1Config {
  int d = 3;
  long samples = 2000;
  std::uint64_t seed = 1;
  // Haar unitary pairs tried per state; 0 selects 10 d.
  int unitaries_per_state = 0;
  bool dump_trials = false;

  int unitaries() const { return unitaries_per_state > 0 ? unitaries_per_state : 10 * d; }
};

inline const std::vector<std::string>& table1_labels() {
  static const std::vector<std::string> labels = {"ppt",          "filter_A",          "filter_A_or_B",
                                                  "pairs_A_or_B", "pairs_haar_A_or_B", "reduction"};
  return labels;
}

inline DetectionReport run_table1(const Table1Config& config) {
  const int d = config.d;
  if (d < 2 || d > 6) throw std::out_of_range("run_table1: d must lie in [2, 6]");
  if (config.samples < 1) throw std::invalid_argument("run_table1: need at least one sample");

  const FilteredMap reduction(MapSpec(reduction_coefficients()), d);
  std::vector<FilteredMap> pairs;
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) pairs.emplace_back(MapSpec(reduction_coefficients(), pair_projector(d, a, b)), d);
  }
  const FilteredMap& first_pair = pairs.front();  // diag(1,1,0,...,0)
  const int unitaries = config.unitaries();

  const auto& labels = table1_labels();
  const long n = config.samples;
  std::vector<std::vector<char>> flags(labels.size(), std::vector<char>(n, 0));
  std::vector<double> ppt_min(n), filter_min(n), reduction_min(n);

  auto detects = [](const FilteredMap& map, const MultiOperator& rho, int side) {
    return is_negative(map.apply_to_subsystem(rho, {side}));
  };
  auto any_pair = [&](const MultiOperator& rho) {
    for (const auto& p : pairs) {
      if (detects(p, rho, 0) || detects(p, rho, 1)) return true;
    }
    return false;
  };

  parallel_for(n, thread_count(), [&](long i) {
    RandomSource rng = RandomSource::derived(config.seed, static_cast<std::uint64_t>(i));
    const MultiOperator rho = ginibre_state({d, d}, rng);

    const MultiOperator pt = partial_transpose(rho, {0});
    ppt_min[i] = min_eigenvalue(pt);
    flags[0][i] = is_negative(pt);

    const MultiOperator on_a = first_pair.apply_to_subsystem(rho, {0});
    filter_min[i] = min_eigenvalue(on_a);
    const bool a_only = is_negative(on_a);
    flags[1][i] = a_only;
    const bool a_or_b = a_only || detects(first_pair, rho, 1);
    flags[2][i] = a_or_b;
    const bool all_pairs = a_or_b || any_pair(rho);
    flags[3][i] = all_pairs;

    bool haar = all_pairs;
    for (int u = 0; u < unitaries && !haar; ++u) {
      const MultiOperator ua = haar_unitary(d, rng);
      const MultiOperator ub = haar_unitary(d, rng);
      const Matrix local = kron(ua.matrix(), ub.matrix());
      const MultiOperator rotated(local * rho.matrix() * local.adjoint(), rho.dims());
      haar = any_pair(MultiOperator(rotated.hermitian_part(), rho.dims()));
    }
    flags[4][i] = haar;

    const MultiOperator red = reduction.apply_to_subsystem(rho, {0});
    reduction_min[i] = min_eigenvalue(red);
    flags[5][i] = is_negative(red);
  });

  DetectionReport report;
  report.experiment = "table1";
  report.config = {{"d", d}, {"n", n}, {"seed", config.seed}, {"unitaries_per_state", unitaries},
                   {"filter", "diag(1,1,0,...,0)"}, {"unitaries", "fresh per state"}};
  report.samples = n;
  for (std::size_t r = 0; r < labels.size(); ++r) {
    long count = 0;
    for (char f : flags[r]) count += f;
    report.rows.push_back({labels[r], count});
  }
  report.flags = std::move(flags);
  if (config.dump_trials) {
    report.min_eigenvalues = {{"ppt", ppt_min}, {"filter_A", filter_min}, {"reduction", reduction_min}};
  }
  return report;
}

// ---------------------------------------------------------------------------
// Filter simplex scan, E = diag(a, b, c) with a + b + c = 1

struct SimplexConfig {
  // Nodes per simplex edge.
  int resolution = 43;
  long samples = 2000;
  std::uint64_t seed = 1;
};

struct SimplexNode {
  double a, b, c;
  long detected = 0;
  double u() const { return (a - b + 1.0) / 2.0; }
  double v() const { return c; }
};

struct SimplexScan {
  SimplexConfig config;
  std::vector<SimplexNode> nodes;

  double rate(std::size_t i) const { return static_cast<double>(nodes[i].detected) / static_cast<double>(config.samples); }

  std::string to_csv() const {
    std::ostringstream os;
    os << "# schema_version=" << kReportSchemaVersion << " experiment=simplex resolution=" << config.resolution
       << " n=" << config.samples << " seed=" << config.seed << '\n';
    os << "u,v,a,b,c,rate\n";
    char line[256];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& nd = nodes[i];
      std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", nd.u(), nd.v(), nd.a, nd.b, nd.c, rate(i));
      os << line;
    }
    return os.str();
  }
};

inline std::vector<SimplexNode> simplex_grid(int resolution) {
  if (resolution < 2) throw std::invalid_argument("simplex_grid: resolution must be at least 2");
  std::vector<SimplexNode> nodes;
  const int m = resolution - 1;
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; i + j <= m; ++j) {
      const int l = m - i - j;
      nodes.push_back({static_cast<double>(i) / m, static_cast<double>(j) / m, static_cast<double>(l) / m, 0});
    }
  }
  return nodes;
}

// Detection counts of (Psi^E_(0,1) (x) id)(rho) over the shared Ginibre sample
// for every filter in `filters`.
inline std::vector<long> count_filter_detections(const std::vector<MultiOperator>& filters, long samples,
                                                 std::uint64_t seed) {
  const int d = 3;
  std::vector<FilteredMap> maps;
  for (const auto& e : filters) maps.emplace_back(MapSpec(reduction_coefficients(), e), d);
  std::vector<std::vector<char>> hit(maps.size(), std::vector<char>(samples, 0));
  parallel_for(samples, thread_count(), [&](long i) {
    RandomSource rng = RandomSource::derived(seed, static_cast<std::uint64_t>(i));
    const MultiOperator rho = ginibre_state({d, d}, rng);
    for (std::size_t m = 0; m < maps.size(); ++m) hit[m][i] = is_negative(maps[m].apply_to_subsystem(rho, {0}));
  });
  std::vector<long> counts(maps.size(), 0);
  for (std::size_t m = 0; m < maps.size(); ++m) {
    for (char h : hit[m]) counts[m] += h;
  }
  return counts;
}

inline SimplexScan run_simplex_scan(const SimplexConfig& config) {
  if (config.samples < 1) throw std::invalid_argument("run_simplex_scan: need at least one sample");
  SimplexScan scan{config, simplex_grid(config.resolution)};
  std::vector<MultiOperator> filters;
  for (const auto& nd : scan.nodes) filters.push_back(diagonal_operator({nd.a, nd.b, nd.c}));
  const auto counts = count_filter_detections(filters, config.samples, config.seed);
  for (std::size_t i = 0; i < scan.nodes.size(); ++i) scan.nodes[i].detected = counts[i];
  return scan;
}

// ---------------------------------------------------------------------------
// Single-copy reduction criterion vs. two-copy antisymmetrizer criterion

struct MulticopyConfig {
  long samples = 1000;
  std::uint64_t seed = 1;
  int d = 3;
  int copies_k = 3;
  // Replace Ginibre states by random separable mixtures (sanity runs).
  bool separable = false;
};

inline DetectionReport run_multicopy(const MulticopyConfig& config) {
  const int d = config.d;
  if (config.samples < 1) throw std::invalid_argument("run_multicopy: need at least one sample");
  long budget = d;
  for (int c = 0; c < config.copies_k - 1; ++c) budget *= static_cast<long>(d) * d;
  require_budget(budget, "run_multicopy");
  const FilteredMap reduction(MapSpec(reduction_coefficients()), d);
  const long n = config.samples;
  std::vector<std::vector<char>> flags(2, std::vector<char>(n, 0));
  std::vector<double> single_min(n), multi_min(n);
  parallel_for(n, thread_count(), [&](long i) {
    RandomSource rng = RandomSource::derived(config.seed, static_cast<std::uint64_t>(i));
    const MultiOperator rho = config.separable ? random_separable_state({d, d}, 2 * d * d, rng) : ginibre_state({d, d}, rng);
    const MultiOperator single = reduction.apply_to_subsystem(rho, {0});
    const MultiOperator multi = apply_multicopy_det_map(rho, config.copies_k);
    single_min[i] = min_eigenvalue(single);
    multi_min[i] = min_eigenvalue(multi);
    flags[0][i] = is_negative(single);
    flags[1][i] = is_negative(multi);
  });
  DetectionReport report;
  report.experiment = "multicopy";
  report.config = {{"d", d}, {"n", n}, {"seed", config.seed}, {"k", config.copies_k},
                   {"ensemble", config.separable ? "separable" : "ginibre"}};
  report.samples = n;
  const std::vector<std::string> labels = {"single_copy_reduction", "multi_copy_det"};
  for (std::size_t r = 0; r < 2; ++r) {
    long count = 0;
    for (char f : flags[r]) count += f;
    report.rows.push_back({labels[r], count});
  }
  report.flags = std::move(flags);
  report.min_eigenvalues = {{labels[0], single_min}, {labels[1], multi_min}};
  return report;
}

// ---------------------------------------------------------------------------
// PPT-constrained witness table

struct NamedWitness {
  std::string id;
  MultiOperator op;
};

// The four three-qudit projector witnesses of the table, at local dimension d.
inline std::vector<NamedWitness> table2_witnesses(int d) {
  const Partition sym{3}, std21{2, 1}, anti{1, 1, 1};
  return {
      {"3!P_3-1", projector_combination(3, d, {{sym, 6.0}}, -1.0)},
      {"P_3-P_21/4", projector_combination(3, d, {{sym, 1.0}, {std21, -0.25}})},
      {"P_21/4-P_111", projector_combination(3, d, {{std21, 0.25}, {anti, -1.0}})},
      {"1-3!P_111", projector_combination(3, d, {{anti, -6.0}}, 1.0)},
  };
}

struct Table2Cell {
  std::string witness_id;
  int d = 0;
  DetectabilityProfile profile;
};

struct Table2Config {
  std::vector<int> dims = {2, 3, 4, 5};
  SolverOptions solver;
  // Solve every t instead of stopping at the first undetectable one.
  bool all_t = false;
};

inline std::vector<Table2Cell> run_table2(const Table2Config& config = {}) {
  std::vector<Table2Cell> cells;
  for (int d : config.dims) {
    for (auto& w : table2_witnesses(d)) cells.push_back({w.id, d, {}});
  }
  // Cells are independent solver runs.
  std::vector<NamedWitness> ops;
  for (const auto& c : cells) {
    for (auto& w : table2_witnesses(c.d)) {
      if (w.id == c.witness_id) ops.push_back(std::move(w));
    }
  }
  parallel_for(static_cast<long>(cells.size()), thread_count(), [&](long i) {
    cells[i].profile = max_t_detectable(ops[i].op, config.solver, config.all_t);
  });
  return cells;
}

inline std::string table2_to_csv(const std::vector<Table2Cell>& cells) {
  std::ostringstream os;
  os << "# schema_version=" << kReportSchemaVersion << " experiment=table2\n";
  os << "witness,d,max_t,values\n";
  char buf[64];
  for (const auto& c : cells) {
    os << c.witness_id << ',' << c.d << ',' << c.profile.label() << ',';
    for (std::size_t t = 0; t < c.profile.results.size(); ++t) {
      std::snprintf(buf, sizeof buf, "%.9f", c.profile.results[t].value);
      os << (t ? ";" : "") << buf;
    }
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Four-qutrit contracted witness and its locally-PPT certificate

inline MultiOperator maximally_entangled_state(int d) {
  Vector v = Vector::Zero(static_cast<long>(d) * d);
  for (int i = 0; i < d; ++i) v(static_cast<long>(i) * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return projector_onto(v, {d, d});
}

// tr_{A3 B3}(W_{A123} (x) P_{B123} . 1 (x) tau_{A3 B3}) with
// W = P_21/4 - P_111, P = P_111 on qutrits. Factors: A1 A2 B1 B2.
inline MultiOperator contracted_local_ppt_witness(const MultiOperator& tau) {
  const int d = 3;
  const MultiOperator w = projector_combination(3, d, {{Partition{2, 1}, 0.25}, {Partition{1, 1, 1}, -1.0}});
  const MultiOperator m = young_projector(Partition{1, 1, 1}, d);
  return contract_witnesses(std::vector<MultiOperator>{w, m}, tau);
}

struct Obs3Config {
  SolverOptions solver;
  std::uint64_t seed = 0;
};

struct Obs3Certificate {
  SolverResult result;
  double witness_norm = 0.0;
  double threshold = 0.0;
  std::vector<FactorSet> constraints;
  // tr(W' X) for the same X with tau replaced by 1/9; reported only.
  double mixed_tau_value = 0.0;
  std::uint64_t seed = 0;

  bool valid() const {
    if (result.value >= -threshold) return false;
    for (double r : result.residuals) {
      if (r < -1e-7) return false;
    }
    return std::abs(result.state.trace() - cplx(1.0)) <= 1e-8;
  }

  json to_json() const {
    json cons = json::array();
    for (const auto& s : constraints) cons.push_back(s);
    return {{"schema_version", kReportSchemaVersion},
            {"witness_id", "tr_A3B3[(P_21/4-P_111)_A (x) (P_111)_B . phi+_A3B3], d=3"},
            {"constraints", cons},
            {"value", result.value},
            {"threshold", -threshold},
            {"witness_norm", witness_norm},
            {"detected", valid()},
            {"status", status_name(result.status)},
            {"iterations", result.iterations},
            {"residuals", result.residuals},
            {"mixed_tau_value", mixed_tau_value},
            {"seed", seed},
            {"X", matrix_to_json(result.state.matrix())}};
  }
};

inline Obs3Certificate run_obs3_certificate(const Obs3Config& config = {}) {
  const MultiOperator w_tau = contracted_local_ppt_witness(maximally_entangled_state(3));
  Obs3Certificate cert;
  cert.result = find_local_ppt_violation(w_tau, config.solver);
  cert.witness_norm = spectral_norm(w_tau);
  cert.threshold = config.solver.detection_threshold * cert.witness_norm;
  for (int f = 0; f < 4; ++f) cert.constraints.push_back({f});
  // Independent re-evaluation from the stored state.
  const Certificate check = verify_certificate(w_tau, cert.result.state, cert.constraints);
  cert.result.value = check.value;
  cert.result.residuals = check.residuals;
  const MultiOperator mixed = contracted_local_ppt_witness(MultiOperator::identity({3, 3}) * (1.0 / 9.0));
  cert.mixed_tau_value = (mixed.matrix() * cert.result.state.matrix()).trace().real();
  cert.seed = config.seed;
  return cert;
}

// ---------------------------------------------------------------------------
// Young projector dump

inline json young_projectors_json(int k, int d) {
  json list = json::array();
  for (const auto& lambda : partitions_of(k)) {
    const MultiOperator p = young_projector(lambda, d);
    list.push_back({{"partition", lambda.parts()},
                    {"character_id", irrep_dimension(lambda)},
                    {"vanishes", p.max_abs() < kZeroProjectorTolerance},
                    {"trace", p.trace().real()},
                    {"entries", matrix_to_json(p.matrix())}});
  }
  return {{"schema_version", kReportSchemaVersion}, {"k", k}, {"d", d}, {"factor_dims", Dims(k, d)},
          {"projectors", list}};
}

}  // namespace immwit
