// Command-line front end for the detection experiments.
//
//   immwit table1    --d 3 --n 2000 --seed 1 [--paper-scale]
//   immwit simplex   --resolution 43 --n 2000 --seed 1 --out scan.csv
//   immwit multicopy --n 1000 --seed 1
//   immwit table2    --out table2.csv
//   immwit obs3      --out certificate.json
//   immwit young     --k 3 --d 3 --dump projectors.json
//
// Worker threads: IMMWIT_THREADS (defaults to the hardware concurrency).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "immwit/immwit.hpp"

namespace {

constexpr int kExitNoViolation = 3;

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement detection with immanant-inequality maps and witnesses"};
  app.require_subcommand(1);

  immwit::Table1Config t1;
  bool paper_scale = false;
  std::string t1_out;
  auto* table1 = app.add_subcommand("table1", "Detection rates of filtered reduction maps on Ginibre states");
  table1->add_option("--d", t1.d, "Local dimension (2..6)")->check(CLI::Range(2, 6));
  table1->add_option("--n", t1.samples, "Number of sampled states")->check(CLI::PositiveNumber);
  table1->add_option("--seed", t1.seed, "Base seed");
  table1->add_option("--unitaries", t1.unitaries_per_state, "Haar unitary pairs per state (default 10d)");
  table1->add_flag("--paper-scale", paper_scale, "Use 10^4 states and 50d unitaries");
  table1->add_flag("--trials", t1.dump_trials, "Include per-trial minimum eigenvalues");
  table1->add_option("--out", t1_out, "Output JSON path (default stdout)");

  immwit::SimplexConfig sx;
  std::string sx_out;
  auto* simplex = app.add_subcommand("simplex", "Detection rate over diagonal filters diag(a,b,c), a+b+c=1");
  simplex->add_option("--resolution", sx.resolution, "Grid nodes per simplex edge")->check(CLI::Range(2, 1000));
  simplex->add_option("--n", sx.samples, "Number of sampled states")->check(CLI::PositiveNumber);
  simplex->add_option("--seed", sx.seed, "Base seed");
  simplex->add_option("--out", sx_out, "Output CSV path (default stdout)");

  immwit::MulticopyConfig mc;
  std::string mc_out;
  bool mc_trials = false;
  auto* multicopy = app.add_subcommand("multicopy", "Single-copy reduction vs. two-copy antisymmetrizer criterion");
  multicopy->add_option("--n", mc.samples, "Number of sampled states")->check(CLI::PositiveNumber);
  multicopy->add_option("--seed", mc.seed, "Base seed");
  multicopy->add_option("--k", mc.copies_k, "Inequality size k (k-1 copies)")->check(CLI::Range(2, 4));
  multicopy->add_flag("--separable", mc.separable, "Sample random separable states instead");
  multicopy->add_flag("--trials", mc_trials, "Include per-trial minimum eigenvalues");
  multicopy->add_option("--out", mc_out, "Output JSON path (default stdout)");

  immwit::Table2Config t2;
  std::string t2_out;
  auto* table2 = app.add_subcommand("table2", "Largest t with a detectable state having t PSD partial transposes");
  table2->add_option("--out", t2_out, "Output CSV path (default stdout)");
  table2->add_option("--max-iter", t2.solver.max_iter, "Solver iteration limit");
  table2->add_flag("--all-t", t2.all_t, "Solve every t, not only up to the first miss");

  immwit::Obs3Config o3;
  std::string o3_out;
  auto* obs3 = app.add_subcommand("obs3", "Locally-PPT four-qutrit state detected by the contracted witness");
  obs3->add_option("--out", o3_out, "Output JSON certificate path (default stdout)");
  obs3->add_option("--max-iter", o3.solver.max_iter, "Solver iteration limit");
  obs3->add_option("--seed", o3.seed, "Recorded in the certificate");

  int yk = 3, yd = 3;
  std::string y_out;
  auto* young = app.add_subcommand("young", "Dump Young projectors for all partitions of k");
  young->add_option("--k", yk, "Number of tensor factors")->check(CLI::Range(1, immwit::kMaxSymmetricDegree));
  young->add_option("--d", yd, "Local dimension")->check(CLI::PositiveNumber);
  young->add_option("--dump", y_out, "Output JSON path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*table1) {
      if (paper_scale) {
        t1.samples = 10000;
        t1.unitaries_per_state = 50 * t1.d;
      }
      const auto report = immwit::run_table1(t1);
      emit(report.to_json(t1.dump_trials).dump(2) + "\n", t1_out);
    } else if (*simplex) {
      emit(immwit::run_simplex_scan(sx).to_csv(), sx_out);
    } else if (*multicopy) {
      emit(immwit::run_multicopy(mc).to_json(mc_trials).dump(2) + "\n", mc_out);
    } else if (*table2) {
      emit(immwit::table2_to_csv(immwit::run_table2(t2)), t2_out);
    } else if (*obs3) {
      const auto cert = immwit::run_obs3_certificate(o3);
      emit(cert.to_json().dump(2) + "\n", o3_out);
      if (!cert.valid()) {
        std::cerr << "no locally-PPT violation found within the iteration budget\n";
        return kExitNoViolation;
      }
    } else if (*young) {
      emit(immwit::young_projectors_json(yk, yd).dump(2) + "\n", y_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
