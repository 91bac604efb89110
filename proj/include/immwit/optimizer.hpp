#pragma once

// Upper-bounding  min { tr(X W) : X >= 0, tr X = 1, X^{T_i} >= 0 for all i }.
//
// The iteration is ADMM on the splitting Y_i = X^{T_i}: the X-step projects
// onto the spectraplex {X >= 0, tr X = 1} and each Y-step onto the PSD cone,
// both by eigenvalue clipping. On exit the iterate is mixed with the
// maximally mixed state just enough to make every partial transpose PSD, and
// the objective is re-evaluated from that X alone. Reported values are
// therefore always attained by a feasible state: the solver can miss a
// violation but never invent one.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "immwit/linalg.hpp"
#include "immwit/maps.hpp"

namespace immwit {

struct PptProblem {
  MultiOperator witness;
  std::vector<FactorSet> transpose_sets;
  std::string witness_id;

  void validate() const {
    if (!witness.is_hermitian()) throw std::invalid_argument("PptProblem: witness is not Hermitian");
    require_budget(witness.size(), "PptProblem");
    for (const auto& s : transpose_sets) detail::check_factor_set(s, witness.num_factors(), "PptProblem");
  }
};

enum class SolverStatus { kConverged, kIterationLimit };

inline const char* status_name(SolverStatus s) {
  return s == SolverStatus::kConverged ? "converged" : "iteration-limit";
}

struct SolverOptions {
  int max_iter = 5000;
  double tol = 1e-8;
  // Relative to the witness spectral norm.
  double detection_threshold = 1e-6;
};

struct SolverResult {
  double value = 0.0;
  MultiOperator state;
  // residuals[0] is lambda_min(X); residuals[i + 1] is lambda_min(X^{T_i}).
  std::vector<double> residuals;
  int iterations = 0;
  SolverStatus status = SolverStatus::kIterationLimit;
  // value < -threshold * ||W||.
  bool detected = false;
};

inline double spectral_norm(const MultiOperator& w) {
  const RealVector ev = eigenvalues(w);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

namespace detail {

// Euclidean projection of a real vector onto the probability simplex.
inline RealVector project_to_simplex(const RealVector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.rbegin(), u.rend());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0).matrix();
}

inline Matrix project_to_spectraplex(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
  const RealVector lam = project_to_simplex(es.eigenvalues());
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix project_to_psd(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
  const RealVector lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

inline Matrix pt(const Matrix& m, const Dims& dims, const FactorSet& set) {
  return partial_transpose(MultiOperator(m, dims), set).matrix();
}

}  // namespace detail

struct Certificate {
  double value = 0.0;
  std::vector<double> residuals;
  double trace_error = 0.0;
};

// Re-evaluates a candidate state from scratch: objective, PSD residuals and
// trace, independent of how the state was found.
inline Certificate verify_certificate(const MultiOperator& witness, const MultiOperator& state,
                                      const std::vector<FactorSet>& transpose_sets) {
  Certificate c;
  c.value = (witness.matrix() * state.matrix()).trace().real();
  c.residuals.push_back(min_eigenvalue(state));
  for (const auto& s : transpose_sets) c.residuals.push_back(min_eigenvalue(partial_transpose(state, s)));
  c.trace_error = std::abs(state.trace() - cplx(1.0));
  return c;
}

inline SolverResult minimize_over_ppt_set(const PptProblem& problem, const SolverOptions& options = {}) {
  problem.validate();
  const MultiOperator& w = problem.witness;
  const Dims& dims = w.dims();
  const long n = w.size();
  const double scale = spectral_norm(w);
  const Matrix wn = scale > 0.0 ? Matrix(w.hermitian_part() / scale) : Matrix(Matrix::Zero(n, n));
  const auto& sets = problem.transpose_sets;
  const int t = static_cast<int>(sets.size());

  Matrix x = Matrix::Identity(n, n) / static_cast<double>(n);
  SolverResult result;
  int it = 0;
  bool converged = false;

  if (t == 0) {
    // Proximal steps on the spectraplex; converges to a minimal eigenvector mix.
    const double step = 1e3;
    for (it = 1; it <= options.max_iter; ++it) {
      const Matrix next = detail::project_to_spectraplex(x - step * wn);
      const double change = (next - x).norm();
      x = next;
      if (change < options.tol) {
        converged = true;
        break;
      }
    }
  } else {
    std::vector<Matrix> y(t), u(t, Matrix::Zero(n, n));
    for (int i = 0; i < t; ++i) y[i] = detail::pt(x, dims, sets[i]);
    double rho = 1.0;
    for (it = 1; it <= options.max_iter; ++it) {
      Matrix v = Matrix::Zero(n, n);
      for (int i = 0; i < t; ++i) v += detail::pt(y[i] - u[i], dims, sets[i]);
      v = v / static_cast<double>(t) - wn / (rho * t);
      x = detail::project_to_spectraplex(v);

      double primal = 0.0;
      Matrix dual_sum = Matrix::Zero(n, n);
      for (int i = 0; i < t; ++i) {
        const Matrix xt = detail::pt(x, dims, sets[i]);
        const Matrix y_new = detail::project_to_psd(xt + u[i]);
        dual_sum += detail::pt(y_new - y[i], dims, sets[i]);
        y[i] = y_new;
        const Matrix r = xt - y[i];
        u[i] += r;
        primal = std::max(primal, r.norm());
      }
      const double dual = rho * dual_sum.norm();
      if (primal < options.tol && dual < options.tol) {
        converged = true;
        break;
      }
      // Residual balancing keeps both residuals shrinking at similar rates.
      if (primal > 10.0 * dual) {
        rho *= 2.0;
        for (auto& ui : u) ui /= 2.0;
      } else if (dual > 10.0 * primal) {
        rho /= 2.0;
        for (auto& ui : u) ui *= 2.0;
      }
    }
  }

  // Repair: mix with 1/n until every constrained operator is PSD.
  x = (x + x.adjoint()) / 2.0;
  x /= x.trace().real();
  double worst = Eigen::SelfAdjointEigenSolver<Matrix>(x, Eigen::EigenvaluesOnly).eigenvalues()(0);
  for (const auto& s : sets) {
    const Matrix xt = detail::pt(x, dims, s);
    worst = std::min(worst, Eigen::SelfAdjointEigenSolver<Matrix>((xt + xt.adjoint()) / 2.0, Eigen::EigenvaluesOnly)
                                .eigenvalues()(0));
  }
  if (worst < 0.0) {
    // (1-p) worst + p/n >= margin with a small positive margin.
    const double margin = 1e-14;
    const double p = std::min(1.0, (margin - worst) / (1.0 / static_cast<double>(n) - worst));
    x = (1.0 - p) * x + p * Matrix::Identity(n, n) / static_cast<double>(n);
  }

  result.state = MultiOperator(x, dims);
  const Certificate cert = verify_certificate(w, result.state, sets);
  result.value = cert.value;
  result.residuals = cert.residuals;
  result.iterations = std::min(it, options.max_iter);
  result.status = converged ? SolverStatus::kConverged : SolverStatus::kIterationLimit;
  result.detected = result.value < -options.detection_threshold * scale;
  return result;
}

inline std::vector<FactorSet> prefix_transpose_sets(int t) {
  std::vector<FactorSet> sets;
  for (int i = 0; i < t; ++i) sets.push_back({i});
  return sets;
}

struct DetectabilityProfile {
  // Set when the witness has no negative eigenvalue.
  bool positive_operator = false;
  // Largest t whose prefix-PPT minimum is negative; meaningful only when
  // positive_operator is false.
  int max_t = -1;
  // values[t] for every t that was solved, in order.
  std::vector<SolverResult> results;

  std::string label() const { return positive_operator ? "PSD" : std::to_string(max_t); }
};

// Largest t such that some state with PSD partial transposes on factors
// 0..t-1 has negative expectation. Prefix constraints suffice for witnesses
// symmetric under permutations of their factors. With `all_t` every t up to
// the number of factors is solved instead of stopping at the first miss.
inline DetectabilityProfile max_t_detectable(const MultiOperator& w, const SolverOptions& options = {},
                                             bool all_t = false) {
  DetectabilityProfile profile;
  if (!is_negative(w)) {
    profile.positive_operator = true;
    return profile;
  }
  for (int t = 0; t <= w.num_factors(); ++t) {
    PptProblem problem{w, prefix_transpose_sets(t), "prefix-" + std::to_string(t)};
    SolverResult r = minimize_over_ppt_set(problem, options);
    const bool detected = r.detected;
    profile.results.push_back(std::move(r));
    if (detected) profile.max_t = t;
    if (!detected && !all_t) break;
  }
  return profile;
}

// Searches for a state whose every single-factor partial transpose is PSD
// but which the witness detects.
inline SolverResult find_local_ppt_violation(const MultiOperator& w, const SolverOptions& options = {}) {
  std::vector<FactorSet> singletons;
  for (int f = 0; f < w.num_factors(); ++f) singletons.push_back({f});
  return minimize_over_ppt_set(PptProblem{w, singletons, "local-ppt"}, options);
}

}  // namespace immwit
