#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"

using namespace immwit;

namespace {

Vector phi_plus(int d) {
  Vector v = Vector::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0;
  return v / std::sqrt(static_cast<double>(d));
}

void expect_feasible(const SolverResult& r, const MultiOperator& w, const std::vector<FactorSet>& sets) {
  const Certificate c = verify_certificate(w, r.state, sets);
  EXPECT_LT(c.trace_error, 1e-12);
  for (double res : c.residuals) EXPECT_GE(res, -1e-12);
  EXPECT_NEAR(c.value, r.value, 1e-15);
  ASSERT_EQ(r.residuals.size(), sets.size() + 1);
}

}  // namespace

TEST(Simplex, ProjectionCases) {
  RealVector v(3);
  v << 0.2, 0.3, 0.5;
  EXPECT_LT((detail::project_to_simplex(v) - v).cwiseAbs().maxCoeff(), 1e-15);
  v << 2.0, 0.0, -1.0;
  RealVector expect(3);
  expect << 1.0, 0.0, 0.0;
  EXPECT_LT((detail::project_to_simplex(v) - expect).cwiseAbs().maxCoeff(), 1e-15);
  v << 0.5, 0.5, 0.5;
  EXPECT_LT((detail::project_to_simplex(v).array() - 1.0 / 3.0).abs().maxCoeff(), 1e-15);
}

TEST(Simplex, ProjectionIsNearestPoint) {
  RandomSource rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    RealVector v(4);
    for (int i = 0; i < 4; ++i) v(i) = 2.0 * rng.normal();
    const RealVector p = detail::project_to_simplex(v);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
    // Optimality: <v - p, q - p> <= 0 for simplex vertices q.
    for (int j = 0; j < 4; ++j) {
      RealVector q = RealVector::Zero(4);
      q(j) = 1.0;
      EXPECT_LE((v - p).dot(q - p), 1e-12);
    }
  }
}

TEST(Spectraplex, ProjectionIsTraceOnePsd) {
  RandomSource rng(72);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix g = rng.ginibre_matrix(6, 6);
    const Matrix p = detail::project_to_spectraplex(g + g.adjoint());
    EXPECT_NEAR(p.trace().real(), 1.0, 1e-12);
    EXPECT_GE(oracle::min_eig(p), -1e-12);
    const Matrix q = detail::project_to_psd(g + g.adjoint());
    EXPECT_GE(oracle::min_eig(q), -1e-12);
  }
}

TEST(SpectralNorm, LargestAbsoluteEigenvalue) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = -4.0;
  m(1, 1) = 2.0;
  EXPECT_NEAR(spectral_norm(MultiOperator(m)), 4.0, 1e-15);
  EXPECT_NEAR(spectral_norm(MultiOperator(oracle::swap_operator(3), {3, 3})), 1.0, 1e-14);
}

TEST(Solver, UnconstrainedMinimumIsLowestEigenvalue) {
  RandomSource rng(73);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix g = rng.ginibre_matrix(8, 8);
    const MultiOperator w(Matrix((g + g.adjoint()) / 2.0), {2, 4});
    const auto r = minimize_over_ppt_set(PptProblem{w, {}, "random"});
    EXPECT_NEAR(r.value, min_eigenvalue(w), 1e-7);
    expect_feasible(r, w, {});
    EXPECT_TRUE(r.detected);
  }
}

TEST(Solver, DecomposableWitnessIsNeverViolatedUnderPpt) {
  for (int d = 2; d <= 3; ++d) {
    const auto flip = projector_onto(phi_plus(d), Dims{d, d});
    const auto w = partial_transpose(flip, {0});
    const auto free = minimize_over_ppt_set(PptProblem{w, {}, "flip"});
    EXPECT_NEAR(free.value, min_eigenvalue(w), 1e-7);
    EXPECT_TRUE(free.detected);
    for (const FactorSet& s : {FactorSet{0}, FactorSet{1}}) {
      const auto r = minimize_over_ppt_set(PptProblem{w, {s}, "flip"});
      EXPECT_GE(r.value, -1e-12);
      EXPECT_FALSE(r.detected);
      expect_feasible(r, w, {s});
    }
  }
}

TEST(Solver, SwapWitnessProfile) {
  for (int d = 2; d <= 3; ++d) {
    const auto swap = build_witness(MapSpec(ImmanantCoefficients(2, {1.0, -1.0})), 2, d).op;
    const auto profile = max_t_detectable(swap, {}, true);
    EXPECT_FALSE(profile.positive_operator);
    EXPECT_EQ(profile.max_t, 0);
    EXPECT_EQ(profile.label(), "0");
    ASSERT_EQ(profile.results.size(), 3u);
    EXPECT_NEAR(profile.results[0].value, -1.0, 1e-7);
    EXPECT_FALSE(profile.results[1].detected);
    EXPECT_FALSE(profile.results[2].detected);
  }
}

TEST(Solver, PositiveOperatorIsLabelled) {
  const auto p = young_projector(Partition{2, 1}, 2);
  const auto profile = max_t_detectable(p);
  EXPECT_TRUE(profile.positive_operator);
  EXPECT_EQ(profile.label(), "PSD");
  EXPECT_TRUE(profile.results.empty());
}

TEST(Solver, AntisymmetrizerWitnessNeedsOnePartialTranspose) {
  const auto w = projector_combination(3, 3, {{Partition{1, 1, 1}, -6.0}}, 1.0);
  const auto profile = max_t_detectable(w);
  EXPECT_EQ(profile.max_t, 1);
  ASSERT_GE(profile.results.size(), 3u);
  const auto sets = prefix_transpose_sets(1);
  expect_feasible(profile.results[1], w, sets);
  EXPECT_LT(profile.results[1].value, -1e-6 * spectral_norm(w));
  EXPECT_FALSE(profile.results[2].detected);
}

TEST(Solver, StandardMinusAntisymmetricSurvivesTwoTransposes) {
  const auto w = projector_combination(3, 3, {{Partition{2, 1}, 0.25}, {Partition{1, 1, 1}, -1.0}});
  const auto sets = prefix_transpose_sets(2);
  const auto r = minimize_over_ppt_set(PptProblem{w, sets, "w"});
  EXPECT_TRUE(r.detected);
  expect_feasible(r, w, sets);
  // Direct re-evaluation of the certified value.
  EXPECT_NEAR((w.matrix() * r.state.matrix()).trace().real(), r.value, 1e-14);
}

TEST(Solver, RespectsIterationBudget) {
  const auto w = projector_combination(3, 2, {{Partition{2, 1}, -1.0}}, 0.5);
  SolverOptions opts;
  opts.max_iter = 3;
  const auto r = minimize_over_ppt_set(PptProblem{w, prefix_transpose_sets(1), "w"}, opts);
  EXPECT_LE(r.iterations, 3);
  EXPECT_EQ(r.status, SolverStatus::kIterationLimit);
  expect_feasible(r, w, prefix_transpose_sets(1));
  EXPECT_STREQ(status_name(SolverStatus::kConverged), "converged");
}

TEST(Solver, RejectsInvalidProblems) {
  Matrix m = Matrix::Identity(4, 4);
  m(0, 1) = 1.0;
  EXPECT_THROW(minimize_over_ppt_set(PptProblem{MultiOperator(m, {2, 2}), {}, "x"}), std::invalid_argument);
  EXPECT_THROW(minimize_over_ppt_set(PptProblem{MultiOperator::identity({2, 2}), {{2}}, "x"}), std::out_of_range);
}

TEST(Solver, PrefixSets) {
  EXPECT_TRUE(prefix_transpose_sets(0).empty());
  EXPECT_EQ(prefix_transpose_sets(3), (std::vector<FactorSet>{{0}, {1}, {2}}));
}

TEST(Solver, LocalPptSearchOnSwapFindsNothing) {
  const auto swap = build_witness(MapSpec(ImmanantCoefficients(2, {1.0, -1.0})), 2, 2).op;
  const auto r = find_local_ppt_violation(swap);
  EXPECT_FALSE(r.detected);
  EXPECT_EQ(r.residuals.size(), 3u);
  for (double res : r.residuals) EXPECT_GE(res, -1e-12);
}
