#pragma once

// Seeded sampling of random states and unitaries.

#include <cstdint>
#include <random>

#include "immwit/linalg.hpp"

namespace immwit {

// Owns one Mersenne-Twister stream. Not thread-safe; give each worker its own.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  // Independent stream for item `index` of a batch seeded with `base`.
  static RandomSource derived(std::uint64_t base, std::uint64_t index) {
    return RandomSource(splitmix64(base ^ splitmix64(index + 0x9E3779B97F4A7C15ULL)));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  double normal() {
    ++draws_;
    return normal_(engine_);
  }

  double uniform() {
    ++draws_;
    return uniform_(engine_);
  }

  // Standard complex Gaussian: real and imaginary parts N(0, 1/2).
  cplx complex_normal() {
    constexpr double s = 0.70710678118654752440;
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

  Matrix ginibre_matrix(long rows, long cols) {
    Matrix g(rows, cols);
    for (long i = 0; i < rows; ++i) {
      for (long j = 0; j < cols; ++j) g(i, j) = complex_normal();
    }
    return g;
  }

  Vector complex_vector(long n) {
    Vector v(n);
    for (long i = 0; i < n; ++i) v(i) = complex_normal();
    return v;
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t draws_ = 0;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// rho = G G^dagger / tr(G G^dagger) with square complex-Gaussian G.
inline MultiOperator ginibre_state(const Dims& dims, RandomSource& rng) {
  const long n = dims_product(dims);
  require_budget(n, "ginibre_state");
  const Matrix g = rng.ginibre_matrix(n, n);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return {(rho + rho.adjoint()) / 2.0, dims};
}

// Haar-distributed unitary: QR of a Ginibre matrix with the phases of R's
// diagonal absorbed into Q.
inline MultiOperator haar_unitary(int d, RandomSource& rng) {
  if (d < 1) throw std::invalid_argument("haar_unitary: dimension must be positive");
  const Matrix g = rng.ginibre_matrix(d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    const cplx rjj = r(j, j);
    const double mod = std::abs(rjj);
    const cplx phase = mod > 0.0 ? rjj / mod : cplx(1.0);
    q.col(j) *= phase;
  }
  return MultiOperator(std::move(q));
}

inline Vector random_unit_vector(long n, RandomSource& rng) {
  Vector v = rng.complex_vector(n);
  return v / v.norm();
}

inline MultiOperator random_pure_state(int d, RandomSource& rng) {
  const Vector v = random_unit_vector(d, rng);
  return projector_onto(v, Dims{d});
}

// Random fully separable state: a mixture of `terms` products of random pure
// states, one per factor.
inline MultiOperator random_separable_state(const Dims& dims, int terms, RandomSource& rng) {
  MultiOperator out = MultiOperator::zero(dims);
  double total = 0.0;
  for (int t = 0; t < terms; ++t) {
    MultiOperator prod = random_pure_state(dims[0], rng);
    for (std::size_t f = 1; f < dims.size(); ++f) prod = tensor_product(prod, random_pure_state(dims[f], rng));
    const double w = rng.uniform() + 1e-3;
    out += w * prod;
    total += w;
  }
  out *= 1.0 / total;
  return out;
}

}  // namespace immwit
