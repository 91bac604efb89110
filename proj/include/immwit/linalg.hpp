#pragma once

// Dense complex operators on tensor-product spaces.
//
// Composite indices are row-major with factor 0 slowest: for factor
// dimensions (d_0, ..., d_{m-1}) the basis state |i_0 ... i_{m-1}> sits at
// row i_0 * (d_1 ... d_{m-1}) + ... + i_{m-1}. Every routine in the library
// relies on this convention. Factor indices in the API are 0-based.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace immwit {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<int>;
using FactorSet = std::vector<int>;

// Largest total dimension any dense operator may have (4 qudits of d = 4).
inline constexpr long kMaxDimension = 256;

// Relative tolerance used when accepting an operator as Hermitian.
inline constexpr double kHermitianTolerance = 1e-9;
// Scale-relative cutoff below which a minimum eigenvalue counts as negative.
inline constexpr double kNegativityTolerance = 1e-10;

inline long dims_product(const Dims& dims) {
  long p = 1;
  for (int d : dims) p *= d;
  return p;
}

class MultiOperator {
 public:
  MultiOperator() = default;

  MultiOperator(Matrix entries, Dims dims)
      : entries_(std::move(entries)), dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("MultiOperator: empty factor list");
    for (int d : dims_) {
      if (d < 1) throw std::invalid_argument("MultiOperator: factor dimension must be positive");
    }
    const long n = dims_product(dims_);
    if (entries_.rows() != n || entries_.cols() != n) {
      throw std::invalid_argument("MultiOperator: matrix side " + std::to_string(entries_.rows()) + "x" +
                                  std::to_string(entries_.cols()) + " does not match factor product " +
                                  std::to_string(n));
    }
  }

  // Single-factor operator.
  explicit MultiOperator(Matrix entries)
      : MultiOperator(entries, Dims{static_cast<int>(entries.rows())}) {}

  static MultiOperator identity(const Dims& dims) {
    const long n = dims_product(dims);
    return {Matrix::Identity(n, n), dims};
  }

  static MultiOperator zero(const Dims& dims) {
    const long n = dims_product(dims);
    return {Matrix::Zero(n, n), dims};
  }

  const Matrix& matrix() const { return entries_; }
  const Dims& dims() const { return dims_; }
  long size() const { return entries_.rows(); }
  int num_factors() const { return static_cast<int>(dims_.size()); }

  cplx operator()(long i, long j) const { return entries_(i, j); }

  cplx trace() const { return entries_.trace(); }
  double max_abs() const { return entries_.size() == 0 ? 0.0 : entries_.cwiseAbs().maxCoeff(); }

  double hermiticity_defect() const {
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  }
  bool is_hermitian(double rel_tol = kHermitianTolerance) const {
    return hermiticity_defect() <= rel_tol * (1.0 + max_abs());
  }
  Matrix hermitian_part() const { return (entries_ + entries_.adjoint()) / 2.0; }

  MultiOperator adjoint() const { return {entries_.adjoint(), dims_}; }

  MultiOperator& operator+=(const MultiOperator& o) {
    require_same_dims(o);
    entries_ += o.entries_;
    return *this;
  }
  MultiOperator& operator-=(const MultiOperator& o) {
    require_same_dims(o);
    entries_ -= o.entries_;
    return *this;
  }
  MultiOperator& operator*=(cplx s) {
    entries_ *= s;
    return *this;
  }
  MultiOperator& operator*=(double s) {
    entries_ *= s;
    return *this;
  }

  friend MultiOperator operator+(MultiOperator a, const MultiOperator& b) { return a += b; }
  friend MultiOperator operator-(MultiOperator a, const MultiOperator& b) { return a -= b; }
  friend MultiOperator operator*(MultiOperator a, double s) { return a *= s; }
  friend MultiOperator operator*(double s, MultiOperator a) { return a *= s; }
  friend MultiOperator operator*(MultiOperator a, cplx s) { return a *= s; }
  friend MultiOperator operator*(cplx s, MultiOperator a) { return a *= s; }

  // Operator product; factor structures must agree.
  friend MultiOperator operator*(const MultiOperator& a, const MultiOperator& b) {
    a.require_same_dims(b);
    return {a.entries_ * b.entries_, a.dims_};
  }

 private:
  void require_same_dims(const MultiOperator& o) const {
    if (o.dims_ != dims_) throw std::invalid_argument("MultiOperator: factor dimensions differ");
  }

  Matrix entries_;
  Dims dims_;
};

inline void require_budget(long dimension, const char* what) {
  if (dimension > kMaxDimension) {
    throw std::length_error(std::string(what) + ": total dimension " + std::to_string(dimension) +
                            " exceeds the dense budget of " + std::to_string(kMaxDimension));
  }
}

namespace detail {

inline std::vector<long> strides_of(const Dims& dims) {
  std::vector<long> s(dims.size(), 1);
  for (int f = static_cast<int>(dims.size()) - 2; f >= 0; --f) s[f] = s[f + 1] * dims[f + 1];
  return s;
}

inline void check_factor_set(const FactorSet& set, int m, const char* what) {
  std::vector<bool> seen(m, false);
  for (int f : set) {
    if (f < 0 || f >= m) {
      throw std::out_of_range(std::string(what) + ": factor index " + std::to_string(f) + " out of range [0," +
                              std::to_string(m) + ")");
    }
    if (seen[f]) throw std::invalid_argument(std::string(what) + ": repeated factor index");
    seen[f] = true;
  }
}

// Offsets of the composite sub-index over `factors` (in the given order)
// inside the full composite index.
inline std::vector<long> offsets_for(const Dims& dims, const FactorSet& factors) {
  const auto strides = strides_of(dims);
  std::vector<long> out{0};
  for (int f : factors) {
    std::vector<long> next;
    next.reserve(out.size() * dims[f]);
    for (long base : out) {
      for (int i = 0; i < dims[f]; ++i) next.push_back(base + i * strides[f]);
    }
    out = std::move(next);
  }
  return out;
}

inline FactorSet complement_of(const FactorSet& set, int m) {
  std::vector<bool> in(m, false);
  for (int f : set) in[f] = true;
  FactorSet rest;
  for (int f = 0; f < m; ++f) {
    if (!in[f]) rest.push_back(f);
  }
  return rest;
}

inline Dims select_dims(const Dims& dims, const FactorSet& set) {
  Dims out;
  for (int f : set) out.push_back(dims[f]);
  return out;
}

}  // namespace detail

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i) {
    for (long j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

inline MultiOperator tensor_product(const MultiOperator& a, const MultiOperator& b) {
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  require_budget(a.size() * b.size(), "tensor_product");
  return {kron(a.matrix(), b.matrix()), std::move(dims)};
}

inline MultiOperator tensor_power(const MultiOperator& a, int n) {
  if (n < 1) throw std::invalid_argument("tensor_power: exponent must be positive");
  MultiOperator out = a;
  for (int i = 1; i < n; ++i) out = tensor_product(out, a);
  return out;
}

// Traces out every factor not in `keep`. Kept factors appear in ascending order.
inline MultiOperator partial_trace(const MultiOperator& op, FactorSet keep) {
  const int m = op.num_factors();
  detail::check_factor_set(keep, m, "partial_trace");
  std::sort(keep.begin(), keep.end());
  const FactorSet traced = detail::complement_of(keep, m);
  const auto ok = detail::offsets_for(op.dims(), keep);
  const auto ot = detail::offsets_for(op.dims(), traced);
  const long n = static_cast<long>(ok.size());
  Matrix out = Matrix::Zero(n, n);
  const Matrix& x = op.matrix();
  for (long a = 0; a < n; ++a) {
    for (long b = 0; b < n; ++b) {
      cplx s = 0.0;
      for (long t : ot) s += x(ok[a] + t, ok[b] + t);
      out(a, b) = s;
    }
  }
  Dims kept_dims = detail::select_dims(op.dims(), keep);
  if (kept_dims.empty()) kept_dims = {1};
  return {std::move(out), std::move(kept_dims)};
}

inline MultiOperator partial_transpose(const MultiOperator& op, const FactorSet& subsystems) {
  const int m = op.num_factors();
  detail::check_factor_set(subsystems, m, "partial_transpose");
  const FactorSet rest = detail::complement_of(subsystems, m);
  const auto os = detail::offsets_for(op.dims(), subsystems);
  const auto orr = detail::offsets_for(op.dims(), rest);
  const Matrix& x = op.matrix();
  Matrix out(op.size(), op.size());
  for (long s = 0; s < static_cast<long>(os.size()); ++s) {
    for (long sp = 0; sp < static_cast<long>(os.size()); ++sp) {
      for (long r : orr) {
        for (long rp : orr) out(os[s] + r, os[sp] + rp) = x(os[sp] + r, os[s] + rp);
      }
    }
  }
  return {std::move(out), op.dims()};
}

// Reorders tensor factors: factor f of the result is factor perm[f] of `op`.
inline MultiOperator permute_subsystems(const MultiOperator& op, const std::vector<int>& perm) {
  const int m = op.num_factors();
  if (static_cast<int>(perm.size()) != m) throw std::invalid_argument("permute_subsystems: wrong permutation length");
  detail::check_factor_set(perm, m, "permute_subsystems");
  // offsets_for enumerates the composite index in the order of `perm`, which is
  // exactly the new row-major layout.
  const auto map = detail::offsets_for(op.dims(), perm);
  const long n = op.size();
  Matrix out(n, n);
  const Matrix& x = op.matrix();
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) out(i, j) = x(map[i], map[j]);
  }
  return {std::move(out), detail::select_dims(op.dims(), perm)};
}

// Computes tr_T((Q_S (x) 1) X) without materialising Q_S (x) 1, where Q acts on
// the ordered factor list S of X and T is a subset of factors to trace out.
// The result lives on the untraced factors of X in ascending order.
inline MultiOperator apply_local_and_trace(const MultiOperator& q, const FactorSet& on, const MultiOperator& x,
                                           const FactorSet& traced) {
  const int m = x.num_factors();
  detail::check_factor_set(on, m, "apply_local_and_trace");
  detail::check_factor_set(traced, m, "apply_local_and_trace");
  if (q.dims() != detail::select_dims(x.dims(), on)) {
    throw std::invalid_argument("apply_local_and_trace: local operator factors do not match target factors");
  }
  FactorSet kept = detail::complement_of(traced, m);
  // Split X's factors into: S (ordered as `on`) and the remainder R.
  const FactorSet rest = detail::complement_of(on, m);
  const auto off_s = detail::offsets_for(x.dims(), on);
  const auto off_r = detail::offsets_for(x.dims(), rest);
  // Output index decomposes over kept factors; row index of X over the traced
  // factors ranges alongside.
  const auto off_k = detail::offsets_for(x.dims(), kept);
  const auto off_t = detail::offsets_for(x.dims(), traced);
  const auto strides = detail::strides_of(x.dims());

  // For any full index, recover its S-part position and R-part offset.
  const long n = x.size();
  std::vector<long> s_pos(n), r_off(n);
  {
    const Dims sd = detail::select_dims(x.dims(), on);
    for (long idx = 0; idx < n; ++idx) {
      long spos = 0, roff = 0;
      for (std::size_t a = 0; a < on.size(); ++a) {
        const long digit = (idx / strides[on[a]]) % x.dims()[on[a]];
        spos = spos * sd[a] + digit;
      }
      for (int f : rest) roff += ((idx / strides[f]) % x.dims()[f]) * strides[f];
      s_pos[idx] = spos;
      r_off[idx] = roff;
    }
  }
  const Matrix& qm = q.matrix();
  const Matrix& xm = x.matrix();
  const long nk = static_cast<long>(off_k.size());
  Matrix out = Matrix::Zero(nk, nk);
  for (long a = 0; a < nk; ++a) {
    for (long t : off_t) {
      const long row = off_k[a] + t;
      const long qs = s_pos[row];
      const long rr = r_off[row];
      for (long sp = 0; sp < static_cast<long>(off_s.size()); ++sp) {
        const cplx qv = qm(qs, sp);
        if (qv == cplx(0.0)) continue;
        const long xrow = off_s[sp] + rr;
        for (long b = 0; b < nk; ++b) out(a, b) += qv * xm(xrow, off_k[b] + t);
      }
    }
  }
  Dims kd = detail::select_dims(x.dims(), kept);
  if (kd.empty()) kd = {1};
  return {std::move(out), std::move(kd)};
}

inline RealVector eigenvalues(const MultiOperator& op) {
  if (!op.is_hermitian()) {
    throw std::domain_error("eigenvalues: operator is not Hermitian (defect " +
                            std::to_string(op.hermiticity_defect()) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.hermitian_part(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double min_eigenvalue(const MultiOperator& op) { return eigenvalues(op)(0); }

// Negativity verdict used for every "detected" decision in the library.
inline bool is_negative(const MultiOperator& op) {
  const double scale = op.max_abs();
  if (scale == 0.0) return false;
  return min_eigenvalue(op) < -kNegativityTolerance * scale;
}

inline MultiOperator psd_sqrt(const MultiOperator& op, double tol = 1e-9) {
  if (!op.is_hermitian()) throw std::domain_error("psd_sqrt: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(op.hermitian_part());
  const RealVector& ev = es.eigenvalues();
  const double scale = std::max(1.0, op.max_abs());
  if (ev(0) < -tol * scale) {
    throw std::domain_error("psd_sqrt: negative eigenvalue " + std::to_string(ev(0)));
  }
  const RealVector root = ev.cwiseMax(0.0).cwiseSqrt();
  Matrix r = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
  return {(r + r.adjoint()) / 2.0, op.dims()};
}

inline bool is_psd(const MultiOperator& op, double rel_tol = kNegativityTolerance) {
  const double scale = std::max(1.0, op.max_abs());
  return min_eigenvalue(op) >= -rel_tol * scale;
}

inline MultiOperator projector_onto(const Vector& v, const Dims& dims) {
  return {v * v.adjoint(), dims};
}

}  // namespace immwit
