#pragma once

// Symmetric group S_k for small k: partitions, permutations, irreducible
// characters (Murnaghan-Nakayama), permutation operators on (C^d)^{(x)k},
// Young projectors and immanants.

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "immwit/linalg.hpp"

namespace immwit {

inline constexpr int kMaxSymmetricDegree = 6;

class Partition {
 public:
  Partition() = default;
  Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}
  explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    // Trailing zeros as in "[2,1,0]" are accepted and dropped.
    while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
    if (parts_.empty()) throw std::invalid_argument("Partition: no positive parts");
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] <= 0) throw std::invalid_argument("Partition: parts must be positive");
      if (i > 0 && parts_[i] > parts_[i - 1]) throw std::invalid_argument("Partition: parts must be non-increasing");
    }
    k_ = std::accumulate(parts_.begin(), parts_.end(), 0);
  }

  const std::vector<int>& parts() const { return parts_; }
  int k() const { return k_; }
  int rows() const { return static_cast<int>(parts_.size()); }

  std::string str() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < parts_.size(); ++i) os << (i ? "," : "") << parts_[i];
    os << ']';
    return os.str();
  }

  // Parses "[2,1]", "2,1" or "[2,1,0]".
  static Partition parse(const std::string& text) {
    std::vector<int> parts;
    std::string token;
    for (char c : text) {
      if (c >= '0' && c <= '9') {
        token.push_back(c);
      } else if (c == ',' || c == ']' || c == ' ') {
        if (!token.empty()) parts.push_back(std::stoi(token));
        token.clear();
      } else if (c != '[') {
        throw std::invalid_argument("Partition::parse: unexpected character in '" + text + "'");
      }
    }
    if (!token.empty()) parts.push_back(std::stoi(token));
    return Partition(std::move(parts));
  }

  friend bool operator==(const Partition& a, const Partition& b) { return a.parts_ == b.parts_; }
  friend bool operator!=(const Partition& a, const Partition& b) { return !(a == b); }

  // Canonical order: the first differing part decides, larger part first, so
  // [k] precedes everything and [1^k] comes last.
  friend bool precedes(const Partition& a, const Partition& b) {
    const std::size_t n = std::max(a.parts_.size(), b.parts_.size());
    for (std::size_t i = 0; i < n; ++i) {
      const int x = i < a.parts_.size() ? a.parts_[i] : 0;
      const int y = i < b.parts_.size() ? b.parts_[i] : 0;
      if (x != y) return x > y;
    }
    return false;
  }
  friend bool operator<(const Partition& a, const Partition& b) { return precedes(a, b); }

 private:
  std::vector<int> parts_;
  int k_ = 0;
};

inline void require_supported_degree(int k, const char* what) {
  if (k < 1 || k > kMaxSymmetricDegree) {
    throw std::out_of_range(std::string(what) + ": k=" + std::to_string(k) + " outside supported range [1," +
                            std::to_string(kMaxSymmetricDegree) + "]");
  }
}

inline std::vector<Partition> partitions_of(int k) {
  require_supported_degree(k, "partitions_of");
  std::vector<Partition> out;
  std::vector<int> current;
  auto rec = [&](auto& self, int remaining, int max_part) -> void {
    if (remaining == 0) {
      out.emplace_back(current);
      return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
      current.push_back(p);
      self(self, remaining - p, p);
      current.pop_back();
    }
  };
  rec(rec, k, k);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::size_t partition_index(const Partition& lambda) {
  const auto all = partitions_of(lambda.k());
  return static_cast<std::size_t>(std::find(all.begin(), all.end(), lambda) - all.begin());
}

struct PermutationCycles {
  int k = 0;
  // 0-based; the cycle holding 0 comes first and starts with 0, every cycle
  // starts with its smallest element.
  std::vector<std::vector<int>> cycles;
};

// One-line permutation on {0, ..., k-1}: i -> image[i].
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> image) : image_(std::move(image)) {
    std::vector<bool> seen(image_.size(), false);
    for (int v : image_) {
      if (v < 0 || v >= static_cast<int>(image_.size()) || seen[v]) {
        throw std::invalid_argument("Permutation: image is not a bijection");
      }
      seen[v] = true;
    }
  }

  static Permutation identity(int k) {
    std::vector<int> img(k);
    std::iota(img.begin(), img.end(), 0);
    return Permutation(std::move(img));
  }

  static Permutation from_cycles(int k, const std::vector<std::vector<int>>& cycles) {
    std::vector<int> img(k);
    std::iota(img.begin(), img.end(), 0);
    std::vector<bool> used(k, false);
    for (const auto& c : cycles) {
      for (std::size_t i = 0; i < c.size(); ++i) {
        const int from = c[i];
        if (from < 0 || from >= k || used[from]) throw std::invalid_argument("Permutation: invalid cycle list");
        used[from] = true;
        img[from] = c[(i + 1) % c.size()];
      }
    }
    return Permutation(std::move(img));
  }

  static Permutation from_cycles(const PermutationCycles& pc) { return from_cycles(pc.k, pc.cycles); }

  int k() const { return static_cast<int>(image_.size()); }
  int operator()(int i) const { return image_[i]; }
  const std::vector<int>& image() const { return image_; }

  Permutation inverse() const {
    std::vector<int> inv(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = static_cast<int>(i);
    return Permutation(std::move(inv));
  }

  // (this * other)(i) = this(other(i)).
  Permutation compose(const Permutation& other) const {
    std::vector<int> img(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) img[i] = image_[other.image_[i]];
    return Permutation(std::move(img));
  }

  PermutationCycles cycles() const {
    PermutationCycles pc{k(), {}};
    std::vector<bool> seen(image_.size(), false);
    for (int start = 0; start < k(); ++start) {
      if (seen[start]) continue;
      std::vector<int> c;
      for (int j = start; !seen[j]; j = image_[j]) {
        seen[j] = true;
        c.push_back(j);
      }
      pc.cycles.push_back(std::move(c));
    }
    return pc;
  }

  int num_cycles() const { return static_cast<int>(cycles().cycles.size()); }

  Partition cycle_type() const {
    std::vector<int> lengths;
    for (const auto& c : cycles().cycles) lengths.push_back(static_cast<int>(c.size()));
    std::sort(lengths.rbegin(), lengths.rend());
    return Partition(std::move(lengths));
  }

  int sign() const { return ((k() - num_cycles()) % 2 == 0) ? 1 : -1; }

  friend bool operator==(const Permutation& a, const Permutation& b) { return a.image_ == b.image_; }

 private:
  std::vector<int> image_;
};

inline std::vector<Permutation> all_permutations(int k) {
  require_supported_degree(k, "all_permutations");
  std::vector<int> img(k);
  std::iota(img.begin(), img.end(), 0);
  std::vector<Permutation> out;
  do {
    out.emplace_back(img);
  } while (std::next_permutation(img.begin(), img.end()));
  return out;
}

inline long factorial(int k) {
  long f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

namespace detail {

// Murnaghan-Nakayama on beta-sets: removing a rim hook of length r moves a
// bead from position b to b - r; the sign counts beads jumped over.
inline long mn_character(std::vector<int> beta, std::vector<int> cycle_lengths, std::size_t next) {
  if (next == cycle_lengths.size()) return 1;
  const int r = cycle_lengths[next];
  long total = 0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const int b = beta[i];
    const int target = b - r;
    if (target < 0) continue;
    if (std::find(beta.begin(), beta.end(), target) != beta.end()) continue;
    int jumped = 0;
    for (int x : beta) {
      if (x > target && x < b) ++jumped;
    }
    std::vector<int> moved = beta;
    moved[i] = target;
    const long sub = mn_character(std::move(moved), cycle_lengths, next + 1);
    total += (jumped % 2 == 0 ? 1 : -1) * sub;
  }
  return total;
}

class CharacterTable {
 public:
  long get(const Partition& lambda, const Partition& mu) {
    const auto key = std::make_pair(lambda.parts(), mu.parts());
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    const int len = lambda.rows();
    std::vector<int> beta(len);
    for (int i = 0; i < len; ++i) beta[i] = lambda.parts()[i] + (len - 1 - i);
    const long value = mn_character(std::move(beta), mu.parts(), 0);
    std::lock_guard<std::mutex> lock(mutex_);
    memo_.emplace(key, value);
    return value;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::vector<int>, std::vector<int>>, long> memo_;
};

inline CharacterTable& character_table() {
  static CharacterTable table;
  return table;
}

}  // namespace detail

inline long character(const Partition& lambda, const Partition& cycle_type) {
  if (lambda.k() != cycle_type.k()) {
    throw std::invalid_argument("character: partitions " + lambda.str() + " and " + cycle_type.str() +
                                " are of different integers");
  }
  require_supported_degree(lambda.k(), "character");
  return detail::character_table().get(lambda, cycle_type);
}

inline long character(const Partition& lambda, const Permutation& pi) {
  if (pi.k() != lambda.k()) throw std::invalid_argument("character: permutation degree mismatch");
  return character(lambda, pi.cycle_type());
}

// Dimension of the S_k irrep, chi_lambda(id).
inline long irrep_dimension(const Partition& lambda) {
  return character(lambda, Partition(std::vector<int>(lambda.k(), 1)));
}

// eta_d(pi)|i_0 ... i_{k-1}> = |i_{pi^-1(0)} ... i_{pi^-1(k-1)}>: the tensor
// factor in slot j moves to slot pi(j).
inline MultiOperator permutation_operator(const Permutation& pi, int d) {
  if (d < 1) throw std::invalid_argument("permutation_operator: d must be positive");
  const int k = pi.k();
  const Dims dims(k, d);
  const long n = dims_product(dims);
  require_budget(n, "permutation_operator");
  const auto strides = detail::strides_of(dims);
  Matrix out = Matrix::Zero(n, n);
  for (long in = 0; in < n; ++in) {
    long image = 0;
    for (int j = 0; j < k; ++j) {
      const long digit = (in / strides[j]) % d;
      image += digit * strides[pi(j)];
    }
    out(image, in) = 1.0;
  }
  return {std::move(out), dims};
}

inline MultiOperator permutation_operator(const PermutationCycles& pc, int d) {
  return permutation_operator(Permutation::from_cycles(pc), d);
}

// Linear combination sum_pi c(pi) eta_d(pi) assembled entry by entry.
template <typename CoefficientFn>
MultiOperator group_algebra_operator(int k, int d, CoefficientFn&& coefficient) {
  const Dims dims(k, d);
  const long n = dims_product(dims);
  require_budget(n, "group_algebra_operator");
  const auto strides = detail::strides_of(dims);
  std::vector<std::vector<int>> digits(n, std::vector<int>(k));
  for (long in = 0; in < n; ++in) {
    for (int j = 0; j < k; ++j) digits[in][j] = static_cast<int>((in / strides[j]) % d);
  }
  Matrix out = Matrix::Zero(n, n);
  for (const Permutation& pi : all_permutations(k)) {
    const double c = coefficient(pi);
    if (c == 0.0) continue;
    for (long in = 0; in < n; ++in) {
      long image = 0;
      for (int j = 0; j < k; ++j) image += digits[in][j] * strides[pi(j)];
      out(image, in) += c;
    }
  }
  return {std::move(out), dims};
}

// P_lambda = chi_lambda(id)/k! * sum_pi chi_lambda(pi) eta_d(pi^-1).
inline MultiOperator young_projector(const Partition& lambda, int d) {
  const int k = lambda.k();
  require_supported_degree(k, "young_projector");
  if (d < 1) throw std::invalid_argument("young_projector: d must be positive");
  const double dim = static_cast<double>(irrep_dimension(lambda));
  const double norm = dim / static_cast<double>(factorial(k));
  // chi is a class function and pi, pi^-1 share a class, so summing
  // chi(pi^-1) eta(pi) is the same operator.
  return group_algebra_operator(k, d, [&](const Permutation& pi) {
    return norm * static_cast<double>(character(lambda, pi.inverse()));
  });
}

inline constexpr double kZeroProjectorTolerance = 1e-12;

// True when P_lambda on (C^d)^{(x)k} is numerically the zero matrix.
inline bool young_projector_vanishes(const Partition& lambda, int d) {
  return young_projector(lambda, d).max_abs() < kZeroProjectorTolerance;
}

inline cplx immanant_direct(const Partition& lambda, const Matrix& g) {
  const int k = lambda.k();
  if (g.rows() != k || g.cols() != k) {
    throw std::invalid_argument("immanant_direct: matrix must be " + std::to_string(k) + "x" + std::to_string(k));
  }
  cplx total = 0.0;
  for (const Permutation& pi : all_permutations(k)) {
    const Permutation inv = pi.inverse();
    cplx prod = 1.0;
    for (int i = 0; i < k; ++i) prod *= g(i, inv(i));
    total += static_cast<double>(character(lambda, pi)) * prod;
  }
  return total;
}

inline Matrix gram_matrix(const std::vector<Vector>& vectors) {
  const long k = static_cast<long>(vectors.size());
  Matrix g(k, k);
  for (long i = 0; i < k; ++i) {
    for (long j = 0; j < k; ++j) g(i, j) = vectors[i].dot(vectors[j]);  // <v_i|v_j>
  }
  return g;
}

// k!/chi_lambda(id) * tr(P_lambda |v_1><v_1| (x) ... (x) |v_k><v_k|).
inline cplx immanant_via_projector(const Partition& lambda, const std::vector<Vector>& vectors) {
  const int k = lambda.k();
  if (static_cast<int>(vectors.size()) != k) {
    throw std::invalid_argument("immanant_via_projector: need exactly k vectors");
  }
  const long d = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != d) throw std::invalid_argument("immanant_via_projector: vectors of different dimension");
  }
  const MultiOperator p = young_projector(lambda, static_cast<int>(d));
  Vector prod = vectors[0];
  for (int i = 1; i < k; ++i) {
    Vector next(prod.size() * d);
    for (long a = 0; a < prod.size(); ++a) next.segment(a * d, d) = prod(a) * vectors[i];
    prod = std::move(next);
  }
  const cplx expectation = prod.dot(p.matrix() * prod);
  return static_cast<double>(factorial(k)) / static_cast<double>(irrep_dimension(lambda)) * expectation;
}

// prod_i G_ii - det(G), nonnegative for PSD G.
inline double hadamard_gap(const Matrix& g, double tol = 1e-10) {
  if (g.rows() != g.cols()) throw std::invalid_argument("hadamard_gap: matrix must be square");
  const MultiOperator op(g);
  const double scale = std::max(1.0, op.max_abs());
  if (min_eigenvalue(op) < -tol * scale) throw std::domain_error("hadamard_gap: matrix is not PSD");
  cplx diag = 1.0;
  for (long i = 0; i < g.rows(); ++i) diag *= g(i, i);
  return (diag - g.determinant()).real();
}

struct ImmanantCoefficients {
  int k = 0;
  // Indexed like partitions_of(k).
  std::vector<double> coeffs;

  ImmanantCoefficients() = default;
  ImmanantCoefficients(int k_, std::vector<double> c) : k(k_), coeffs(std::move(c)) {
    if (coeffs.size() != partitions_of(k).size()) {
      throw std::invalid_argument("ImmanantCoefficients: expected " + std::to_string(partitions_of(k).size()) +
                                  " coefficients for k=" + std::to_string(k));
    }
  }

  static ImmanantCoefficients from_map(int k, const std::map<Partition, double>& values) {
    const auto parts = partitions_of(k);
    std::vector<double> c(parts.size(), 0.0);
    for (const auto& [lambda, v] : values) {
      if (lambda.k() != k) throw std::invalid_argument("ImmanantCoefficients: partition " + lambda.str() + " not of k");
      c[partition_index(lambda)] = v;
    }
    return {k, std::move(c)};
  }

  double operator[](const Partition& lambda) const { return coeffs.at(partition_index(lambda)); }

  // psi_a(G) = sum_lambda a_lambda imm_lambda(G).
  cplx evaluate(const Matrix& g) const {
    const auto parts = partitions_of(k);
    cplx total = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (coeffs[i] != 0.0) total += coeffs[i] * immanant_direct(parts[i], g);
    }
    return total;
  }
};

}  // namespace immwit
