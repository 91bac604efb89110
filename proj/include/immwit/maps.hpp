#pragma once

// Filtered multilinear positive maps built from immanant inequalities, the
// witnesses they induce, and the state-witness contraction.
//
// For an inequality sum_lambda a_lambda imm_lambda(G) >= 0 and a PSD filter E
// the map acts as
//
//   Psi_a^E(rho_1, ..., rho_{k-1}) =
//       sum_lambda w_lambda a_lambda tr_{1..k-1}[P_lambda E^{(x)k} (rho_1 (x) ... (x) rho_{k-1} (x) 1)]
//
// with w_lambda = k!/chi_lambda(id) by default. Everything is computed by
// contracting the kernel  Q = sum_lambda w_lambda a_lambda P_lambda E^{(x)k}
// against the embedded input.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "immwit/linalg.hpp"
#include "immwit/symgroup.hpp"

namespace immwit {

enum class Normalization {
  kFactorialOverDimension,  // k!/chi_lambda(id): positive-map convention
  kOverDimension,           // 1/chi_lambda(id): witness convention
  kUnweighted,              // 1: plain trace-polynomial maps
};

inline double normalization_weight(Normalization n, const Partition& lambda) {
  switch (n) {
    case Normalization::kFactorialOverDimension:
      return static_cast<double>(factorial(lambda.k())) / static_cast<double>(irrep_dimension(lambda));
    case Normalization::kOverDimension:
      return 1.0 / static_cast<double>(irrep_dimension(lambda));
    case Normalization::kUnweighted:
      return 1.0;
  }
  return 1.0;
}

struct MapSpec {
  int k = 2;
  ImmanantCoefficients coeffs;
  // Empty means the identity filter.
  std::optional<MultiOperator> filter;
  // Empty means the context default: k!/chi for maps, 1/chi for witnesses.
  std::optional<Normalization> normalization;

  MapSpec() = default;
  MapSpec(ImmanantCoefficients c, std::optional<MultiOperator> e = std::nullopt,
          std::optional<Normalization> n = std::nullopt)
      : k(c.k), coeffs(std::move(c)), filter(std::move(e)), normalization(n) {
    validate();
  }

  void validate() const {
    if (k < 2) throw std::invalid_argument("MapSpec: k must be at least 2");
    if (coeffs.k != k) throw std::invalid_argument("MapSpec: coefficient vector is for a different k");
    if (filter) {
      if (filter->num_factors() != 1) throw std::invalid_argument("MapSpec: filter must be a single-factor operator");
      if (!filter->is_hermitian() || !is_psd(*filter, 1e-9)) {
        throw std::invalid_argument("MapSpec: filter must be positive semidefinite");
      }
    }
  }

  // Local dimension the map acts on; with the identity filter it is taken
  // from the caller.
  int dimension_or(int fallback) const { return filter ? static_cast<int>(filter->size()) : fallback; }
};

// sum_lambda w_lambda a_lambda P_lambda E^{(x)k} on (C^d)^{(x)k}.
inline MultiOperator map_kernel(const MapSpec& spec, int d, Normalization norm) {
  if (spec.filter && spec.filter->size() != d) {
    throw std::invalid_argument("map_kernel: filter dimension " + std::to_string(spec.filter->size()) +
                                " does not match d=" + std::to_string(d));
  }
  const Dims dims(spec.k, d);
  require_budget(dims_product(dims), "map_kernel");
  const auto parts = partitions_of(spec.k);
  MultiOperator kernel = MultiOperator::zero(dims);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const double a = spec.coeffs.coeffs[i];
    if (a == 0.0) continue;
    kernel += (a * normalization_weight(norm, parts[i])) * young_projector(parts[i], d);
  }
  if (spec.filter) {
    const MultiOperator filter_power = tensor_power(*spec.filter, spec.k);
    kernel = kernel * filter_power;
  }
  return kernel;
}

namespace detail {

inline void require_psd_input(const MultiOperator& rho, const char* what) {
  if (!rho.is_hermitian()) throw std::invalid_argument(std::string(what) + ": input is not Hermitian");
  if (!is_psd(rho, 1e-9)) throw std::invalid_argument(std::string(what) + ": input is not positive semidefinite");
}

}  // namespace detail

// A MapSpec bound to a local dimension with its kernel precomputed; use this
// when the same map is applied many times.
class FilteredMap {
 public:
  FilteredMap(MapSpec spec, int d)
      : spec_(std::move(spec)),
        d_(spec_.dimension_or(d)),
        kernel_(map_kernel(spec_, d_, spec_.normalization.value_or(Normalization::kFactorialOverDimension))) {
    if (d_ != d) throw std::invalid_argument("FilteredMap: filter dimension does not match d");
  }

  const MapSpec& spec() const { return spec_; }
  int dimension() const { return d_; }
  int k() const { return spec_.k; }
  const MultiOperator& kernel() const { return kernel_; }

  // Psi(rho_1, ..., rho_{k-1}) on C^d.
  MultiOperator apply(const std::vector<MultiOperator>& inputs) const {
    if (static_cast<int>(inputs.size()) != spec_.k - 1) {
      throw std::invalid_argument("apply_filtered_map: expected " + std::to_string(spec_.k - 1) + " inputs");
    }
    for (const auto& rho : inputs) {
      if (rho.size() != d_) throw std::invalid_argument("apply_filtered_map: input dimension mismatch");
      detail::require_psd_input(rho, "apply_filtered_map");
    }
    MultiOperator embedded(inputs[0].matrix());
    for (std::size_t i = 1; i < inputs.size(); ++i) embedded = tensor_product(embedded, MultiOperator(inputs[i].matrix()));
    embedded = tensor_product(embedded, MultiOperator::identity({d_}));
    FactorSet all(spec_.k), traced(spec_.k - 1);
    std::iota(all.begin(), all.end(), 0);
    std::iota(traced.begin(), traced.end(), 0);
    MultiOperator out = apply_local_and_trace(kernel_, all, embedded, traced);
    return {out.hermitian_part(), Dims{d_}};
  }

  // (Psi (x) id)(rho) with the k-1 map inputs on `targets`. The output factor
  // takes the place of targets[0]; the other targets disappear and the
  // untouched factors keep their order.
  MultiOperator apply_to_subsystem(const MultiOperator& rho, const FactorSet& targets) const {
    if (static_cast<int>(targets.size()) != spec_.k - 1) {
      throw std::invalid_argument("apply_map_to_subsystem: expected " + std::to_string(spec_.k - 1) +
                                  " target factors");
    }
    const int m = rho.num_factors();
    detail::check_factor_set(targets, m, "apply_map_to_subsystem");
    for (int f : targets) {
      if (rho.dims()[f] != d_) throw std::invalid_argument("apply_map_to_subsystem: factor dimension mismatch");
    }
    const MultiOperator embedded = tensor_product(rho, MultiOperator::identity({d_}));
    FactorSet on = targets;
    on.push_back(m);
    MultiOperator out = apply_local_and_trace(kernel_, on, embedded, targets);
    // `out` lists the untouched factors ascending, then the output factor.
    const FactorSet rest = detail::complement_of(targets, m);
    const int first = targets.front();
    std::vector<int> perm;
    const int out_pos = static_cast<int>(rest.size());
    bool placed = false;
    for (int i = 0; i < static_cast<int>(rest.size()); ++i) {
      if (!placed && rest[i] > first) {
        perm.push_back(out_pos);
        placed = true;
      }
      perm.push_back(i);
    }
    if (!placed) perm.push_back(out_pos);
    MultiOperator arranged = permute_subsystems(out, perm);
    return {arranged.hermitian_part(), arranged.dims()};
  }

 private:
  MapSpec spec_;
  int d_;
  MultiOperator kernel_;
};

inline MultiOperator apply_filtered_map(const MapSpec& spec, const std::vector<MultiOperator>& inputs) {
  if (inputs.empty()) throw std::invalid_argument("apply_filtered_map: no inputs");
  return FilteredMap(spec, static_cast<int>(inputs.front().size())).apply(inputs);
}

inline MultiOperator apply_map_to_subsystem(const MapSpec& spec, const MultiOperator& rho, const FactorSet& targets) {
  if (targets.empty()) throw std::invalid_argument("apply_map_to_subsystem: no target factors");
  detail::check_factor_set(targets, rho.num_factors(), "apply_map_to_subsystem");
  return FilteredMap(spec, rho.dims()[targets.front()]).apply_to_subsystem(rho, targets);
}

inline ImmanantCoefficients determinant_coefficients(int k) {
  return ImmanantCoefficients::from_map(k, {{Partition(std::vector<int>(k, 1)), 1.0}});
}

// Antisymmetrizer map applied to the A halves of k-1 copies of rho_AB.
// Returns the operator on B_1 ... B_{k-1} A_k.
inline MultiOperator apply_multicopy_det_map(const MultiOperator& rho_ab, int k) {
  if (rho_ab.num_factors() != 2) throw std::invalid_argument("apply_multicopy_det_map: state must be bipartite");
  if (k < 2) throw std::invalid_argument("apply_multicopy_det_map: k must be at least 2");
  const int da = rho_ab.dims()[0];
  const int db = rho_ab.dims()[1];
  long total = da;
  for (int c = 0; c < k - 1; ++c) total *= static_cast<long>(da) * db;
  require_budget(total, "apply_multicopy_det_map");

  // Copies laid out A_1 B_1 A_2 B_2 ...; regroup to A_1..A_{k-1} B_1..B_{k-1}.
  MultiOperator copies = tensor_power(rho_ab, k - 1);
  std::vector<int> regroup;
  for (int c = 0; c < k - 1; ++c) regroup.push_back(2 * c);
  for (int c = 0; c < k - 1; ++c) regroup.push_back(2 * c + 1);
  copies = permute_subsystems(copies, regroup);

  FactorSet targets(k - 1);
  std::iota(targets.begin(), targets.end(), 0);
  const FilteredMap det(MapSpec(determinant_coefficients(k)), da);
  const MultiOperator out = det.apply_to_subsystem(copies, targets);  // A_k B_1 .. B_{k-1}
  std::vector<int> to_b_first;
  for (int c = 0; c < k - 1; ++c) to_b_first.push_back(c + 1);
  to_b_first.push_back(0);
  return permute_subsystems(out, to_b_first);
}

struct WitnessOperator {
  MultiOperator op;
  std::string provenance;

  // True when the operator has a negative eigenvalue, i.e. it can detect
  // something; otherwise it is merely a positive operator.
  bool is_witness() const { return is_negative(op); }
};

// W = E^{(x)n} sum_lambda w_lambda a_lambda P_lambda, w = 1/chi_lambda(id) unless
// the spec says otherwise.
inline WitnessOperator build_witness(const MapSpec& spec, int n_parties, int d) {
  if (spec.k != n_parties) throw std::invalid_argument("build_witness: spec.k must equal the number of parties");
  const int dim = spec.dimension_or(d);
  if (dim != d) throw std::invalid_argument("build_witness: filter dimension does not match d");
  const MultiOperator w = map_kernel(spec, d, spec.normalization.value_or(Normalization::kOverDimension));
  if (!w.is_hermitian()) throw std::logic_error("build_witness: assembled operator is not Hermitian");
  std::string prov = "immanant-inequality k=" + std::to_string(spec.k) + " a=(";
  for (std::size_t i = 0; i < spec.coeffs.coeffs.size(); ++i) {
    prov += (i ? "," : "") + std::to_string(spec.coeffs.coeffs[i]);
  }
  prov += spec.filter ? ") filtered" : ")";
  return {MultiOperator(w.hermitian_part(), w.dims()), prov};
}

// sum_lambda c_lambda P_lambda + c_id * 1 on (C^d)^{(x)k}; handy for witnesses
// written directly in terms of projectors.
inline MultiOperator projector_combination(int k, int d, const std::vector<std::pair<Partition, double>>& terms,
                                           double identity_coefficient = 0.0) {
  const Dims dims(k, d);
  MultiOperator out = identity_coefficient * MultiOperator::identity(dims);
  for (const auto& [lambda, c] : terms) {
    if (lambda.k() != k) throw std::invalid_argument("projector_combination: partition of the wrong integer");
    out += c * young_projector(lambda, d);
  }
  return out;
}

// W_tau = tr_S(W^(1) (x) ... (x) W^(n) . 1 (x) tau_S), S = last factor of every
// block. Result acts on n(k-1) factors, block i occupying factors
// i(k-1) .. (i+1)(k-1)-1.
inline MultiOperator contract_witnesses(const std::vector<MultiOperator>& witnesses, const MultiOperator& tau) {
  const int n = static_cast<int>(witnesses.size());
  if (n == 0) throw std::invalid_argument("contract_witnesses: no witnesses");
  const int k = witnesses[0].num_factors();
  if (k < 2) throw std::invalid_argument("contract_witnesses: witnesses need at least two factors");
  const int d = witnesses[0].dims()[0];
  for (const auto& w : witnesses) {
    if (w.dims() != Dims(k, d)) throw std::invalid_argument("contract_witnesses: witnesses must share (k, d)");
  }
  if (tau.dims() != Dims(n, d)) {
    throw std::invalid_argument("contract_witnesses: tau must act on n factors of dimension d");
  }
  long block = 1;
  for (int i = 0; i < k - 1; ++i) block *= d;
  long out_dim = 1;
  for (int i = 0; i < n; ++i) out_dim *= block;
  require_budget(out_dim, "contract_witnesses");
  long s_dim = 1;
  for (int i = 0; i < n; ++i) s_dim *= d;

  // Digits of a composite over n slots of the given radix; slot 0 slowest.
  auto split = [n](long index, long radix) {
    std::vector<long> out(n);
    for (int i = n - 1; i >= 0; --i) {
      out[i] = index % radix;
      index /= radix;
    }
    return out;
  };
  std::vector<std::vector<long>> r_digits(out_dim), s_digits(s_dim);
  for (long r = 0; r < out_dim; ++r) r_digits[r] = split(r, block);
  for (long s = 0; s < s_dim; ++s) s_digits[s] = split(s, d);

  const Matrix& t = tau.matrix();
  Matrix out = Matrix::Zero(out_dim, out_dim);
  for (long r = 0; r < out_dim; ++r) {
    for (long rp = 0; rp < out_dim; ++rp) {
      cplx acc = 0.0;
      for (long s = 0; s < s_dim; ++s) {
        for (long sp = 0; sp < s_dim; ++sp) {
          const cplx tv = t(sp, s);
          if (tv == cplx(0.0)) continue;
          cplx prod = tv;
          for (int i = 0; i < n && prod != cplx(0.0); ++i) {
            prod *= witnesses[i](r_digits[r][i] * d + s_digits[s][i], r_digits[rp][i] * d + s_digits[sp][i]);
          }
          acc += prod;
        }
      }
      out(r, rp) = acc;
    }
  }
  return {std::move(out), Dims(n * (k - 1), d)};
}

inline WitnessOperator contract_witnesses(const std::vector<WitnessOperator>& witnesses, const MultiOperator& tau) {
  std::vector<MultiOperator> ops;
  std::string prov = "contraction(";
  for (std::size_t i = 0; i < witnesses.size(); ++i) {
    ops.push_back(witnesses[i].op);
    prov += (i ? ";" : "") + witnesses[i].provenance;
  }
  prov += ")";
  MultiOperator w = contract_witnesses(ops, tau);
  return {MultiOperator(w.hermitian_part(), w.dims()), prov};
}

// theta_tau = tr(Psi_1 (x) ... (x) Psi_n (rho^{(x)(k-1)}) tau), with party i of
// rho fed to map i. All maps share k; rho and tau have n factors.
inline double multicopy_witness_value(const std::vector<MapSpec>& specs, const MultiOperator& rho,
                                      const MultiOperator& tau) {
  const int n = static_cast<int>(specs.size());
  if (n == 0) throw std::invalid_argument("multicopy_witness_value: no maps");
  const int k = specs[0].k;
  for (const auto& s : specs) {
    if (s.k != k) throw std::invalid_argument("multicopy_witness_value: maps must share k");
  }
  if (rho.num_factors() != n || tau.num_factors() != n) {
    throw std::invalid_argument("multicopy_witness_value: rho and tau need one factor per map");
  }
  const int d = rho.dims()[0];
  if (rho.dims() != Dims(n, d) || tau.dims() != Dims(n, d)) {
    throw std::invalid_argument("multicopy_witness_value: all factors must share one dimension");
  }
  std::vector<MultiOperator> kernels;
  for (const auto& s : specs) kernels.push_back(map_kernel(s, d, s.normalization.value_or(Normalization::kFactorialOverDimension)));
  const MultiOperator contracted = contract_witnesses(kernels, tau);
  // Copy c of party p sits at c*n + p; the contraction wants party blocks.
  MultiOperator copies = tensor_power(rho, k - 1);
  std::vector<int> to_blocks;
  for (int p = 0; p < n; ++p) {
    for (int c = 0; c < k - 1; ++c) to_blocks.push_back(c * n + p);
  }
  copies = permute_subsystems(copies, to_blocks);
  return (contracted.matrix().cwiseProduct(copies.matrix().transpose())).sum().real();
}

struct CatalogEntry {
  std::string name;
  ImmanantCoefficients coeffs;
};

// Inequalities trusted as nonnegative on every PSD G.
inline std::vector<CatalogEntry> inequality_catalog() {
  std::vector<CatalogEntry> out;
  for (int k = 2; k <= 4; ++k) out.push_back({"det k=" + std::to_string(k), determinant_coefficients(k)});
  for (int k = 2; k <= 4; ++k) {
    // prod_i G_ii = sum_lambda chi_lambda(id) imm_lambda(G) / k!
    const auto parts = partitions_of(k);
    std::vector<double> c(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
      c[i] = static_cast<double>(irrep_dimension(parts[i])) / static_cast<double>(factorial(k));
    }
    c.back() -= 1.0;
    out.push_back({"hadamard k=" + std::to_string(k), ImmanantCoefficients(k, std::move(c))});
  }
  out.push_back({"imm21/2-det k=3", ImmanantCoefficients(3, {0.0, 0.5, -1.0})});
  return out;
}

}  // namespace immwit
