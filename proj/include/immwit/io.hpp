#pragma once

// JSON encodings: operators as nested [re, im] arrays, map specifications as
//   {"k": 3, "coeffs": {"[2,1]": 0.5, "[1,1,1]": -1.0},
//    "filter": "identity" | [[[re, im], ...], ...],
//    "normalization": "factorial" | "dimension" | "unweighted"}   (optional)

#include <fstream>
#include <string>

#include <json.hpp>

#include "immwit/linalg.hpp"
#include "immwit/maps.hpp"
#include "immwit/symgroup.hpp"

namespace immwit {

using json = nlohmann::json;

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (long i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix JSON: expected a non-empty array of rows");
  const long n = static_cast<long>(j.size());
  Matrix m(n, n);
  for (long i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<long>(row.size()) != n) {
      throw std::invalid_argument("matrix JSON: matrix must be square");
    }
    for (long c = 0; c < n; ++c) {
      const json& e = row[c];
      if (e.is_number()) {
        m(i, c) = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        m(i, c) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        throw std::invalid_argument("matrix JSON: entries must be numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

inline json operator_to_json(const MultiOperator& op) {
  return {{"factor_dims", op.dims()}, {"entries", matrix_to_json(op.matrix())}};
}

inline std::string normalization_name(Normalization n) {
  switch (n) {
    case Normalization::kFactorialOverDimension:
      return "factorial";
    case Normalization::kOverDimension:
      return "dimension";
    case Normalization::kUnweighted:
      return "unweighted";
  }
  return "factorial";
}

inline Normalization normalization_from_name(const std::string& s) {
  if (s == "factorial") return Normalization::kFactorialOverDimension;
  if (s == "dimension") return Normalization::kOverDimension;
  if (s == "unweighted") return Normalization::kUnweighted;
  throw std::invalid_argument("unknown normalization '" + s + "'");
}

inline MapSpec map_spec_from_json(const json& j) {
  const int k = j.at("k").get<int>();
  std::map<Partition, double> values;
  for (const auto& [key, value] : j.at("coeffs").items()) values[Partition::parse(key)] = value.get<double>();
  ImmanantCoefficients coeffs = ImmanantCoefficients::from_map(k, values);
  std::optional<MultiOperator> filter;
  if (j.contains("filter")) {
    const json& f = j.at("filter");
    if (f.is_string()) {
      if (f.get<std::string>() != "identity") throw std::invalid_argument("map spec: filter string must be 'identity'");
    } else {
      filter = MultiOperator(matrix_from_json(f));
    }
  }
  std::optional<Normalization> norm;
  if (j.contains("normalization")) norm = normalization_from_name(j.at("normalization").get<std::string>());
  return MapSpec(std::move(coeffs), std::move(filter), norm);
}

inline json map_spec_to_json(const MapSpec& spec) {
  json coeffs = json::object();
  const auto parts = partitions_of(spec.k);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (spec.coeffs.coeffs[i] != 0.0) coeffs[parts[i].str()] = spec.coeffs.coeffs[i];
  }
  json out = {{"k", spec.k}, {"coeffs", coeffs}};
  out["filter"] = spec.filter ? matrix_to_json(spec.filter->matrix()) : json("identity");
  if (spec.normalization) out["normalization"] = normalization_name(*spec.normalization);
  return out;
}

inline MapSpec load_map_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open map spec file '" + path + "'");
  return map_spec_from_json(json::parse(in));
}

}  // namespace immwit
