#include "mre/json_io.hpp"

#include <string>

#include "mre/error.hpp"

namespace mre {

namespace {

const nlohmann::json& require(const nlohmann::json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw Error(ErrorKind::Parse, std::string("missing key '") + key + "'");
  return doc.at(key);
}

}  // namespace

Vector vector_from_json(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array()) throw Error(ErrorKind::Parse, std::string(what) + " must be an array");
  Vector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw Error(ErrorKind::Parse, std::string(what) + " must contain numbers");
    v[static_cast<Index>(i)] = arr[i].get<double>();
  }
  return v;
}

nlohmann::json vector_to_json(const Vector& v) {
  auto arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Design design_from_json(const nlohmann::json& doc) {
  const auto& rows = require(doc, "xp");
  if (!rows.is_array() || rows.empty()) throw Error(ErrorKind::Parse, "xp must be a non-empty array of rows");
  const auto p = static_cast<Index>(rows.size());
  Matrix xp(p, p);
  for (Index i = 0; i < p; ++i) {
    const Vector row = vector_from_json(rows[static_cast<std::size_t>(i)], "xp row");
    if (row.size() != p) throw Error(ErrorKind::Parse, "xp must be square");
    xp.row(i) = row.transpose();
  }
  const auto& reps_json = require(doc, "reps");
  if (!reps_json.is_array()) throw Error(ErrorKind::Parse, "reps must be an array");
  std::vector<std::size_t> reps;
  for (const auto& r : reps_json) {
    if (!r.is_number_integer() || r.get<long long>() < 1) {
      throw Error(ErrorKind::Parse, "reps must contain positive integers");
    }
    reps.push_back(r.get<std::size_t>());
  }
  return build_design(std::move(xp), std::move(reps));
}

ParameterPoint parameter_from_json(const nlohmann::json& doc) {
  return {vector_from_json(require(doc, "beta"), "beta"), vector_from_json(require(doc, "sigma2"), "sigma2")};
}

SampleTransform transform_from_json(const nlohmann::json& doc) {
  return {vector_from_json(require(doc, "c"), "c"), vector_from_json(require(doc, "a"), "a")};
}

nlohmann::json to_json(const Design& design) {
  auto rows = nlohmann::json::array();
  for (Index i = 0; i < design.populations(); ++i) rows.push_back(vector_to_json(design.xp().row(i).transpose()));
  return {{"xp", rows}, {"reps", std::vector<std::size_t>(design.reps().begin(), design.reps().end())}};
}

nlohmann::json to_json(const ParameterPoint& theta) {
  return {{"beta", vector_to_json(theta.beta())}, {"sigma2", vector_to_json(theta.sigma2())}};
}

nlohmann::json to_json(const SampleTransform& g) { return {{"c", vector_to_json(g.c())}, {"a", vector_to_json(g.a())}}; }

nlohmann::json to_json(const RiskEstimate& risk) {
  return {{"mean_loss", risk.mean_loss},
          {"std_error", risk.std_error},
          {"replicates", risk.replicates},
          {"seed", risk.seed},
          {"failed", risk.failed}};
}

}  // namespace mre
