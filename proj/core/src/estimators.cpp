#include "mre/estimators.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "mre/error.hpp"

namespace mre {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::string format_vector(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  for (Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

void require_single_tail(const Design& design) {
  if (!design.single_tail()) {
    throw Error(ErrorKind::WrongShape, "operation needs reps = (1, ..., 1, n - p + 1)");
  }
}

}  // namespace

Vector parse_vector(std::string_view text) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw Error(ErrorKind::Parse, "unbalanced brackets in '" + s + "'");
    s = trim(std::string_view(s).substr(1, s.size() - 2));
  }
  if (s.empty()) throw Error(ErrorKind::Parse, "empty vector");
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const std::string item = trim(std::string_view(s).substr(pos, comma == std::string::npos ? s.npos : comma - pos));
    double v = 0.0;
    const auto* first = item.data();
    const auto* last = item.data() + item.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (item.empty() || ec != std::errc() || ptr != last) {
      throw Error(ErrorKind::Parse, "bad number '" + item + "'");
    }
    values.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

OmegaSpec OmegaSpec::zero() { return {}; }

OmegaSpec OmegaSpec::constant(Vector w) {
  if (w.size() == 0 || !w.allFinite()) throw Error(ErrorKind::InvalidParameter, "omega must be finite and non-empty");
  OmegaSpec spec;
  spec.kind_ = Kind::Constant;
  spec.bound_ = w.lpNorm<Eigen::Infinity>();
  spec.value_ = std::move(w);
  return spec;
}

OmegaSpec OmegaSpec::custom(Map map, double bound) {
  if (!map) throw Error(ErrorKind::InvalidParameter, "omega map is empty");
  if (!(bound >= 0.0) || !std::isfinite(bound)) throw Error(ErrorKind::InvalidParameter, "omega bound must be finite");
  OmegaSpec spec;
  spec.kind_ = Kind::Custom;
  spec.map_ = std::move(map);
  spec.bound_ = bound;
  return spec;
}

Vector OmegaSpec::evaluate(const MaximalInvariant& z, Index p) const {
  switch (kind_) {
    case Kind::Zero: return Vector::Zero(p);
    case Kind::Constant:
      if (value_->size() != p) throw Error(ErrorKind::DimensionMismatch, "omega length must equal p");
      return *value_;
    case Kind::Custom: break;
  }
  Vector w = map_(z);
  if (w.size() != p) throw Error(ErrorKind::DimensionMismatch, "omega map returned wrong length");
  if (!w.allFinite() || w.lpNorm<Eigen::Infinity>() > bound_) {
    throw Error(ErrorKind::BoundExceeded, "omega map output exceeds its declared bound");
  }
  return w;
}

CovWeights CovWeights::constant(Vector h) {
  if (h.size() == 0) throw Error(ErrorKind::InvalidParameter, "weights must be non-empty");
  for (Index i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !std::isfinite(h[i])) throw Error(ErrorKind::InvalidParameter, "weights must be positive");
  }
  CovWeights w;
  w.kind_ = Kind::Explicit;
  w.h_ = std::move(h);
  return w;
}

CovWeights CovWeights::shrinkage() {
  CovWeights w;
  w.kind_ = Kind::Shrinkage;
  return w;
}

CovWeights CovWeights::unit() { return {}; }

CovWeights CovWeights::custom(Map map) {
  if (!map) throw Error(ErrorKind::InvalidParameter, "weight map is empty");
  CovWeights w;
  w.kind_ = Kind::Custom;
  w.map_ = std::move(map);
  return w;
}

std::optional<Vector> CovWeights::constant_for(const Design& design) const {
  const Index p = design.populations();
  switch (kind_) {
    case Kind::Explicit:
      if (h_.size() != p) throw Error(ErrorKind::DimensionMismatch, "weights length must equal p");
      return h_;
    case Kind::Shrinkage: return shrinkage_weights(design);
    case Kind::Unit: return Vector::Ones(p);
    case Kind::Custom: return std::nullopt;
  }
  return std::nullopt;
}

Vector CovWeights::evaluate(const Design& design, const ResponseVector& y) const {
  if (auto h = constant_for(design)) return *std::move(h);
  Vector h = map_(maximal_invariant(design, y));
  if (h.size() != design.populations()) throw Error(ErrorKind::DimensionMismatch, "weight map returned wrong length");
  for (Index i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0) || !std::isfinite(h[i])) throw Error(ErrorKind::InvalidParameter, "weight map output not positive");
  }
  return h;
}

std::string CovWeights::describe() const {
  switch (kind_) {
    case Kind::Explicit: return "h=" + format_vector(h_);
    case Kind::Shrinkage: return "W";
    case Kind::Unit: return "I";
    case Kind::Custom: return "custom";
  }
  return "?";
}

Vector ols_beta(const Design& design, const ResponseVector& y) {
  return design.solve_xp(sufficient_stats(design, y).means);
}

Vector s0_scale(const Design& design, const ResponseVector& y) {
  require_single_tail(design);
  const Index p = design.populations();
  const auto b = static_cast<Index>(design.block_begin(p - 1));
  const auto len = static_cast<Index>(design.block_size(p - 1));
  const auto tail = y.values().segment(b, len);
  // k = n - p + 1 observations in the tail, so 1 / (k - 1) = 1 / (n - p)
  const double var = (tail.array() - tail.mean()).square().sum() / static_cast<double>(len - 1);
  Vector out = Vector::Zero(p);
  out[p - 1] = std::sqrt(var);
  return out;
}

Vector equivariant_beta(const Design& design, const ResponseVector& y, const OmegaSpec& omega) {
  require_single_tail(design);
  Vector beta = ols_beta(design, y);
  if (omega.is_zero()) return beta;
  const MaximalInvariant z = maximal_invariant(design, y);
  const Vector w = omega.evaluate(z, design.populations());
  return beta + design.solve_xp(s0_scale(design, y).cwiseProduct(w));
}

Vector shrinkage_weights(const Design& design) {
  const Index p = design.populations();
  Vector w(p);
  for (Index i = 0; i < p; ++i) {
    const auto n = static_cast<double>(design.block_size(i));
    if (design.block_size(i) < 2) {
      throw Error(ErrorKind::NotEstimable, "population " + std::to_string(i) + " has fewer than two responses");
    }
    w[i] = (n - 1.0) / (n + 1.0);
  }
  return w;
}

Vector cov_estimate(const Design& design, const ResponseVector& y, const CovWeights& weights) {
  if (!design.fully_replicated()) {
    throw Error(ErrorKind::NotEstimable, "every population needs at least two responses");
  }
  const Vector s2 = sufficient_stats(design, y).variance_vector();
  return weights.evaluate(design, y).cwiseProduct(s2);
}

Estimator parse_estimator(std::string_view spec) {
  const std::string s = trim(spec);
  if (s == "ols") return OlsEstimator{};
  constexpr std::string_view eq_prefix = "equivariant:omega=";
  if (s.rfind(eq_prefix, 0) == 0) {
    const std::string rest = trim(std::string_view(s).substr(eq_prefix.size()));
    if (rest == "zero" || rest == "0") return EquivariantBetaEstimator{OmegaSpec::zero()};
    return EquivariantBetaEstimator{OmegaSpec::constant(parse_vector(rest))};
  }
  if (s == "cov:W") return CovEstimator{CovWeights::shrinkage()};
  if (s == "cov:I") return CovEstimator{CovWeights::unit()};
  constexpr std::string_view h_prefix = "cov:h=";
  if (s.rfind(h_prefix, 0) == 0) {
    return CovEstimator{CovWeights::constant(parse_vector(std::string_view(s).substr(h_prefix.size())))};
  }
  throw Error(ErrorKind::Parse, "unknown estimator '" + s + "'");
}

std::string describe(const Estimator& estimator) {
  struct Visitor {
    std::string operator()(const OlsEstimator&) const { return "ols"; }
    std::string operator()(const EquivariantBetaEstimator& e) const {
      if (e.omega.is_zero()) return "equivariant:omega=zero";
      if (e.omega.constant_value()) return "equivariant:omega=" + format_vector(*e.omega.constant_value());
      return "equivariant:omega=custom";
    }
    std::string operator()(const CovEstimator& e) const { return "cov:" + e.weights.describe(); }
  };
  return std::visit(Visitor{}, estimator);
}

bool estimates_covariance(const Estimator& estimator) noexcept {
  return std::holds_alternative<CovEstimator>(estimator);
}

Vector estimate(const Design& design, const Estimator& estimator, const ResponseVector& y) {
  struct Visitor {
    const Design& design;
    const ResponseVector& y;
    Vector operator()(const OlsEstimator&) const { return ols_beta(design, y); }
    Vector operator()(const EquivariantBetaEstimator& e) const { return equivariant_beta(design, y, e.omega); }
    Vector operator()(const CovEstimator& e) const { return cov_estimate(design, y, e.weights); }
  };
  return std::visit(Visitor{design, y}, estimator);
}

}  // namespace mre
