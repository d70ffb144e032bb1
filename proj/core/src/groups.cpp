#include "mre/groups.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mre/error.hpp"

namespace mre {

SampleTransform::SampleTransform(Vector c, Vector a) : c_(std::move(c)), a_(std::move(a)) {
  if (c_.size() != a_.size() || c_.size() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "scale and shift vectors must be non-empty and of equal length");
  }
  if (!a_.allFinite()) throw Error(ErrorKind::InvalidParameter, "shift must be finite");
  for (Index i = 0; i < c_.size(); ++i) {
    if (!(c_[i] > 0.0) || !std::isfinite(c_[i])) {
      throw Error(ErrorKind::InvalidParameter, "scale c[" + std::to_string(i) + "] must be positive");
    }
  }
}

SampleTransform SampleTransform::identity(Index p) { return {Vector::Ones(p), Vector::Zero(p)}; }

SampleTransform compose(const SampleTransform& g2, const SampleTransform& g1) {
  if (g2.dimension() != g1.dimension()) throw Error(ErrorKind::DimensionMismatch, "transforms differ in p");
  return {g2.c().cwiseProduct(g1.c()), g2.c().cwiseProduct(g1.a()) + g2.a()};
}

SampleTransform inverse(const SampleTransform& g) {
  Vector c = g.c().cwiseInverse();
  Vector a = -g.a().cwiseQuotient(g.c());
  return {std::move(c), std::move(a)};
}

ResponseVector apply_sample(const Design& design, const SampleTransform& g, const ResponseVector& y) {
  if (g.dimension() != design.populations()) throw Error(ErrorKind::DimensionMismatch, "transform does not fit design");
  Vector out = expand(design, g.c()).cwiseProduct(y.values()) + expand(design, g.a());
  return ResponseVector(design, std::move(out));
}

Vector induce_decision_beta(const Design& design, const SampleTransform& g, const Vector& d) {
  if (g.dimension() != design.populations()) throw Error(ErrorKind::DimensionMismatch, "transform does not fit design");
  return design.solve_xp(g.c().cwiseProduct(design.apply_xp(d)) + g.a());
}

Vector induce_decision_cov(const SampleTransform& g, const Vector& d) {
  if (d.size() != g.dimension()) throw Error(ErrorKind::DimensionMismatch, "decision does not fit transform");
  for (Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) throw Error(ErrorKind::InvalidParameter, "covariance decision must be positive");
  }
  return g.c().array().square().matrix().cwiseProduct(d);
}

ParameterPoint induce_param(const Design& design, const SampleTransform& g, const ParameterPoint& theta) {
  return {induce_decision_beta(design, g, theta.beta()), g.c().array().square().matrix().cwiseProduct(theta.sigma2())};
}

SampleTransform transport(const Design& design, const ParameterPoint& theta1, const ParameterPoint& theta2) {
  if (theta1.dimension() != design.populations() || theta2.dimension() != design.populations()) {
    throw Error(ErrorKind::DimensionMismatch, "parameter points do not fit design");
  }
  Vector c = theta2.sigma2().cwiseQuotient(theta1.sigma2()).cwiseSqrt();
  Vector a = design.apply_xp(theta2.beta()) - c.cwiseProduct(design.apply_xp(theta1.beta()));
  return {std::move(c), std::move(a)};
}

double MaximalInvariant::max_deviation(const MaximalInvariant& other) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (blocks.size() != other.blocks.size()) return inf;
  double worst = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& lhs = blocks[b];
    const auto& rhs = other.blocks[b];
    if (lhs.population != rhs.population || lhs.sign != rhs.sign || lhs.ratios.size() != rhs.ratios.size()) {
      return inf;
    }
    for (std::size_t j = 0; j < lhs.ratios.size(); ++j) {
      worst = std::max(worst, std::abs(lhs.ratios[j] - rhs.ratios[j]));
    }
  }
  return worst;
}

MaximalInvariant maximal_invariant(const Design& design, const ResponseVector& y) {
  if (y.size() != design.observations()) throw Error(ErrorKind::DimensionMismatch, "response does not fit design");
  MaximalInvariant z;
  for (Index i = 0; i < design.populations(); ++i) {
    const std::size_t len = design.block_size(i);
    if (len < 2) continue;
    const auto first_idx = static_cast<Index>(design.block_begin(i));
    const auto last_idx = static_cast<Index>(design.block_end(i)) - 1;
    const double first = y[first_idx];
    const double span = y[last_idx] - first;
    if (span == 0.0) {
      throw Error(ErrorKind::DegenerateBlock,
                  "population " + std::to_string(i) + " has equal first and last observations");
    }
    BlockInvariant block;
    block.population = static_cast<std::size_t>(i);
    block.sign = span > 0.0 ? 1 : -1;
    block.ratios.reserve(len - 2);
    for (Index j = first_idx + 1; j < last_idx; ++j) block.ratios.push_back((y[j] - first) / span);
    z.blocks.push_back(std::move(block));
  }
  return z;
}

}  // namespace mre
