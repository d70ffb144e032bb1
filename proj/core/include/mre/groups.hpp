#pragma once

#include <cstddef>
#include <vector>

#include "mre/design.hpp"
#include "mre/types.hpp"

namespace mre {

/**
 * Per-population affine transform of the responses, g(y) = C y + a with
 * C = diag(c) and a expanded block-wise over the design. Scales are strictly
 * positive.
 */
class SampleTransform {
 public:
  SampleTransform(Vector c, Vector a);

  static SampleTransform identity(Index p);

  [[nodiscard]] Index dimension() const noexcept { return c_.size(); }
  [[nodiscard]] const Vector& c() const noexcept { return c_; }
  [[nodiscard]] const Vector& a() const noexcept { return a_; }

 private:
  Vector c_;
  Vector a_;
};

/// g2 after g1: (c2 c1, c2 a1 + a2).
SampleTransform compose(const SampleTransform& g2, const SampleTransform& g1);
/// (1 / c, -a / c).
SampleTransform inverse(const SampleTransform& g);

ResponseVector apply_sample(const Design& design, const SampleTransform& g, const ResponseVector& y);

/// Induced action on (beta, sigma2): beta -> xp^{-1}(c * xp beta + a), sigma2 -> c^2 sigma2.
ParameterPoint induce_param(const Design& design, const SampleTransform& g, const ParameterPoint& theta);

/// Induced action on a coefficient decision: d -> xp^{-1}(c * xp d + a).
Vector induce_decision_beta(const Design& design, const SampleTransform& g, const Vector& d);

/// Induced action on a diagonal covariance decision: D -> c^2 D. Rejects
/// non-positive D.
Vector induce_decision_cov(const SampleTransform& g, const Vector& d);

/// The transform carrying theta1 onto theta2 under induce_param:
/// c = sqrt(sigma2_2 / sigma2_1), a = xp beta2 - c * xp beta1.
SampleTransform transport(const Design& design, const ParameterPoint& theta1, const ParameterPoint& theta2);

/// Location-scale invariant of one population block: interior observations
/// measured relative to the first one in units of (last - first), plus the
/// sign of (last - first).
struct BlockInvariant {
  std::size_t population = 0;
  std::vector<double> ratios;
  int sign = 1;

  bool operator==(const BlockInvariant&) const = default;
};

/// Maximal invariant of the responses under per-population location-scale
/// transforms. One entry per population with at least two responses.
struct MaximalInvariant {
  std::vector<BlockInvariant> blocks;

  bool operator==(const MaximalInvariant&) const = default;

  /// Largest absolute difference between matching ratios, or +inf when the
  /// structure or any sign differs.
  [[nodiscard]] double max_deviation(const MaximalInvariant& other) const;
};

/// Throws DegenerateBlock when a qualifying block has equal first and last
/// observations.
MaximalInvariant maximal_invariant(const Design& design, const ResponseVector& y);

}  // namespace mre
