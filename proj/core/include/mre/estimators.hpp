#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "mre/design.hpp"
#include "mre/groups.hpp"
#include "mre/types.hpp"

namespace mre {

/**
 * The invariant-valued direction omega(z) of an equivariant coefficient
 * estimator. Outputs are p-vectors bounded in max-norm by a bound fixed at
 * construction; evaluating a custom map that breaks the bound raises
 * BoundExceeded.
 */
class OmegaSpec {
 public:
  using Map = std::function<Vector(const MaximalInvariant&)>;

  static OmegaSpec zero();
  static OmegaSpec constant(Vector w);
  static OmegaSpec custom(Map map, double bound);

  [[nodiscard]] bool is_zero() const noexcept { return kind_ == Kind::Zero; }
  [[nodiscard]] bool is_constant() const noexcept { return kind_ != Kind::Custom; }
  [[nodiscard]] double bound() const noexcept { return bound_; }
  /// Constant value, when the spec does not depend on z (zero has none).
  [[nodiscard]] const std::optional<Vector>& constant_value() const noexcept { return value_; }

  [[nodiscard]] Vector evaluate(const MaximalInvariant& z, Index p) const;

 private:
  enum class Kind { Zero, Constant, Custom };
  Kind kind_ = Kind::Zero;
  std::optional<Vector> value_;
  Map map_;
  double bound_ = 0.0;
};

/// Multipliers H of the per-population variances. Constant (explicit, the
/// shrinkage weights W, or all ones) or a positive function of z.
class CovWeights {
 public:
  using Map = std::function<Vector(const MaximalInvariant&)>;

  static CovWeights constant(Vector h);
  static CovWeights shrinkage();
  static CovWeights unit();
  static CovWeights custom(Map map);

  [[nodiscard]] bool is_constant() const noexcept { return kind_ != Kind::Custom; }
  /// The constant weights for `design`, or nullopt for custom weights.
  [[nodiscard]] std::optional<Vector> constant_for(const Design& design) const;
  [[nodiscard]] Vector evaluate(const Design& design, const ResponseVector& y) const;
  [[nodiscard]] std::string describe() const;

 private:
  enum class Kind { Explicit, Shrinkage, Unit, Custom };
  Kind kind_ = Kind::Unit;
  Vector h_;
  Map map_;
};

/// (X'X)^{-1} X'y, computed as xp^{-1} applied to the block means.
Vector ols_beta(const Design& design, const ResponseVector& y);

/// p-vector that is zero except for the last entry, the standard deviation
/// of the final block. Single-tail designs only.
Vector s0_scale(const Design& design, const ResponseVector& y);

/// ols_beta + xp^{-1} (s0_scale * omega(z)). Single-tail designs only.
Vector equivariant_beta(const Design& design, const ResponseVector& y, const OmegaSpec& omega);

/// (n_i - 1) / (n_i + 1); NotEstimable if some n_i < 2.
Vector shrinkage_weights(const Design& design);

/// H * S^2 elementwise.
Vector cov_estimate(const Design& design, const ResponseVector& y, const CovWeights& weights);

struct OlsEstimator {};
struct EquivariantBetaEstimator {
  OmegaSpec omega;
};
struct CovEstimator {
  CovWeights weights;
};

using Estimator = std::variant<OlsEstimator, EquivariantBetaEstimator, CovEstimator>;

/// "ols", "equivariant:omega=<zero|v1,v2,...>", "cov:W", "cov:I",
/// "cov:h=<v1,v2,...>".
Estimator parse_estimator(std::string_view spec);
std::string describe(const Estimator& estimator);
bool estimates_covariance(const Estimator& estimator) noexcept;

/// Dispatches to ols_beta / equivariant_beta / cov_estimate.
Vector estimate(const Design& design, const Estimator& estimator, const ResponseVector& y);

/// Comma-separated reals with optional surrounding brackets.
Vector parse_vector(std::string_view text);

}  // namespace mre
