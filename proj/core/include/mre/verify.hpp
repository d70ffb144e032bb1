#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mre/design.hpp"
#include "mre/groups.hpp"
#include "mre/rng.hpp"

namespace mre {

/// ||a - b||_inf / max(1, ||a||_inf, ||b||_inf). The unit floor keeps
/// quantities that are zero in exact arithmetic on an absolute scale.
double relative_deviation(const Vector& a, const Vector& b);
double relative_deviation(double a, double b);

/// c_i = exp(U(-1, 1)), a_i = U(-5, 5).
SampleTransform random_transform(Engine& engine, Index p);
/// beta_i = U(-3, 3), sigma2_i = exp(U(-2, 2)).
ParameterPoint random_parameter(Engine& engine, Index p);

enum class Verdict { Pass, Fail, Skip };
std::string_view to_string(Verdict v);

struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::Pass;
  /// Worst observed deviation (or z-score for Monte Carlo checks).
  double statistic = 0.0;
  double tolerance = 0.0;
  std::size_t trials = 0;
  std::string detail;
};

inline constexpr double kGroupLawTolerance = 1e-12;
inline constexpr double kInvarianceTolerance = 1e-10;

/// Closure, associativity, identity and inverse of the sample group, checked
/// on (c, a) and through apply_sample, plus the homomorphism law for
/// induce_param, induce_decision_beta and induce_decision_cov.
CheckResult check_group_laws(const Design& design, std::size_t count, std::uint64_t seed);

/// Each loss is unchanged when decision and parameter move together.
CheckResult check_loss_invariance(const Design& design, std::size_t count, std::uint64_t seed);

/// transport(theta1, theta2) carries theta1 to theta2.
CheckResult check_transitivity(const Design& design, std::size_t count, std::uint64_t seed);

/// maximal_invariant(g(y)) == maximal_invariant(y). Samples whose blocks are
/// nearly degenerate (|last - first| < 1e-3 max(1, |first|, |last|)) are
/// redrawn. Skipped when no population is replicated.
CheckResult check_maximal_invariance(const Design& design, std::size_t count, std::uint64_t seed);

}  // namespace mre
