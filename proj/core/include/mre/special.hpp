#pragma once

namespace mre {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// Digamma function psi(x) for x > 0: upward recurrence to x >= 10 followed
/// by the asymptotic (Bernoulli) series. Absolute error below 1e-14.
double digamma(double x);

}  // namespace mre
