#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mre/design.hpp"
#include "mre/estimators.hpp"
#include "mre/losses.hpp"

namespace mre {

/// Acceptance band for Monte Carlo comparisons, in standard errors.
inline constexpr double kRiskBandSe = 4.0;
/// Tolerance for floating-point equivariance identities.
inline constexpr double kEquivarianceTolerance = 1e-10;

struct RiskEstimate {
  double mean_loss = 0.0;
  double std_error = 0.0;
  std::uint64_t replicates = 0;
  std::uint64_t seed = 0;
  /// Replicates dropped because the estimator or loss hit a measure-zero
  /// degenerate sample (e.g. a zero variance under the likelihood loss).
  std::uint64_t failed = 0;
};

/// Risk of the total loss plus, for covariance losses, the per-population
/// terms of the loss (which sum to the total).
struct RiskBreakdown {
  RiskEstimate total;
  std::vector<RiskEstimate> populations;
};

struct RiskOptions {
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Replicates are processed in fixed blocks of this many draws; each block's
/// accumulator is merged in block order, so results do not depend on the
/// thread count.
inline constexpr std::uint64_t kReplicateBlock = 1024;

/// Running mean and sum of squared deviations (Welford), with an exact
/// pairwise merge.
class MeanAccumulator {
 public:
  void add(double x) noexcept;
  void merge(const MeanAccumulator& other) noexcept;

  [[nodiscard]] std::uint64_t count() const noexcept { return count_; }
  [[nodiscard]] double mean() const noexcept { return mean_; }
  /// Sample variance (divisor count - 1).
  [[nodiscard]] double variance() const noexcept;
  [[nodiscard]] double std_error() const noexcept;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Throws IncompatiblePair unless the estimator targets what the loss scores.
void check_compatible(const Estimator& estimator, LossKind loss);

/// Monte Carlo risk at theta with `replicates` draws of ResponseSampler(seed).
/// A pure function of its arguments; the thread count only affects speed.
RiskEstimate mc_risk(const Design& design, const Estimator& estimator, LossKind loss, const ParameterPoint& theta,
                     std::uint64_t replicates, std::uint64_t seed, const RiskOptions& options = {});

RiskBreakdown mc_risk_breakdown(const Design& design, const Estimator& estimator, LossKind loss,
                                const ParameterPoint& theta, std::uint64_t replicates, std::uint64_t seed,
                                const RiskOptions& options = {});

/// Constant risk of OLS under the coefficient loss on a single-tail design:
/// (p - 1) + 1 / (n - p + 1).
double analytic_risk_beta(const Design& design);

/// Constant risk of equivariant_beta with constant omega on a single-tail
/// design: analytic_risk_beta + omega_p^2 (only the last entry of omega acts).
double analytic_risk_beta(const Design& design, const Vector& omega);

/// Per-population quadratic-loss risk of h * s^2 with nu degrees of freedom:
/// h^2 (nu + 2) / nu - 2 h + 1.
double analytic_risk_quad(double h, int nu);

/// Per-population likelihood-loss risk of s^2 (h = 1): ln nu - ln 2 - psi(nu / 2).
double analytic_risk_lik(int nu);

/// Per-population likelihood-loss risk of h * s^2: h - ln h - 1 + analytic_risk_lik(nu).
double analytic_risk_lik(int nu, double h);

/// E ln(chi2_nu / nu) = psi(nu / 2) + ln 2 - ln nu.
double expected_log_scaled_chi2(int nu);

/// Closed-form constant risk for the estimator/loss pairs that have one
/// (OLS and constant-omega coefficient estimators on single-tail designs,
/// constant-weight covariance estimators); nullopt otherwise.
std::optional<double> analytic_risk(const Design& design, const Estimator& estimator, LossKind loss);

struct SweepPoint {
  double h = 0.0;
  RiskEstimate total;
  std::vector<RiskEstimate> populations;
};

struct SweepResult {
  std::vector<double> grid;
  std::vector<SweepPoint> points;
  /// Grid index minimizing each population's risk term.
  std::vector<std::size_t> argmin_by_population;
  /// Grid index minimizing the total risk.
  std::size_t argmin_total = 0;
};

/// Risk of the covariance estimator h * S^2 (same h for every population) at
/// every grid value. All grid points share the same draws.
SweepResult dominance_sweep(const Design& design, LossKind loss, std::span<const double> h_grid,
                            const ParameterPoint& theta, std::uint64_t replicates, std::uint64_t seed,
                            const RiskOptions& options = {});

/// `count` points start, start + step, ... computed by index to avoid drift and
/// rounded to 12 decimal places.
std::vector<double> make_grid(double start, double step, std::size_t count);

struct OrbitReport {
  std::vector<ParameterPoint> thetas;
  std::vector<RiskEstimate> risks;
  /// Largest pairwise |R_i - R_j| / sqrt(se_i^2 + se_j^2).
  double max_z = 0.0;
  bool pass = true;
};

/// Risk at each theta. With common random numbers every theta reuses the same
/// seed, so its draws are the reference draws transported through the group;
/// otherwise each theta gets an independent stream.
OrbitReport orbit_constancy_check(const Design& design, const Estimator& estimator, LossKind loss,
                                  std::span<const ParameterPoint> thetas, std::uint64_t replicates, std::uint64_t seed,
                                  bool common_random_numbers = true, const RiskOptions& options = {});

struct EquivarianceReport {
  double max_deviation = 0.0;
  std::size_t pairs = 0;
  std::size_t resampled = 0;
  bool pass = true;
};

/// max over random (g, y) of the relative deviation between
/// estimate(g(y)) and the induced action of g on estimate(y).
EquivarianceReport equivariance_check(const Design& design, const Estimator& estimator, std::size_t transform_count,
                                      std::size_t sample_count, std::uint64_t seed);

}  // namespace mre
