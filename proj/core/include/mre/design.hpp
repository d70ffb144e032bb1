#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/LU>

#include "mre/types.hpp"

namespace mre {

/// Largest accepted 2-norm condition number of the population covariate
/// matrix. Anything above is treated as singular.
inline constexpr double kMaxDesignCondition = 1e12;

/**
 * Fixed-X replicated design.
 *
 * Rows of `xp` are the p distinct population covariate vectors. Population i
 * contributes `reps[i]` consecutive responses; responses are always laid out
 * block by block in population order. Every diagonal n x n object in the
 * model (covariance, scale transform) is the block expansion of a p-vector,
 * so nothing n x n is ever stored.
 */
class Design {
 public:
  /// Validates and builds; see build_design().
  Design(Matrix xp, std::vector<std::size_t> reps);

  [[nodiscard]] Index populations() const noexcept { return xp_.rows(); }
  [[nodiscard]] Index observations() const noexcept { return static_cast<Index>(boundaries_.back()); }

  [[nodiscard]] const Matrix& xp() const noexcept { return xp_; }
  [[nodiscard]] std::span<const std::size_t> reps() const noexcept { return reps_; }
  /// N_0 = 0, N_i = n_1 + ... + n_i; p + 1 entries.
  [[nodiscard]] std::span<const std::size_t> boundaries() const noexcept { return boundaries_; }
  [[nodiscard]] std::size_t block_begin(Index i) const { return boundaries_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] std::size_t block_end(Index i) const { return boundaries_.at(static_cast<std::size_t>(i) + 1); }
  [[nodiscard]] std::size_t block_size(Index i) const { return reps_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] double condition_number() const noexcept { return condition_; }

  /// True for the single-tail layout reps = (1, ..., 1, n - p + 1).
  [[nodiscard]] bool single_tail() const noexcept;
  /// True when every population has at least two responses.
  [[nodiscard]] bool fully_replicated() const noexcept;

  /// xp * v
  [[nodiscard]] Vector apply_xp(const Vector& v) const;
  /// xp^{-1} * v
  [[nodiscard]] Vector solve_xp(const Vector& v) const;

 private:
  Matrix xp_;
  std::vector<std::size_t> reps_;
  std::vector<std::size_t> boundaries_;
  Eigen::PartialPivLU<Matrix> lu_;
  double condition_ = 0.0;
};

/// Throws SingularDesign if xp is not square/finite or its condition number
/// exceeds kMaxDesignCondition, BadReplication if some n_i is zero or
/// n < p + 1.
Design build_design(Matrix xp, std::vector<std::size_t> reps);

/// Single-tail design: p - 1 singleton populations followed by one population
/// observed n - p + 1 times.
Design single_tail_design(Matrix xp, std::size_t n);

/// Coefficients and per-population variances. Variances must be finite and
/// strictly positive.
class ParameterPoint {
 public:
  ParameterPoint(Vector beta, Vector sigma2);

  /// beta = 0, sigma2 = 1.
  static ParameterPoint reference(Index p);

  [[nodiscard]] Index dimension() const noexcept { return beta_.size(); }
  [[nodiscard]] const Vector& beta() const noexcept { return beta_; }
  [[nodiscard]] const Vector& sigma2() const noexcept { return sigma2_; }

 private:
  Vector beta_;
  Vector sigma2_;
};

/// A response vector whose length has been checked against a design.
class ResponseVector {
 public:
  ResponseVector(const Design& design, Vector y);

  [[nodiscard]] const Vector& values() const noexcept { return y_; }
  [[nodiscard]] Index size() const noexcept { return y_.size(); }
  [[nodiscard]] double operator[](Index i) const { return y_[i]; }

 private:
  Vector y_;
};

/// Per-population means and unbiased variances. A variance is absent when its
/// population has a single response.
struct SufficientStats {
  Vector means;
  std::vector<std::optional<double>> variances;
  std::vector<std::size_t> reps;

  /// All variances as a vector; throws NotEstimable when any is absent.
  [[nodiscard]] Vector variance_vector() const;
};

/// K * v: entry i of v repeated n_i times.
Vector expand(const Design& design, const Vector& v);

SufficientStats sufficient_stats(const Design& design, const ResponseVector& y);

/// Draws responses from N_n(X beta, Sigma). Draw `index` is a pure function of
/// (seed, index), so draws can be produced in any order or in parallel.
class ResponseSampler {
 public:
  ResponseSampler(Design design, const ParameterPoint& theta, std::uint64_t seed);

  [[nodiscard]] ResponseVector draw(std::uint64_t index) const;
  /// Writes draw `index` into `out` (length n) without allocating.
  void draw_into(std::uint64_t index, Vector& out) const;

  [[nodiscard]] const Design& design() const noexcept { return design_; }
  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

 private:
  Design design_;
  Vector mean_;
  Vector sd_;
  std::uint64_t seed_;
};

/// The first `count` draws of ResponseSampler(design, theta, seed).
std::vector<ResponseVector> sample_responses(const Design& design, const ParameterPoint& theta,
                                             std::uint64_t seed, std::size_t count);

}  // namespace mre
