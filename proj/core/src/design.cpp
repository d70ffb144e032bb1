#include "mre/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/SVD>

#include "mre/error.hpp"
#include "mre/rng.hpp"

namespace mre {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

Design::Design(Matrix xp, std::vector<std::size_t> reps) : xp_(std::move(xp)), reps_(std::move(reps)) {
  if (xp_.rows() == 0 || xp_.rows() != xp_.cols()) {
    throw Error(ErrorKind::SingularDesign, "population covariate matrix must be square and non-empty, got " +
                                               std::to_string(xp_.rows()) + "x" + std::to_string(xp_.cols()));
  }
  if (static_cast<Index>(reps_.size()) != xp_.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(xp_.rows()) +
                                                  " replication counts, got " + std::to_string(reps_.size()));
  }
  if (!all_finite(xp_)) throw Error(ErrorKind::SingularDesign, "covariate matrix has non-finite entries");

  Eigen::JacobiSVD<Matrix> svd(xp_);
  const Vector& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  condition_ = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(condition_ <= kMaxDesignCondition)) {
    throw Error(ErrorKind::SingularDesign, "covariate matrix condition number " + std::to_string(condition_) +
                                               " exceeds threshold");
  }

  boundaries_.assign(1, 0);
  for (std::size_t i = 0; i < reps_.size(); ++i) {
    if (reps_[i] == 0) {
      throw Error(ErrorKind::BadReplication, "population " + std::to_string(i) + " has no responses");
    }
    boundaries_.push_back(boundaries_.back() + reps_[i]);
  }
  const std::size_t n = boundaries_.back();
  const auto p = static_cast<std::size_t>(xp_.rows());
  if (n < p + 1) {
    throw Error(ErrorKind::BadReplication,
                "need n >= p + 1 responses, got n = " + std::to_string(n) + " with p = " + std::to_string(p));
  }
  lu_.compute(xp_);
}

bool Design::single_tail() const noexcept {
  for (std::size_t i = 0; i + 1 < reps_.size(); ++i) {
    if (reps_[i] != 1) return false;
  }
  return reps_.back() >= 2;
}

bool Design::fully_replicated() const noexcept {
  return std::all_of(reps_.begin(), reps_.end(), [](std::size_t r) { return r >= 2; });
}

Vector Design::apply_xp(const Vector& v) const {
  if (v.size() != populations()) throw Error(ErrorKind::DimensionMismatch, "vector length must equal p");
  return xp_ * v;
}

Vector Design::solve_xp(const Vector& v) const {
  if (v.size() != populations()) throw Error(ErrorKind::DimensionMismatch, "vector length must equal p");
  return lu_.solve(v);
}

Design build_design(Matrix xp, std::vector<std::size_t> reps) { return Design(std::move(xp), std::move(reps)); }

Design single_tail_design(Matrix xp, std::size_t n) {
  const auto p = static_cast<std::size_t>(xp.rows());
  if (p == 0 || n < p + 1) {
    throw Error(ErrorKind::BadReplication, "single-tail design needs n >= p + 1");
  }
  std::vector<std::size_t> reps(p, 1);
  reps.back() = n - p + 1;
  return Design(std::move(xp), std::move(reps));
}

ParameterPoint::ParameterPoint(Vector beta, Vector sigma2) : beta_(std::move(beta)), sigma2_(std::move(sigma2)) {
  if (beta_.size() != sigma2_.size() || beta_.size() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "beta and sigma2 must be non-empty and of equal length");
  }
  if (!beta_.allFinite()) throw Error(ErrorKind::InvalidParameter, "beta must be finite");
  for (Index i = 0; i < sigma2_.size(); ++i) {
    if (!(sigma2_[i] > 0.0) || !std::isfinite(sigma2_[i])) {
      throw Error(ErrorKind::InvalidParameter,
                  "sigma2[" + std::to_string(i) + "] = " + std::to_string(sigma2_[i]) + " is not positive");
    }
  }
}

ParameterPoint ParameterPoint::reference(Index p) { return {Vector::Zero(p), Vector::Ones(p)}; }

ResponseVector::ResponseVector(const Design& design, Vector y) : y_(std::move(y)) {
  if (y_.size() != design.observations()) {
    throw Error(ErrorKind::DimensionMismatch, "response length " + std::to_string(y_.size()) +
                                                  " does not match design size " +
                                                  std::to_string(design.observations()));
  }
}

Vector SufficientStats::variance_vector() const {
  Vector out(static_cast<Index>(variances.size()));
  for (std::size_t i = 0; i < variances.size(); ++i) {
    if (!variances[i]) {
      throw Error(ErrorKind::NotEstimable, "population " + std::to_string(i) + " has a single response");
    }
    out[static_cast<Index>(i)] = *variances[i];
  }
  return out;
}

Vector expand(const Design& design, const Vector& v) {
  if (v.size() != design.populations()) throw Error(ErrorKind::DimensionMismatch, "vector length must equal p");
  Vector out(design.observations());
  for (Index i = 0; i < design.populations(); ++i) {
    const auto b = static_cast<Index>(design.block_begin(i));
    const auto len = static_cast<Index>(design.block_size(i));
    out.segment(b, len).setConstant(v[i]);
  }
  return out;
}

SufficientStats sufficient_stats(const Design& design, const ResponseVector& y) {
  if (y.size() != design.observations()) throw Error(ErrorKind::DimensionMismatch, "response does not fit design");
  const Index p = design.populations();
  SufficientStats stats;
  stats.means.resize(p);
  stats.variances.resize(static_cast<std::size_t>(p));
  stats.reps.assign(design.reps().begin(), design.reps().end());
  const Vector& v = y.values();
  for (Index i = 0; i < p; ++i) {
    const auto b = static_cast<Index>(design.block_begin(i));
    const auto len = static_cast<Index>(design.block_size(i));
    const auto block = v.segment(b, len);
    const double mean = block.mean();
    stats.means[i] = mean;
    if (len >= 2) {
      const double ss = (block.array() - mean).square().sum();
      stats.variances[static_cast<std::size_t>(i)] = ss / static_cast<double>(len - 1);
    }
  }
  return stats;
}

ResponseSampler::ResponseSampler(Design design, const ParameterPoint& theta, std::uint64_t seed)
    : design_(std::move(design)), seed_(seed) {
  if (theta.dimension() != design_.populations()) {
    throw Error(ErrorKind::DimensionMismatch, "parameter dimension does not match design");
  }
  mean_ = expand(design_, design_.apply_xp(theta.beta()));
  sd_ = expand(design_, theta.sigma2().cwiseSqrt());
}

void ResponseSampler::draw_into(std::uint64_t index, Vector& out) const {
  out.resize(design_.observations());
  Engine engine = substream(seed_, index);
  fill_standard_normal(engine, std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  out = mean_ + sd_.cwiseProduct(out);
}

ResponseVector ResponseSampler::draw(std::uint64_t index) const {
  Vector y;
  draw_into(index, y);
  return ResponseVector(design_, std::move(y));
}

std::vector<ResponseVector> sample_responses(const Design& design, const ParameterPoint& theta, std::uint64_t seed,
                                             std::size_t count) {
  const ResponseSampler sampler(design, theta, seed);
  std::vector<ResponseVector> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sampler.draw(i));
  return out;
}

}  // namespace mre
