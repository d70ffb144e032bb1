#include "mre/risk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "mre/error.hpp"
#include "mre/groups.hpp"
#include "mre/rng.hpp"
#include "mre/special.hpp"
#include "mre/verify.hpp"

namespace mre {

void MeanAccumulator::add(double x) noexcept {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
}

void MeanAccumulator::merge(const MeanAccumulator& other) noexcept {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double n1 = static_cast<double>(count_);
  const double n2 = static_cast<double>(other.count_);
  const double n = n1 + n2;
  const double delta = other.mean_ - mean_;
  mean_ += delta * (n2 / n);
  m2_ += other.m2_ + delta * delta * (n1 * n2 / n);
  count_ += other.count_;
}

double MeanAccumulator::variance() const noexcept {
  return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
}

double MeanAccumulator::std_error() const noexcept {
  return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
}

namespace {

unsigned resolve_threads(const RiskOptions& options, std::size_t blocks) {
  unsigned t = options.threads;
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(1, blocks)));
}

/// Calls body(block, begin, end) for every block of kReplicateBlock
/// replicates. Blocks are claimed dynamically; results must be stored by
/// block index.
template <typename Body>
void for_each_block(std::uint64_t replicates, const RiskOptions& options, Body&& body) {
  const std::uint64_t blocks = (replicates + kReplicateBlock - 1) / kReplicateBlock;
  const unsigned threads = resolve_threads(options, blocks);
  auto run_block = [&](std::uint64_t b) {
    const std::uint64_t begin = b * kReplicateBlock;
    body(b, begin, std::min(replicates, begin + kReplicateBlock));
  };
  if (threads <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        for (std::uint64_t b = next++; b < blocks; b = next++) run_block(b);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

RiskEstimate to_estimate(const MeanAccumulator& acc, std::uint64_t seed, std::uint64_t failed) {
  if (acc.count() < 2) {
    throw Error(ErrorKind::NotEstimable, "fewer than two usable replicates (" + std::to_string(failed) + " failed)");
  }
  return {acc.mean(), acc.std_error(), acc.count(), seed, failed};
}

int degrees_of_freedom(const Design& design, Index i) { return static_cast<int>(design.block_size(i)) - 1; }

}  // namespace

void check_compatible(const Estimator& estimator, LossKind loss) {
  if (estimates_covariance(estimator) != is_covariance_loss(loss)) {
    throw Error(ErrorKind::IncompatiblePair,
                "estimator '" + describe(estimator) + "' cannot be scored with loss '" + std::string(to_string(loss)) + "'");
  }
}

RiskBreakdown mc_risk_breakdown(const Design& design, const Estimator& estimator, LossKind loss,
                                const ParameterPoint& theta, std::uint64_t replicates, std::uint64_t seed,
                                const RiskOptions& options) {
  check_compatible(estimator, loss);
  if (replicates < 2) throw Error(ErrorKind::InvalidParameter, "need at least two replicates");
  if (is_covariance_loss(loss) && !design.fully_replicated()) {
    throw Error(ErrorKind::NotEstimable, "covariance risk needs every population replicated");
  }
  const ResponseSampler sampler(design, theta, seed);
  const Index p = design.populations();
  const bool per_population = is_covariance_loss(loss);
  const std::size_t slots = per_population ? static_cast<std::size_t>(p) + 1 : 1;

  struct BlockResult {
    std::vector<MeanAccumulator> acc;
    std::uint64_t failed = 0;
  };
  const std::uint64_t blocks = (replicates + kReplicateBlock - 1) / kReplicateBlock;
  std::vector<BlockResult> results(blocks);

  for_each_block(replicates, options, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
    BlockResult& out = results[b];
    out.acc.assign(slots, {});
    Vector y;
    for (std::uint64_t r = begin; r < end; ++r) {
      sampler.draw_into(r, y);
      const ResponseVector response(design, y);
      try {
        const Vector d = estimate(design, estimator, response);
        if (loss == LossKind::Beta) {
          out.acc[0].add(loss_beta(design, d, theta));
          continue;
        }
        const Vector terms = loss == LossKind::Quad ? loss_quad_terms(d, theta.sigma2())
                                                    : loss_lik_terms(d, theta.sigma2());
        out.acc[0].add(terms.sum());
        for (Index i = 0; i < p; ++i) out.acc[static_cast<std::size_t>(i) + 1].add(terms[i]);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::DegenerateBlock || e.kind() == ErrorKind::ZeroVariance) {
          ++out.failed;
        } else {
          throw;
        }
      }
    }
  });

  std::vector<MeanAccumulator> total(slots);
  std::uint64_t failed = 0;
  for (const auto& block : results) {
    for (std::size_t s = 0; s < slots; ++s) total[s].merge(block.acc[s]);
    failed += block.failed;
  }
  RiskBreakdown out;
  out.total = to_estimate(total[0], seed, failed);
  for (std::size_t s = 1; s < slots; ++s) out.populations.push_back(to_estimate(total[s], seed, failed));
  return out;
}

RiskEstimate mc_risk(const Design& design, const Estimator& estimator, LossKind loss, const ParameterPoint& theta,
                     std::uint64_t replicates, std::uint64_t seed, const RiskOptions& options) {
  return mc_risk_breakdown(design, estimator, loss, theta, replicates, seed, options).total;
}

double analytic_risk_beta(const Design& design) {
  if (!design.single_tail()) throw Error(ErrorKind::WrongShape, "analytic coefficient risk needs a single-tail design");
  const auto p = static_cast<double>(design.populations());
  const auto n = static_cast<double>(design.observations());
  return (p - 1.0) + 1.0 / (n - p + 1.0);
}

double analytic_risk_beta(const Design& design, const Vector& omega) {
  const double base = analytic_risk_beta(design);
  if (omega.size() != design.populations()) throw Error(ErrorKind::DimensionMismatch, "omega length must equal p");
  const double w = omega[omega.size() - 1];
  return base + w * w;
}

double analytic_risk_quad(double h, int nu) {
  if (nu < 1) throw Error(ErrorKind::Domain, "degrees of freedom must be >= 1");
  if (!(h >= 0.0) || !std::isfinite(h)) throw Error(ErrorKind::Domain, "weight must be non-negative");
  const double v = nu;
  return h * h * (v + 2.0) / v - 2.0 * h + 1.0;
}

double expected_log_scaled_chi2(int nu) {
  if (nu < 1) throw Error(ErrorKind::Domain, "degrees of freedom must be >= 1");
  const double v = nu;
  return digamma(0.5 * v) + std::log(2.0) - std::log(v);
}

double analytic_risk_lik(int nu) { return -expected_log_scaled_chi2(nu); }

double analytic_risk_lik(int nu, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error(ErrorKind::Domain, "weight must be positive");
  return h - std::log(h) - 1.0 + analytic_risk_lik(nu);
}

std::optional<double> analytic_risk(const Design& design, const Estimator& estimator, LossKind loss) {
  check_compatible(estimator, loss);
  if (const auto* cov = std::get_if<CovEstimator>(&estimator)) {
    if (!design.fully_replicated()) return std::nullopt;
    const auto h = cov->weights.constant_for(design);
    if (!h) return std::nullopt;
    double total = 0.0;
    for (Index i = 0; i < design.populations(); ++i) {
      const int nu = degrees_of_freedom(design, i);
      total += loss == LossKind::Quad ? analytic_risk_quad((*h)[i], nu) : analytic_risk_lik(nu, (*h)[i]);
    }
    return total;
  }
  if (!design.single_tail()) return std::nullopt;
  if (std::holds_alternative<OlsEstimator>(estimator)) return analytic_risk_beta(design);
  const auto& omega = std::get<EquivariantBetaEstimator>(estimator).omega;
  if (omega.is_zero()) return analytic_risk_beta(design);
  if (omega.constant_value()) return analytic_risk_beta(design, *omega.constant_value());
  return std::nullopt;
}

std::vector<double> make_grid(double start, double step, std::size_t count) {
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = start + step * static_cast<double>(i);
    // snap to 12 decimals so decimal grids print as written (0.15, not 0.15000000000000002)
    const double snapped = std::round(v * 1e12) / 1e12;
    grid[i] = std::abs(v) < 1e3 ? snapped : v;
  }
  return grid;
}

SweepResult dominance_sweep(const Design& design, LossKind loss, std::span<const double> h_grid,
                            const ParameterPoint& theta, std::uint64_t replicates, std::uint64_t seed,
                            const RiskOptions& options) {
  if (!is_covariance_loss(loss)) throw Error(ErrorKind::IncompatiblePair, "sweeps use covariance losses");
  if (!design.fully_replicated()) throw Error(ErrorKind::NotEstimable, "every population needs two responses");
  if (h_grid.empty()) throw Error(ErrorKind::InvalidParameter, "empty grid");
  if (replicates < 2) throw Error(ErrorKind::InvalidParameter, "need at least two replicates");
  for (std::size_t k = 0; k < h_grid.size(); ++k) {
    if (!(h_grid[k] > 0.0) || !std::isfinite(h_grid[k])) throw Error(ErrorKind::InvalidParameter, "grid must be positive");
    if (k > 0 && !(h_grid[k] > h_grid[k - 1])) {
      throw Error(ErrorKind::InvalidParameter, "grid must be strictly increasing");
    }
  }
  const ResponseSampler sampler(design, theta, seed);
  const Index p = design.populations();
  const std::size_t g = h_grid.size();
  const std::size_t stride = static_cast<std::size_t>(p) + 1;

  struct BlockResult {
    std::vector<MeanAccumulator> acc;  // [grid point][total, pop 0, ..., pop p-1]
    std::uint64_t failed = 0;
  };
  const std::uint64_t blocks = (replicates + kReplicateBlock - 1) / kReplicateBlock;
  std::vector<BlockResult> results(blocks);

  for_each_block(replicates, options, [&](std::uint64_t b, std::uint64_t begin, std::uint64_t end) {
    BlockResult& out = results[b];
    out.acc.assign(g * stride, {});
    Vector y;
    Vector terms(p);
    for (std::uint64_t r = begin; r < end; ++r) {
      sampler.draw_into(r, y);
      const Vector ratio =
          sufficient_stats(design, ResponseVector(design, y)).variance_vector().cwiseQuotient(theta.sigma2());
      if (loss == LossKind::Lik && (ratio.array() <= 0.0).any()) {
        ++out.failed;
        continue;
      }
      for (std::size_t k = 0; k < g; ++k) {
        const double h = h_grid[k];
        for (Index i = 0; i < p; ++i) {
          const double rk = h * ratio[i];
          terms[i] = loss == LossKind::Quad ? (rk - 1.0) * (rk - 1.0) : rk - std::log(rk) - 1.0;
        }
        out.acc[k * stride].add(terms.sum());
        for (Index i = 0; i < p; ++i) out.acc[k * stride + static_cast<std::size_t>(i) + 1].add(terms[i]);
      }
    }
  });

  std::vector<MeanAccumulator> total(g * stride);
  std::uint64_t failed = 0;
  for (const auto& block : results) {
    for (std::size_t s = 0; s < total.size(); ++s) total[s].merge(block.acc[s]);
    failed += block.failed;
  }

  SweepResult out;
  out.grid.assign(h_grid.begin(), h_grid.end());
  out.argmin_by_population.assign(static_cast<std::size_t>(p), 0);
  for (std::size_t k = 0; k < g; ++k) {
    SweepPoint point;
    point.h = h_grid[k];
    point.total = to_estimate(total[k * stride], seed, failed);
    for (Index i = 0; i < p; ++i) {
      point.populations.push_back(to_estimate(total[k * stride + static_cast<std::size_t>(i) + 1], seed, failed));
    }
    out.points.push_back(std::move(point));
  }
  for (std::size_t k = 1; k < g; ++k) {
    if (out.points[k].total.mean_loss < out.points[out.argmin_total].total.mean_loss) out.argmin_total = k;
    for (std::size_t i = 0; i < static_cast<std::size_t>(p); ++i) {
      auto& best = out.argmin_by_population[i];
      if (out.points[k].populations[i].mean_loss < out.points[best].populations[i].mean_loss) best = k;
    }
  }
  return out;
}

OrbitReport orbit_constancy_check(const Design& design, const Estimator& estimator, LossKind loss,
                                  std::span<const ParameterPoint> thetas, std::uint64_t replicates, std::uint64_t seed,
                                  bool common_random_numbers, const RiskOptions& options) {
  OrbitReport report;
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const std::uint64_t s = common_random_numbers ? seed : substream_seed(tagged_seed(seed, StreamTag::Orbit), k);
    report.thetas.push_back(thetas[k]);
    report.risks.push_back(mc_risk(design, estimator, loss, thetas[k], replicates, s, options));
  }
  for (std::size_t i = 0; i < report.risks.size(); ++i) {
    for (std::size_t j = i + 1; j < report.risks.size(); ++j) {
      const auto& a = report.risks[i];
      const auto& b = report.risks[j];
      const double se = std::hypot(a.std_error, b.std_error);
      const double diff = std::abs(a.mean_loss - b.mean_loss);
      const double z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      report.max_z = std::max(report.max_z, z);
    }
  }
  report.pass = report.max_z <= kRiskBandSe;
  return report;
}

EquivarianceReport equivariance_check(const Design& design, const Estimator& estimator, std::size_t transform_count,
                                      std::size_t sample_count, std::uint64_t seed) {
  constexpr std::size_t kMaxRetries = 100;
  const Index p = design.populations();
  EquivarianceReport report;
  const std::uint64_t transform_seed = tagged_seed(seed, StreamTag::Transforms);
  const std::uint64_t sample_seed = tagged_seed(seed, StreamTag::Responses);
  const std::uint64_t param_seed = tagged_seed(seed, StreamTag::Parameters);

  // Draw the samples once; each is paired with every transform.
  std::vector<ResponseVector> samples;
  std::vector<Vector> estimates;
  std::uint64_t draw = 0;
  while (samples.size() < sample_count) {
    if (report.resampled > kMaxRetries) {
      throw Error(ErrorKind::DegenerateBlock, "too many degenerate samples in equivariance check");
    }
    Engine engine = substream(param_seed, draw);
    const ParameterPoint theta = random_parameter(engine, p);
    const ResponseVector y = ResponseSampler(design, theta, sample_seed).draw(draw);
    ++draw;
    try {
      estimates.push_back(estimate(design, estimator, y));
      samples.push_back(y);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateBlock) throw;
      ++report.resampled;
    }
  }

  for (std::size_t t = 0; t < transform_count; ++t) {
    Engine engine = substream(transform_seed, t);
    const SampleTransform g = random_transform(engine, p);
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const Vector moved = estimate(design, estimator, apply_sample(design, g, samples[s]));
      const Vector induced = estimates_covariance(estimator) ? induce_decision_cov(g, estimates[s])
                                                             : induce_decision_beta(design, g, estimates[s]);
      report.max_deviation = std::max(report.max_deviation, relative_deviation(moved, induced));
      ++report.pairs;
    }
  }
  report.pass = report.max_deviation <= kEquivarianceTolerance;
  return report;
}

}  // namespace mre
