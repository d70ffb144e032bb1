#include "mre/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mre/error.hpp"
#include "mre/losses.hpp"

namespace mre {

double relative_deviation(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  const double scale =
      std::max({1.0, a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>()});
  return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

double relative_deviation(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

SampleTransform random_transform(Engine& engine, Index p) {
  std::uniform_real_distribution<double> log_scale(-1.0, 1.0);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  Vector c(p);
  Vector a(p);
  for (Index i = 0; i < p; ++i) {
    c[i] = std::exp(log_scale(engine));
    a[i] = shift(engine);
  }
  return {std::move(c), std::move(a)};
}

ParameterPoint random_parameter(Engine& engine, Index p) {
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> log_var(-2.0, 2.0);
  Vector beta(p);
  Vector sigma2(p);
  for (Index i = 0; i < p; ++i) {
    beta[i] = coef(engine);
    sigma2[i] = std::exp(log_var(engine));
  }
  return {std::move(beta), std::move(sigma2)};
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Skip: return "SKIP";
  }
  return "?";
}

namespace {

Vector random_vector(Engine& engine, Index n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(engine);
  return v;
}

Vector random_positive(Engine& engine, Index n) { return random_vector(engine, n, -2.0, 2.0).array().exp().matrix(); }

Vector stack(const SampleTransform& g) {
  Vector v(2 * g.dimension());
  v << g.c(), g.a();
  return v;
}

Vector stack(const ParameterPoint& theta) {
  Vector v(2 * theta.dimension());
  v << theta.beta(), theta.sigma2();
  return v;
}

CheckResult finish(CheckResult r) {
  r.verdict = r.statistic <= r.tolerance ? Verdict::Pass : Verdict::Fail;
  return r;
}

}  // namespace

CheckResult check_group_laws(const Design& design, std::size_t count, std::uint64_t seed) {
  const Index p = design.populations();
  CheckResult r{"group_laws", Verdict::Pass, 0.0, kGroupLawTolerance, count, {}};
  auto track = [&](double dev) { r.statistic = std::max(r.statistic, dev); };
  const std::uint64_t base = tagged_seed(seed, StreamTag::Transforms);
  const SampleTransform e = SampleTransform::identity(p);

  for (std::size_t k = 0; k < count; ++k) {
    Engine engine = substream(base, k);
    const SampleTransform g1 = random_transform(engine, p);
    const SampleTransform g2 = random_transform(engine, p);
    const SampleTransform g3 = random_transform(engine, p);
    const ResponseVector y(design, random_vector(engine, design.observations(), -5.0, 5.0));
    const ParameterPoint theta = random_parameter(engine, p);
    const Vector d = random_vector(engine, p, -3.0, 3.0);
    const Vector dd = random_positive(engine, p);

    // closure: the composite is a member and acts as the sequential application
    const SampleTransform g21 = compose(g2, g1);
    track(g21.c().minCoeff() > 0.0 ? 0.0 : 1.0);
    track(relative_deviation(apply_sample(design, g21, y).values(),
                             apply_sample(design, g2, apply_sample(design, g1, y)).values()));

    // associativity
    const SampleTransform left = compose(compose(g3, g2), g1);
    const SampleTransform right = compose(g3, compose(g2, g1));
    track(relative_deviation(stack(left), stack(right)));
    track(relative_deviation(apply_sample(design, left, y).values(), apply_sample(design, right, y).values()));

    // identity
    track(relative_deviation(stack(compose(e, g1)), stack(g1)));
    track(relative_deviation(stack(compose(g1, e)), stack(g1)));
    track(relative_deviation(apply_sample(design, e, y).values(), y.values()));

    // inverse
    const SampleTransform inv = inverse(g1);
    track(relative_deviation(stack(compose(g1, inv)), stack(e)));
    track(relative_deviation(stack(compose(inv, g1)), stack(e)));
    track(relative_deviation(apply_sample(design, g1, apply_sample(design, inv, y)).values(), y.values()));

    // homomorphisms of the induced actions
    track(relative_deviation(stack(induce_param(design, g21, theta)),
                             stack(induce_param(design, g2, induce_param(design, g1, theta)))));
    track(relative_deviation(induce_decision_beta(design, g21, d),
                             induce_decision_beta(design, g2, induce_decision_beta(design, g1, d))));
    track(relative_deviation(induce_decision_cov(g21, dd), induce_decision_cov(g2, induce_decision_cov(g1, dd))));
    track(relative_deviation(stack(induce_param(design, inv, induce_param(design, g1, theta))), stack(theta)));
    track(relative_deviation(induce_decision_beta(design, inv, induce_decision_beta(design, g1, d)), d));
  }
  return finish(std::move(r));
}

CheckResult check_loss_invariance(const Design& design, std::size_t count, std::uint64_t seed) {
  const Index p = design.populations();
  CheckResult r{"loss_invariance", Verdict::Pass, 0.0, kInvarianceTolerance, count, {}};
  const std::uint64_t base = tagged_seed(seed, StreamTag::Decisions);
  double worst_beta = 0.0;
  double worst_quad = 0.0;
  double worst_lik = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    Engine engine = substream(base, k);
    const SampleTransform g = random_transform(engine, p);
    const ParameterPoint theta = random_parameter(engine, p);
    const Vector d = random_vector(engine, p, -3.0, 3.0);
    const Vector dd = random_positive(engine, p);
    const ParameterPoint moved = induce_param(design, g, theta);

    worst_beta = std::max(worst_beta, relative_deviation(loss_beta(design, d, theta),
                                                         loss_beta(design, induce_decision_beta(design, g, d), moved)));
    const Vector gd = induce_decision_cov(g, dd);
    worst_quad = std::max(worst_quad, relative_deviation(loss_quad(dd, theta.sigma2()), loss_quad(gd, moved.sigma2())));
    worst_lik = std::max(worst_lik, relative_deviation(loss_lik(dd, theta.sigma2()), loss_lik(gd, moved.sigma2())));
  }
  r.statistic = std::max({worst_beta, worst_quad, worst_lik});
  r.detail = "beta=" + std::to_string(worst_beta) + " quad=" + std::to_string(worst_quad) +
             " lik=" + std::to_string(worst_lik);
  return finish(std::move(r));
}

CheckResult check_transitivity(const Design& design, std::size_t count, std::uint64_t seed) {
  const Index p = design.populations();
  CheckResult r{"transitivity", Verdict::Pass, 0.0, kInvarianceTolerance, count, {}};
  const std::uint64_t base = tagged_seed(seed, StreamTag::Parameters);
  for (std::size_t k = 0; k < count; ++k) {
    Engine engine = substream(base, k);
    const ParameterPoint t1 = random_parameter(engine, p);
    const ParameterPoint t2 = random_parameter(engine, p);
    const SampleTransform g = transport(design, t1, t2);
    r.statistic = std::max(r.statistic, relative_deviation(stack(induce_param(design, g, t1)), stack(t2)));
  }
  return finish(std::move(r));
}

CheckResult check_maximal_invariance(const Design& design, std::size_t count, std::uint64_t seed) {
  const Index p = design.populations();
  CheckResult r{"maximal_invariance", Verdict::Pass, 0.0, kInvarianceTolerance, count, {}};
  bool any_block = false;
  for (Index i = 0; i < p; ++i) any_block = any_block || design.block_size(i) >= 2;
  if (!any_block) {
    r.verdict = Verdict::Skip;
    r.detail = "no replicated population";
    return r;
  }

  auto well_separated = [&](const ResponseVector& y) {
    for (Index i = 0; i < p; ++i) {
      if (design.block_size(i) < 2) continue;
      const double first = y[static_cast<Index>(design.block_begin(i))];
      const double last = y[static_cast<Index>(design.block_end(i)) - 1];
      if (std::abs(last - first) < 1e-3 * std::max({1.0, std::abs(first), std::abs(last)})) return false;
    }
    return true;
  };

  const std::uint64_t base = tagged_seed(seed, StreamTag::Responses);
  const std::uint64_t sample_seed = tagged_seed(base, StreamTag::Responses);
  std::size_t redrawn = 0;
  std::uint64_t draw = 0;
  for (std::size_t k = 0; k < count; ++k) {
    for (;;) {
      Engine engine = substream(base, draw++);
      const ParameterPoint theta = random_parameter(engine, p);
      const SampleTransform g = random_transform(engine, p);
      const ResponseVector y = ResponseSampler(design, theta, sample_seed).draw(draw);
      if (!well_separated(y) || !well_separated(apply_sample(design, g, y))) {
        if (++redrawn > 10 * count + 100) throw Error(ErrorKind::DegenerateBlock, "too many degenerate draws");
        continue;
      }
      const MaximalInvariant z = maximal_invariant(design, y);
      const MaximalInvariant gz = maximal_invariant(design, apply_sample(design, g, y));
      const double dev = z.max_deviation(gz);
      // ratio deviations are taken relative to the ratio size, floored at one
      double scale = 1.0;
      for (const auto& block : z.blocks) {
        for (double v : block.ratios) scale = std::max(scale, std::abs(v));
      }
      r.statistic = std::max(r.statistic, dev / scale);
      break;
    }
  }
  r.detail = "redrawn=" + std::to_string(redrawn);
  return finish(std::move(r));
}

}  // namespace mre
