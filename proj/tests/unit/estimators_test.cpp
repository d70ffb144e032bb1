#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "mre/error.hpp"
#include "mre/estimators.hpp"
#include "mre/rng.hpp"
#include "mre/verify.hpp"
#include "oracles.hpp"

using namespace mre;

namespace {

Matrix lower_design() {
  Matrix xp(2, 2);
  xp << 1, 0, 1, 1;
  return xp;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return ErrorKind::Parse;
}

}  // namespace

TEST(OlsBeta, Examples) {
  const Design id = build_design(Matrix::Identity(2, 2), {1, 3});
  const ResponseVector y(id, Vector{{1.0, 2.0, 4.0, 6.0}});
  EXPECT_LE(relative_deviation(ols_beta(id, y), Vector{{1.0, 4.0}}), 1e-15);
  EXPECT_LE(relative_deviation(mre::testing::normal_equations(id.xp(), {1, 3}, y.values()), Vector{{1.0, 4.0}}), 1e-14);

  const Design lo = build_design(lower_design(), {1, 3});
  const ResponseVector y2(lo, Vector{{1.0, 2.0, 4.0, 6.0}});
  EXPECT_LE(relative_deviation(ols_beta(lo, y2), Vector{{1.0, 3.0}}), 1e-15);
}

TEST(OlsBeta, InterpolatesNoiselessResponses) {
  Matrix xp(3, 3);
  xp << 1, 2, 0, 0, 1, -1, 3, 0, 1;
  const Design d = build_design(xp, {2, 1, 3});
  const Vector beta{{0.25, -1.5, 2.0}};
  const ResponseVector y(d, expand(d, d.apply_xp(beta)));
  EXPECT_LE(relative_deviation(ols_beta(d, y), beta), 1e-14);
}

TEST(OlsBeta, MatchesNormalEquations) {
  for (std::uint64_t k = 0; k < 200; ++k) {
    Engine engine = substream(4242, k);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> reps_dist(1, 4);
    const Index p = 1 + static_cast<Index>(k % 4);
    Matrix xp = Matrix::Identity(p, p);
    for (Index i = 0; i < p; ++i)
      for (Index j = 0; j < p; ++j) xp(i, j) += 0.4 * u(engine);
    std::vector<std::size_t> reps(static_cast<std::size_t>(p));
    for (auto& r : reps) r = static_cast<std::size_t>(reps_dist(engine));
    reps.back() += 1;  // n >= p + 1
    const Design d = build_design(xp, reps);
    const ParameterPoint theta = random_parameter(engine, p);
    const ResponseVector y = ResponseSampler(d, theta, k).draw(0);
    ASSERT_LE(relative_deviation(ols_beta(d, y), mre::testing::normal_equations(xp, reps, y.values())), 1e-10);
  }
}

TEST(S0Scale, TailStandardDeviation) {
  const Design d = build_design(Matrix::Identity(2, 2), {1, 3});
  const Vector s = s0_scale(d, ResponseVector(d, Vector{{7.0, 2.0, 4.0, 6.0}}));
  EXPECT_EQ(s[0], 0.0);
  EXPECT_DOUBLE_EQ(s[1], 2.0);  // variance 4
  EXPECT_EQ(s0_scale(d, ResponseVector(d, Vector{{7.0, 3.0, 3.0, 3.0}})), Vector::Zero(2));
}

TEST(S0Scale, WrongShape) {
  const Design d = build_design(Matrix::Identity(2, 2), {2, 2});
  EXPECT_EQ(kind_of([&] { (void)s0_scale(d, ResponseVector(d, Vector::Ones(4))); }), ErrorKind::WrongShape);
  EXPECT_EQ(kind_of([&] { (void)equivariant_beta(d, ResponseVector(d, Vector::Ones(4)), OmegaSpec::zero()); }),
            ErrorKind::WrongShape);
}

TEST(S0Scale, ScalesWithDegreeOne) {
  const Design d = build_design(lower_design(), {1, 4});
  const ResponseVector y(d, Vector{{0.3, 1.0, -0.5, 2.0, 0.25}});
  const SampleTransform g(Vector{{3.0, 2.5}}, Vector{{-1.0, 4.0}});
  EXPECT_LE(relative_deviation(s0_scale(d, apply_sample(d, g, y)), g.c().cwiseProduct(s0_scale(d, y))), 1e-14);
}

TEST(EquivariantBeta, ZeroOmegaIsOls) {
  const Design d = build_design(lower_design(), {1, 3});
  const ResponseVector y(d, Vector{{1.0, 2.0, 4.0, 6.0}});
  EXPECT_EQ(equivariant_beta(d, y, OmegaSpec::zero()), ols_beta(d, y));
  // zero omega needs no maximal invariant, so a degenerate tail is fine
  const ResponseVector flat(d, Vector{{1.0, 2.0, 2.0, 2.0}});
  EXPECT_EQ(equivariant_beta(d, flat, OmegaSpec::zero()), ols_beta(d, flat));
}

TEST(EquivariantBeta, ConstantOmegaShiftsLastCoordinate) {
  const Design d = build_design(Matrix::Identity(2, 2), {1, 3});
  const ResponseVector y(d, Vector{{1.0, 2.0, 4.0, 6.0}});  // tail sd = 2
  const Vector est = equivariant_beta(d, y, OmegaSpec::constant(Vector{{0.0, 1.0}}));
  EXPECT_LE(relative_deviation(est, ols_beta(d, y) + Vector{{0.0, 2.0}}), 1e-15);
}

TEST(EquivariantBeta, DegenerateTailPropagates) {
  const Design d = build_design(Matrix::Identity(2, 2), {1, 3});
  const ResponseVector flat(d, Vector{{1.0, 2.0, 5.0, 2.0}});
  EXPECT_EQ(kind_of([&] { (void)equivariant_beta(d, flat, OmegaSpec::constant(Vector{{0.0, 1.0}})); }),
            ErrorKind::DegenerateBlock);
}

TEST(EquivariantBeta, CustomOmegaBoundEnforced) {
  const Design d = build_design(Matrix::Identity(2, 2), {1, 4});
  const ResponseVector y(d, Vector{{0.0, 1.0, 5.0, 2.0, 3.0}});
  const auto wild = OmegaSpec::custom([](const MaximalInvariant&) { return Vector{{0.0, 10.0}}; }, 1.0);
  EXPECT_EQ(kind_of([&] { (void)equivariant_beta(d, y, wild); }), ErrorKind::BoundExceeded);
}

TEST(EquivariantBeta, EquivariantForBoundedOmega) {
  Matrix xp(3, 3);
  xp << 1, 0.2, 0, 0, 1, 0.5, 0.3, 0, 1;
  const Design d = single_tail_design(xp, 8);
  // omega depending on z through a bounded map
  const auto omega = OmegaSpec::custom(
      [](const MaximalInvariant& z) {
        double acc = z.blocks.front().sign;
        for (double r : z.blocks.front().ratios) acc += std::tanh(r);
        return Vector{{std::sin(acc), 0.5 * std::cos(acc), std::tanh(acc)}};
      },
      1.0);
  for (std::uint64_t k = 0; k < 1000; ++k) {
    Engine engine = substream(99, k);
    const SampleTransform g = random_transform(engine, 3);
    const ParameterPoint theta = random_parameter(engine, 3);
    const ResponseVector y = ResponseSampler(d, theta, 11).draw(k);
    const Vector lhs = equivariant_beta(d, apply_sample(d, g, y), omega);
    const Vector rhs = induce_decision_beta(d, g, equivariant_beta(d, y, omega));
    ASSERT_LE(relative_deviation(lhs, rhs), 1e-10) << "trial " << k;
  }
}

TEST(EquivariantBeta, DistinctConstantsGiveDistinctEstimates) {
  const Design d = build_design(lower_design(), {1, 4});
  const ResponseVector y(d, Vector{{0.0, 1.0, 5.0, 2.0, 3.0}});
  const Vector a = equivariant_beta(d, y, OmegaSpec::constant(Vector{{0.0, 0.5}}));
  const Vector b = equivariant_beta(d, y, OmegaSpec::constant(Vector{{0.0, 0.6}}));
  EXPECT_GT((a - b).norm(), 1e-3);
}

TEST(ShrinkageWeights, Values) {
  EXPECT_LE(relative_deviation(shrinkage_weights(build_design(Matrix::Identity(2, 2), {3, 5})),
                               Vector{{0.5, 2.0 / 3.0}}),
            1e-15);
  EXPECT_LE(relative_deviation(shrinkage_weights(build_design(Matrix::Identity(2, 2), {2, 2})),
                               Vector{{1.0 / 3.0, 1.0 / 3.0}}),
            1e-15);
  EXPECT_EQ(kind_of([] { (void)shrinkage_weights(build_design(Matrix::Identity(2, 2), {1, 4})); }),
            ErrorKind::NotEstimable);
}

TEST(CovEstimate, WeightedVariances) {
  const Design d = build_design(Matrix::Identity(2, 2), {3, 3});
  const ResponseVector y(d, Vector{{2.0, 4.0, 6.0, 0.0, 3.0, 6.0}});  // s^2 = (4, 9)
  EXPECT_LE(relative_deviation(cov_estimate(d, y, CovWeights::shrinkage()), Vector{{2.0, 4.5}}), 1e-15);
  EXPECT_LE(relative_deviation(cov_estimate(d, y, CovWeights::constant(Vector{{0.5, 0.5}})), Vector{{2.0, 4.5}}),
            1e-15);
  EXPECT_LE(relative_deviation(cov_estimate(d, y, CovWeights::unit()), Vector{{4.0, 9.0}}), 1e-15);
}

TEST(CovEstimate, Errors) {
  const Design d = build_design(Matrix::Identity(2, 2), {1, 3});
  EXPECT_EQ(kind_of([&] { (void)cov_estimate(d, ResponseVector(d, Vector::Ones(4)), CovWeights::unit()); }),
            ErrorKind::NotEstimable);
  EXPECT_THROW(CovWeights::constant(Vector{{1.0, 0.0}}), Error);
}

TEST(CovEstimate, ScaleEquivariantForConstantAndInvariantWeights) {
  const Design d = build_design(Matrix::Identity(3, 3), {2, 3, 4});
  const auto by_z = CovWeights::custom([](const MaximalInvariant& z) {
    Vector h(3);
    for (std::size_t b = 0; b < 3; ++b) h[static_cast<Index>(b)] = 1.0 + 0.5 * z.blocks[b].sign;
    return h;
  });
  for (std::uint64_t k = 0; k < 500; ++k) {
    Engine engine = substream(8, k);
    const SampleTransform g = random_transform(engine, 3);
    const ResponseVector y = ResponseSampler(d, random_parameter(engine, 3), 21).draw(k);
    for (const auto& w : {CovWeights::shrinkage(), CovWeights::constant(Vector{{0.3, 1.2, 2.0}}), by_z}) {
      ASSERT_LE(relative_deviation(cov_estimate(d, apply_sample(d, g, y), w),
                                   induce_decision_cov(g, cov_estimate(d, y, w))),
                1e-10);
    }
  }
}

TEST(ParseEstimator, Specs) {
  EXPECT_TRUE(std::holds_alternative<OlsEstimator>(parse_estimator("ols")));
  const auto eq = parse_estimator("equivariant:omega=0,1");
  ASSERT_TRUE(std::holds_alternative<EquivariantBetaEstimator>(eq));
  EXPECT_EQ(*std::get<EquivariantBetaEstimator>(eq).omega.constant_value(), (Vector{{0.0, 1.0}}));
  EXPECT_TRUE(std::get<EquivariantBetaEstimator>(parse_estimator("equivariant:omega=zero")).omega.is_zero());
  EXPECT_EQ(describe(parse_estimator("cov:W")), "cov:W");
  EXPECT_EQ(describe(parse_estimator("cov:I")), "cov:I");
  EXPECT_EQ(describe(parse_estimator("cov:h=[0.5, 0.25]")), "cov:h=0.5,0.25");
  EXPECT_TRUE(estimates_covariance(parse_estimator("cov:h=1")));
  EXPECT_THROW(parse_estimator("bayes"), Error);
  EXPECT_THROW(parse_estimator("cov:h=1,x"), Error);
  EXPECT_THROW(parse_estimator("cov:h=1,-1"), Error);
}
