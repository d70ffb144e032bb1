#include <gtest/gtest.h>

#include "mre/verify.hpp"

using namespace mre;

namespace {

Design mixed_design() {
  Matrix xp(3, 3);
  xp << 1, 0, 0, 1, 1, 0, 1, 2, 4;
  return build_design(xp, {1, 3, 4});
}

}  // namespace

TEST(RelativeDeviation, UnitFloor) {
  EXPECT_EQ(relative_deviation(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(relative_deviation(1e-3, 2e-3), 1e-3);
  EXPECT_DOUBLE_EQ(relative_deviation(100.0, 101.0), 1.0 / 101.0);
  EXPECT_DOUBLE_EQ(relative_deviation(Vector{{1.0, 200.0}}, Vector{{1.5, 200.0}}), 0.5 / 200.0);
}

TEST(RandomDraws, InRange) {
  Engine engine = substream(1, 2);
  for (int k = 0; k < 1000; ++k) {
    const auto g = random_transform(engine, 3);
    EXPECT_TRUE((g.c().array() > 0).all());
    const auto theta = random_parameter(engine, 3);
    EXPECT_TRUE((theta.sigma2().array() > 0).all());
    EXPECT_TRUE((theta.beta().array().abs() <= 3.0).all());
  }
}

TEST(Suites, PassOnMixedDesign) {
  const Design d = mixed_design();
  for (const auto& check : {check_group_laws(d, 1000, 5), check_loss_invariance(d, 1000, 5),
                            check_transitivity(d, 1000, 5), check_maximal_invariance(d, 1000, 5)}) {
    EXPECT_EQ(check.verdict, Verdict::Pass) << check.name << ": " << check.detail;
    EXPECT_EQ(check.trials, 1000u) << check.name;
    EXPECT_LE(check.statistic, check.tolerance) << check.name;
  }
}

TEST(Suites, GroupLawsAtTightTolerance) {
  const auto check = check_group_laws(mixed_design(), 1000, 6);
  EXPECT_EQ(check.tolerance, kGroupLawTolerance);
  EXPECT_LT(check.statistic, 1e-13);
}

// n >= p + 1 guarantees a replicated population, so every design has a
// non-trivial invariant; a two-response block contributes only its sign.
TEST(Suites, SignOnlyInvariant) {
  const Design d = build_design(Matrix::Identity(1, 1), {2});
  const auto check = check_maximal_invariance(d, 500, 3);
  EXPECT_EQ(check.verdict, Verdict::Pass) << check.detail;
  EXPECT_EQ(check.statistic, 0.0);
}
