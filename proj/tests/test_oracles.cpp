#include <gtest/gtest.h>

#include "oracles.hpp"

namespace evbreak {
namespace {

TEST(StepIntegralOracle, EveryWindowOfARandomSample) { EXPECT_LE(oracles::step_integral_gap(), 1e-12); }

TEST(PickandsBounds, EveryWindowOfTieFreeSamples) {
  const auto r = oracles::pickands_bounds();
  EXPECT_TRUE(r.endpoints_exact);
  EXPECT_GE(r.min, 0.0);
  EXPECT_LE(r.max, 7.0);
}

TEST(ClosedFormIntegralIdentity, RandomWindowsTimesAndMultipliers) {
  EXPECT_LE(oracles::integral_identity_gap(), 1e-10);
}

TEST(WeightSums, ZeroOnEveryWindow) { EXPECT_LE(oracles::weight_sum_gap(), 1e-12); }

TEST(ThetaEquivalence, ConvexCombinationMatchesAdaptedPseudoObservations) {
  EXPECT_LE(oracles::theta_combination_gap(), 1e-15);
}

TEST(BivariateSpecialisation, WeightsAreBitIdentical) { EXPECT_TRUE(oracles::bivariate_specialisation_exact()); }

TEST(RankInvariance, StatisticsFieldsAndReplicatesAreBitIdentical) {
  EXPECT_TRUE(oracles::rank_invariance_exact());
}

}  // namespace
}  // namespace evbreak
