#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "evbreak/copula_lab.hpp"
#include "evbreak/pickands.hpp"
#include "evbreak/ranks.hpp"
#include "helpers.hpp"

namespace evbreak {
namespace {

PseudoObsBlock comonotone_pair() {
  return pseudo_obs(Sample::from_rows(2, std::vector<double>{1.0, 10.0, 2.0, 20.0}), {1, 2});
}

TEST(SubsampleS, ComonotonePair) {
  EXPECT_NEAR(subsample_S(comonotone_pair(), 0.5), 5.0 / 18.0, 1e-15);
  EXPECT_NEAR(subsample_A(comonotone_pair(), 0.5), 5.0 / 13.0, 1e-15);
}

TEST(SubsampleS, BoundaryIsOneHalf) {
  const Sample s = testing::gumbel_sample(40, 2.0, 3);
  const auto b = pseudo_obs(s, {4, 31});
  EXPECT_EQ(subsample_S(b, 0.0), 0.5);
  EXPECT_EQ(subsample_S(b, 1.0), 0.5);
  EXPECT_EQ(subsample_A(b, 0.0), 1.0);
  EXPECT_EQ(subsample_A(b, 1.0), 1.0);
}

TEST(SubsampleS, EmptyWindowConventions) {
  const Sample s = testing::gumbel_sample(10, 2.0, 3);
  const auto empty = pseudo_obs(s, {5, 4});
  EXPECT_EQ(subsample_S(empty, 0.3), 0.0);
  EXPECT_THROW(subsample_A(empty, 0.3), std::domain_error);
}

TEST(SubsampleA, ConsistentForGumbel) {
  const Sample s = testing::gumbel_sample(20000, 2.0, 12);
  const auto b = pseudo_obs(s, {1, 20000});
  EXPECT_NEAR(subsample_A(b, 0.5), pickands_gumbel(0.5, {2.0}), 0.01);
}

TEST(EstimatePickands, GridAndConsistency) {
  const Sample s = testing::gumbel_sample(300, 3.0, 13);
  const auto b = pseudo_obs(s, {1, 300});
  const auto grid = SimplexGrid::bivariate(testing::unit_grid());
  const auto est = estimate_pickands(b, grid);
  ASSERT_EQ(est.a_values.size(), 9u);
  for (std::size_t p = 0; p < 9; ++p) {
    EXPECT_EQ(est.a_values[p], est.s_values[p] / (1.0 - est.s_values[p]));
    EXPECT_EQ(est.s_values[p], subsample_S(b, grid.point(p)));
  }
}

TEST(SubsampleTheta, DegenerateCases) {
  const std::size_t n = 40;
  const Sample s = testing::gumbel_sample(n, 2.0, 14);
  const BreakSpec br({0.5}, n);
  // No break inside the window.
  EXPECT_EQ(subsample_S_theta(s, br, {3, 18}, 0.4), subsample_S(pseudo_obs(s, {3, 18}), 0.4));
  EXPECT_EQ(subsample_S_theta(s, br, {21, 40}, 0.4), subsample_S(pseudo_obs(s, {21, 40}), 0.4));
  // The window starts right after the break.
  EXPECT_EQ(subsample_S_theta(s, br, {21, 35}, 0.7), subsample_S(pseudo_obs(s, {21, 35}), 0.7));
}

TEST(SubsampleTheta, ConvexCombinationOfPieces) {
  const std::size_t n = 40;
  const Sample s = testing::gumbel_sample(n, 2.0, 15);
  const BreakSpec br({0.5}, n);
  const double expected = 10.0 / 25.0 * subsample_S(pseudo_obs(s, {11, 20}), 0.3) +
                          15.0 / 25.0 * subsample_S(pseudo_obs(s, {21, 35}), 0.3);
  EXPECT_NEAR(subsample_S_theta(s, br, {11, 35}, 0.3), expected, 1e-15);
}

TEST(Derivative, ClampedAndFlatUnderIndependence) {
  const Sample s = testing::gumbel_sample(5000, 1.0, 16);
  const auto b = pseudo_obs(s, {1, 5000});
  const double h = 0.05;
  for (double t : {0.2, 0.5, 0.8}) EXPECT_NEAR(derivative_A(b, t, h), 0.0, 0.05);
}

TEST(Derivative, SymmetricCopulaAtMidpoint) {
  const Sample s = testing::gumbel_sample(20000, 2.0, 17);
  const auto b = pseudo_obs(s, {1, 20000});
  EXPECT_NEAR(derivative_A(b, 0.5, 0.05), 0.0, 0.05);
}

TEST(Derivative, AlwaysInUnitInterval) {
  const Sample s = testing::gumbel_sample(12, 1.5, 18);
  for (std::size_t k = 1; k <= 12; ++k)
    for (std::size_t l = k; l <= 12; ++l) {
      const auto b = pseudo_obs(s, {k, l});
      for (double t : {0.0, 0.001, 0.3, 0.999, 1.0})
        for (double h : {1e-4, 0.01, 0.2}) {
          const double d = derivative_A(b, t, h);
          EXPECT_LE(std::abs(d), 1.0);
        }
    }
}

TEST(Derivative, ConstantOutsideInterior) {
  const Sample s = testing::gumbel_sample(50, 2.0, 19);
  const auto b = pseudo_obs(s, {1, 50});
  EXPECT_EQ(derivative_A(b, 0.0, 0.1), derivative_A(b, 0.1, 0.1));
  EXPECT_EQ(derivative_A(b, 0.95, 0.1), derivative_A(b, 0.9, 0.1));
}

TEST(Derivative, BandwidthGuard) {
  const auto b = comonotone_pair();
  EXPECT_THROW(derivative_A(b, 0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(derivative_A(b, 0.5, 0.0), std::invalid_argument);
  EXPECT_EQ(default_bandwidth(10000), 1e-4);
}

TEST(Multivariate, BivariateSpecialisationIsBitIdentical) {
  const Sample s = testing::gumbel_sample(80, 2.0, 20);
  for (auto w : {Window{1, 80}, Window{5, 33}, Window{40, 41}}) {
    const auto b = pseudo_obs(s, w);
    for (double t : {0.0, 0.001, 0.1, 0.37, 0.5, 0.9, 0.9995, 1.0})
      for (double h : {0.01 / std::sqrt(80.0), 0.05}) {
        const std::vector<double> pt{t};
        EXPECT_EQ(derivative_A_d(b, pt, 0, h), derivative_A(b, t, h));
      }
  }
}

TEST(Multivariate, SymmetricAtBarycentre) {
  const Sample s = testing::gumbel_sample(30000, 2.0, 21, 3);
  const auto b = pseudo_obs(s, {1, 30000});
  const std::vector<double> bary{1.0 / 3.0, 1.0 / 3.0};
  EXPECT_NEAR(subsample_A(b, bary), pickands_gumbel(bary, {2.0}), 0.01);
  EXPECT_NEAR(derivative_A_d(b, bary, 0, 0.05), 0.0, 0.05);
  EXPECT_NEAR(derivative_A_d(b, bary, 1, 0.05), 0.0, 0.05);
}

TEST(Multivariate, VerticesGiveOne) {
  const Sample s = testing::gumbel_sample(30, 2.0, 22, 3);
  const auto b = pseudo_obs(s, {2, 29});
  for (auto v : {std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}})
    EXPECT_EQ(subsample_A(b, v), 1.0);
}

TEST(Multivariate, EdgeDerivativeStaysInRange) {
  const Sample s = testing::gumbel_sample(40, 2.0, 23, 3);
  const auto b = pseudo_obs(s, {1, 40});
  for (auto t : {std::vector<double>{0.5, 0.5}, std::vector<double>{0.999, 0.0}, std::vector<double>{0.0, 0.0}})
    for (std::size_t axis = 0; axis < 2; ++axis) EXPECT_LE(std::abs(derivative_A_d(b, t, axis, 0.01)), 1.0);
  EXPECT_EQ(derivative_A_d(b, std::vector<double>{1.0, 0.0}, 1, 0.01), 0.0);
}

TEST(SimplexGrid, Validation) {
  EXPECT_THROW(SimplexGrid(3, {0.5}), std::invalid_argument);
  EXPECT_THROW(SimplexGrid(2, {1.5}), std::invalid_argument);
  EXPECT_THROW(SimplexGrid(3, {0.6, 0.6}), std::invalid_argument);
  EXPECT_EQ(SimplexGrid(3, {0.2, 0.3, 0.1, 0.1}).size(), 2u);
}

}  // namespace
}  // namespace evbreak
