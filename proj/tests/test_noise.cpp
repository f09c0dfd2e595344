#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sheq/noise.hpp"

using namespace sheq;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(NoiseModel, IdentityOnlyInOneDimension) {
    EXPECT_NO_THROW(NoiseModel::identity(SineBasis(1, 4)));
    EXPECT_THROW(NoiseModel::identity(SineBasis(2, 4)), std::invalid_argument);
}

TEST(NoiseModel, SmoothedEigenvaluesAndTraceCondition) {
    const auto n = NoiseModel::smoothed(SineBasis(2, 3), 1.0);
    EXPECT_NEAR(n.q(0), 1.0 / 9.0, 1e-15);
    EXPECT_THROW(NoiseModel::smoothed(SineBasis(3, 3), 0.5), std::invalid_argument);
    EXPECT_NO_THROW(NoiseModel::smoothed(SineBasis(3, 3), 0.6));
    EXPECT_THROW(NoiseModel::custom(SineBasis(1, 3), {1.0, -1.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(NoiseModel::custom(SineBasis(1, 3), {1.0}), std::invalid_argument);
}

TEST(NoiseModel, OneStepVarianceLimits) {
    const auto n = NoiseModel::identity(SineBasis(1, 8));
    for (std::size_t i = 0; i < 8; ++i) {
        const double dt = 1e-9;
        EXPECT_NEAR(n.one_step_variance(i, dt) / dt, 1.0, 1e-6);
        const double lam = n.basis().eigenvalue(i);
        EXPECT_NEAR(n.one_step_variance(i, 100.0), 1.0 / (2.0 * lam), 1e-15);
    }
}

TEST(GFunction, StationaryCentreValueIsPiOverEight) {
    // sum over odd k of 1/k^2 is pi^2/8; the truncated tail is below 1/(2K).
    const auto n = NoiseModel::identity(SineBasis(1, 4096));
    EXPECT_NEAR(g_closed_form(n, Point::centre(1), 50.0), kPi / 8.0, 1e-3);
}

TEST(GFunction, SmallTimeBehaviourAndMonotone) {
    const auto n = NoiseModel::identity(SineBasis(1, 256));
    EXPECT_EQ(g_closed_form(n, Point{1.0}, 0.0), 0.0);
    double prev = 0.0;
    for (double t = 1e-3; t < 2.0; t *= 1.5) {
        const double g = g_closed_form(n, Point{1.0}, t);
        EXPECT_GT(g, prev);
        prev = g;
    }
    EXPECT_THROW((void)g_closed_form(n, Point{1.0}, -1.0), std::domain_error);
}

TEST(GFunction, SingleModeClosedForm) {
    const SineBasis b(1, 1);
    const auto n = NoiseModel::custom(b, {2.0});
    const double t = 0.3, x = 0.9;
    const double expected = 0.5 * 2.0 * (1.0 - std::exp(-2.0 * t)) * (2.0 / kPi) * std::sin(x) * std::sin(x);
    EXPECT_NEAR(g_closed_form(n, Point{x}, t), expected, 1e-15);
}

TEST(GFunction, LowerBoundCheckRejectsBadGamma) {
    const auto n = NoiseModel::identity(SineBasis(1, 16));
    const std::vector<double> grid{0.1, 0.5, 1.0};
    EXPECT_THROW((void)g_lower_bound_check(n, Point{1.0}, 2.0, grid), std::invalid_argument);
    EXPECT_THROW((void)g_lower_bound_check(n, Point{1.0}, 0.0, grid), std::invalid_argument);
    const std::vector<double> bad{0.5, 1.5};
    EXPECT_THROW((void)g_lower_bound_check(n, Point{1.0}, 0.5, bad), std::invalid_argument);
    EXPECT_GT(g_lower_bound_check(n, Point{1.0}, 0.5, grid), 0.0);
}

TEST(CubeConstant, FirstModeTermBoundsG) {
    for (int d : {1, 2, 3}) {
        const auto n = NoiseModel::smoothed(SineBasis(d, 6), 1.0);
        const Point x = Point::centre(d);
        const double c = cube_constant_from_first_mode(d, 2.0, 1.0, x);
        for (double t : {0.01, 0.1, 1.0}) EXPECT_GE(g_closed_form(n, x, t), c * t);
    }
}

TEST(Covariance, SelftestAgreesWithinFourSigma) {
    const SineBasis b(1, 6);
    const auto n = NoiseModel::smoothed(b, 0.5);
    std::vector<double> h(6, 0.0), g(6, 0.0);
    h[0] = 1.0; h[1] = 0.5; g[0] = 0.7; g[2] = -1.0;
    for (auto [s, t] : {std::pair{0.2, 0.5}, std::pair{0.8, 0.3}, std::pair{0.4, 0.4}}) {
        const auto r = covariance_selftest(n, h, g, s, t, 100000, 42);
        EXPECT_TRUE(r.within(4.0)) << "z = " << r.z_score();
    }
    const auto orth = covariance_selftest(n, std::vector<double>{0, 0, 0, 1, 0, 0}, g, 1.0, 1.0, 20000, 1);
    EXPECT_EQ(orth.exact, 0.0);
    EXPECT_THROW(covariance_selftest(n, h, g, 0.1, 0.2, 10, 1), std::invalid_argument);
}
