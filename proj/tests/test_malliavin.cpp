#include <cmath>

#include <gtest/gtest.h>

#include "sheq/io.hpp"
#include "sheq/malliavin.hpp"

using namespace sheq;

namespace {

SolverConfig config_1d(int K, int M, double T = 1.0, double eta = 0.0) {
    const SineBasis b(1, K);
    return SolverConfig(NoiseModel::identity(b), T, M, eta, initial_sine(b, 1.0), 11);
}

const Point kCentre = Point::centre(1);

}  // namespace

TEST(MalliavinNorm, WithoutDriftEqualsG) {
    const auto c = config_1d(16, 40);
    const DriftEvaluator zero(DriftFunction::zero());
    const auto traj = solve_path(c, zero);
    for (double t : {0.25, 0.5, 1.0})
        for (const Point& x : {kCentre, Point{0.3}}) {
            const double n2 = malliavin_norm_adjoint(traj, zero, t, x);
            EXPECT_NEAR(n2, g_closed_form(c.noise, x, t), 1e-13);
        }
}

TEST(MalliavinNorm, LinearDriftGeometricSum) {
    const double a = 3.0;
    const auto c = config_1d(8, 20);
    const DriftEvaluator f(DriftFunction::linear(a));
    const auto traj = solve_path(c, f);
    const auto e = c.basis().eval_all(kCentre);
    double expected = 0.0;
    for (std::size_t k = 0; k < 8; ++k) {
        const double lam = c.basis().eigenvalue(k);
        const double m = std::exp(-lam * c.dt()) - std::expm1(-lam * c.dt()) / lam * (-a);
        double s = 0.0;
        for (int j = 0; j < c.steps; ++j) s += std::pow(m, 2 * j);
        expected += traj.variance[k] * s * e[k] * e[k];
    }
    EXPECT_NEAR(malliavin_norm_adjoint(traj, f, 1.0, kCentre), expected, 1e-13);
}

TEST(MalliavinNorm, AdjointMatchesForwardSweep) {
    for (int dim : {1, 2}) {
        const SineBasis b(dim, dim == 1 ? 8 : 4);
        const SolverConfig c(NoiseModel::smoothed(b, 0.5), 0.5, 16, 0.3, initial_bump(b, 1.5), 3);
        const DriftEvaluator f(DriftFunction::cubic());
        const auto traj = solve_path(c, f);
        const auto coeffs = coefficient_path(traj, f);
        const Point x = dim == 1 ? Point{1.2} : Point{1.2, 0.8};
        const double adj = malliavin_norm_adjoint(traj, coeffs, 16, x);
        const double fwd = malliavin_norm_forward(traj, coeffs, 16, x);
        EXPECT_NEAR(adj, fwd, 1e-12 * fwd);
    }
}

TEST(MalliavinNorm, LastStepIsALowerBoundAndTimeZeroIsZero) {
    const auto c = config_1d(8, 16);
    const DriftEvaluator f(DriftFunction::cubic());
    const auto traj = solve_path(c, f);
    const auto coeffs = coefficient_path(traj, f);
    EXPECT_GE(malliavin_norm_adjoint(traj, coeffs, 16, kCentre), last_step_contribution(traj, kCentre));
    EXPECT_EQ(malliavin_norm_adjoint(traj, coeffs, 0, kCentre), 0.0);
}

TEST(MalliavinNorm, DominatedByGForMonotoneDrift) {
    const auto c = config_1d(16, 64);
    const DriftEvaluator f(DriftFunction::cubic());
    for (std::uint64_t path = 0; path < 5; ++path) {
        const auto traj = solve_path(c, f, path);
        for (double t : {0.5, 1.0}) {
            const double n2 = malliavin_norm_adjoint(traj, f, t, kCentre);
            EXPECT_LE(n2, g_closed_form(c.noise, kCentre, t) * (1.0 + 1e-10));
            EXPECT_GT(n2, 0.0);
        }
    }
}

TEST(MalliavinNorm, OffGridTimeRejected) {
    const auto c = config_1d(4, 8);
    const DriftEvaluator f(DriftFunction::cubic());
    const auto traj = solve_path(c, f);
    EXPECT_THROW((void)malliavin_norm_adjoint(traj, f, 0.3, kCentre), std::domain_error);
    const auto coeffs = coefficient_path(traj, f);
    EXPECT_THROW((void)malliavin_norm_adjoint(traj, coeffs, 9, kCentre), std::domain_error);
    EXPECT_THROW((void)malliavin_derivative_forward(traj, coeffs, 4, 0, 4), std::domain_error);
}

TEST(MalliavinDerivative, FiniteDifferencesConvergeAtSecondOrder) {
    const auto c = config_1d(8, 64);
    const DriftEvaluator f(DriftFunction::cubic());
    const auto traj = solve_path(c, f);
    const auto coords = sample_coordinates(c.basis(), 64);
    const auto coarse = malliavin_fd_check(c, f, traj, 64, kCentre, 0.1, coords);
    const auto fine = malliavin_fd_check(c, f, traj, 64, kCentre, 0.05, coords);
    EXPECT_LT(fine.max_relative_error, 1e-4);
    EXPECT_NEAR(coarse.max_relative_error / fine.max_relative_error, 4.0, 0.5);
    EXPECT_GT(fine.checked, 10u);
}

TEST(EvolutionKernel, ZeroPotentialIsTheDiscreteHeatKernel) {
    const auto c = config_1d(8, 16);
    const DriftEvaluator zero(DriftFunction::zero());
    const auto traj = solve_path(c, zero);
    const auto coeffs = coefficient_path(traj, zero);
    const auto u = evolution_kernel(coeffs, 4, 16);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            EXPECT_NEAR(u(i, j), i == j ? std::exp(-u.elapsed() * c.basis().eigenvalue(i)) : 0.0, 1e-15);
    const auto r = check_kernel(u);
    EXPECT_FALSE(r.skipped);
    EXPECT_LE(std::abs(r.max_excess), 1e-14);
    EXPECT_TRUE(r.positivity_ok());
}

TEST(EvolutionKernel, ConstantPotentialIsDiagonal) {
    const double a = 2.0;
    const auto c = config_1d(8, 16);
    const DriftEvaluator f(DriftFunction::linear(a));
    const auto traj = solve_path(c, f);
    const auto coeffs = coefficient_path(traj, f);
    EXPECT_EQ(coeffs.min_potential(), a);
    const auto u = evolution_kernel(coeffs, 0, 16);
    for (std::size_t i = 0; i < 8; ++i) {
        const double lam = c.basis().eigenvalue(i);
        const double m = std::exp(-lam * c.dt()) + std::expm1(-lam * c.dt()) / lam * a;
        EXPECT_NEAR(u(i, i), std::pow(m, 16), 1e-14);
    }
    const auto r = check_kernel(u);
    EXPECT_TRUE(r.comparison_ok());
    EXPECT_LT(r.max_excess, 0.0);
}

TEST(EvolutionKernel, CubicDriftPositiveAndDominated) {
    const auto c = config_1d(8, 64);
    const DriftEvaluator f(DriftFunction::cubic());
    const auto traj = solve_path(c, f, 9);
    const auto coeffs = coefficient_path(traj, f);
    for (int s : {0, 32, 48}) {
        const auto r = check_kernel(evolution_kernel(coeffs, s, 64));
        EXPECT_TRUE(r.positivity_ok()) << r.min_kernel << " vs " << r.tolerance;
        EXPECT_TRUE(r.comparison_ok()) << r.max_excess << " vs " << r.tolerance;
        EXPECT_TRUE(r.bounded());
    }
}

TEST(EvolutionKernel, ShortIntervalsAreSkippedAndNegativePotentialRejected) {
    const auto c = config_1d(8, 64, 1.0, 0.5);
    const DriftEvaluator f(DriftFunction::cubic());
    const auto traj = solve_path(c, f);
    const auto coeffs = coefficient_path(traj, f);
    EXPECT_THROW((void)evolution_kernel(coeffs, 0, 64), std::invalid_argument);
    const auto c0 = config_1d(8, 64);
    const auto t0 = solve_path(c0, f);
    const auto k0 = coefficient_path(t0, f);
    EXPECT_TRUE(check_kernel(evolution_kernel(k0, 63, 64)).skipped);
}

TEST(SecondDerivative, VanishesForAffineDrift) {
    const auto c = config_1d(8, 16);
    const DriftEvaluator f(DriftFunction::linear(1.0));
    const auto traj = solve_path(c, f);
    EXPECT_EQ(second_malliavin_norm(traj, f, 16, kCentre), 0.0);
    EXPECT_EQ(second_malliavin_norm(traj, DriftEvaluator(DriftFunction::zero()), 16, kCentre), 0.0);
}

TEST(SecondDerivative, HessianEntriesMatchSecondDifferences) {
    const auto c = config_1d(8, 32);
    const DriftEvaluator f(DriftFunction::cubic());
    const auto traj = solve_path(c, f, 4);
    const NoiseCoordinate pairs[][2] = {{{0, 0}, {0, 0}}, {{3, 1}, {10, 0}}, {{20, 2}, {20, 0}}};
    for (const auto& p : pairs) {
        const double h = hessian_entry(traj, f, 32, kCentre, p[0], p[1]);
        const double fd = hessian_fd(c, f, traj, 32, kCentre, p[0], p[1], 0.05);
        EXPECT_NEAR(h, fd, 2e-3 * std::abs(h) + 1e-9);
    }
    const double n2 = second_malliavin_norm(traj, f, 32, kCentre);
    EXPECT_GT(n2, 0.0);
    EXPECT_TRUE(std::isfinite(n2));
}

TEST(SecondDerivative, CoordinateLimit) {
    const auto c = config_1d(128, 64);
    const DriftEvaluator f(DriftFunction::cubic());
    const auto traj = solve_path(c, f);
    EXPECT_THROW((void)second_malliavin_norm(traj, f, 64, kCentre), std::invalid_argument);
}

TEST(MalliavinNorm, DealiasedSchemeKeepsAdjointAndFiniteDifferencesConsistent) {
    const SineBasis b(1, 9);
    const SolverConfig c(NoiseModel::identity(b), 1.0, 32, 0.0, initial_sine(b, 1.0), 5, true);
    const DriftEvaluator f(DriftFunction::cubic());
    const auto traj = solve_path(c, f);
    ASSERT_TRUE(traj.dealias);
    const auto coeffs = coefficient_path(traj, f);
    const double adj = malliavin_norm_adjoint(traj, coeffs, 32, kCentre);
    const double fwd = malliavin_norm_forward(traj, coeffs, 32, kCentre);
    EXPECT_NEAR(adj, fwd, 1e-12 * fwd);
    const auto coords = sample_coordinates(b, 32);
    EXPECT_LT(malliavin_fd_check(c, f, traj, 32, kCentre, 0.05, coords).max_relative_error, 1e-3);
}
