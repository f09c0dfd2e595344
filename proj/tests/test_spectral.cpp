#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "sheq/spectral.hpp"

using namespace sheq;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(EvalBasis, ClosedFormValues) {
    EXPECT_NEAR(eval_basis({1}, Point{kPi / 2}), std::sqrt(2.0 / kPi), 1e-15);
    EXPECT_NEAR(eval_basis({2}, Point{kPi / 2}), 0.0, 1e-15);
    EXPECT_NEAR(eval_basis({1, 1}, Point{kPi / 2, kPi / 2}), 2.0 / kPi, 1e-15);
}

TEST(EvalBasis, RejectsBoundaryAndOutside) {
    EXPECT_THROW(eval_basis({1}, Point{0.0}), std::domain_error);
    EXPECT_THROW(eval_basis({1}, Point{kPi}), std::domain_error);
    EXPECT_THROW(eval_basis({1, 1}, Point{1.0, -0.5}), std::domain_error);
}

TEST(MultiIndex, ComponentsMustBePositive) {
    EXPECT_THROW(MultiIndex({0}), std::invalid_argument);
    EXPECT_THROW(MultiIndex({1, -2}), std::invalid_argument);
}

TEST(LaplacianEigenvalue, SumOfSquares) {
    EXPECT_EQ(laplacian_eigenvalue({1}), 1.0);
    EXPECT_EQ(laplacian_eigenvalue({1, 1}), 2.0);
    EXPECT_EQ(laplacian_eigenvalue({3, 4}), 25.0);
}

TEST(SineBasis, LinearIndexRoundTrip) {
    const SineBasis b(3, 4);
    ASSERT_EQ(b.size(), 64u);
    for (std::size_t l = 0; l < b.size(); ++l) EXPECT_EQ(b.linear(b.index(l)), l);
    EXPECT_EQ(b.index(0), MultiIndex({1, 1, 1}));
    EXPECT_EQ(b.index(1), MultiIndex({2, 1, 1}));
}

TEST(SineBasis, OrthonormalUnderQuadrature) {
    // Midpoint rule with many nodes integrates trigonometric products of low degree exactly.
    for (int dim : {1, 2}) {
        const SineBasis b(dim, dim == 1 ? 8 : 6);
        const int n = 64;
        const double h = kPi / n;
        std::vector<double> gram(b.size() * b.size(), 0.0);
        const std::size_t total = dim == 1 ? n : n * n;
        for (std::size_t q = 0; q < total; ++q) {
            std::vector<double> xs;
            std::size_t rem = q;
            for (int i = 0; i < dim; ++i) {
                xs.push_back((static_cast<double>(rem % n) + 0.5) * h);
                rem /= n;
            }
            const auto e = b.eval_all(Point(std::span<const double>(xs)));
            const double w = std::pow(h, dim);
            for (std::size_t a = 0; a < b.size(); ++a)
                for (std::size_t c = 0; c < b.size(); ++c) gram[a * b.size() + c] += w * e[a] * e[c];
        }
        for (std::size_t a = 0; a < b.size(); ++a)
            for (std::size_t c = 0; c < b.size(); ++c)
                EXPECT_NEAR(gram[a * b.size() + c], a == c ? 1.0 : 0.0, 1e-8) << "dim " << dim;
    }
}

TEST(Semigroup, IdentityAtZeroAndDiagonalDecay) {
    const SineBasis b(1, 8);
    SpectralField f(b);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = 1.0 + i;
    EXPECT_EQ(apply_semigroup(0.0, f).coeffs, f.coeffs);
    const auto one = SpectralField::single_mode(b, {1});
    EXPECT_NEAR(apply_semigroup(0.7, one).coeffs[0], std::exp(-0.7), 1e-15);
    EXPECT_THROW(apply_semigroup(-1e-3, f), std::domain_error);
}

TEST(Semigroup, ExponentialLaw) {
    const SineBasis b(2, 5);
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    SpectralField v(b);
    for (auto& c : v.coeffs) c = nd(gen);
    const auto two_steps = apply_semigroup(0.2, apply_semigroup(0.3, v));
    const auto one_step = apply_semigroup(0.5, v);
    for (std::size_t i = 0; i < v.coeffs.size(); ++i)
        EXPECT_NEAR(two_steps.coeffs[i], one_step.coeffs[i], 1e-15 * std::max(1.0, std::abs(one_step.coeffs[i])));
}

TEST(HeatKernel, SymmetricAndDominatedByFirstModeForLargeT) {
    const SineBasis b(1, 64);
    EXPECT_NEAR(heat_kernel(b, 0.1, Point{0.4}, Point{2.0}), heat_kernel(b, 0.1, Point{2.0}, Point{0.4}), 1e-15);
    EXPECT_NEAR(heat_kernel(b, 5.0, Point{kPi / 2}, Point{kPi / 2}), 2.0 / kPi * std::exp(-5.0), 1e-6);
    EXPECT_THROW(heat_kernel(b, 0.0, Point{1.0}, Point{1.0}), std::domain_error);
}

TEST(KernelMass, BoundedByOnePlusTolerance) {
    const SineBasis b(1, 64);
    const double m = kernel_mass(b, 0.1, Point{kPi / 2});
    EXPECT_GT(m, 0.0);
    EXPECT_LE(m, 1.0 + 1e-3);
    EXPECT_THROW(kernel_mass(b, 0.0, Point{1.0}), std::domain_error);
}

TEST(KernelMass, NonincreasingInTimeAndDecaying) {
    const SineBasis b(1, 64);
    double prev = std::numeric_limits<double>::infinity();
    for (double t = 0.05; t < 10.0; t *= 1.3) {
        const double m = kernel_mass(b, t, Point{1.1});
        EXPECT_LE(m, prev + 1e-15);
        prev = m;
    }
    EXPECT_LT(kernel_mass(b, 40.0, Point{1.1}), 1e-15);
}

TEST(KernelMass, ToleranceShrinksOnKLadder) {
    for (double t : {0.01, 0.05, 0.2}) {
        double prev = std::numeric_limits<double>::infinity();
        for (int K : {4, 8, 16, 32}) {
            const SineBasis b(1, K);
            const double tol = truncation_tolerance(b, t);
            if (prev > 0.0)
                EXPECT_LT(tol, prev);
            else
                EXPECT_EQ(tol, 0.0);  // underflowed
            prev = tol;
            // |<1,e_k>| |e_k(x)| <= (4/pi)/k, so the mass error is at most 2 tol.
            for (double x : {0.05, 0.7, kPi / 2}) EXPECT_LE(kernel_mass(b, t, Point{x}), 1.0 + 2.0 * tol);
        }
    }
}

TEST(KernelTailBound, MatchesDirectSumInTwoDimensions) {
    // (2/pi)^d sum over modes with some k_i > K of exp(-t|k|^2), summed directly.
    const double t = 0.05;
    const int K = 6;
    double direct = 0.0;
    for (int a = 1; a < 200; ++a)
        for (int c = 1; c < 200; ++c)
            if (a > K || c > K) direct += std::exp(-t * (a * a + c * c));
    direct *= std::pow(2.0 / kPi, 2);
    EXPECT_NEAR(kernel_tail_bound(2, K, t), direct, 1e-12 * direct);
}

TEST(Transform, RoundTripSingleModeZeroAndRandom) {
    {
        const SineBasis b(1, 8);
        const SineTransform tr(b);
        const auto e1 = SpectralField::single_mode(b, {1});
        const auto back = tr.from_grid(tr.to_grid(e1.coeffs));
        for (std::size_t i = 0; i < back.size(); ++i) EXPECT_NEAR(back[i], e1.coeffs[i], 1e-12);
        for (double v : tr.to_grid(std::vector<double>(b.size(), 0.0))) EXPECT_EQ(v, 0.0);
    }
    const SineBasis b(2, 8);
    const SineTransform tr(b);
    std::mt19937_64 gen(11);
    std::normal_distribution<double> nd;
    std::vector<double> c(b.size());
    for (auto& v : c) v = nd(gen);
    const auto back = tr.from_grid(tr.to_grid(c));
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(back[i], c[i], 1e-12);
}

TEST(Transform, SamplesAgreeWithPointEvaluation) {
    const SineBasis b(2, 5);
    const SineTransform tr(b);
    SpectralField f(b);
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = std::sin(1.0 + i);
    const auto grid = tr.to_grid(f.coeffs);
    for (std::size_t j = 0; j < b.size(); ++j) EXPECT_NEAR(grid[j], evaluate(f, b.grid_point(j)), 1e-13);
}

TEST(Transform, SizeMismatchRejected) {
    const SineTransform tr(SineBasis(1, 4));
    std::vector<double> wrong(5);
    EXPECT_THROW((void)tr.to_grid(wrong), std::invalid_argument);
}

TEST(IndicatorCoefficients, ExactAnalyticValues) {
    const SineBasis b(1, 5);
    const auto c = indicator_coefficients(b);
    EXPECT_NEAR(c.coeffs[0], std::sqrt(2.0 / kPi) * 2.0, 1e-15);
    EXPECT_EQ(c.coeffs[1], 0.0);
    EXPECT_NEAR(c.coeffs[2], std::sqrt(2.0 / kPi) * 2.0 / 3.0, 1e-15);
}
