#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "sheq/density.hpp"
#include "sheq/io.hpp"

using namespace sheq;

namespace {

std::vector<double> normal_sample(std::size_t n, double mean, double sd, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(mean, sd);
    std::vector<double> x(n);
    for (auto& v : x) v = nd(gen);
    return x;
}

SolverConfig ensemble_config(const std::string&) {
    const SineBasis b(1, 8);
    return SolverConfig(NoiseModel::identity(b), 0.5, 16, 0.0, SpectralField(b), 21);
}

}  // namespace

TEST(Summary, MomentsOfKnownSample) {
    const std::vector<double> x{1, 2, 3, 4};
    const auto s = summarize(x);
    EXPECT_EQ(s.mean, 2.5);
    EXPECT_NEAR(s.variance, 5.0 / 3.0, 1e-15);
    EXPECT_THROW(summarize(std::vector<double>{1.0}), std::invalid_argument);
}

TEST(Kde, GaussianSampleRecoversDensity) {
    const auto x = normal_sample(20000, 1.0, 2.0, 3);
    const auto est = kde(x, six_sigma_grid(x));
    EXPECT_NEAR(est.mass(), 1.0, 5e-3);
    EXPECT_EQ(count_modes(est), 1);
    EXPECT_LT(gaussian_sup_error(est, 1.0, 4.0), 0.01);
    EXPECT_NEAR(est.bandwidth, 1.06 * 2.0 * std::pow(20000.0, -0.2), 0.02);
}

TEST(Kde, BimodalSampleHasTwoModes) {
    auto x = normal_sample(5000, -3.0, 0.5, 1);
    const auto y = normal_sample(5000, 3.0, 0.5, 2);
    x.insert(x.end(), y.begin(), y.end());
    EXPECT_EQ(count_modes(kde(x, linear_grid(-6, 6, 601), 0.2)), 2);
}

TEST(Kde, RejectsSmallOrDegenerateSamples) {
    EXPECT_THROW(kde(std::vector<double>(50, 1.0), linear_grid(0, 1, 3)), std::invalid_argument);
    EXPECT_THROW(kde(std::vector<double>(500, 1.0), linear_grid(0, 1, 3)), std::invalid_argument);
    EXPECT_THROW(six_sigma_grid(std::vector<double>(10, 2.0)), std::invalid_argument);
    EXPECT_THROW(linear_grid(1, 0, 5), std::invalid_argument);
}

TEST(Wilson, KnownIntervals) {
    const auto zero = wilson_interval(0, 100);
    EXPECT_EQ(zero.lo, 0.0);
    EXPECT_NEAR(zero.hi, 0.0370, 1e-4);
    const auto half = wilson_interval(50, 100);
    EXPECT_NEAR(half.lo, 0.4038, 1e-4);
    EXPECT_NEAR(half.hi, 0.5962, 1e-4);
    EXPECT_THROW(wilson_interval(0, 0), std::invalid_argument);
}

TEST(SmallBall, CurveCountsAndSlope) {
    // Uniform(0,1) squared norms: P(X < eps) = eps, slope 1.
    std::vector<double> u(100000);
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (auto& v : u) v = ud(gen);
    const std::vector<double> eps{0.5, 0.1, 0.02, 0.004};
    const auto curve = small_ball_curve(u, eps);
    for (const auto& p : curve) {
        EXPECT_LE(p.prob.lo, p.eps);
        EXPECT_GE(p.prob.hi, p.eps);
    }
    EXPECT_NEAR(*small_ball_slope(curve), 1.0, 0.05);
    const std::vector<double> bad{0.1, 0.2};
    EXPECT_THROW(small_ball_curve(u, bad), std::invalid_argument);
}

TEST(SmallBall, ExponentBookkeeping) {
    const auto e = small_ball_exponent(2.0, 0.5);
    EXPECT_NEAR(e.p, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(e.exponent, 2.0, 1e-15);
    EXPECT_THROW(small_ball_exponent(1.0, 2.0), std::invalid_argument);
}

TEST(NegativeMoment, ConstantAndQZero) {
    const std::vector<double> c(1000, 4.0);
    EXPECT_NEAR(negative_moment(c, 2.0).estimate, 0.25, 1e-15);
    EXPECT_EQ(negative_moment(c, 0.0).estimate, 1.0);
    EXPECT_TRUE(negative_moment(c, 2.0).stable());
    std::vector<double> z = c;
    z[5] = 0.0;
    EXPECT_THROW(negative_moment(z, 1.0), NumericalError);
}

TEST(NegativeMoment, TrimmingFlagsHeavyTail) {
    std::vector<double> c(1000, 1.0);
    c[0] = 1e-8;
    const auto r = negative_moment(c, 2.0);
    EXPECT_EQ(r.trimmed_count, 1u);
    EXPECT_FALSE(r.stable());
}

TEST(NondegeneracyRatio, SquaredSineCoefficientsMatchQuadrature) {
    const int n = 200000;
    const double h = std::numbers::pi / n;
    for (int k : {1, 2, 5})
        for (int j : {1, 2, 3, 9, 11}) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                const double x = (i + 0.5) * h;
                s += std::pow(2.0 / std::numbers::pi, 1.5) * std::sin(k * x) * std::sin(k * x) * std::sin(j * x);
            }
            EXPECT_NEAR(detail::squared_sine_coefficient(k, j), s * h, 1e-9) << k << ' ' << j;
        }
}

TEST(NondegeneracyRatio, RatioTendsToZeroForIdentityNoise) {
    const auto noise = NoiseModel::identity(SineBasis(1, 32));
    const std::vector<double> deltas{0.003, 0.1, 0.01, 0.03};
    const auto r = nondegeneracy_ratio(noise, Point::centre(1), deltas);
    ASSERT_EQ(r.delta.size(), 4u);
    EXPECT_EQ(r.delta.front(), 0.1);
    EXPECT_TRUE(r.decreasing);
    EXPECT_TRUE(r.tends_to_zero());
    // Bounded by delta since S(s) is sub-Markov: int_0^delta S(s)g ds <= delta sup g, sup g ~ g(x) at the centre.
    for (std::size_t i = 0; i < r.value.size(); ++i) EXPECT_LT(r.value[i], 2.0 * r.delta[i]);
}

TEST(NondegeneracyRatio, DegenerateNoiseViolatesConditionA) {
    const SineBasis b(1, 4);
    const auto noise = NoiseModel::custom(b, {0.0, 0.0, 0.0, 0.0});
    const std::vector<double> deltas{0.1, 0.01};
    const auto r = nondegeneracy_ratio(noise, Point::centre(1), deltas);
    EXPECT_TRUE(r.condition_a_violated);
    EXPECT_FALSE(r.tends_to_zero());
    // Only even modes: e_2 vanishes at the centre, so g(centre, .) = 0 as well.
    const auto even = NoiseModel::custom(b, {0.0, 1.0, 0.0, 1.0});
    EXPECT_TRUE(nondegeneracy_ratio(even, Point::centre(1), deltas).condition_a_violated);
    EXPECT_THROW(nondegeneracy_ratio(noise, Point::centre(1), std::vector<double>{1.5}), std::invalid_argument);
}

TEST(Ensemble, IndependentOfWorkerCount) {
    const auto c = ensemble_config("");
    const DriftEvaluator f(DriftFunction::cubic());
    const std::vector<Probe> probes{{0.5, Point::centre(1)}, {0.25, Point{0.7}}};
    const auto one = run_ensemble(c, f, 40, probes, 1);
    const auto three = run_ensemble(c, f, 40, probes, 3);
    ASSERT_EQ(one.records.size(), three.records.size());
    for (std::size_t i = 0; i < one.records.size(); ++i) {
        EXPECT_EQ(one.records[i].value, three.records[i].value);
        EXPECT_EQ(one.records[i].norm2, three.records[i].norm2);
    }
    EXPECT_EQ(one.config_hash, three.config_hash);
    EXPECT_EQ(one.failures(), 0u);
}

TEST(Ensemble, RejectsOffGridProbes) {
    const auto c = ensemble_config("");
    const DriftEvaluator f(DriftFunction::cubic());
    EXPECT_THROW(run_ensemble(c, f, 2, {{0.3, Point::centre(1)}}), std::invalid_argument);
    EXPECT_THROW(run_ensemble(c, f, 0, {{0.5, Point::centre(1)}}), std::invalid_argument);
}

TEST(Ensemble, BlowUpPathsAreRecordedNotFatal) {
    const SineBasis b(1, 4);
    const SolverConfig c(NoiseModel::identity(b), 1.0, 4, 0.0, initial_constant(b, 1e120), 1);
    const auto ens = run_ensemble(c, DriftEvaluator(DriftFunction::cubic()), 3, {{1.0, Point::centre(1)}});
    EXPECT_EQ(ens.failures(), 3u);
    EXPECT_TRUE(ens.values(0).empty());
}

TEST(Ensemble, TextRoundTrip) {
    const auto c = ensemble_config("");
    const DriftEvaluator f(DriftFunction::cubic());
    const auto ens = run_ensemble(c, f, 10, {{0.5, Point::centre(1)}});
    std::stringstream ss;
    write_ensemble(ss, ens);
    const auto back = read_ensemble(ss);
    EXPECT_EQ(back.seed, ens.seed);
    EXPECT_EQ(back.config_hash, ens.config_hash);
    EXPECT_EQ(back.values(0), ens.values(0));
    EXPECT_EQ(back.norms(0), ens.norms(0));
    std::stringstream bad("# something else\n");
    EXPECT_THROW(read_ensemble(bad), std::runtime_error);
}

TEST(Ensemble, GaussianWithoutDrift) {
    // f = 0, u0 = 0: u(t,x) ~ N(0, g(x,t)) exactly.
    const auto c = ensemble_config("");
    const auto ens = run_ensemble(c, DriftEvaluator(DriftFunction::zero()), 4000, {{0.5, Point::centre(1)}}, 1, false);
    const auto s = summarize(ens.values(0));
    const double g = g_closed_form(c.noise, Point::centre(1), 0.5);
    EXPECT_LT(std::abs(s.mean), 4.0 * s.mean_se);
    EXPECT_LT(std::abs(s.variance - g), 4.0 * s.variance_se);
}
