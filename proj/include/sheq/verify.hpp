#pragma once

/**
 * @file verify.hpp
 * @brief Invariant suites behind `sheq verify`. Each line reports a measured
 * value against its bound.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "sheq/density.hpp"
#include "sheq/drift.hpp"
#include "sheq/io.hpp"
#include "sheq/malliavin.hpp"
#include "sheq/noise.hpp"
#include "sheq/solver.hpp"
#include "sheq/spectral.hpp"

namespace sheq {

struct CheckLine {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
    std::string relation = "<=";
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckLine> lines;

    [[nodiscard]] bool passed() const {
        return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.pass; });
    }

    void le(std::string name, double measured, double bound) {
        lines.push_back({std::move(name), measured, bound, measured <= bound, "<="});
    }
    void ge(std::string name, double measured, double bound) {
        lines.push_back({std::move(name), measured, bound, measured >= bound, ">="});
    }
    void lt(std::string name, double measured, double bound) {
        lines.push_back({std::move(name), measured, bound, measured < bound, "<"});
    }
    void gt(std::string name, double measured, double bound) {
        lines.push_back({std::move(name), measured, bound, measured > bound, ">"});
    }
};

/// One line per check: suite name measured relation bound PASS|FAIL
inline void print_report(std::ostream& os, const SuiteReport& r) {
    for (const auto& l : r.lines)
        os << r.suite << ' ' << l.name << ' ' << format_double(l.measured) << ' ' << l.relation << ' '
           << format_double(l.bound) << ' ' << (l.pass ? "PASS" : "FAIL") << '\n';
}

// ---------------------------------------------------------------------------
// Shared oracles
// ---------------------------------------------------------------------------

/**
 * n-th derivative (n = 1..2) of fn at y by central differences, Richardson
 * extrapolated once: (4 D_{h/2} - D_h) / 3, error O(h^4).
 */
inline double richardson_derivative(const std::function<double(double)>& fn, int order, double y, double h) {
    auto central = [&](double s) {
        if (order == 1) return (fn(y + s) - fn(y - s)) / (2.0 * s);
        if (order == 2) return (fn(y + s) - 2.0 * fn(y) + fn(y - s)) / (s * s);
        throw std::domain_error("richardson_derivative: order must be 1 or 2");
    };
    return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

/**
 * f_lambda^{(n)} for n = 1..3 without the composition-rule recursion: one
 * difference of f_lambda for n = 1, and differences of the closed-form
 * f'_lambda = f'(J)/(1 + lambda f'(J)) for n = 2, 3.
 */
inline double yosida_derivative_oracle(const RegularizedDrift& rd, int n, double y) {
    const double h = 1e-3 * std::max(1.0, std::abs(y));
    if (n == 1) return richardson_derivative([&](double s) { return rd.yosida(s); }, 1, y, h);
    if (n == 2) return richardson_derivative([&](double s) { return rd.yosida_d1(s); }, 1, y, h);
    if (n == 3) return richardson_derivative([&](double s) { return rd.yosida_d1(s); }, 2, y, 4.0 * h);
    throw std::domain_error("yosida_derivative_oracle: order must be 1..3");
}

/// Catalog used by the Yosida checks.
inline std::vector<DriftFunction> yosida_catalog() {
    return {DriftFunction::cubic(), DriftFunction::cubic_plus_linear(), DriftFunction::linear(2.0)};
}

inline std::vector<double> symmetric_grid(double half_width, std::size_t points) {
    return linear_grid(-half_width, half_width, points);
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

inline SuiteReport verify_drift(std::uint64_t seed) {
    SuiteReport r{"drift", {}};
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> pick(-10.0, 10.0);
    const auto grid = symmetric_grid(10.0, 1001);
    const std::vector<double> lambdas{1.0, 0.1, 0.01};
    for (const auto& f : yosida_catalog()) {
        const std::string tag = f.label();
        double residual = 0.0, contraction = 0.0, lipschitz = 0.0, domination = 0.0, d1_excess = 0.0;
        double ladder_violation = 0.0, monotone_violation = 0.0;
        for (double lam : lambdas) {
            const RegularizedDrift rd(f, lam);
            for (double y : grid) {
                const double j = rd.resolvent(y);
                residual = std::max(residual, std::abs(j + lam * f.value(j) - y) / std::max(1.0, std::abs(y)));
                domination = std::max(domination, std::abs(rd.yosida(y)) - std::abs(f.value(y)));
                const double d1 = rd.yosida_d1(y);
                d1_excess = std::max(d1_excess, std::max(-d1, d1 - 1.0 / lam));
            }
            for (std::size_t i = 1; i < grid.size(); ++i)
                monotone_violation = std::max(monotone_violation, rd.yosida(grid[i - 1]) - rd.yosida(grid[i]));
            for (int i = 0; i < 2000; ++i) {
                const double a = pick(gen), b = pick(gen);
                contraction = std::max(contraction, std::abs(rd.resolvent(a) - rd.resolvent(b)) - std::abs(a - b));
                lipschitz = std::max(lipschitz, std::abs(rd.yosida(a) - rd.yosida(b)) - std::abs(a - b) / lam);
            }
        }
        const std::vector<double> ladder{1.0, 0.3, 0.1, 0.03, 0.01};
        for (double y : grid) {
            double prev = std::numeric_limits<double>::infinity();
            for (double lam : ladder) {
                const double gap = std::abs(RegularizedDrift(f, lam).yosida(y) - f.value(y));
                ladder_violation = std::max(ladder_violation, gap - prev);
                prev = gap;
            }
        }
        r.le(tag + ".resolvent_residual", residual, 1e-12);
        r.le(tag + ".contraction_excess", contraction, 2e-12);
        r.le(tag + ".lipschitz_excess", lipschitz, 1e-9);
        r.le(tag + ".domination_excess", domination, 1e-9);
        r.le(tag + ".d1_range_excess", d1_excess, 1e-12);
        r.le(tag + ".monotone_violation", monotone_violation, 1e-12);
        r.le(tag + ".ladder_violation", ladder_violation, 1e-9);
    }

    // Composition-rule derivatives against differences of the closed-form f'_lambda.
    const auto cubic = DriftFunction::cubic();
    const auto ygrid = symmetric_grid(5.0, 101);
    double rel = 0.0;
    for (double lam : lambdas) {
        const RegularizedDrift rd(cubic, lam);
        for (int n = 1; n <= 3; ++n) {
            std::vector<double> oracle, value;
            double scale = 0.0;
            for (double y : ygrid) {
                oracle.push_back(yosida_derivative_oracle(rd, n, y));
                value.push_back(rd.yosida_dn(n, y));
                scale = std::max(scale, std::abs(oracle.back()));
            }
            for (std::size_t i = 0; i < ygrid.size(); ++i)
                rel = std::max(rel, std::abs(value[i] - oracle[i]) / std::max(std::abs(oracle[i]), 1e-3 * scale));
        }
    }
    r.le("cubic.derivative_recursion_rel_error", rel, 1e-4);

    // lambda-uniform envelope: sup over lambda of the envelope of f_lambda^{(n)} against that of f^{(n)}.
    const std::vector<std::pair<int, double>> orders{{0, 3.0}, {1, 2.0}, {2, 1.0}, {3, 0.0}};
    const auto egrid = symmetric_grid(10.0, 2001);
    for (auto [n, q] : orders) {
        double worst = 0.0;
        for (double lam : lambdas) {
            const RegularizedDrift rd(cubic, lam);
            worst = std::max(worst, growth_envelope([&](double y) { return rd.yosida_dn(n, y); }, egrid, q));
        }
        const double base = growth_envelope([&](double y) { return cubic.derivative(n, y); }, egrid, q);
        r.le("cubic.envelope_order" + std::to_string(n) + "_over_base", worst / base, 1.0 + 1e-9);
    }

    // Empirical growth exponents of f_lambda^{(n)} on |y| in [10, 1000], never above those of f^{(n)}.
    for (const auto& f : {DriftFunction::cubic(), DriftFunction::cubic_plus_linear(), DriftFunction::linear(2.0)}) {
        for (int n = 0; n <= std::min(3, f.degree()); ++n) {
            const double base = fit_growth_exponent([&](double y) { return f.derivative(n, y); });
            const RegularizedDrift rd(f, 0.01);
            const double fitted = fit_growth_exponent([&](double y) { return rd.yosida_dn(n, y); });
            r.le(f.label() + ".fitted_growth_exponent_order" + std::to_string(n) + "_lambda0.01", fitted, base + 1e-6);
        }
    }

    // Mollifier: unit mass, exactness on affine pieces, beta-uniform envelope, beta-ladder convergence.
    {
        const Mollifier m(0.5);
        double mass = 0.0;
        for (double w : m.weights()) mass += w;
        r.le("mollifier.mass_error", std::abs(mass - 1.0), 1e-14);
        const RegularizedDrift lin(DriftFunction::linear(2.0), 0.1, 0.5);
        double affine = 0.0;
        for (double y : ygrid) affine = std::max(affine, std::abs(lin.mollified(0, y) - lin.yosida(y)));
        r.le("mollifier.affine_exactness", affine, 1e-12);

        const auto mgrid = symmetric_grid(10.0, 401);
        const double lam = 0.1;
        const double n_fit = growth_envelope([&](double y) { return RegularizedDrift(cubic, lam, 1.0).mollified(0, y); },
                                             mgrid, 3.0);
        double ratio = 0.0;
        for (double beta : {0.5, 0.1, 0.01}) {
            const RegularizedDrift rd(cubic, lam, beta);
            ratio = std::max(ratio, growth_envelope([&](double y) { return rd.mollified(0, y); }, mgrid, 3.0) / n_fit);
        }
        r.le("mollifier.envelope_ratio_vs_beta1", ratio, 1.0 + 1e-9);

        double prev = std::numeric_limits<double>::infinity(), worst_increase = -1.0;
        for (double beta : {1.0, 0.3, 0.1, 0.03, 0.01}) {
            const RegularizedDrift rd(cubic, lam, beta);
            double gap = 0.0;
            for (double y : mgrid) gap = std::max(gap, std::abs(rd.mollified(0, y) - rd.yosida(y)));
            worst_increase = std::max(worst_increase, gap - prev);
            prev = gap;
        }
        r.lt("mollifier.beta_ladder_increase", worst_increase, 0.0);

        const RegularizedDrift rd(cubic, lam, 0.3);
        double route = 0.0;
        for (double y : ygrid)
            for (int n = 1; n <= 3; ++n) {
                const double a = rd.mollified(n, y), b = rd.mollified_via_kernel_derivative(n, y);
                route = std::max(route, std::abs(a - b) / std::max(1.0, std::abs(a)));
            }
        r.le("mollifier.kernel_route_agreement", route, 1e-6);
    }
    return r;
}

inline SuiteReport verify_kernels(std::uint64_t seed) {
    SuiteReport r{"kernels", {}};
    // Mass bound and its tolerance ladder.
    double prev_tol = std::numeric_limits<double>::infinity();
    bool shrinking = true;
    for (int K : {16, 32, 64, 128}) {
        const SineBasis b(1, K);
        double excess = -1.0;
        for (double t : {0.01, 0.1, 1.0})
            for (double x : {0.1, 0.5, std::numbers::pi / 2, 3.0})
                excess = std::max(excess, kernel_mass(b, t, Point{x}) - 1.0 - truncation_tolerance(b, t));
        r.le("mass_excess_K" + std::to_string(K), excess, 0.0);
        const double tol = truncation_tolerance(b, 0.01);
        shrinking = shrinking && (tol < prev_tol || tol == 0.0);
        prev_tol = tol;
    }
    r.ge("tolerance_shrinks_on_K_ladder", shrinking ? 1.0 : 0.0, 1.0);

    // Discrete evolution operators along cubic-drift paths.
    const SineBasis b(1, 8);
    const SolverConfig cfg(NoiseModel::identity(b), 1.0, 64, 0.0, initial_zero(b), seed);
    const DriftEvaluator drift(DriftFunction::cubic());
    const int lag = static_cast<int>(std::ceil(kernel_min_time(b) / cfg.dt() - 1e-12)) * 2;
    double worst_pos = 0.0, worst_cmp = 0.0;
    for (std::uint64_t p = 0; p < 20; ++p) {
        const auto traj = solve_path(cfg, drift, p);
        const auto coeffs = coefficient_path(traj, drift);
        const auto rep = check_kernel(evolution_kernel(coeffs, 64 - lag, 64));
        worst_pos = std::max(worst_pos, -rep.min_kernel / rep.tolerance);
        worst_cmp = std::max(worst_cmp, rep.max_excess / rep.tolerance);
    }
    r.le("evolution_positivity_over_eps", worst_pos, 1.0);
    r.le("evolution_comparison_over_eps", worst_cmp, 1.0);
    return r;
}

inline SuiteReport verify_noise(std::uint64_t seed, std::size_t samples = 100000) {
    SuiteReport r{"noise", {}};
    const SineBasis b(1, 8);
    const auto noise = NoiseModel::identity(b);
    std::vector<double> e1(b.size(), 0.0), e2(b.size(), 0.0);
    e1[0] = 1.0;
    e2[1] = 1.0;
    const auto same = covariance_selftest(noise, e1, e1, 1.0, 1.0, samples, seed);
    r.le("e1_e1_abs_z", std::abs(same.z_score()), 4.0);
    const auto orth = covariance_selftest(noise, e1, e2, 1.0, 1.0, samples, seed + 1);
    r.le("e1_e2_abs_z", std::abs(orth.z_score()), 4.0);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    const auto sm = NoiseModel::smoothed(SineBasis(2, 4), 1.0);
    std::vector<double> h(sm.basis().size()), g(sm.basis().size());
    for (auto& v : h) v = nd(gen);
    for (auto& v : g) v = nd(gen);
    const auto rnd = covariance_selftest(sm, h, g, 0.3, 0.7, samples, seed + 2);
    r.le("random_smoothed_abs_z", std::abs(rnd.z_score()), 4.0);
    // v_k -> q_k dt as dt -> 0
    double rel = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k)
        rel = std::max(rel, std::abs(noise.one_step_variance(k, 1e-8) / (noise.q(k) * 1e-8) - 1.0));
    r.le("small_dt_variance_rel", rel, 1e-6);
    return r;
}

inline SuiteReport verify_malliavin(std::uint64_t seed) {
    SuiteReport r{"malliavin", {}};
    const SineBasis b(1, 8);
    const auto noise = NoiseModel::identity(b);
    const SolverConfig cfg(noise, 1.0, 64, 0.0, initial_zero(b), seed);
    const DriftEvaluator cubic(DriftFunction::cubic());
    const Point x{std::numbers::pi / 2};
    double oracle = 0.0, dom = 0.0, pos = std::numeric_limits<double>::infinity();
    for (std::uint64_t p = 0; p < 5; ++p) {
        const auto traj = solve_path(cfg, cubic, p);
        const auto coeffs = coefficient_path(traj, cubic);
        const double a = malliavin_norm_adjoint(traj, coeffs, 64, x);
        const double f = malliavin_norm_forward(traj, coeffs, 64, x);
        oracle = std::max(oracle, std::abs(a - f) / std::abs(f));
        dom = std::max(dom, a / g_closed_form(noise, x, 1.0));
        pos = std::min(pos, a / last_step_contribution(traj, x));
    }
    r.le("adjoint_vs_forward_rel", oracle, 1e-8);
    r.le("norm_over_g", dom, 1.0 + 1e-6);
    r.ge("norm_over_last_step", pos, 1.0);

    const DriftEvaluator zero(DriftFunction::zero());
    const auto lin = solve_path(cfg, zero, 0);
    r.le("linear_norm_vs_g_rel",
         std::abs(malliavin_norm_adjoint(lin, zero, 1.0, x) / g_closed_form(noise, x, 1.0) - 1.0), 1e-12);

    const auto traj = solve_path(cfg, cubic, 0);
    const auto coords = sample_coordinates(b, 64);
    const auto coarse = malliavin_fd_check(cfg, cubic, traj, 64, x, 0.1, coords);
    const auto fine = malliavin_fd_check(cfg, cubic, traj, 64, x, 0.05, coords);
    r.le("fd_rel_error_h0.05", fine.max_relative_error, 1e-3);
    r.ge("fd_order", std::log2(coarse.max_relative_error / fine.max_relative_error), 1.5);

    const NoiseCoordinate a{10, 0}, c{20, 1};
    const double he = hessian_entry(traj, cubic, 64, x, a, c);
    const double hf = hessian_fd(cfg, cubic, traj, 64, x, a, c, 0.05);
    r.le("hessian_vs_second_difference_rel", std::abs(he - hf) / std::abs(hf), 1e-2);
    return r;
}

inline SuiteReport verify_convergence(std::uint64_t seed, int seeds = 3) {
    SuiteReport r{"convergence", {}};
    const SineBasis b(1, 16);
    const auto noise = NoiseModel::identity(b);
    const DriftFunction cubic = DriftFunction::cubic();
    double worst_lambda = -1.0, worst_beta = -1.0;
    for (int s = 0; s < seeds; ++s) {
        const SolverConfig cfg(noise, 1.0, 64, 0.0, initial_sine(b, 1.0), seed + s);
        const auto xi = sample_increments(cfg, 0);
        const auto exact = integrate(cfg, DriftEvaluator(cubic), xi);
        double prev = std::numeric_limits<double>::infinity();
        for (double lam : {0.5, 0.1, 0.02}) {
            const double d = sup_grid_distance(integrate(cfg, DriftEvaluator(RegularizedDrift(cubic, lam)), xi), exact);
            worst_lambda = std::max(worst_lambda, d - prev);
            prev = d;
        }
        const auto yos = integrate(cfg, DriftEvaluator(RegularizedDrift(cubic, 0.1)), xi);
        prev = std::numeric_limits<double>::infinity();
        for (double beta : {0.3, 0.1, 0.03}) {
            const double d = sup_grid_distance(integrate(cfg, DriftEvaluator(RegularizedDrift(cubic, 0.1, beta)), xi), yos);
            worst_beta = std::max(worst_beta, d - prev);
            prev = d;
        }
    }
    r.lt("lambda_ladder_increase", worst_lambda, 0.0);
    r.lt("beta_ladder_increase", worst_beta, 0.0);
    return r;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"drift", "kernels", "noise", "malliavin", "convergence"};
    return names;
}

inline SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "drift") return verify_drift(seed);
    if (name == "kernels") return verify_kernels(seed);
    if (name == "noise") return verify_noise(seed);
    if (name == "malliavin") return verify_malliavin(seed);
    if (name == "convergence") return verify_convergence(seed);
    throw std::invalid_argument("unknown suite: " + name);
}

}  // namespace sheq
