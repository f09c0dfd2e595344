#pragma once

/**
 * @file solver.hpp
 * @brief Exponential-Euler integration of the truncated mild equation
 *
 *   du - Delta u dt + f(u) dt = eta u dt + B dW,   u(0) = u0,
 *
 * on the sine basis. Per mode k and step dt:
 *
 *   u_k^{n+1} = e^{-|k|^2 dt} u_k^n + phi_k(dt) (eta u^n - f(u^n))_k + xi_k^n,
 *   phi_k(dt) = (1 - e^{-|k|^2 dt}) / |k|^2,
 *
 * where f(u^n) is evaluated on the collocation grid and projected back, and
 * xi_k^n ~ N(0, v_k(dt)) is the exact one-step stochastic convolution.
 */

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sheq/drift.hpp"
#include "sheq/errors.hpp"
#include "sheq/noise.hpp"
#include "sheq/rng.hpp"
#include "sheq/spectral.hpp"

namespace sheq {

struct SolverConfig {
    NoiseModel noise;
    double horizon = 1.0;
    int steps = 1;
    double eta = 0.0;
    SpectralField u0;
    std::uint64_t seed = 0;
    bool dealias = false;  ///< 2/3-rule truncation of the projected drift (stress tests only)

    SolverConfig(NoiseModel n, double T, int M, double eta_, SpectralField initial, std::uint64_t seed_,
                 bool dealias_ = false)
        : noise(std::move(n)), horizon(T), steps(M), eta(eta_), u0(std::move(initial)), seed(seed_),
          dealias(dealias_) {
        validate();
    }

    [[nodiscard]] const SineBasis& basis() const { return noise.basis(); }
    [[nodiscard]] double dt() const { return horizon / steps; }

    void validate() const {
        if (!(horizon > 0.0)) throw std::invalid_argument("SolverConfig: horizon must be > 0");
        if (steps < 1) throw std::invalid_argument("SolverConfig: steps must be >= 1");
        if (!(eta >= 0.0)) throw std::invalid_argument("SolverConfig: eta must be >= 0");
        if (!(u0.basis == noise.basis())) throw std::invalid_argument("SolverConfig: u0 basis differs from noise basis");
        if (!u0.finite()) throw std::invalid_argument("SolverConfig: u0 must be finite");
    }
};

/// 1 for modes with every k_i <= 2K/3, 0 otherwise; all ones when `enabled` is false.
inline std::vector<double> dealias_mask(const SineBasis& basis, bool enabled) {
    std::vector<double> m(basis.size(), 1.0);
    if (!enabled) return m;
    const int cut = (2 * basis.modes_per_axis()) / 3;
    for (std::size_t l = 0; l < m.size(); ++l) {
        const auto k = basis.index(l);
        for (int i = 0; i < k.dim(); ++i)
            if (k[i] > cut) m[l] = 0.0;
    }
    return m;
}

/// One exponential-Euler step with precomputed per-mode factors.
class ExponentialEuler {
public:
    ExponentialEuler(const NoiseModel& noise, double dt, bool dealias = false)
        : transform_(noise.basis()), dt_(dt), mask_(dealias_mask(noise.basis(), dealias)) {
        if (!(dt > 0.0)) throw std::invalid_argument("ExponentialEuler: dt must be > 0");
        const SineBasis& b = noise.basis();
        decay_.resize(b.size());
        phi_.resize(b.size());
        sd_.resize(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double lam = b.eigenvalue(i);
            decay_[i] = std::exp(-lam * dt);
            phi_[i] = -std::expm1(-lam * dt) / lam;
            sd_[i] = std::sqrt(noise.one_step_variance(i, dt));
        }
    }

    [[nodiscard]] const SineTransform& transform() const { return transform_; }
    [[nodiscard]] const SineBasis& basis() const { return transform_.basis(); }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] std::span<const double> decay() const { return decay_; }
    [[nodiscard]] std::span<const double> phi() const { return phi_; }
    /// sqrt(v_k(dt))
    [[nodiscard]] std::span<const double> increment_sd() const { return sd_; }

    /// Writes u^{n+1} into `out`; throws BlowUpError(step_index, mode) on non-finite values.
    void step(std::span<const double> state, const DriftEvaluator& drift, double eta, std::span<const double> xi,
              std::span<double> out, std::size_t step_index = 0) const {
        const std::size_t n = state.size();
        if (xi.size() != n || out.size() != n || n != decay_.size())
            throw std::invalid_argument("ExponentialEuler::step: size mismatch");
        if (drift.vanishes()) {
            for (std::size_t k = 0; k < n; ++k) out[k] = (decay_[k] + phi_[k] * eta) * state[k] + xi[k];
        } else {
            std::vector<double> grid = transform_.to_grid(state);
            for (std::size_t j = 0; j < n; ++j) {
                grid[j] = drift.value(grid[j]);
                if (!std::isfinite(grid[j])) throw BlowUpError(step_index, j);
            }
            const std::vector<double> fk = transform_.from_grid(grid);
            for (std::size_t k = 0; k < n; ++k)
                out[k] = decay_[k] * state[k] + phi_[k] * (eta * state[k] - mask_[k] * fk[k]) + xi[k];
        }
        for (std::size_t k = 0; k < n; ++k)
            if (!std::isfinite(out[k])) throw BlowUpError(step_index, k);
    }

    [[nodiscard]] SpectralField step(const SpectralField& state, const DriftEvaluator& drift, double eta,
                                     std::span<const double> xi) const {
        SpectralField out(state.basis);
        step(state.coeffs, drift, eta, xi, out.coeffs);
        return out;
    }

private:
    SineTransform transform_;
    double dt_;
    std::vector<double> mask_;
    std::vector<double> decay_;
    std::vector<double> phi_;
    std::vector<double> sd_;
};

/// A solution path on t_n = n dt with the noise increments that produced it.
struct Trajectory {
    SineBasis basis;
    double dt = 0.0;
    double eta = 0.0;
    bool dealias = false;
    std::vector<std::vector<double>> states;  ///< steps+1 coefficient vectors
    std::vector<std::vector<double>> noise;   ///< steps x K^d increments xi_k^n
    std::vector<double> variance;             ///< v_k(dt), the law of each increment

    [[nodiscard]] int steps() const { return static_cast<int>(noise.size()); }
    [[nodiscard]] double time(int n) const { return n * dt; }

    [[nodiscard]] SpectralField state(int n) const { return SpectralField(basis, states.at(n)); }

    /// Index n with t = n dt; throws when t is not on the grid.
    [[nodiscard]] int time_index(double t) const {
        const double r = t / dt;
        const double n = std::round(r);
        if (std::abs(r - n) > 1e-9 * std::max(1.0, r) || n < 0 || n > steps())
            throw std::domain_error("time is not on the trajectory grid");
        return static_cast<int>(n);
    }

    [[nodiscard]] double value(int n, const Point& x) const { return evaluate(state(n), x); }
};

/// Replays the scheme with given increments (used for finite-difference oracles).
inline Trajectory integrate(const SolverConfig& config, const DriftEvaluator& drift,
                            std::vector<std::vector<double>> noise) {
    if (static_cast<int>(noise.size()) != config.steps) throw std::invalid_argument("integrate: noise has wrong step count");
    const ExponentialEuler scheme(config.noise, config.dt(), config.dealias);
    Trajectory traj{config.basis(), config.dt(), config.eta, config.dealias, {}, std::move(noise),
                    config.noise.one_step_variances(config.dt())};
    traj.states.reserve(config.steps + 1);
    traj.states.push_back(config.u0.coeffs);
    for (int n = 0; n < config.steps; ++n) {
        std::vector<double> next(config.basis().size());
        scheme.step(traj.states.back(), drift, config.eta, traj.noise[n], next, static_cast<std::size_t>(n));
        traj.states.push_back(std::move(next));
    }
    return traj;
}

/// Increments xi_k^n = sqrt(v_k) z for path `path`, drawn from the counter-based stream.
inline std::vector<std::vector<double>> sample_increments(const SolverConfig& config, std::uint64_t path) {
    const CounterGaussian rng(config.seed, Stream::path_noise);
    auto sd = config.noise.one_step_variances(config.dt());
    for (auto& v : sd) v = std::sqrt(v);
    std::vector<std::vector<double>> noise(config.steps, std::vector<double>(sd.size()));
    for (int n = 0; n < config.steps; ++n) {
        rng.fill(path, static_cast<std::uint32_t>(n), noise[n]);
        for (std::size_t k = 0; k < sd.size(); ++k) noise[n][k] *= sd[k];
    }
    return noise;
}

/// Full path; a pure function of (config, drift, path).
inline Trajectory solve_path(const SolverConfig& config, const DriftEvaluator& drift, std::uint64_t path = 0) {
    return integrate(config, drift, sample_increments(config, path));
}

/**
 * Merges pairs of fine increments into the increments of a step twice as long:
 * xi_coarse = e^{-|k|^2 dt} xi_1 + xi_2, which is exact for the stochastic
 * convolution. Used to couple paths across time-step refinements.
 */
inline std::vector<std::vector<double>> coarsen_increments(const SineBasis& basis, double fine_dt,
                                                           const std::vector<std::vector<double>>& fine) {
    if (fine.size() % 2 != 0) throw std::invalid_argument("coarsen_increments: need an even number of steps");
    std::vector<std::vector<double>> coarse(fine.size() / 2, std::vector<double>(basis.size()));
    for (std::size_t n = 0; n < coarse.size(); ++n)
        for (std::size_t k = 0; k < basis.size(); ++k)
            coarse[n][k] = std::exp(-basis.eigenvalue(k) * fine_dt) * fine[2 * n][k] + fine[2 * n + 1][k];
    return coarse;
}

/// sup over steps and collocation nodes of |u_a - u_b|.
inline double sup_grid_distance(const Trajectory& a, const Trajectory& b) {
    if (a.states.size() != b.states.size() || !(a.basis == b.basis))
        throw std::invalid_argument("sup_grid_distance: trajectories are not comparable");
    const SineTransform tr(a.basis);
    std::vector<double> diff(a.basis.size());
    double sup = 0.0;
    for (std::size_t n = 0; n < a.states.size(); ++n) {
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = a.states[n][k] - b.states[n][k];
        for (double v : tr.to_grid(diff)) sup = std::max(sup, std::abs(v));
    }
    return sup;
}

/// sup over steps and collocation nodes of |u|.
inline double sup_grid_norm(const Trajectory& a) {
    const SineTransform tr(a.basis);
    double sup = 0.0;
    for (const auto& s : a.states)
        for (double v : tr.to_grid(s)) sup = std::max(sup, std::abs(v));
    return sup;
}

}  // namespace sheq
