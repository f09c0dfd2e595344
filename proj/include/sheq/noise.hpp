#pragma once

/**
 * @file noise.hpp
 * @brief Diagonal Q-Wiener noise on the sine basis and the energy function g(x,t).
 *
 * Q e_k = q_k e_k and B = Q^{1/2}. The one-step stochastic convolution of mode
 * k over a step dt is N(0, v_k) with
 *
 *   v_k(dt) = q_k (1 - exp(-2|k|^2 dt)) / (2|k|^2),
 *
 * and the variance of the stochastic convolution at (x,t) is
 *
 *   g(x,t) = 1/2 sum_k q_k |k|^{-2} (1 - exp(-2t|k|^2)) e_k(x)^2.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sheq/rng.hpp"
#include "sheq/spectral.hpp"

namespace sheq {

enum class NoiseKind { identity, smoothed, custom };

inline std::string to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::identity: return "identity";
        case NoiseKind::smoothed: return "smoothed";
        case NoiseKind::custom: return "custom";
    }
    return "?";
}

class NoiseModel {
public:
    /// Space-time white noise, Q = I. Only admissible in d = 1.
    static NoiseModel identity(const SineBasis& basis) {
        if (basis.dim() != 1) throw std::invalid_argument("identity noise requires d = 1");
        return NoiseModel(basis, NoiseKind::identity, std::vector<double>(basis.size(), 1.0), 0.0);
    }

    /**
     * B = (I - Delta)^{-m_Q}, so q_k = (1 + |k|^2)^{-2 m_Q}. The stochastic
     * convolution is well defined when m_Q > d/2 - 1.
     */
    static NoiseModel smoothed(const SineBasis& basis, double m_q) {
        if (!(m_q >= 0.0)) throw std::invalid_argument("smoothed noise: m_Q must be >= 0");
        if (!(m_q > 0.5 * basis.dim() - 1.0))
            throw std::invalid_argument("smoothed noise: need m_Q > d/2 - 1 for a finite trace series");
        std::vector<double> q(basis.size());
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::pow(1.0 + basis.eigenvalue(i), -2.0 * m_q);
        return NoiseModel(basis, NoiseKind::smoothed, std::move(q), m_q);
    }

    /// Eigenvalues given explicitly in storage order.
    static NoiseModel custom(const SineBasis& basis, std::vector<double> q) {
        if (q.size() != basis.size()) throw std::invalid_argument("custom noise: need one eigenvalue per mode");
        for (double v : q)
            if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("custom noise: eigenvalues must be >= 0");
        return NoiseModel(basis, NoiseKind::custom, std::move(q), 0.0);
    }

    [[nodiscard]] const SineBasis& basis() const { return basis_; }
    [[nodiscard]] NoiseKind kind() const { return kind_; }
    [[nodiscard]] double m_q() const { return m_q_; }
    [[nodiscard]] std::span<const double> eigenvalues() const { return q_; }
    [[nodiscard]] double q(std::size_t i) const { return q_[i]; }
    [[nodiscard]] double b(std::size_t i) const { return std::sqrt(q_[i]); }

    /// v_k(dt) = q_k (1 - e^{-2|k|^2 dt}) / (2|k|^2)
    [[nodiscard]] double one_step_variance(std::size_t i, double dt) const {
        const double lam = basis_.eigenvalue(i);
        return q_[i] * (-std::expm1(-2.0 * lam * dt)) / (2.0 * lam);
    }

    [[nodiscard]] std::vector<double> one_step_variances(double dt) const {
        std::vector<double> v(q_.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = one_step_variance(i, dt);
        return v;
    }

    /// Partial trace sum_k q_k / |k|^2 over the truncation.
    [[nodiscard]] double trace_series() const {
        double s = 0.0;
        for (std::size_t i = 0; i < q_.size(); ++i) s += q_[i] / basis_.eigenvalue(i);
        return s;
    }

private:
    NoiseModel(SineBasis basis, NoiseKind kind, std::vector<double> q, double m_q)
        : basis_(std::move(basis)), kind_(kind), q_(std::move(q)), m_q_(m_q) {}

    SineBasis basis_;
    NoiseKind kind_;
    std::vector<double> q_;
    double m_q_;
};

/// g(x,t) = 1/2 sum_k q_k |k|^{-2} (1 - e^{-2t|k|^2}) e_k(x)^2, truncated at K.
inline double g_closed_form(const NoiseModel& noise, const Point& x, double t) {
    if (!(t >= 0.0)) throw std::domain_error("g_closed_form: t must be >= 0");
    const SineBasis& basis = noise.basis();
    const auto e = basis.eval_all(x);
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double lam = basis.eigenvalue(i);
        s += noise.q(i) / lam * (-std::expm1(-2.0 * t * lam)) * e[i] * e[i];
    }
    return 0.5 * s;
}

/// inf over the t-grid of g(x,t) / t^gamma.
inline double g_lower_bound_check(const NoiseModel& noise, const Point& x, double gamma,
                                  std::span<const double> t_grid) {
    if (!(gamma > 0.0 && gamma < 2.0)) throw std::invalid_argument("g_lower_bound_check: gamma must lie in (0,2)");
    double inf = std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("g_lower_bound_check: t-grid must lie in (0,1]");
        inf = std::min(inf, g_closed_form(noise, x, t) / std::pow(t, gamma));
    }
    return inf;
}

/**
 * Lower-bound constant of the cube example, as printed:
 *
 *   c_x = (1+d)^{-e} (1+2Td)^{-1} (2/pi)^{d/2} sin(x_1)...sin(x_d)
 *
 * where e is the exponent of the noise eigenvalues, q_k = (1+|k|^2)^{-e}.
 * Note the sine product is not squared; see `cube_constant_from_first_mode`.
 */
inline double cube_example_constant(int dim, double exponent, double horizon, const Point& x) {
    double v = std::pow(1.0 + dim, -exponent) / (1.0 + 2.0 * horizon * dim) *
               std::pow(2.0 / std::numbers::pi, 0.5 * dim);
    for (int i = 0; i < dim; ++i) v *= std::sin(x[i]);
    return v;
}

/// The k = (1,...,1) summand of the lower-bound series, (1+d)^{-e}(1+2Td)^{-1} e_{(1..1)}(x)^2.
inline double cube_constant_from_first_mode(int dim, double exponent, double horizon, const Point& x) {
    double v = std::pow(1.0 + dim, -exponent) / (1.0 + 2.0 * horizon * dim) * std::pow(2.0 / std::numbers::pi, dim);
    for (int i = 0; i < dim; ++i) v *= std::sin(x[i]) * std::sin(x[i]);
    return v;
}

// ---------------------------------------------------------------------------

struct CovarianceReport {
    double empirical = 0.0;
    double exact = 0.0;
    double std_error = 0.0;

    [[nodiscard]] double z_score() const { return std_error > 0.0 ? (empirical - exact) / std_error : 0.0; }
    [[nodiscard]] bool within(double n_se) const { return std::abs(empirical - exact) <= n_se * std_error; }
};

/**
 * Monte Carlo check of E(W_h(s) W_g(t)) = (s ^ t) <Qh, g>.
 *
 * W_h(t) = sum_k b_k h_k w_k(t) with independent Brownian motions w_k,
 * sampled at the two times from independent increments.
 */
inline CovarianceReport covariance_selftest(const NoiseModel& noise, std::span<const double> h,
                                            std::span<const double> g, double s, double t, std::size_t n_samples,
                                            std::uint64_t seed) {
    if (n_samples < 1000) throw std::invalid_argument("covariance_selftest: need at least 1000 samples");
    if (h.size() != noise.basis().size() || g.size() != noise.basis().size())
        throw std::invalid_argument("covariance_selftest: field size mismatch");
    if (!(s >= 0.0 && t >= 0.0)) throw std::invalid_argument("covariance_selftest: times must be >= 0");
    const double first = std::min(s, t);
    const double gap = std::abs(t - s);
    const std::size_t n = h.size();
    const CounterGaussian rng(seed, Stream::covariance_selftest);
    std::vector<double> z1(n), z2(n);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        rng.fill(i, 0, z1);
        rng.fill(i, 1, z2);
        double ws_h = 0.0, wt_g = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double w_first = std::sqrt(first) * z1[k];
            const double w_last = w_first + std::sqrt(gap) * z2[k];
            const double bk = noise.b(k);
            ws_h += bk * h[k] * (s <= t ? w_first : w_last);
            wt_g += bk * g[k] * (s <= t ? w_last : w_first);
        }
        const double prod = ws_h * wt_g;
        const double delta = prod - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (prod - mean);
    }
    double exact = 0.0;
    for (std::size_t k = 0; k < n; ++k) exact += noise.q(k) * h[k] * g[k];
    exact *= first;
    const double var = m2 / static_cast<double>(n_samples - 1);
    return {mean, exact, std::sqrt(var / static_cast<double>(n_samples))};
}

}  // namespace sheq
