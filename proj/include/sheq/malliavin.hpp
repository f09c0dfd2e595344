#pragma once

/**
 * @file malliavin.hpp
 * @brief Malliavin derivatives of the discrete solution u^N(x) with respect to
 * the driving noise.
 *
 * The scheme is u^{n+1} = Psi_n(u^n) + xi^n with independent xi_k^n ~ N(0, v_k).
 * Each xi_k^n is the Wiener integral of a deterministic function of H-norm
 * squared v_k, so
 *
 *   ||D u^N(x)||_H^2 = sum_{n<N} sum_k v_k (d u^N(x) / d xi_k^n)^2.
 *
 * The tangent of one step is A_n = E + Phi (eta - P diag(f'(S u^n)) S) with S
 * the synthesis and P the analysis transform. The backward (adjoint) sweep
 * p^N = e(x), p^n = A_n^T p^{n+1} yields d u^N(x)/d xi^n = p^{n+1} for all
 * modes at once, and reproduces the forward tangent sweep to rounding.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sheq/drift.hpp"
#include "sheq/errors.hpp"
#include "sheq/solver.hpp"
#include "sheq/spectral.hpp"

namespace sheq {

/**
 * Per-step collocation samples of f'(u^n) and, on request, f''(u^n) for the
 * active drift variant. The potential of the linearised equation is
 * F = f'(u) - eta.
 */
struct CoefficientPath {
    SineBasis basis;
    double dt = 0.0;
    double eta = 0.0;
    bool dealias = false;
    std::vector<std::vector<double>> slope;
    std::vector<std::vector<double>> curvature;

    [[nodiscard]] int steps() const { return static_cast<int>(slope.size()); }

    [[nodiscard]] double potential(int n, std::size_t j) const { return slope[n][j] - eta; }

    [[nodiscard]] double min_potential() const {
        double m = std::numeric_limits<double>::infinity();
        for (int n = 0; n < steps(); ++n)
            for (std::size_t j = 0; j < basis.size(); ++j) m = std::min(m, potential(n, j));
        return m;
    }
};

/// Samples the coefficients along the first `steps` steps of a trajectory (all by default).
inline CoefficientPath coefficient_path(const Trajectory& traj, const DriftEvaluator& drift, bool with_curvature = false,
                                        int steps = -1) {
    if (steps < 0) steps = traj.steps();
    if (steps > traj.steps()) throw std::invalid_argument("coefficient_path: more steps than the trajectory has");
    CoefficientPath c{traj.basis, traj.dt, traj.eta, traj.dealias, {}, {}};
    c.slope.assign(steps, {});
    if (with_curvature) c.curvature.assign(steps, {});
    if (drift.vanishes()) {
        for (int n = 0; n < steps; ++n) {
            c.slope[n].assign(traj.basis.size(), 0.0);
            if (with_curvature) c.curvature[n].assign(traj.basis.size(), 0.0);
        }
        return c;
    }
    const SineTransform tr(traj.basis);
    const int order = with_curvature ? 2 : 1;
    for (int n = 0; n < steps; ++n) {
        const auto grid = tr.to_grid(traj.states[n]);
        c.slope[n].resize(grid.size());
        if (with_curvature) c.curvature[n].resize(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const auto d = drift.derivatives(order, grid[j]);
            c.slope[n][j] = d[1];
            if (with_curvature) c.curvature[n][j] = d[2];
        }
    }
    return c;
}

/// The tangent maps A_n of the scheme and their transposes.
class TangentScheme {
public:
    TangentScheme(const CoefficientPath& coeffs)
        : coeffs_(&coeffs), tr_(coeffs.basis), mask_(dealias_mask(coeffs.basis, coeffs.dealias)) {
        const SineBasis& b = coeffs.basis;
        decay_.resize(b.size());
        phi_.resize(b.size());
        for (std::size_t i = 0; i < b.size(); ++i) {
            decay_[i] = std::exp(-b.eigenvalue(i) * coeffs.dt);
            phi_[i] = -std::expm1(-b.eigenvalue(i) * coeffs.dt) / b.eigenvalue(i);
        }
        for (const auto& s : coeffs.slope)
            zero_slope_.push_back(std::all_of(s.begin(), s.end(), [](double v) { return v == 0.0; }));
    }

    [[nodiscard]] const SineTransform& transform() const { return tr_; }
    [[nodiscard]] std::span<const double> phi() const { return phi_; }
    [[nodiscard]] std::span<const double> mask() const { return mask_; }

    /// A_n d = E d + Phi (eta d - M P(f'(U^n) . S d)), M the dealiasing mask
    [[nodiscard]] std::vector<double> forward(int n, std::span<const double> d) const {
        const std::size_t sz = d.size();
        std::vector<double> out(sz);
        const double eta = coeffs_->eta;
        if (zero_slope_.at(n)) {
            for (std::size_t k = 0; k < sz; ++k) out[k] = (decay_[k] + eta * phi_[k]) * d[k];
            return out;
        }
        auto grid = tr_.to_grid(d);
        for (std::size_t j = 0; j < sz; ++j) grid[j] *= coeffs_->slope[n][j];
        const auto back = tr_.from_grid(grid);
        for (std::size_t k = 0; k < sz; ++k) out[k] = decay_[k] * d[k] + phi_[k] * (eta * d[k] - mask_[k] * back[k]);
        return out;
    }

    /// A_n^T p = E p + eta Phi p - S(f'(U^n) . P(M Phi p)); S and P are symmetric.
    [[nodiscard]] std::vector<double> adjoint(int n, std::span<const double> p) const {
        const std::size_t sz = p.size();
        std::vector<double> out(sz);
        const double eta = coeffs_->eta;
        if (zero_slope_.at(n)) {
            for (std::size_t k = 0; k < sz; ++k) out[k] = (decay_[k] + eta * phi_[k]) * p[k];
            return out;
        }
        std::vector<double> phip(sz);
        for (std::size_t k = 0; k < sz; ++k) phip[k] = phi_[k] * p[k];
        std::vector<double> masked(sz);
        for (std::size_t k = 0; k < sz; ++k) masked[k] = mask_[k] * phip[k];
        auto grid = tr_.from_grid(masked);
        for (std::size_t j = 0; j < sz; ++j) grid[j] *= coeffs_->slope[n][j];
        const auto back = tr_.to_grid(grid);
        for (std::size_t k = 0; k < sz; ++k) out[k] = decay_[k] * p[k] + eta * phip[k] - back[k];
        return out;
    }

private:
    const CoefficientPath* coeffs_;
    SineTransform tr_;
    std::vector<double> mask_;
    std::vector<double> decay_;
    std::vector<double> phi_;
    std::vector<bool> zero_slope_;
};

namespace detail {
inline void require_time_index(const Trajectory& traj, int t_index) {
    if (t_index < 0 || t_index > traj.steps()) throw std::domain_error("time index is outside the trajectory");
}
}  // namespace detail

/// Adjoint states p^{n+1} = d u^N(x) / d xi^n for n = 0..N-1.
inline std::vector<std::vector<double>> adjoint_states(const Trajectory& traj, const CoefficientPath& coeffs,
                                                       int t_index, const Point& x) {
    detail::require_time_index(traj, t_index);
    if (coeffs.steps() < t_index) throw std::invalid_argument("adjoint_states: coefficient path too short");
    require_inside(x);
    const TangentScheme ts(coeffs);
    std::vector<std::vector<double>> p(t_index);
    if (t_index == 0) return p;
    p[t_index - 1] = traj.basis.eval_all(x);
    for (int n = t_index - 1; n >= 1; --n) p[n - 1] = ts.adjoint(n, p[n]);
    return p;
}

/// ||D u^N(x)||_H^2 by one backward sweep.
inline double malliavin_norm_adjoint(const Trajectory& traj, const CoefficientPath& coeffs, int t_index,
                                     const Point& x) {
    const auto p = adjoint_states(traj, coeffs, t_index, x);
    double s = 0.0;
    for (const auto& pn : p)
        for (std::size_t k = 0; k < pn.size(); ++k) s += traj.variance[k] * pn[k] * pn[k];
    return s;
}

inline double malliavin_norm_adjoint(const Trajectory& traj, const DriftEvaluator& drift, double t, const Point& x) {
    const int N = traj.time_index(t);
    return malliavin_norm_adjoint(traj, coefficient_path(traj, drift, false, N), N, x);
}

/// sum_k v_k e_k(x)^2: the contribution of the last step alone, a lower bound for the norm.
inline double last_step_contribution(const Trajectory& traj, const Point& x) {
    const auto e = traj.basis.eval_all(x);
    double s = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) s += traj.variance[k] * e[k] * e[k];
    return s;
}

/**
 * D_{tau,k} u(t, .) in coefficients: the response at step `t_index` to the
 * increment xi_k^{tau_index}, scaled to a unit Gaussian (factor sqrt(v_k)).
 */
inline SpectralField malliavin_derivative_forward(const Trajectory& traj, const CoefficientPath& coeffs, int tau_index,
                                                  std::size_t mode, int t_index) {
    detail::require_time_index(traj, t_index);
    if (tau_index < 0 || tau_index >= t_index) throw std::domain_error("forward derivative: need 0 <= tau < t");
    if (mode >= traj.basis.size()) throw std::domain_error("forward derivative: mode outside truncation");
    const TangentScheme ts(coeffs);
    std::vector<double> d(traj.basis.size(), 0.0);
    d[mode] = std::sqrt(traj.variance[mode]);
    for (int m = tau_index + 1; m < t_index; ++m) d = ts.forward(m, d);
    return SpectralField(traj.basis, std::move(d));
}

/// ||D u^N(x)||_H^2 assembled from every forward tangent; the oracle for the adjoint sweep.
inline double malliavin_norm_forward(const Trajectory& traj, const CoefficientPath& coeffs, int t_index,
                                     const Point& x) {
    detail::require_time_index(traj, t_index);
    const TangentScheme ts(coeffs);
    const auto e = traj.basis.eval_all(x);
    double s = 0.0;
    for (int n = 0; n < t_index; ++n)
        for (std::size_t k = 0; k < traj.basis.size(); ++k) {
            std::vector<double> d(traj.basis.size(), 0.0);
            d[k] = std::sqrt(traj.variance[k]);
            for (int m = n + 1; m < t_index; ++m) d = ts.forward(m, d);
            double v = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) v += e[i] * d[i];
            s += v * v;
        }
    return s;
}

// ---------------------------------------------------------------------------
// Finite-difference oracle
// ---------------------------------------------------------------------------

/// A noise coordinate: increment of `mode` over step `step`.
struct NoiseCoordinate {
    int step = 0;
    std::size_t mode = 0;
};

/// u^N(x) after bumping the given coordinates by the given amounts (in units of sqrt(v_k)).
inline double bumped_value(const SolverConfig& config, const DriftEvaluator& drift, const Trajectory& traj,
                           int t_index, const Point& x, std::span<const NoiseCoordinate> coords,
                           std::span<const double> bumps) {
    int first = t_index;
    for (const auto& c : coords) first = std::min(first, c.step);
    const ExponentialEuler scheme(config.noise, traj.dt, traj.dealias);
    std::vector<double> state = traj.states.at(first);
    std::vector<double> next(state.size());
    for (int n = first; n < t_index; ++n) {
        std::vector<double> xi = traj.noise[n];
        for (std::size_t i = 0; i < coords.size(); ++i)
            if (coords[i].step == n) xi[coords[i].mode] += bumps[i] * std::sqrt(traj.variance[coords[i].mode]);
        scheme.step(state, drift, traj.eta, xi, next, static_cast<std::size_t>(n));
        std::swap(state, next);
    }
    return evaluate(SpectralField(traj.basis, std::move(state)), x);
}

struct FdCheckReport {
    double h = 0.0;
    double max_relative_error = 0.0;
    double max_abs_error = 0.0;
    double scale = 0.0;  ///< largest |derivative| among the checked coordinates
    std::size_t checked = 0;
};

/// A deterministic spread of (step, mode) pairs below t_index.
inline std::vector<NoiseCoordinate> sample_coordinates(const SineBasis& basis, int t_index) {
    std::vector<NoiseCoordinate> out;
    const std::vector<int> steps{0, t_index / 4, t_index / 2, (3 * t_index) / 4, t_index - 1};
    const std::size_t n = basis.size();
    const std::vector<std::size_t> modes{0, 1, n / 2, n - 1};
    for (int s : steps)
        for (std::size_t m : modes)
            if (s >= 0 && s < t_index && m < n) {
                const bool dup = std::any_of(out.begin(), out.end(),
                                             [&](const NoiseCoordinate& c) { return c.step == s && c.mode == m; });
                if (!dup) out.push_back({s, m});
            }
    return out;
}

/**
 * Central differences of u^N(x) in the unit-Gaussian coordinates vs the
 * forward tangent. Relative errors use max(|derivative|, 1e-2 * scale) as the
 * denominator so coordinates with a near-zero response do not dominate.
 */
inline FdCheckReport malliavin_fd_check(const SolverConfig& config, const DriftEvaluator& drift,
                                        const Trajectory& traj, int t_index, const Point& x, double h,
                                        std::span<const NoiseCoordinate> coords) {
    if (!(h > 0.0)) throw std::invalid_argument("malliavin_fd_check: h must be > 0");
    const auto coeffs = coefficient_path(traj, drift, false, t_index);
    const auto e = traj.basis.eval_all(x);
    std::vector<double> analytic, fd;
    for (const auto& c : coords) {
        const auto d = malliavin_derivative_forward(traj, coeffs, c.step, c.mode, t_index);
        double v = 0.0;
        for (std::size_t i = 0; i < e.size(); ++i) v += e[i] * d.coeffs[i];
        analytic.push_back(v);
        const NoiseCoordinate one[1] = {c};
        const double plus[1] = {h}, minus[1] = {-h};
        fd.push_back((bumped_value(config, drift, traj, t_index, x, one, plus) -
                      bumped_value(config, drift, traj, t_index, x, one, minus)) /
                     (2.0 * h));
    }
    FdCheckReport r;
    r.h = h;
    r.checked = coords.size();
    for (double a : analytic) r.scale = std::max(r.scale, std::abs(a));
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double err = std::abs(fd[i] - analytic[i]);
        r.max_abs_error = std::max(r.max_abs_error, err);
        const double denom = std::max(std::abs(analytic[i]), 1e-2 * r.scale);
        if (denom > 0.0) r.max_relative_error = std::max(r.max_relative_error, err / denom);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Evolution operators
// ---------------------------------------------------------------------------

/// U(t,s) = A_{t-1} ... A_s in spectral coordinates, row-major.
struct EvolutionKernelMatrix {
    SineBasis basis;
    int s_index = 0;
    int t_index = 0;
    double dt = 0.0;
    std::vector<double> matrix;

    [[nodiscard]] std::size_t size() const { return basis.size(); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return matrix[i * size() + j]; }
    [[nodiscard]] double elapsed() const { return (t_index - s_index) * dt; }

    /// k(x_i, y_j) = sum e_k(x_i) U_{kk'} e_{k'}(y_j) on the collocation grid, row-major.
    [[nodiscard]] std::vector<double> grid_kernel() const {
        const std::size_t n = size();
        const SineTransform tr(basis);
        std::vector<double> out(n * n);
        std::vector<double> col(n), ue(n);
        for (std::size_t j = 0; j < n; ++j) {
            const auto ey = basis.eval_all(basis.grid_point(j));
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) acc += matrix[i * n + k] * ey[k];
                ue[i] = acc;
            }
            tr.to_grid(ue, col);
            for (std::size_t i = 0; i < n; ++i) out[i * n + j] = col[i];
        }
        return out;
    }
};

inline EvolutionKernelMatrix evolution_kernel(const CoefficientPath& coeffs, int s_index, int t_index) {
    if (s_index < 0 || s_index > t_index || t_index > coeffs.steps())
        throw std::domain_error("evolution_kernel: need 0 <= s <= t on the coefficient path");
    for (int m = s_index; m < t_index; ++m)
        for (std::size_t j = 0; j < coeffs.basis.size(); ++j)
            if (coeffs.potential(m, j) < 0.0)
                throw std::invalid_argument("evolution_kernel: potential f' - eta is negative; the comparison needs F >= 0");
    const std::size_t n = coeffs.basis.size();
    const TangentScheme ts(coeffs);
    EvolutionKernelMatrix u{coeffs.basis, s_index, t_index, coeffs.dt, std::vector<double>(n * n, 0.0)};
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> d(n, 0.0);
        d[c] = 1.0;
        for (int m = s_index; m < t_index; ++m) d = ts.forward(m, d);
        for (std::size_t r = 0; r < n; ++r) u.matrix[r * n + c] = d[r];
    }
    return u;
}

struct KernelCheckReport {
    double elapsed = 0.0;
    double tolerance = 0.0;       ///< eps_K(t - s)
    double min_kernel = 0.0;      ///< most negative grid-kernel entry
    double max_excess = 0.0;      ///< max of k - G_{t-s} over grid pairs
    double sup_kernel = 0.0;
    bool skipped = false;         ///< t - s below t_min(K)

    [[nodiscard]] bool positivity_ok() const { return skipped || min_kernel >= -tolerance; }
    [[nodiscard]] bool comparison_ok() const { return skipped || max_excess <= tolerance; }
    [[nodiscard]] bool bounded() const { return std::isfinite(sup_kernel); }
};

/// Positivity, comparison with the truncated heat kernel, and boundedness on the grid.
inline KernelCheckReport check_kernel(const EvolutionKernelMatrix& u) {
    KernelCheckReport r;
    r.elapsed = u.elapsed();
    if (r.elapsed < kernel_min_time(u.basis)) {
        r.skipped = true;
        return r;
    }
    r.tolerance = evolution_kernel_tolerance(u.basis, r.elapsed);
    const auto k = u.grid_kernel();
    const std::size_t n = u.size();
    std::vector<std::vector<double>> e(n);
    for (std::size_t j = 0; j < n; ++j) e[j] = u.basis.eval_all(u.basis.grid_point(j));
    r.min_kernel = std::numeric_limits<double>::infinity();
    r.max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double g = 0.0;
            for (std::size_t m = 0; m < n; ++m) g += std::exp(-r.elapsed * u.basis.eigenvalue(m)) * e[i][m] * e[j][m];
            const double kij = k[i * n + j];
            r.min_kernel = std::min(r.min_kernel, kij);
            r.max_excess = std::max(r.max_excess, kij - g);
            r.sup_kernel = std::max(r.sup_kernel, std::abs(kij));
        }
    return r;
}

// ---------------------------------------------------------------------------
// Second derivative
// ---------------------------------------------------------------------------

namespace detail {
/// Grid images S delta_a^m of every unit-Gaussian tangent, indexed [a][m * n + j].
inline std::vector<std::vector<double>> tangent_grid_images(const Trajectory& traj, const CoefficientPath& coeffs,
                                                            int t_index) {
    const std::size_t n = traj.basis.size();
    const TangentScheme ts(coeffs);
    std::vector<std::vector<double>> g(static_cast<std::size_t>(t_index) * n,
                                       std::vector<double>(static_cast<std::size_t>(t_index) * n, 0.0));
    for (int s = 0; s < t_index; ++s)
        for (std::size_t k = 0; k < n; ++k) {
            auto& row = g[s * n + k];
            std::vector<double> d(n, 0.0);
            d[k] = std::sqrt(traj.variance[k]);
            for (int m = s + 1; m < t_index; ++m) {
                const auto grid = ts.transform().to_grid(d);
                std::copy(grid.begin(), grid.end(), row.begin() + static_cast<std::ptrdiff_t>(m * n));
                d = ts.forward(m, d);
            }
        }
    return g;
}

/// c^m_j = f''(U^m_j) [P Phi p^{m+1}]_j, the adjoint weights of the second-order source.
inline std::vector<double> curvature_weights(const Trajectory& traj, const CoefficientPath& coeffs, int t_index,
                                             const Point& x) {
    const std::size_t n = traj.basis.size();
    const auto p = adjoint_states(traj, coeffs, t_index, x);
    const TangentScheme ts(coeffs);
    std::vector<double> c(static_cast<std::size_t>(t_index) * n, 0.0);
    std::vector<double> phip(n);
    for (int m = 0; m < t_index; ++m) {
        for (std::size_t k = 0; k < n; ++k) phip[k] = ts.mask()[k] * ts.phi()[k] * p[m][k];
        const auto grid = ts.transform().from_grid(phip);
        for (std::size_t j = 0; j < n; ++j) c[m * n + j] = coeffs.curvature[m][j] * grid[j];
    }
    return c;
}
}  // namespace detail

/**
 * ||D^2 u^N(x)||^2_{H (x) H} = sum_{a,b} (d^2 u^N(x) / dz_a dz_b)^2 over unit
 * Gaussian coordinates a = (step, mode). The Hessian is
 *
 *   H_ab = - sum_m sum_j c^m_j (S delta_a^m)_j (S delta_b^m)_j,
 *
 * i.e. the second variational equation with source f''(u) (Du)^{(x)2},
 * contracted against the adjoint.
 */
inline double second_malliavin_norm(const Trajectory& traj, const DriftEvaluator& drift, int t_index, const Point& x) {
    detail::require_time_index(traj, t_index);
    if (drift.smoothness() < 2) throw std::domain_error("second_malliavin_norm: drift smoothness below 2");
    if (drift.vanishes() || drift.base().is_affine()) return 0.0;
    if (static_cast<std::size_t>(t_index) * traj.basis.size() > 4096)
        throw std::invalid_argument("second_malliavin_norm: more than 4096 noise coordinates; reduce K or M");
    const auto coeffs = coefficient_path(traj, drift, true, t_index);
    const auto g = detail::tangent_grid_images(traj, coeffs, t_index);
    const auto c = detail::curvature_weights(traj, coeffs, t_index, x);
    const std::size_t dirs = g.size();
    std::vector<double> weighted(c.size());
    double s = 0.0;
    for (std::size_t a = 0; a < dirs; ++a) {
        for (std::size_t i = 0; i < c.size(); ++i) weighted[i] = c[i] * g[a][i];
        for (std::size_t b = a; b < dirs; ++b) {
            double h = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i) h += weighted[i] * g[b][i];
            s += (a == b ? 1.0 : 2.0) * h * h;
        }
    }
    return s;
}

/// One Hessian entry d^2 u^N(x) / dz_a dz_b, for comparison with second differences.
inline double hessian_entry(const Trajectory& traj, const DriftEvaluator& drift, int t_index, const Point& x,
                            NoiseCoordinate a, NoiseCoordinate b) {
    detail::require_time_index(traj, t_index);
    const std::size_t n = traj.basis.size();
    const auto coeffs = coefficient_path(traj, drift, true, t_index);
    const auto c = detail::curvature_weights(traj, coeffs, t_index, x);
    const TangentScheme ts(coeffs);
    auto images = [&](NoiseCoordinate q) {
        std::vector<double> out(c.size(), 0.0);
        std::vector<double> d(n, 0.0);
        d[q.mode] = std::sqrt(traj.variance[q.mode]);
        for (int m = q.step + 1; m < t_index; ++m) {
            const auto grid = ts.transform().to_grid(d);
            std::copy(grid.begin(), grid.end(), out.begin() + static_cast<std::ptrdiff_t>(m * n));
            d = ts.forward(m, d);
        }
        return out;
    };
    const auto ga = images(a);
    const auto gb = images(b);
    double h = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) h += c[i] * ga[i] * gb[i];
    return -h;
}

/// The matching four-point second difference of u^N(x).
inline double hessian_fd(const SolverConfig& config, const DriftEvaluator& drift, const Trajectory& traj, int t_index,
                         const Point& x, NoiseCoordinate a, NoiseCoordinate b, double h) {
    const NoiseCoordinate coords[2] = {a, b};
    auto at = [&](double sa, double sb) {
        const double bumps[2] = {sa * h, sb * h};
        return bumped_value(config, drift, traj, t_index, x, coords, bumps);
    };
    if (a.step == b.step && a.mode == b.mode) {
        const NoiseCoordinate one[1] = {a};
        const double p[1] = {h}, m[1] = {-h};
        const double zero = traj.value(t_index, x);
        return (bumped_value(config, drift, traj, t_index, x, one, p) - 2.0 * zero +
                bumped_value(config, drift, traj, t_index, x, one, m)) /
               (h * h);
    }
    return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
}

}  // namespace sheq
