#pragma once

/**
 * @file density.hpp
 * @brief Monte Carlo ensembles of u(t,x) and ||Du(t,x)||_H^2, and estimators
 * of the law of u(t,x): Gaussian KDE, small-ball curves, negative moments.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sheq/errors.hpp"
#include "sheq/io.hpp"
#include "sheq/malliavin.hpp"
#include "sheq/noise.hpp"
#include "sheq/solver.hpp"

namespace sheq {

struct Probe {
    double t = 0.0;
    Point x;
};

struct PathRecord {
    std::uint64_t path = 0;
    bool ok = true;
    std::string error;
    std::vector<double> value;  ///< u(t,x) per probe
    std::vector<double> norm2;  ///< ||Du(t,x)||_H^2 per probe (empty when not requested)
};

struct Ensemble {
    std::vector<Probe> probes;
    std::vector<PathRecord> records;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;

    [[nodiscard]] std::size_t n_paths() const { return records.size(); }
    [[nodiscard]] std::size_t failures() const {
        return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.ok; }));
    }

    /// u(t,x) at probe `p` over the successful paths.
    [[nodiscard]] std::vector<double> values(std::size_t p) const {
        std::vector<double> out;
        for (const auto& r : records)
            if (r.ok) out.push_back(r.value.at(p));
        return out;
    }

    [[nodiscard]] std::vector<double> norms(std::size_t p) const {
        std::vector<double> out;
        for (const auto& r : records)
            if (r.ok && !r.norm2.empty()) out.push_back(r.norm2.at(p));
        return out;
    }
};

/// FNV-1a over the numbers that determine a path.
inline std::uint64_t config_fingerprint(const SolverConfig& config, const DriftEvaluator& drift) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    auto mix_d = [&](double v) { mix(&v, sizeof v); };
    const int dim = config.basis().dim(), K = config.basis().modes_per_axis();
    mix(&dim, sizeof dim);
    mix(&K, sizeof K);
    mix_d(config.horizon);
    mix(&config.steps, sizeof config.steps);
    mix_d(config.eta);
    mix(&config.seed, sizeof config.seed);
    const int dealias = config.dealias ? 1 : 0;
    mix(&dealias, sizeof dealias);
    for (double q : config.noise.eigenvalues()) mix_d(q);
    for (double c : config.u0.coeffs) mix_d(c);
    for (double a : drift.base().coefficients()) mix_d(a);
    mix_d(drift.base().sine_amplitude());
    const int variant = static_cast<int>(drift.variant());
    mix(&variant, sizeof variant);
    if (drift.regularized()) {
        mix_d(drift.regularized()->lambda());
        mix_d(drift.regularized()->beta().value_or(0.0));
    }
    return h;
}

/**
 * Runs paths 0..n_paths-1 on `workers` threads. Each path depends only on
 * (config, drift, path id), so the ensemble is independent of scheduling.
 * Numerical failures are recorded per path instead of aborting the run.
 */
inline Ensemble run_ensemble(const SolverConfig& config, const DriftEvaluator& drift, std::size_t n_paths,
                             std::vector<Probe> probes, unsigned workers = 1, bool with_norms = true) {
    if (n_paths < 1) throw std::invalid_argument("run_ensemble: need at least one path");
    if (probes.empty()) throw std::invalid_argument("run_ensemble: need at least one probe");
    const double dt = config.dt();
    std::vector<int> t_index;
    for (const auto& p : probes) {
        require_inside(p.x);
        const double r = p.t / dt;
        if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r) || r < 0.0 || std::round(r) > config.steps)
            throw std::invalid_argument("run_ensemble: probe time is not on the time grid");
        t_index.push_back(static_cast<int>(std::round(r)));
    }

    Ensemble ens{std::move(probes), std::vector<PathRecord>(n_paths), config.seed, config_fingerprint(config, drift)};
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n_paths; i = next++) {
            PathRecord& rec = ens.records[i];
            rec.path = i;
            try {
                const Trajectory traj = solve_path(config, drift, i);
                std::optional<CoefficientPath> coeffs;
                if (with_norms) coeffs = coefficient_path(traj, drift);
                for (std::size_t p = 0; p < ens.probes.size(); ++p) {
                    rec.value.push_back(traj.value(t_index[p], ens.probes[p].x));
                    if (with_norms) rec.norm2.push_back(malliavin_norm_adjoint(traj, *coeffs, t_index[p], ens.probes[p].x));
                }
            } catch (const NumericalError& e) {
                rec.ok = false;
                rec.error = e.what();
                rec.value.clear();
                rec.norm2.clear();
            }
        }
    };
    workers = std::max(1u, workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return ens;
}

// ---------------------------------------------------------------------------
// Summary statistics
// ---------------------------------------------------------------------------

struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;
    double mean_se = 0.0;      ///< standard error of the mean
    double variance_se = 0.0;  ///< standard error of the sample variance (from the fourth moment)
    std::size_t n = 0;
};

inline MomentSummary summarize(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("summarize: need at least two samples");
    MomentSummary s;
    s.n = x.size();
    const double n = static_cast<double>(x.size());
    s.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - s.mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    s.variance = m2 / (n - 1.0);
    m4 /= n;
    const double pop = m2 / n;
    s.mean_se = std::sqrt(s.variance / n);
    s.variance_se = std::sqrt(std::max(0.0, m4 - pop * pop) / n);
    return s;
}

// ---------------------------------------------------------------------------
// Kernel density estimate
// ---------------------------------------------------------------------------

struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> density;
    double bandwidth = 0.0;
    std::size_t n_samples = 0;

    /// Trapezoidal mass over the grid.
    [[nodiscard]] double mass() const {
        double m = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) m += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
        return m;
    }

    [[nodiscard]] double peak() const { return *std::max_element(density.begin(), density.end()); }
};

inline std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    if (points < 2 || !(hi > lo)) throw std::invalid_argument("linear_grid: need hi > lo and at least two points");
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    return g;
}

/// mean +- 6 sample standard deviations.
inline std::vector<double> six_sigma_grid(std::span<const double> samples, std::size_t points = 401) {
    const auto s = summarize(samples);
    const double sd = std::sqrt(s.variance);
    if (!(sd > 0.0)) throw std::invalid_argument("six_sigma_grid: degenerate sample");
    return linear_grid(s.mean - 6.0 * sd, s.mean + 6.0 * sd, points);
}

inline double silverman_bandwidth(std::span<const double> samples) {
    const auto s = summarize(samples);
    return 1.06 * std::sqrt(s.variance) * std::pow(static_cast<double>(samples.size()), -0.2);
}

/// Gaussian-kernel estimate on `grid`; Silverman bandwidth unless one is given.
inline DensityEstimate kde(std::span<const double> samples, std::vector<double> grid,
                           std::optional<double> bandwidth = std::nullopt) {
    if (samples.size() < 100) throw std::invalid_argument("kde: need at least 100 samples");
    const auto s = summarize(samples);
    if (!(s.variance > 0.0)) throw std::invalid_argument("kde: degenerate sample (zero variance)");
    const double h = bandwidth.value_or(silverman_bandwidth(samples));
    if (!(h > 0.0)) throw std::invalid_argument("kde: bandwidth must be > 0");
    DensityEstimate est{std::move(grid), {}, h, samples.size()};
    est.density.assign(est.grid.size(), 0.0);
    // Sorting lets each grid point visit only samples within 8 bandwidths.
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double norm = 1.0 / (static_cast<double>(sorted.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t i = 0; i < est.grid.size(); ++i) {
        const double y = est.grid[i];
        auto lo = std::lower_bound(sorted.begin(), sorted.end(), y - 8.0 * h);
        auto hi = std::upper_bound(lo, sorted.end(), y + 8.0 * h);
        double acc = 0.0;
        for (auto it = lo; it != hi; ++it) {
            const double z = (y - *it) / h;
            acc += std::exp(-0.5 * z * z);
        }
        est.density[i] = acc * norm;
    }
    return est;
}

inline double gaussian_density(double y, double mean, double variance) {
    return std::exp(-0.5 * (y - mean) * (y - mean) / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

/// sup over the grid of |estimate - N(mean, variance)|.
inline double gaussian_sup_error(const DensityEstimate& est, double mean, double variance) {
    double e = 0.0;
    for (std::size_t i = 0; i < est.grid.size(); ++i)
        e = std::max(e, std::abs(est.density[i] - gaussian_density(est.grid[i], mean, variance)));
    return e;
}

/// Number of interior local maxima above 1% of the peak; 1 for a unimodal estimate.
inline int count_modes(const DensityEstimate& est) {
    const double floor = 0.01 * est.peak();
    int modes = 0;
    for (std::size_t i = 1; i + 1 < est.density.size(); ++i)
        if (est.density[i] > floor && est.density[i] >= est.density[i - 1] && est.density[i] > est.density[i + 1])
            ++modes;
    return modes;
}

// ---------------------------------------------------------------------------
// Small balls and negative moments
// ---------------------------------------------------------------------------

struct ProportionInterval {
    double p = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for k successes out of n.
inline ProportionInterval wilson_interval(std::size_t k, std::size_t n, double z = 1.96) {
    if (n == 0) throw std::invalid_argument("wilson_interval: n must be > 0");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z / (1 + z2 / nn) * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
    return {p, std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

struct SmallBallPoint {
    double eps = 0.0;
    std::size_t below = 0;
    ProportionInterval prob;
};

/// eps -> empirical P(||Du||^2 < eps) with Wilson intervals; eps-grid positive and decreasing.
inline std::vector<SmallBallPoint> small_ball_curve(std::span<const double> norms2, std::span<const double> eps_grid) {
    if (norms2.empty()) throw std::invalid_argument("small_ball_curve: empty sample");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0)) throw std::invalid_argument("small_ball_curve: eps must be > 0");
        if (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))
            throw std::invalid_argument("small_ball_curve: eps-grid must be strictly decreasing");
    }
    std::vector<double> sorted(norms2.begin(), norms2.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<SmallBallPoint> out;
    for (double e : eps_grid) {
        const auto k = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), e) - sorted.begin());
        out.push_back({e, k, wilson_interval(k, sorted.size())});
    }
    return out;
}

/**
 * Exponent bookkeeping for the small-ball bound: with p = q gamma / (2 - gamma)
 * the bound P(||Du||^2 < eps) <~ eps^{p(2/gamma - 1)} has exponent exactly q.
 */
struct SmallBallExponent {
    double p = 0.0;
    double exponent = 0.0;
};

inline SmallBallExponent small_ball_exponent(double q, double gamma) {
    if (!(gamma > 0.0 && gamma < 2.0)) throw std::invalid_argument("small_ball_exponent: gamma must lie in (0,2)");
    const double p = q * gamma / (2.0 - gamma);
    return {p, p * (2.0 / gamma - 1.0)};
}

/// Least-squares slope of log P against log eps over points with P > 0.
inline std::optional<double> small_ball_slope(std::span<const SmallBallPoint> curve) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& c : curve)
        if (c.below > 0) {
            const double lx = std::log(c.eps), ly = std::log(c.prob.p);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++n;
        }
    if (n < 2) return std::nullopt;
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return std::nullopt;
    return (n * sxy - sx * sy) / den;
}

struct NegativeMomentReport {
    double q = 0.0;
    double estimate = 0.0;  ///< mean of ||Du||^{-q}
    double trimmed = 0.0;   ///< same with the smallest 0.1% of norms removed
    std::size_t n = 0;
    std::size_t trimmed_count = 0;

    [[nodiscard]] double trim_sensitivity() const { return estimate > 0.0 ? std::abs(estimate - trimmed) / estimate : 0.0; }
    [[nodiscard]] bool stable(double rel = 0.05) const { return trim_sensitivity() <= rel; }
};

/// E ||Du||_H^{-q} from squared norms, with the 0.1% trimming diagnostic.
inline NegativeMomentReport negative_moment(std::span<const double> norms2, double q) {
    if (norms2.empty()) throw std::invalid_argument("negative_moment: empty sample");
    if (!(q >= 0.0)) throw std::invalid_argument("negative_moment: q must be >= 0");
    for (double v : norms2)
        if (!(v > 0.0)) throw NumericalError("negative_moment: zero Malliavin norm in the sample");
    std::vector<double> sorted(norms2.begin(), norms2.end());
    std::sort(sorted.begin(), sorted.end());
    NegativeMomentReport r;
    r.q = q;
    r.n = sorted.size();
    r.trimmed_count = static_cast<std::size_t>(std::ceil(0.001 * static_cast<double>(sorted.size())));
    if (r.trimmed_count >= sorted.size()) r.trimmed_count = 0;
    auto power = [q](double v) { return std::pow(v, -0.5 * q); };
    double all = 0.0, kept = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double w = power(sorted[i]);
        all += w;
        if (i >= r.trimmed_count) kept += w;
    }
    r.estimate = all / static_cast<double>(sorted.size());
    r.trimmed = kept / static_cast<double>(sorted.size() - r.trimmed_count);
    return r;
}

// ---------------------------------------------------------------------------
// Weakened lower-bound condition
// ---------------------------------------------------------------------------

namespace detail {
/// <(2/pi) sin^2(k .), sqrt(2/pi) sin(j .)> on (0,pi); zero for even j.
inline double squared_sine_coefficient(int k, int j) {
    if (j % 2 == 0) return 0.0;
    const double jj = j, m = 2.0 * k;
    return std::pow(2.0 / std::numbers::pi, 1.5) * (1.0 / jj - jj / (jj * jj - m * m));
}
}  // namespace detail

struct NondegeneracyReport {
    std::vector<double> delta;
    std::vector<double> value;
    bool condition_a_violated = false;  ///< g(x, delta) = 0 for some delta
    bool decreasing = false;            ///< value decreases as delta decreases

    [[nodiscard]] bool tends_to_zero() const {
        return !condition_a_violated && decreasing && !value.empty() && value.back() < value.front();
    }
};

/**
 * delta -> [delta / g(x,delta)] int_0^delta [S(s) g(., delta)](x) ds.
 *
 * g(., delta) = 1/2 sum_k c_k e_k^2 is expanded on the sine basis with the
 * exact coefficients of e_k^2, so that the time integral is
 * sum_j (1 - e^{-delta |j|^2}) / |j|^2 ghat_j e_j(x). The j-series is cut at
 * `j_max` per axis (odd j only contribute).
 */
inline NondegeneracyReport nondegeneracy_ratio(const NoiseModel& noise, const Point& x, std::span<const double> deltas,
                                     int j_max = 0) {
    require_inside(x);
    const SineBasis& basis = noise.basis();
    const int dim = basis.dim();
    if (j_max <= 0) j_max = std::max(4 * basis.modes_per_axis(), dim == 1 ? 1023 : (dim == 2 ? 127 : 31));
    const SineBasis wide(dim, j_max);
    const auto ex = wide.eval_all(x);
    // a[i][l] = <e_{k_i}^2 factor, e_{j} factor> per axis, tabulated on k x j.
    const int K = basis.modes_per_axis();
    std::vector<double> a(static_cast<std::size_t>(K) * j_max);
    for (int k = 1; k <= K; ++k)
        for (int j = 1; j <= j_max; ++j) a[(k - 1) * j_max + (j - 1)] = detail::squared_sine_coefficient(k, j);

    NondegeneracyReport r;
    for (double delta : deltas) {
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("nondegeneracy_ratio: delta must lie in (0,1)");
        const double g = g_closed_form(noise, x, delta);
        r.delta.push_back(delta);
        // Nodal points of every active mode leave only rounding noise in g.
        double g_scale = 0.0;
        for (std::size_t l = 0; l < basis.size(); ++l) {
            const double lam = basis.eigenvalue(l);
            g_scale += 0.5 * noise.q(l) * (-std::expm1(-2.0 * delta * lam)) / lam;
        }
        g_scale *= std::pow(2.0 / std::numbers::pi, dim);
        if (!(g > 1e-12 * g_scale)) {
            r.condition_a_violated = true;
            r.value.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        std::vector<double> ck(basis.size());
        for (std::size_t l = 0; l < basis.size(); ++l) {
            const double lam = basis.eigenvalue(l);
            ck[l] = 0.5 * noise.q(l) * (-std::expm1(-2.0 * delta * lam)) / lam;
        }
        double integral = 0.0;
        for (std::size_t jl = 0; jl < wide.size(); ++jl) {
            if (ex[jl] == 0.0) continue;
            const auto j = wide.index(jl);
            bool odd = true;
            for (int i = 0; i < dim; ++i) odd = odd && (j[i] % 2 == 1);
            if (!odd) continue;
            double ghat = 0.0;
            for (std::size_t kl = 0; kl < basis.size(); ++kl) {
                if (ck[kl] == 0.0) continue;
                const auto k = basis.index(kl);
                double prod = ck[kl];
                for (int i = 0; i < dim; ++i) prod *= a[(k[i] - 1) * j_max + (j[i] - 1)];
                ghat += prod;
            }
            const double lam = wide.eigenvalue(jl);
            integral += (-std::expm1(-delta * lam)) / lam * ghat * ex[jl];
        }
        r.value.push_back(delta / g * integral);
    }
    r.decreasing = !r.condition_a_violated;
    // Sort by delta descending and check the values fall with delta.
    std::vector<std::size_t> order(r.delta.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return r.delta[i] > r.delta[j]; });
    for (std::size_t i = 1; i < order.size() && r.decreasing; ++i)
        if (!(r.value[order[i]] < r.value[order[i - 1]])) r.decreasing = false;
    std::vector<double> d2, v2;
    for (auto i : order) {
        d2.push_back(r.delta[i]);
        v2.push_back(r.value[i]);
    }
    r.delta = std::move(d2);
    r.value = std::move(v2);
    return r;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

inline constexpr const char* kEnsembleMagic = "# sheq-ensemble";
inline constexpr int kEnsembleVersion = 1;

/// Columnar text: header lines, then one row per path.
inline void write_ensemble(std::ostream& os, const Ensemble& ens) {
    os << kEnsembleMagic << " v" << kEnsembleVersion << '\n';
    os << "# seed " << ens.seed << " config_hash " << ens.config_hash << " paths " << ens.n_paths() << " probes "
       << ens.probes.size() << '\n';
    for (std::size_t p = 0; p < ens.probes.size(); ++p) {
        os << "# probe " << p << " t " << format_double(ens.probes[p].t) << " x";
        for (double c : ens.probes[p].x.coords()) os << ' ' << format_double(c);
        os << '\n';
    }
    os << "path ok";
    for (std::size_t p = 0; p < ens.probes.size(); ++p) os << " u_" << p << " norm2_" << p;
    os << '\n';
    for (const auto& r : ens.records) {
        os << r.path << ' ' << (r.ok ? 1 : 0);
        for (std::size_t p = 0; p < ens.probes.size(); ++p) {
            if (!r.ok) {
                os << " nan nan";
                continue;
            }
            os << ' ' << format_double(r.value[p]) << ' ' << (r.norm2.empty() ? std::string("nan") : format_double(r.norm2[p]));
        }
        os << '\n';
    }
}

inline Ensemble read_ensemble(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind(kEnsembleMagic, 0) != 0)
        throw std::runtime_error("read_ensemble: missing ensemble header");
    if (line != std::string(kEnsembleMagic) + " v" + std::to_string(kEnsembleVersion))
        throw std::runtime_error("read_ensemble: unsupported version: " + line);
    Ensemble ens;
    std::size_t n_paths = 0, n_probes = 0;
    {
        std::getline(is, line);
        std::istringstream ss(line);
        std::string hash, tag;
        ss >> hash >> tag >> ens.seed >> tag >> ens.config_hash >> tag >> n_paths >> tag >> n_probes;
        if (!ss) throw std::runtime_error("read_ensemble: malformed summary line");
    }
    for (std::size_t p = 0; p < n_probes; ++p) {
        std::getline(is, line);
        std::istringstream ss(line);
        std::string hash, tag;
        std::size_t idx;
        Probe pr;
        ss >> hash >> tag >> idx >> tag >> pr.t >> tag;
        std::vector<double> c;
        double v;
        while (ss >> v) c.push_back(v);
        pr.x = Point(std::span<const double>(c));
        ens.probes.push_back(pr);
    }
    std::getline(is, line);  // column names
    auto parse = [](const std::string& s) {
        return s == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(s);
    };
    for (std::size_t i = 0; i < n_paths; ++i) {
        if (!std::getline(is, line)) throw std::runtime_error("read_ensemble: truncated file");
        std::istringstream ss(line);
        PathRecord r;
        int ok = 0;
        ss >> r.path >> ok;
        r.ok = ok == 1;
        bool any_norm = false;
        std::vector<double> norms;
        for (std::size_t p = 0; p < n_probes; ++p) {
            std::string u, n;
            ss >> u >> n;
            if (r.ok) {
                r.value.push_back(parse(u));
                norms.push_back(parse(n));
                any_norm = any_norm || n != "nan";
            }
        }
        if (!ss) throw std::runtime_error("read_ensemble: malformed row");
        if (any_norm) r.norm2 = std::move(norms);
        ens.records.push_back(std::move(r));
    }
    return ens;
}

}  // namespace sheq
