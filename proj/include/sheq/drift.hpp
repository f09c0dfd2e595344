#pragma once

/**
 * @file drift.hpp
 * @brief Monotone drifts, their Yosida approximations and mollifications.
 *
 * For a nondecreasing f and lambda > 0:
 *
 *   J_lambda = (I + lambda f)^{-1},   f_lambda = (I - J_lambda)/lambda = f o J_lambda.
 *
 * Derivatives of f_lambda of every order come from the composition rule for
 * f o J_lambda together with lambda f_lambda^{(k)} = -J_lambda^{(k)} (k >= 2),
 * which isolates the top-order term:
 *
 *   (1 + lambda f'(J)) f_lambda^{(n)} = sum_{k=2}^{n} f^{(k)}(J) B_{n,k}(J', ..., J^{(n-k+1)})
 *
 * with B_{n,k} the partial Bell polynomials.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "sheq/errors.hpp"

namespace sheq {

/**
 * f(x) = sum_i a_i x^i + s sin(x).
 *
 * Covers the built-in catalog (x^3, x + x^3, a x, x^3 + sin x after
 * normalisation) and user polynomials given as coefficient lists.
 */
class DriftFunction {
public:
    static constexpr int kAnalyticSmoothness = 8;

    DriftFunction() = default;
    DriftFunction(std::vector<double> poly, double sine, std::string label,
                  int smoothness = kAnalyticSmoothness)
        : poly_(std::move(poly)), sine_(sine), label_(std::move(label)), smoothness_(smoothness) {
        while (!poly_.empty() && poly_.back() == 0.0) poly_.pop_back();
        if (smoothness_ < 0) throw std::invalid_argument("DriftFunction: smoothness must be >= 0");
    }

    static DriftFunction zero() { return DriftFunction({}, 0.0, "zero"); }
    static DriftFunction cubic() { return DriftFunction({0.0, 0.0, 0.0, 1.0}, 0.0, "cubic"); }
    static DriftFunction cubic_plus_linear() { return DriftFunction({0.0, 1.0, 0.0, 1.0}, 0.0, "cubic_plus_linear"); }
    static DriftFunction linear(double a) { return DriftFunction({0.0, a}, 0.0, "linear"); }
    static DriftFunction polynomial(std::vector<double> coeffs) {
        return DriftFunction(std::move(coeffs), 0.0, "polynomial");
    }

    [[nodiscard]] double value(double x) const { return derivative(0, x); }

    /// f^{(n)}(x); n = 0 is the value.
    [[nodiscard]] double derivative(int n, double x) const {
        double acc = 0.0;
        const int deg = static_cast<int>(poly_.size()) - 1;
        for (int i = deg; i >= n; --i) acc = acc * x + poly_[i] * falling(i, n);
        if (sine_ != 0.0) acc += sine_ * sin_derivative(n, x);
        return acc;
    }

    [[nodiscard]] bool is_zero() const { return poly_.empty() && sine_ == 0.0; }
    [[nodiscard]] bool is_affine() const { return poly_.size() <= 2 && sine_ == 0.0; }

    /// Growth exponent p: |f^{(n)}(x)| <~ 1 + |x|^p.
    [[nodiscard]] int degree() const { return std::max(1, static_cast<int>(poly_.size()) - 1); }
    [[nodiscard]] int smoothness() const { return smoothness_; }
    [[nodiscard]] const std::string& label() const { return label_; }
    [[nodiscard]] const std::vector<double>& coefficients() const { return poly_; }
    [[nodiscard]] double sine_amplitude() const { return sine_; }

    /// f' >= 0 on every grid point (nondecreasing).
    [[nodiscard]] bool monotone_on(std::span<const double> grid) const {
        return std::all_of(grid.begin(), grid.end(), [&](double x) { return derivative(1, x) >= 0.0; });
    }

    /// Sum of a Lipschitz perturbation b x + s sin x.
    [[nodiscard]] DriftFunction plus(double linear, double sine, std::string label) const {
        auto p = poly_;
        if (p.size() < 2) p.resize(2, 0.0);
        p[1] += linear;
        return DriftFunction(std::move(p), sine_ + sine, std::move(label), smoothness_);
    }

private:
    static double falling(int i, int n) {
        double r = 1.0;
        for (int j = 0; j < n; ++j) r *= (i - j);
        return r;
    }
    static double sin_derivative(int n, double x) {
        switch (n % 4) {
            case 0: return std::sin(x);
            case 1: return std::cos(x);
            case 2: return -std::sin(x);
            default: return -std::cos(x);
        }
    }

    std::vector<double> poly_;
    double sine_ = 0.0;
    std::string label_ = "zero";
    int smoothness_ = kAnalyticSmoothness;
};

/// Result of rewriting f~ + g (g Lipschitz) as (monotone part) - eta * id.
struct QuasiMonotoneSplit {
    DriftFunction monotone;
    double eta = 0.0;
};

/**
 * For f~ monotone and g(x) = b x + s sin x Lipschitz with constant |b| + |s|,
 * f~ + g + eta id is monotone with eta = |b| + |s|. The equation with drift
 * f~ + g and no linear term is the same as the one with the monotone drift and
 * +eta u on the right-hand side.
 */
inline QuasiMonotoneSplit normalize_quasi_monotone(const DriftFunction& monotone_part, double lipschitz_linear,
                                                   double lipschitz_sine) {
    const double eta = std::abs(lipschitz_linear) + std::abs(lipschitz_sine);
    return {monotone_part.plus(lipschitz_linear + eta, lipschitz_sine, monotone_part.label() + "+lipschitz"), eta};
}

/// Catalog entry x^3 + sin(x), already normalised (eta = 1).
inline QuasiMonotoneSplit cubic_sine() { return normalize_quasi_monotone(DriftFunction::cubic(), 0.0, 1.0); }

// ---------------------------------------------------------------------------

/// Partial Bell polynomials B_{n,k}(x_1, ..., x_{n-k+1}) for all n, k <= order.
/// `x[i]` holds x_i (x[0] unused). Returns table[n][k].
inline std::vector<std::vector<double>> partial_bell_table(int order, std::span<const double> x) {
    std::vector<std::vector<double>> b(order + 1, std::vector<double>(order + 1, 0.0));
    b[0][0] = 1.0;
    std::vector<std::vector<double>> binom(order + 1, std::vector<double>(order + 1, 0.0));
    for (int n = 0; n <= order; ++n) {
        binom[n][0] = 1.0;
        for (int k = 1; k <= n; ++k) binom[n][k] = binom[n - 1][k - 1] + (k <= n - 1 ? binom[n - 1][k] : 0.0);
    }
    for (int n = 1; n <= order; ++n)
        for (int k = 1; k <= n; ++k) {
            double s = 0.0;
            for (int i = 1; i <= n - k + 1; ++i) s += binom[n - 1][i - 1] * x[i] * b[n - i][k - 1];
            b[n][k] = s;
        }
    return b;
}

struct NewtonSettings {
    double tolerance = 1e-12;
    int max_iterations = 200;
};

/**
 * Standard bump zeta(x) = exp(-1/(1-x^2)) on (-1,1), normalised to unit mass
 * under a fixed 32-node Gauss-Legendre rule, and its scaled version
 * zeta_beta(x) = zeta(x/beta)/beta.
 */
class Mollifier {
public:
    static constexpr int kNodes = 32;

    explicit Mollifier(double beta) : beta_(beta) {
        if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("Mollifier: beta must lie in (0,1]");
        using Rule = boost::math::quadrature::gauss<double, kNodes>;
        const auto& abscissa = Rule::abscissa();
        const auto& weights = Rule::weights();
        int pos = 0;
        for (std::size_t i = 0; i < abscissa.size(); ++i) {
            nodes_[pos] = -abscissa[i];
            gl_weights_[pos++] = weights[i];
            nodes_[pos] = abscissa[i];
            gl_weights_[pos++] = weights[i];
        }
        double mass = 0.0;
        for (int i = 0; i < kNodes; ++i) mass += gl_weights_[i] * bump(nodes_[i]);
        norm_ = 1.0 / mass;
        for (int i = 0; i < kNodes; ++i) weights_[i] = gl_weights_[i] * bump(nodes_[i]) * norm_;
    }

    [[nodiscard]] double beta() const { return beta_; }

    /// Unit-interval nodes x_i; the convolution samples at y - beta x_i.
    [[nodiscard]] std::span<const double> nodes() const { return nodes_; }
    /// Weights w_i zeta(x_i), summing to one.
    [[nodiscard]] std::span<const double> weights() const { return weights_; }

    /// zeta^{(order)}(x) for order 0..2 on the unit scale.
    [[nodiscard]] double shape_derivative(int order, double x) const {
        if (std::abs(x) >= 1.0) return 0.0;
        const double r = 1.0 - x * x;
        const double z = bump(x) * norm_;
        const double s1 = -2.0 * x / (r * r);
        switch (order) {
            case 0: return z;
            case 1: return z * s1;
            case 2: {
                const double s2 = -2.0 / (r * r) - 8.0 * x * x / (r * r * r);
                return z * (s1 * s1 + s2);
            }
            default: throw std::domain_error("Mollifier: shape derivatives implemented up to order 2");
        }
    }

    /// zeta_beta(z)
    [[nodiscard]] double operator()(double z) const { return shape_derivative(0, z / beta_) / beta_; }

    /// Raw Gauss-Legendre weights, for integrating other integrands.
    [[nodiscard]] std::span<const double> rule_weights() const { return gl_weights_; }

private:
    static double bump(double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }

    double beta_;
    double norm_ = 1.0;
    std::array<double, kNodes> nodes_{};
    std::array<double, kNodes> gl_weights_{};
    std::array<double, kNodes> weights_{};
};

/// Yosida (lambda) and optionally mollified (lambda, beta) regularisation of a drift.
class RegularizedDrift {
public:
    RegularizedDrift(DriftFunction base, double lambda, std::optional<double> beta = std::nullopt,
                     NewtonSettings newton = {})
        : base_(std::move(base)), lambda_(lambda), newton_(newton) {
        if (!(lambda > 0.0)) throw std::invalid_argument("RegularizedDrift: lambda must be > 0");
        if (newton.tolerance <= 0.0 || newton.max_iterations < 1)
            throw std::invalid_argument("RegularizedDrift: invalid Newton settings");
        if (beta) mollifier_.emplace(*beta);
    }

    [[nodiscard]] const DriftFunction& base() const { return base_; }
    [[nodiscard]] double lambda() const { return lambda_; }
    [[nodiscard]] std::optional<double> beta() const {
        return mollifier_ ? std::optional<double>(mollifier_->beta()) : std::nullopt;
    }
    [[nodiscard]] const NewtonSettings& newton() const { return newton_; }

    /// J_lambda(y): the root of x + lambda f(x) = y.
    [[nodiscard]] double resolvent(double y) const {
        auto h = [&](double x) { return x + lambda_ * base_.value(x) - y; };
        const double h_at_y = h(y);
        if (h_at_y == 0.0) return y;
        // h is nondecreasing, so expanding away from y brackets the root.
        double lo = y, hi = y;
        double width = std::max(1.0, std::abs(y));
        if (h_at_y > 0.0) {
            lo = y - width;
            for (int i = 0; h(lo) > 0.0; ++i) {
                if (i > 200) throw NumericalError("resolvent: failed to bracket root");
                width *= 2.0;
                lo = y - width;
            }
        } else {
            hi = y + width;
            for (int i = 0; h(hi) < 0.0; ++i) {
                if (i > 200) throw NumericalError("resolvent: failed to bracket root");
                width *= 2.0;
                hi = y + width;
            }
        }

        double x = y / (1.0 + lambda_ * std::max(0.0, base_.derivative(1, y)));
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        double residual = h(x);
        for (int it = 0; it < newton_.max_iterations; ++it) {
            if (residual == 0.0) return x;
            if (residual > 0.0) hi = x; else lo = x;
            const double slope = 1.0 + lambda_ * base_.derivative(1, x);
            double next = x - residual / slope;
            if (!(next > lo && next < hi) || slope <= 0.0) next = 0.5 * (lo + hi);
            const double step = std::abs(next - x);
            x = next;
            residual = h(x);
            if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)) ||
                hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
                break;
            }
        }
        if (!(std::abs(residual) <= newton_.tolerance * std::max(1.0, std::abs(y))))
            throw NumericalError("resolvent: Newton did not converge, |residual| = " + std::to_string(std::abs(residual)));
        return x;
    }

    /// f_lambda(y) = (y - J_lambda(y)) / lambda.
    [[nodiscard]] double yosida(double y) const { return (y - resolvent(y)) / lambda_; }

    /// f'_lambda(y) = f'(J)/(1 + lambda f'(J)).
    [[nodiscard]] double yosida_d1(double y) const {
        const double fp = base_.derivative(1, resolvent(y));
        return fp / (1.0 + lambda_ * fp);
    }

    [[nodiscard]] double yosida_dn(int n, double y) const { return yosida_derivatives(n, y)[n]; }

    /// f_lambda^{(j)}(y) for j = 0..n, sharing one resolvent solve.
    [[nodiscard]] std::vector<double> yosida_derivatives(int n, double y) const {
        if (n < 0) throw std::domain_error("yosida_derivatives: negative order");
        if (n > base_.smoothness()) throw std::domain_error("yosida_derivatives: order exceeds drift smoothness");
        const double j = resolvent(y);
        std::vector<double> out(n + 1, 0.0);
        out[0] = (y - j) / lambda_;
        if (n == 0) return out;
        std::vector<double> fk(n + 1);
        for (int k = 1; k <= n; ++k) fk[k] = base_.derivative(k, j);
        const double denom = 1.0 + lambda_ * fk[1];
        out[1] = fk[1] / denom;
        std::vector<double> jd(n + 1, 0.0);  // J^{(i)} at y
        jd[1] = 1.0 / denom;
        for (int order = 2; order <= n; ++order) {
            const auto bell = partial_bell_table(order, jd);
            double acc = 0.0;
            for (int k = 2; k <= order; ++k) acc += fk[k] * bell[order][k];
            out[order] = acc / denom;
            jd[order] = -lambda_ * out[order];
        }
        return out;
    }

    /// (f_lambda * zeta_beta)^{(n)}(y), computed as f_lambda^{(n)} * zeta_beta.
    [[nodiscard]] double mollified(int n, double y) const {
        const Mollifier& m = require_mollifier();
        const auto nodes = m.nodes();
        const auto w = m.weights();
        double acc = 0.0;
        for (int i = 0; i < Mollifier::kNodes; ++i) {
            const double arg = y - m.beta() * nodes[i];
            acc += w[i] * (n == 0 ? yosida(arg) : yosida_derivatives(n, arg)[n]);
        }
        return acc;
    }

    /// Orders 0..n of the mollified drift in one sweep.
    [[nodiscard]] std::vector<double> mollified_derivatives(int n, double y) const {
        const Mollifier& m = require_mollifier();
        const auto nodes = m.nodes();
        const auto w = m.weights();
        std::vector<double> acc(n + 1, 0.0);
        for (int i = 0; i < Mollifier::kNodes; ++i) {
            const auto d = yosida_derivatives(n, y - m.beta() * nodes[i]);
            for (int j = 0; j <= n; ++j) acc[j] += w[i] * d[j];
        }
        return acc;
    }

    /**
     * The same derivative by f'_lambda * zeta_beta^{(n-1)}, for 1 <= n <= 3.
     * zeta' and zeta'' are steep near the ends of the support, so this route
     * uses a composite rule with `panels` copies of the 32-node rule.
     */
    [[nodiscard]] double mollified_via_kernel_derivative(int n, double y, int panels = 16) const {
        if (n < 1 || n > 3) throw std::domain_error("mollified_via_kernel_derivative: order must be 1..3");
        if (panels < 1) throw std::invalid_argument("mollified_via_kernel_derivative: panels must be >= 1");
        const Mollifier& m = require_mollifier();
        const auto nodes = m.nodes();
        const auto w = m.rule_weights();
        const double half = 1.0 / panels;
        double acc = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = -1.0 + (2 * p + 1) * half;
            for (int i = 0; i < Mollifier::kNodes; ++i) {
                const double x = mid + half * nodes[i];
                acc += half * w[i] * m.shape_derivative(n - 1, x) * yosida_d1(y - m.beta() * x);
            }
        }
        return acc * std::pow(m.beta(), 1 - n);
    }

private:
    const Mollifier& require_mollifier() const {
        if (!mollifier_) throw std::domain_error("mollified drift requested but beta is not set");
        return *mollifier_;
    }

    DriftFunction base_;
    double lambda_;
    NewtonSettings newton_;
    std::optional<Mollifier> mollifier_;
};

/// sup over the grid of |g(x)| / (1 + |x|^q).
template <class Fn>
double growth_envelope(Fn&& g, std::span<const double> grid, double q) {
    double sup = 0.0;
    for (double x : grid) sup = std::max(sup, std::abs(g(x)) / (1.0 + std::pow(std::abs(x), q)));
    return sup;
}

/**
 * Least-squares slope of log max(|g(y)|, |g(-y)|) against log y on a
 * log-spaced grid of [lo, hi]. Used to record an empirical growth exponent
 * where only its existence is known.
 */
template <class Fn>
double fit_growth_exponent(Fn&& g, double lo = 10.0, double hi = 1000.0, int points = 41) {
    if (!(lo > 0.0 && hi > lo) || points < 2) throw std::invalid_argument("fit_growth_exponent: bad range");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < points; ++i) {
        const double y = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
        const double v = std::max(std::abs(g(y)), std::abs(g(-y)));
        if (!(v > 0.0)) throw std::domain_error("fit_growth_exponent: function vanishes on the fit range");
        const double a = std::log(y), b = std::log(v);
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (points * sxy - sx * sy) / (points * sxx - sx * sx);
}

/// Which of f, f_lambda, f_{lambda beta} drives an equation.
enum class DriftVariant { exact, yosida, mollified };

inline std::string to_string(DriftVariant v) {
    switch (v) {
        case DriftVariant::exact: return "exact";
        case DriftVariant::yosida: return "yosida";
        case DriftVariant::mollified: return "mollified";
    }
    return "?";
}

/// Uniform evaluation interface over the three variants.
class DriftEvaluator {
public:
    explicit DriftEvaluator(DriftFunction f) : base_(std::move(f)), variant_(DriftVariant::exact) {}
    explicit DriftEvaluator(RegularizedDrift rd)
        : base_(rd.base()), variant_(rd.beta() ? DriftVariant::mollified : DriftVariant::yosida), reg_(std::move(rd)) {}

    [[nodiscard]] DriftVariant variant() const { return variant_; }
    [[nodiscard]] const DriftFunction& base() const { return base_; }
    [[nodiscard]] const std::optional<RegularizedDrift>& regularized() const { return reg_; }

    /// True when the drift contributes nothing (skips collocation entirely).
    [[nodiscard]] bool vanishes() const { return base_.is_zero(); }

    [[nodiscard]] int smoothness() const { return base_.smoothness(); }

    [[nodiscard]] double value(double y) const {
        switch (variant_) {
            case DriftVariant::exact: return base_.value(y);
            case DriftVariant::yosida: return reg_->yosida(y);
            case DriftVariant::mollified: return reg_->mollified(0, y);
        }
        return 0.0;
    }

    /// Orders 0..n of the active variant at y.
    [[nodiscard]] std::vector<double> derivatives(int n, double y) const {
        if (n > smoothness()) throw std::domain_error("drift derivative order exceeds smoothness");
        switch (variant_) {
            case DriftVariant::exact: {
                std::vector<double> out(n + 1);
                for (int j = 0; j <= n; ++j) out[j] = base_.derivative(j, y);
                return out;
            }
            case DriftVariant::yosida: return reg_->yosida_derivatives(n, y);
            case DriftVariant::mollified: return reg_->mollified_derivatives(n, y);
        }
        return {};
    }

    [[nodiscard]] double derivative(int n, double y) const { return derivatives(n, y)[n]; }

private:
    DriftFunction base_;
    DriftVariant variant_;
    std::optional<RegularizedDrift> reg_;
};

}  // namespace sheq
