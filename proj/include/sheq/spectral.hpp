#pragma once

/**
 * @file spectral.hpp
 * @brief Tensor sine basis of the Dirichlet Laplacian on (0,pi)^d.
 *
 * Basis functions are
 *
 *   e_k(x) = (2/pi)^{d/2} sin(k_1 x_1) ... sin(k_d x_d),   -Delta e_k = |k|^2 e_k,
 *
 * truncated to modes 1..K on every axis (K^d modes in total). Coefficients
 * are stored with axis 0 varying fastest.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sheq {

inline constexpr int kMaxDim = 3;

/// Mode index k = (k_1, ..., k_d), every component >= 1.
class MultiIndex {
public:
    MultiIndex() = default;
    MultiIndex(std::initializer_list<int> ks) : dim_(static_cast<int>(ks.size())) {
        if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("MultiIndex: dimension must be 1..3");
        std::copy(ks.begin(), ks.end(), k_.begin());
        validate();
    }
    MultiIndex(int dim, std::array<int, kMaxDim> ks) : k_(ks), dim_(dim) {
        if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("MultiIndex: dimension must be 1..3");
        validate();
    }

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] int operator[](int axis) const { return k_[axis]; }

    /// |k|^2 = k_1^2 + ... + k_d^2
    [[nodiscard]] double norm2() const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += static_cast<double>(k_[i]) * k_[i];
        return s;
    }

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

private:
    void validate() const {
        for (int i = 0; i < dim_; ++i)
            if (k_[i] < 1) throw std::invalid_argument("MultiIndex: components must be >= 1");
    }

    std::array<int, kMaxDim> k_{1, 1, 1};
    int dim_ = 1;
};

/// A point of the open cube (0,pi)^d.
class Point {
public:
    Point() = default;
    Point(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
        if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("Point: dimension must be 1..3");
        std::copy(xs.begin(), xs.end(), x_.begin());
    }
    explicit Point(std::span<const double> xs) : dim_(static_cast<int>(xs.size())) {
        if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("Point: dimension must be 1..3");
        std::copy(xs.begin(), xs.end(), x_.begin());
    }
    /// The centre (pi/2, ..., pi/2).
    static Point centre(int dim) {
        Point p;
        p.dim_ = dim;
        p.x_.fill(std::numbers::pi / 2);
        return p;
    }

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] double operator[](int axis) const { return x_[axis]; }
    [[nodiscard]] std::vector<double> coords() const { return {x_.begin(), x_.begin() + dim_}; }

    [[nodiscard]] bool inside_open_cube() const {
        for (int i = 0; i < dim_; ++i)
            if (!(x_[i] > 0.0 && x_[i] < std::numbers::pi)) return false;
        return true;
    }

    friend bool operator==(const Point&, const Point&) = default;

private:
    std::array<double, kMaxDim> x_{0.0, 0.0, 0.0};
    int dim_ = 1;
};

inline void require_inside(const Point& x) {
    if (!x.inside_open_cube()) throw std::domain_error("point must lie in the open cube (0,pi)^d");
}

/// e_k(x) = (2/pi)^{d/2} prod_i sin(k_i x_i).
inline double eval_basis(const MultiIndex& k, const Point& x) {
    if (k.dim() != x.dim()) throw std::invalid_argument("eval_basis: dimension mismatch");
    require_inside(x);
    double v = std::pow(2.0 / std::numbers::pi, 0.5 * k.dim());
    for (int i = 0; i < k.dim(); ++i) v *= std::sin(k[i] * x[i]);
    return v;
}

inline double laplacian_eigenvalue(const MultiIndex& k) { return k.norm2(); }

/// Truncated tensor sine basis: dimension d, modes 1..K per axis.
class SineBasis {
public:
    SineBasis() : SineBasis(1, 1) {}
    SineBasis(int dim, int modes_per_axis) : dim_(dim), per_axis_(modes_per_axis) {
        if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("SineBasis: dimension must be 1..3");
        if (modes_per_axis < 1) throw std::invalid_argument("SineBasis: K must be >= 1");
        size_ = 1;
        for (int i = 0; i < dim_; ++i) size_ *= static_cast<std::size_t>(per_axis_);
        eigen_.resize(size_);
        for (std::size_t i = 0; i < size_; ++i) eigen_[i] = index(i).norm2();
    }

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] int modes_per_axis() const { return per_axis_; }
    [[nodiscard]] std::size_t size() const { return size_; }

    [[nodiscard]] MultiIndex index(std::size_t linear) const {
        std::array<int, kMaxDim> ks{1, 1, 1};
        for (int i = 0; i < dim_; ++i) {
            ks[i] = static_cast<int>(linear % per_axis_) + 1;
            linear /= per_axis_;
        }
        return MultiIndex(dim_, ks);
    }

    [[nodiscard]] std::size_t linear(const MultiIndex& k) const {
        if (k.dim() != dim_) throw std::invalid_argument("SineBasis::linear: dimension mismatch");
        std::size_t out = 0;
        for (int i = dim_ - 1; i >= 0; --i) {
            if (k[i] > per_axis_) throw std::out_of_range("SineBasis::linear: mode beyond truncation");
            out = out * per_axis_ + static_cast<std::size_t>(k[i] - 1);
        }
        return out;
    }

    /// |k|^2 for the linear index.
    [[nodiscard]] double eigenvalue(std::size_t linear) const { return eigen_[linear]; }
    [[nodiscard]] std::span<const double> eigenvalues() const { return eigen_; }

    /// All e_k(x) in storage order.
    [[nodiscard]] std::vector<double> eval_all(const Point& x) const {
        if (x.dim() != dim_) throw std::invalid_argument("SineBasis::eval_all: dimension mismatch");
        require_inside(x);
        std::array<std::vector<double>, kMaxDim> axis;
        const double scale = std::sqrt(2.0 / std::numbers::pi);
        for (int i = 0; i < dim_; ++i) {
            axis[i].resize(per_axis_);
            for (int k = 1; k <= per_axis_; ++k) axis[i][k - 1] = scale * std::sin(k * x[i]);
        }
        std::vector<double> out(size_);
        for (std::size_t l = 0; l < size_; ++l) {
            std::size_t rem = l;
            double v = 1.0;
            for (int i = 0; i < dim_; ++i) {
                v *= axis[i][rem % per_axis_];
                rem /= per_axis_;
            }
            out[l] = v;
        }
        return out;
    }

    /// Collocation node x_j = j pi / (K+1), j = 1..K.
    [[nodiscard]] double node(int j) const { return j * std::numbers::pi / (per_axis_ + 1); }

    /// Tensor collocation point for a grid index laid out like the coefficients.
    [[nodiscard]] Point grid_point(std::size_t linear) const {
        std::array<double, kMaxDim> xs{};
        for (int i = 0; i < dim_; ++i) {
            xs[i] = node(static_cast<int>(linear % per_axis_) + 1);
            linear /= per_axis_;
        }
        return Point(std::span<const double>(xs.data(), dim_));
    }

    friend bool operator==(const SineBasis& a, const SineBasis& b) {
        return a.dim_ == b.dim_ && a.per_axis_ == b.per_axis_;
    }

private:
    int dim_;
    int per_axis_;
    std::size_t size_ = 1;
    std::vector<double> eigen_;
};

/// Coefficients of a function on a truncated sine basis.
struct SpectralField {
    SineBasis basis;
    std::vector<double> coeffs;

    SpectralField() = default;
    explicit SpectralField(SineBasis b) : basis(std::move(b)), coeffs(basis.size(), 0.0) {}
    SpectralField(SineBasis b, std::vector<double> c) : basis(std::move(b)), coeffs(std::move(c)) {
        if (coeffs.size() != basis.size()) throw std::invalid_argument("SpectralField: length must equal K^d");
    }

    static SpectralField single_mode(const SineBasis& b, const MultiIndex& k, double value = 1.0) {
        SpectralField f(b);
        f.coeffs[b.linear(k)] = value;
        return f;
    }

    [[nodiscard]] bool finite() const {
        return std::all_of(coeffs.begin(), coeffs.end(), [](double v) { return std::isfinite(v); });
    }
};

/// u(x) = sum_k c_k e_k(x).
inline double evaluate(const SpectralField& field, const Point& x) {
    const auto e = field.basis.eval_all(x);
    double s = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) s += field.coeffs[i] * e[i];
    return s;
}

/// S(t) acts diagonally: c_k -> exp(-t|k|^2) c_k.
inline SpectralField apply_semigroup(double t, const SpectralField& field) {
    if (!(t >= 0.0)) throw std::domain_error("apply_semigroup: t must be >= 0");
    SpectralField out = field;
    if (t == 0.0) return out;
    for (std::size_t i = 0; i < out.coeffs.size(); ++i)
        out.coeffs[i] *= std::exp(-t * field.basis.eigenvalue(i));
    return out;
}

/// Truncated heat kernel G_t(x,y) = sum_k exp(-t|k|^2) e_k(x) e_k(y).
inline double heat_kernel(const SineBasis& basis, double t, const Point& x, const Point& y) {
    if (!(t > 0.0)) throw std::domain_error("heat_kernel: t must be > 0");
    const auto ex = basis.eval_all(x);
    const auto ey = basis.eval_all(y);
    double s = 0.0;
    for (std::size_t i = 0; i < ex.size(); ++i) s += std::exp(-t * basis.eigenvalue(i)) * ex[i] * ey[i];
    return s;
}

/// Exact sine coefficients of the indicator 1_O: prod_i sqrt(2/pi) (1 - (-1)^{k_i}) / k_i.
inline SpectralField indicator_coefficients(const SineBasis& basis) {
    SpectralField f(basis);
    const double scale = std::sqrt(2.0 / std::numbers::pi);
    for (std::size_t l = 0; l < basis.size(); ++l) {
        const auto k = basis.index(l);
        double v = 1.0;
        for (int i = 0; i < basis.dim(); ++i) v *= (k[i] % 2 == 1) ? scale * 2.0 / k[i] : 0.0;
        f.coeffs[l] = v;
    }
    return f;
}

/// G_t(x,O) = [S(t) 1_O](x), which is at most 1 for the exact kernel.
inline double kernel_mass(const SineBasis& basis, double t, const Point& x) {
    if (!(t > 0.0)) throw std::domain_error("kernel_mass: t must be > 0");
    return evaluate(apply_semigroup(t, indicator_coefficients(basis)), x);
}

// ---------------------------------------------------------------------------
// Truncation tolerances
// ---------------------------------------------------------------------------

namespace detail {
/// sum_{j >= from} exp(-t j^2)
inline double gaussian_tail_1d(int from, double t) {
    double s = 0.0;
    for (int j = std::max(from, 1);; ++j) {
        const double term = std::exp(-t * static_cast<double>(j) * j);
        s += term;
        if (term < 1e-18 * std::max(s, 1e-300) || term == 0.0) break;
    }
    return s;
}
}  // namespace detail

/**
 * (2/pi)^d * sum over modes with some k_i > cutoff of exp(-t|k|^2).
 *
 * Bounds |G_t - G^cutoff_t| pointwise since |e_k| <= (2/pi)^{d/2}.
 */
inline double kernel_tail_bound(int dim, int cutoff, double t) {
    const double full = detail::gaussian_tail_1d(1, t);
    const double tail = detail::gaussian_tail_1d(cutoff + 1, t);
    const double kept = full - tail;
    // full^d - kept^d factored, so a small tail does not cancel.
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += std::pow(full, i) * std::pow(kept, dim - 1 - i);
    return std::pow(2.0 / std::numbers::pi, dim) * tail * s;
}

/// Tolerance for pointwise statements about the truncated heat kernel itself.
inline double truncation_tolerance(const SineBasis& basis, double t) {
    return kernel_tail_bound(basis.dim(), basis.modes_per_axis(), t);
}

/**
 * Tolerance eps_K(t) for kernels of discrete evolution operators built with
 * pseudo-spectral products: the heat-kernel tail beyond the alias-free half
 * band K/2. Decreases as K grows for fixed t.
 */
inline double evolution_kernel_tolerance(const SineBasis& basis, double t) {
    return kernel_tail_bound(basis.dim(), basis.modes_per_axis() / 2, t);
}

/// Below t_min(K) = 4/K^2 pointwise kernel assertions are not made (Gibbs regime).
inline double kernel_min_time(const SineBasis& basis) {
    const double k = basis.modes_per_axis();
    return 4.0 / (k * k);
}

// ---------------------------------------------------------------------------
// Pseudo-spectral transform pair on the collocation grid
// ---------------------------------------------------------------------------

/**
 * DST-I based transform between coefficients and samples on the tensor grid
 * x_j = j pi/(K+1). Both 1-d matrices are symmetric, and so are their tensor
 * products; `to_grid` and `from_grid` are therefore also their own transposes.
 */
class SineTransform {
public:
    SineTransform() = default;
    explicit SineTransform(const SineBasis& basis) : basis_(basis) {
        const int K = basis.modes_per_axis();
        synth_.resize(static_cast<std::size_t>(K) * K);
        anal_.resize(synth_.size());
        const double s = std::sqrt(2.0 / std::numbers::pi);
        const double a = std::sqrt(2.0 * std::numbers::pi) / (K + 1);
        for (int j = 1; j <= K; ++j)
            for (int k = 1; k <= K; ++k) {
                const double v = std::sin(static_cast<double>(j) * k * std::numbers::pi / (K + 1));
                synth_[(j - 1) * K + (k - 1)] = s * v;
                anal_[(k - 1) * K + (j - 1)] = a * v;
            }
    }

    [[nodiscard]] const SineBasis& basis() const { return basis_; }

    /// Samples u(x_j) of sum_k c_k e_k on the collocation grid.
    void to_grid(std::span<const double> coeffs, std::span<double> grid) const {
        apply(synth_, coeffs, grid);
    }
    /// Inverse of to_grid.
    void from_grid(std::span<const double> grid, std::span<double> coeffs) const {
        apply(anal_, grid, coeffs);
    }

    [[nodiscard]] std::vector<double> to_grid(std::span<const double> coeffs) const {
        std::vector<double> out(basis_.size());
        to_grid(coeffs, out);
        return out;
    }
    [[nodiscard]] std::vector<double> from_grid(std::span<const double> grid) const {
        std::vector<double> out(basis_.size());
        from_grid(grid, out);
        return out;
    }

private:
    // Applies the 1-d matrix along every axis in turn.
    void apply(const std::vector<double>& mat, std::span<const double> in, std::span<double> out) const {
        const std::size_t n = basis_.size();
        if (in.size() != n || out.size() != n) throw std::invalid_argument("SineTransform: size mismatch");
        const std::size_t K = static_cast<std::size_t>(basis_.modes_per_axis());
        std::vector<double> buf(n);
        std::copy(in.begin(), in.end(), out.begin());
        std::size_t stride = 1;
        for (int axis = 0; axis < basis_.dim(); ++axis) {
            std::copy(out.begin(), out.end(), buf.begin());
            const std::size_t block = stride * K;
            for (std::size_t base = 0; base < n; base += block)
                for (std::size_t off = 0; off < stride; ++off) {
                    const std::size_t start = base + off;
                    for (std::size_t r = 0; r < K; ++r) {
                        const double* row = &mat[r * K];
                        double acc = 0.0;
                        for (std::size_t c = 0; c < K; ++c) acc += row[c] * buf[start + c * stride];
                        out[start + r * stride] = acc;
                    }
                }
            stride = block;
        }
    }

    SineBasis basis_;
    std::vector<double> synth_;
    std::vector<double> anal_;
};

/// Evaluates a continuous function on the collocation grid and projects it.
template <class Fn>
SpectralField project_on_grid(const SineBasis& basis, Fn&& fn) {
    const SineTransform tr(basis);
    std::vector<double> samples(basis.size());
    for (std::size_t l = 0; l < basis.size(); ++l) samples[l] = fn(basis.grid_point(l));
    return SpectralField(basis, tr.from_grid(samples));
}

}  // namespace sheq
