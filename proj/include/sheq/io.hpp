#pragma once

/**
 * @file io.hpp
 * @brief Trajectory exports and initial-data helpers.
 *
 * Text outputs print doubles with 17 significant digits so reruns are
 * byte-identical and values round-trip exactly. The binary cache stores the
 * raw little-endian doubles behind an 8-byte magic and a version word.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sheq/solver.hpp"
#include "sheq/spectral.hpp"

namespace sheq {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// time, then every coefficient in storage order.
inline void write_trajectory_table(std::ostream& os, const Trajectory& traj) {
    os << "# sheq-trajectory v1 dim " << traj.basis.dim() << " K " << traj.basis.modes_per_axis() << " steps "
       << traj.steps() << " dt " << format_double(traj.dt) << '\n';
    os << "time";
    for (std::size_t l = 0; l < traj.basis.size(); ++l) {
        const auto k = traj.basis.index(l);
        os << " c";
        for (int i = 0; i < k.dim(); ++i) os << (i ? "_" : "") << k[i];
    }
    os << '\n';
    for (int n = 0; n <= traj.steps(); ++n) {
        os << format_double(traj.time(n));
        for (double c : traj.states[n]) os << ' ' << format_double(c);
        os << '\n';
    }
}

/// time, then u(t, x_p) for every probe point.
inline void write_probe_series(std::ostream& os, const Trajectory& traj, std::span<const Point> points) {
    os << "time";
    for (std::size_t p = 0; p < points.size(); ++p) os << " u_" << p;
    os << '\n';
    std::vector<std::vector<double>> e;
    for (const auto& x : points) e.push_back(traj.basis.eval_all(x));
    for (int n = 0; n <= traj.steps(); ++n) {
        os << format_double(traj.time(n));
        for (const auto& ex : e) {
            double v = 0.0;
            for (std::size_t k = 0; k < ex.size(); ++k) v += ex[k] * traj.states[n][k];
            os << ' ' << format_double(v);
        }
        os << '\n';
    }
}

inline constexpr std::array<char, 8> kTrajectoryMagic{'S', 'H', 'E', 'Q', 'T', 'R', 'J', '\0'};
inline constexpr std::uint32_t kTrajectoryVersion = 1;

namespace detail {
template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw std::runtime_error("trajectory cache: truncated file");
    return v;
}
}  // namespace detail

inline void write_trajectory_binary(std::ostream& os, const Trajectory& traj) {
    os.write(kTrajectoryMagic.data(), kTrajectoryMagic.size());
    detail::put(os, kTrajectoryVersion);
    detail::put(os, static_cast<std::uint32_t>(traj.basis.dim()));
    detail::put(os, static_cast<std::uint32_t>(traj.basis.modes_per_axis()));
    detail::put(os, static_cast<std::uint32_t>(traj.steps()));
    detail::put(os, traj.dt);
    detail::put(os, traj.eta);
    detail::put(os, static_cast<std::uint32_t>(traj.dealias ? 1 : 0));
    for (double v : traj.variance) detail::put(os, v);
    for (const auto& s : traj.states)
        for (double v : s) detail::put(os, v);
    for (const auto& s : traj.noise)
        for (double v : s) detail::put(os, v);
}

inline Trajectory read_trajectory_binary(std::istream& is) {
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kTrajectoryMagic) throw std::runtime_error("trajectory cache: bad magic");
    const auto version = detail::get<std::uint32_t>(is);
    if (version != kTrajectoryVersion)
        throw std::runtime_error("trajectory cache: unsupported version " + std::to_string(version));
    const auto dim = detail::get<std::uint32_t>(is);
    const auto K = detail::get<std::uint32_t>(is);
    const auto steps = detail::get<std::uint32_t>(is);
    Trajectory t;
    t.basis = SineBasis(static_cast<int>(dim), static_cast<int>(K));
    t.dt = detail::get<double>(is);
    t.eta = detail::get<double>(is);
    t.dealias = detail::get<std::uint32_t>(is) != 0;
    const std::size_t n = t.basis.size();
    t.variance.resize(n);
    for (auto& v : t.variance) v = detail::get<double>(is);
    t.states.assign(steps + 1, std::vector<double>(n));
    for (auto& s : t.states)
        for (auto& v : s) v = detail::get<double>(is);
    t.noise.assign(steps, std::vector<double>(n));
    for (auto& s : t.noise)
        for (auto& v : s) v = detail::get<double>(is);
    return t;
}

// ---------------------------------------------------------------------------
// Initial data, evaluated on the collocation grid and projected
// ---------------------------------------------------------------------------

inline SpectralField initial_zero(const SineBasis& basis) { return SpectralField(basis); }

/// amplitude * prod_i sin(x_i)
inline SpectralField initial_sine(const SineBasis& basis, double amplitude) {
    return project_on_grid(basis, [&](const Point& x) {
        double v = amplitude;
        for (int i = 0; i < x.dim(); ++i) v *= std::sin(x[i]);
        return v;
    });
}

/// A constant, which the truncation represents with a Gibbs boundary layer.
inline SpectralField initial_constant(const SineBasis& basis, double value) {
    return project_on_grid(basis, [&](const Point&) { return value; });
}

/// amplitude * prod_i (x_i (pi - x_i) / (pi/2)^2)^2, peaked at the centre with value `amplitude`.
inline SpectralField initial_bump(const SineBasis& basis, double amplitude) {
    const double h = std::numbers::pi / 2.0;
    return project_on_grid(basis, [&](const Point& x) {
        double v = amplitude;
        for (int i = 0; i < x.dim(); ++i) {
            const double b = x[i] * (std::numbers::pi - x[i]) / (h * h);
            v *= b * b;
        }
        return v;
    });
}

}  // namespace sheq
