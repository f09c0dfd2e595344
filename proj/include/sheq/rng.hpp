#pragma once

// Counter-based random numbers.
//
// Every Gaussian draw is a pure function of (seed, stream, path, step, index),
// so a path can be regenerated in isolation and results never depend on the
// order in which worker threads pick up paths.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace sheq {

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr void mulhilo32(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                                std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace detail

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
inline constexpr PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0 = 0, lo0 = 0, hi1 = 0, lo1 = 0;
        detail::mulhilo32(kM0, ctr[0], hi0, lo0);
        detail::mulhilo32(kM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

/// Stream tags keep unrelated consumers of one master seed apart.
enum class Stream : std::uint64_t {
    path_noise = 1,
    covariance_selftest = 2,
    sampling = 3,
};

/// Gaussian generator addressed by (path, step, index) under a keyed stream.
class CounterGaussian {
public:
    CounterGaussian(std::uint64_t seed, Stream stream) {
        const std::uint64_t k =
            detail::splitmix64(seed ^ detail::splitmix64(static_cast<std::uint64_t>(stream)));
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    }

    /// Fills `out` with independent N(0,1) draws for one (path, step) slot.
    void fill(std::uint64_t path, std::uint32_t step, std::span<double> out) const {
        const std::size_t n = out.size();
        for (std::size_t i = 0; i < n; i += 2) {
            const auto pair = normal_pair(path, step, static_cast<std::uint32_t>(i / 2));
            out[i] = pair[0];
            if (i + 1 < n) out[i + 1] = pair[1];
        }
    }

    [[nodiscard]] double normal(std::uint64_t path, std::uint32_t step, std::uint32_t index) const {
        return normal_pair(path, step, index / 2)[index % 2];
    }

    [[nodiscard]] std::array<double, 2> normal_pair(std::uint64_t path, std::uint32_t step,
                                                    std::uint32_t block) const {
        const PhiloxCounter ctr{block, step, static_cast<std::uint32_t>(path),
                                static_cast<std::uint32_t>(path >> 32)};
        const auto r = philox4x32(ctr, key_);
        const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
        const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
        // (0,1] and [0,1) with 53 bits each.
        const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

private:
    PhiloxKey key_{};
};

}  // namespace sheq
