#pragma once

/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */

#include <cstdint>
#include <cmath>
#include <initializer_list>

#include "common.hpp"

namespace cpon {

// splitmix64 step. Full 64-bit period, passes practical statistical tests,
// and unlike std::normal_distribution its output stream is identical on
// every platform, which the determinism invariants require.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 1) : state_(seed), have_spare_(false), spare_(0.0) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // Standard normal via Box-Muller; the transcendental path is pinned so
    // the stream is bit-identical across libm-compatible platforms.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double th = 2.0 * pi * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    // Circular complex normal with total variance 1 (0.5 per quadrature).
    cplx cgaussian() {
        double re = gaussian();
        double im = gaussian();
        return cplx(re * 0.7071067811865476, im * 0.7071067811865476);
    }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
    bool have_spare_;
    double spare_;
};

// Hash-derive an independent stream seed from a base seed and a path of
// indices (curve, sweep point, trial, ...). Order-sensitive by design.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = base ^ 0xd6e8feb86659fd93ULL;
    for (std::uint64_t v : path) {
        h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        (void)splitmix64(h);
    }
    return splitmix64(h);
}

} // namespace cpon
