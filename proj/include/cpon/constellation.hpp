/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cpon/common.hpp"
#include "cpon/rng.hpp"

namespace cpon {

enum class ModKind { qpsk, qam16, pcs_qam16 };

/* Modulation format. entropy_bits is the information rate per symbol;
 * the label width (bits carried per symbol on the wire) is 2 or 4. */
struct ModFormat {
    ModKind kind = ModKind::qpsk;
    double entropy_bits = 2.0;

    static ModFormat qpsk() { return {ModKind::qpsk, 2.0}; }
    static ModFormat qam16() { return {ModKind::qam16, 4.0}; }
    static ModFormat pcs(double entropy) { return {ModKind::pcs_qam16, entropy}; }

    int bits_per_symbol() const { return kind == ModKind::qpsk ? 2 : 4; }

    void check() const {
        if (kind == ModKind::qpsk && entropy_bits != 2.0)
            throw config_error("QPSK entropy must be 2.0");
        if (kind == ModKind::qam16 && entropy_bits != 4.0)
            throw config_error("16QAM entropy must be 4.0");
        if (kind == ModKind::pcs_qam16 &&
            !(entropy_bits > 2.0 && entropy_bits < 4.0))
            throw config_error("shaped 16QAM entropy must lie in (2, 4)");
    }
};

namespace detail {

/* Gray code over 2 bits -> amplitude level index {0,1,2,3} -> {-3,-1,+1,+3}.
 * Adjacent levels differ in one bit. */
inline int gray2_to_level(int g) {
    static constexpr int lut[4] = {0, 1, 3, 2};  // 00,01,11,10 -> -3,-1,+1,+3
    return lut[g] * 2 - 3;
}
inline int level_to_gray2(int level_idx) {
    static constexpr int lut[4] = {0, 1, 3, 2};
    return lut[level_idx];
}

}  // namespace detail

/* Unnormalized 16QAM grid indexed by the 4-bit label (b3 b2 b1 b0):
 * (b3 b2) select the I level, (b1 b0) the Q level, both Gray coded. */
inline std::array<cplx, 16> qam16_grid() {
    std::array<cplx, 16> pts;
    for (int lab = 0; lab < 16; ++lab) {
        const int gi = (lab >> 2) & 3;
        const int gq = lab & 3;
        pts[lab] = cplx(detail::gray2_to_level(gi), detail::gray2_to_level(gq));
    }
    return pts;
}

/* Maxwell-Boltzmann probabilities over the 16QAM grid, p ~ exp(-nu*|c|^2),
 * with nu bisected so the entropy hits fmt.entropy_bits.  Uniform formats
 * return equal weights. */
inline std::array<double, 16> symbol_priors(const ModFormat& fmt) {
    fmt.check();
    std::array<double, 16> p;
    if (fmt.kind != ModKind::pcs_qam16) {
        p.fill(1.0 / 16.0);
        return p;
    }
    const auto grid = qam16_grid();
    auto fill = [&](double nu) {
        double sum = 0.0;
        for (int i = 0; i < 16; ++i) {
            p[i] = std::exp(-nu * std::norm(grid[i]));
            sum += p[i];
        }
        for (auto& v : p) v /= sum;
    };
    auto entropy = [&](double nu) {
        fill(nu);
        double h = 0.0;
        for (double v : p)
            if (v > 0.0) h -= v * std::log2(v);
        return h;
    };
    // Entropy falls monotonically from 4 (nu=0) towards 2 (nu->inf).
    double lo = 0.0, hi = 1.0;
    while (entropy(hi) > fmt.entropy_bits) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (entropy(mid) > fmt.entropy_bits)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15) break;
    }
    entropy(0.5 * (lo + hi));
    return p;
}

/* Constellation points indexed by label, scaled to unit average energy
 * under the format's symbol distribution. */
inline std::array<cplx, 16> constellation_points(const ModFormat& fmt) {
    auto pts = qam16_grid();
    if (fmt.kind == ModKind::qpsk) {
        // QPSK reuses the inner-corner signs: labels 0..3 -> (+/-1 +/-1 j)/sqrt(2).
        std::array<cplx, 16> q{};
        const double s = 1.0 / std::sqrt(2.0);
        q[0] = {s, s};
        q[1] = {s, -s};
        q[2] = {-s, s};
        q[3] = {-s, -s};
        return q;
    }
    const auto pr = symbol_priors(fmt);
    double e = 0.0;
    for (int i = 0; i < 16; ++i) e += pr[i] * std::norm(pts[i]);
    const double scale = 1.0 / std::sqrt(e);
    for (auto& c : pts) c *= scale;
    return pts;
}

/* Gray-map a bit stream (one uint8 per bit, MSB of each label first) onto
 * unit-energy symbols.  Uniform formats only; shaped symbols are drawn. */
inline std::vector<cplx> map_bits(const std::vector<std::uint8_t>& bits,
                                  const ModFormat& fmt) {
    fmt.check();
    if (fmt.kind == ModKind::pcs_qam16)
        throw config_error("shaped symbols are drawn from the prior, not mapped from bits");
    const int bps = fmt.bits_per_symbol();
    if (bits.size() % static_cast<std::size_t>(bps) != 0)
        throw shape_error("bit count not divisible by bits per symbol");
    const auto pts = constellation_points(fmt);
    std::vector<cplx> out(bits.size() / bps);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int lab = 0;
        for (int b = 0; b < bps; ++b) lab = (lab << 1) | (bits[i * bps + b] & 1);
        out[i] = pts[lab];
    }
    return out;
}

struct ShapedStream {
    std::vector<std::uint8_t> bits;  // Gray labels of the drawn symbols
    std::vector<cplx> symbols;
};

/* Draw n i.i.d. shaped symbols from the Maxwell-Boltzmann prior and record
 * the realized labels.  Also accepts uniform formats (equal priors). */
inline ShapedStream draw_symbols(std::size_t n, const ModFormat& fmt, Rng& rng) {
    fmt.check();
    const auto pr = symbol_priors(fmt);
    const auto pts = constellation_points(fmt);
    const int n_pts = fmt.kind == ModKind::qpsk ? 4 : 16;
    const int bps = fmt.bits_per_symbol();
    std::array<double, 16> cdf{};
    double acc = 0.0;
    if (fmt.kind == ModKind::qpsk) {
        for (int i = 0; i < 4; ++i) cdf[i] = acc += 0.25;
    } else {
        for (int i = 0; i < 16; ++i) cdf[i] = acc += pr[i];
    }
    cdf[n_pts - 1] = 1.0;
    ShapedStream out;
    out.bits.reserve(n * bps);
    out.symbols.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        int lab = 0;
        while (lab < n_pts - 1 && u >= cdf[lab]) ++lab;
        out.symbols.push_back(pts[lab]);
        for (int b = bps - 1; b >= 0; --b)
            out.bits.push_back(static_cast<std::uint8_t>((lab >> b) & 1));
    }
    return out;
}

struct DemapResult {
    std::vector<std::uint8_t> bits;
    std::vector<cplx> decisions;
};

/* Hard decisions plus Gray-inverse bits.  noise_var > 0 turns on MAP
 * weighting with the shaped priors; at noise_var = 0 the decision is pure
 * minimum distance, so exact constellation points always decode to
 * themselves. */
inline DemapResult demap_decide(const std::vector<cplx>& symbols,
                                const ModFormat& fmt, double noise_var = 0.0) {
    fmt.check();
    const auto pts = constellation_points(fmt);
    const auto pr = symbol_priors(fmt);
    const int n_pts = fmt.kind == ModKind::qpsk ? 4 : 16;
    const int bps = fmt.bits_per_symbol();
    const bool map_mode = noise_var > 0.0 && fmt.kind == ModKind::pcs_qam16;
    std::array<double, 16> bias{};  // -sigma^2 * ln p(c), subtracted from the metric
    if (map_mode)
        for (int i = 0; i < n_pts; ++i)
            bias[i] = pr[i] > 0.0 ? -noise_var * std::log(pr[i]) : 1e300;
    DemapResult out;
    out.bits.reserve(symbols.size() * bps);
    out.decisions.reserve(symbols.size());
    for (const cplx& y : symbols) {
        int best = 0;
        double best_m = 1e300;
        for (int i = 0; i < n_pts; ++i) {
            double m = std::norm(y - pts[i]);
            if (map_mode) m += bias[i];
            if (m < best_m) {
                best_m = m;
                best = i;
            }
        }
        out.decisions.push_back(pts[best]);
        for (int b = bps - 1; b >= 0; --b)
            out.bits.push_back(static_cast<std::uint8_t>((best >> b) & 1));
    }
    return out;
}

/* Nearest constellation point only, for decision-directed loops. */
inline cplx nearest_point(cplx y, const std::array<cplx, 16>& pts, int n_pts) {
    int best = 0;
    double best_m = 1e300;
    for (int i = 0; i < n_pts; ++i) {
        const double m = std::norm(y - pts[i]);
        if (m < best_m) {
            best_m = m;
            best = i;
        }
    }
    return pts[best];
}

}  // namespace cpon
