/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "cpon/alamouti.hpp"
#include "cpon/common.hpp"
#include "cpon/constellation.hpp"
#include "cpon/pilots.hpp"
#include "cpon/plan.hpp"
#include "cpon/rng.hpp"

namespace cpon {

/* Fixed generator states shared by transmitter and receiver. */
inline constexpr std::uint32_t kPnState = 0x4D3C;
inline constexpr std::uint32_t kPilotState = 0x2B67;

/* Maximal-length 15-bit LFSR (x^15 + x^14 + 1). */
inline std::vector<std::uint8_t> prbs_bits(std::size_t n, std::uint32_t state) {
    state &= 0x7FFFu;
    if (state == 0) state = 1;
    std::vector<std::uint8_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t b = ((state >> 14) ^ (state >> 13)) & 1u;
        state = ((state << 1) | b) & 0x7FFFu;
        out[i] = static_cast<std::uint8_t>(b);
    }
    return out;
}

/* +/-1 sequence; the product of two copies is all ones, which the frame
 * sync correlator relies on. */
inline std::vector<double> pn_sequence(std::size_t n, std::uint32_t state = kPnState) {
    const auto bits = prbs_bits(n, state);
    std::vector<double> pn(n);
    for (std::size_t i = 0; i < n; ++i) pn[i] = bits[i] ? -1.0 : 1.0;
    return pn;
}

/* Constant-amplitude zero-autocorrelation sequence (Zadoff-Chu). */
inline std::vector<cplx> zadoff_chu(std::size_t n, std::size_t root) {
    if (n == 0 || root == 0 || std::gcd(n, root) != 1)
        throw config_error("CAZAC root must be coprime to the length");
    std::vector<cplx> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double num = (n % 2 == 0) ? double(k) * double(k)
                                        : double(k) * double(k + 1);
        z[k] = std::polar(1.0, -pi * double(root) * num / double(n));
    }
    return z;
}

/* Period-4 pattern a,a,-a,-a: two spectral lines at +/- baud/4 and nothing
 * else.  Used on the in-phase lane of the dual-lane preamble. */
inline std::vector<cplx> tone_pattern_quad(std::size_t n) {
    const cplx a = std::polar(1.0, pi / 4.0);
    static constexpr double sign[4] = {1.0, 1.0, -1.0, -1.0};
    std::vector<cplx> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = sign[i % 4] * a;
    return t;
}

/* Period-4 rotating pattern j^n: a single line at +baud/4, which a
 * real-valued modulator turns into the symmetric +/- f0 pair. */
inline std::vector<cplx> tone_pattern_rotating(std::size_t n) {
    static const cplx ladder[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    std::vector<cplx> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = ladder[i % 4];
    return t;
}

/* [A B] repeated, where B = pn(*)A elementwise.  The receiver only needs
 * pn: the conjugate product of adjacent blocks cancels A entirely. */
inline std::vector<cplx> sync_section(std::size_t L, std::size_t repeats,
                                      std::uint32_t prbs_state) {
    const auto bits = prbs_bits(2 * L, prbs_state);
    const auto A = map_bits(bits, ModFormat::qpsk());
    const auto pn = pn_sequence(L);
    std::vector<cplx> out;
    out.reserve(2 * L * repeats);
    for (std::size_t r = 0; r < repeats; ++r) {
        out.insert(out.end(), A.begin(), A.end());
        for (std::size_t i = 0; i < L; ++i) out.push_back(pn[i] * A[i]);
    }
    return out;
}

/* Known pilot symbols, regenerated identically at both ends. */
inline std::vector<cplx> pilot_sequence(std::size_t n) {
    return map_bits(prbs_bits(2 * n, kPilotState), ModFormat::qpsk());
}

/* Section lengths of one frame, in symbol slots. */
struct FrameLayout {
    std::size_t tone_len = 64;
    std::size_t sync_unit_len = 10;  // L
    std::size_t sync_repeats = 3;    // [A B] pairs
    std::size_t cazac_len = 64;
    std::size_t cazac_root = 29;
    std::size_t pilot_period = 32;   // payload symbols per pilot
    std::size_t payload_len = 4096;  // information symbols per frame
    std::size_t guard_len = 64;      // zero slots bracketing the frame

    void check() const {
        if (tone_len == 0 || tone_len % 4 != 0)
            throw config_error("tone section must be a whole number of periods");
        if (sync_unit_len == 0 || sync_repeats < 2)
            throw config_error("sync section needs repeated blocks");
        if (cazac_len == 0 || cazac_len % 2 != 0)
            throw config_error("training section must pair up");
        if (cazac_root == 0 || std::gcd(cazac_len, cazac_root) != 1)
            throw config_error("CAZAC root must be coprime to the length");
        if (pilot_period == 0) throw config_error("pilot period must be positive");
    }
    std::size_t sync_len() const { return 2 * sync_unit_len * sync_repeats; }
    std::size_t preamble_len() const { return tone_len + sync_len() + cazac_len; }
    std::size_t laced_len(std::size_t n_payload) const {
        const std::size_t laced =
            n_payload + (n_payload + pilot_period - 1) / pilot_period;
        return laced;
    }
};

/* Slot offsets of each section within an assembled symbol stream. */
struct SectionMap {
    std::size_t tone_begin = 0;
    std::size_t sync_begin = 0;
    std::size_t cazac_begin = 0;
    std::size_t payload_begin = 0;
    std::size_t total = 0;
};

struct StreamTruth {
    std::size_t subcarrier_index = 0;
    ModFormat format;
    std::vector<std::uint8_t> bits;       // information bit labels
    std::vector<cplx> info_symbols;       // before pilots / space-time code
};

namespace detail {

/* Payload generation: uniform formats map fresh random bits, shaped
 * formats draw from the prior.  Either way the realized labels land in
 * the truth record. */
inline StreamTruth make_payload(std::size_t n_symbols, const ModFormat& fmt,
                                Rng& rng) {
    StreamTruth t;
    t.format = fmt;
    if (fmt.kind == ModKind::pcs_qam16) {
        auto s = draw_symbols(n_symbols, fmt, rng);
        t.bits = std::move(s.bits);
        t.info_symbols = std::move(s.symbols);
    } else {
        std::vector<std::uint8_t> bits(n_symbols * fmt.bits_per_symbol());
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng.below(2));
        t.info_symbols = map_bits(bits, fmt);
        t.bits = std::move(bits);
    }
    return t;
}

}  // namespace detail

struct LaneSymbols {
    std::vector<cplx> x, y;  // y unused for single-lane directions
};

/* Assemble one dual-lane subcarrier frame:
 *   [tone | sync | training | pilot-laced payload]
 * The tone and sync sections go out raw on both lanes (sync lanes carry
 * independent data but share the pn mask, so any fixed lane mix keeps the
 * B = pn(*)A structure).  Training and payload are space-time encoded. */
inline LaneSymbols assemble_dual_lane(const StreamTruth& payload,
                                      const FrameLayout& layout,
                                      SectionMap& map, std::uint64_t seed) {
    layout.check();
    LaneSymbols out;
    out.x.assign(layout.guard_len, cplx(0.0, 0.0));
    out.y.assign(layout.guard_len, cplx(0.0, 0.0));
    map.tone_begin = out.x.size();
    const auto tone = tone_pattern_quad(layout.tone_len);
    out.x.insert(out.x.end(), tone.begin(), tone.end());
    out.y.insert(out.y.end(), layout.tone_len, cplx(0.0, 0.0));

    map.sync_begin = out.x.size();
    const auto sx = sync_section(layout.sync_unit_len, layout.sync_repeats,
                                 static_cast<std::uint32_t>(derive_seed(seed, {1})));
    const auto sy = sync_section(layout.sync_unit_len, layout.sync_repeats,
                                 static_cast<std::uint32_t>(derive_seed(seed, {2})));
    out.x.insert(out.x.end(), sx.begin(), sx.end());
    out.y.insert(out.y.end(), sy.begin(), sy.end());

    map.cazac_begin = out.x.size();
    const auto zc = zadoff_chu(layout.cazac_len, layout.cazac_root);
    const auto zc_enc = alamouti_encode(zc);
    out.x.insert(out.x.end(), zc_enc.x.begin(), zc_enc.x.end());
    out.y.insert(out.y.end(), zc_enc.y.begin(), zc_enc.y.end());

    map.payload_begin = out.x.size();
    const std::size_t n_pilots =
        (payload.info_symbols.size() + layout.pilot_period - 1) / layout.pilot_period;
    auto laced = insert_pilots(payload.info_symbols, layout.pilot_period,
                               pilot_sequence(n_pilots));
    if (laced.size() % 2 != 0) laced.push_back(pilot_sequence(1)[0]);
    const auto enc = alamouti_encode(laced);
    out.x.insert(out.x.end(), enc.x.begin(), enc.x.end());
    out.y.insert(out.y.end(), enc.y.begin(), enc.y.end());
    out.x.insert(out.x.end(), layout.guard_len, cplx(0.0, 0.0));
    out.y.insert(out.y.end(), layout.guard_len, cplx(0.0, 0.0));
    map.total = out.x.size();
    return out;
}

/* Single-lane variant for the real-valued direction; same section order,
 * no space-time coding, zero guard slots on both ends (transmitter off). */
inline LaneSymbols assemble_single_lane(const StreamTruth& payload,
                                        const FrameLayout& layout,
                                        SectionMap& map, std::uint64_t seed) {
    layout.check();
    LaneSymbols out;
    out.x.assign(layout.guard_len, cplx(0.0, 0.0));
    map.tone_begin = out.x.size();
    const auto tone = tone_pattern_rotating(layout.tone_len);
    out.x.insert(out.x.end(), tone.begin(), tone.end());

    map.sync_begin = out.x.size();
    const auto s = sync_section(layout.sync_unit_len, layout.sync_repeats,
                                static_cast<std::uint32_t>(derive_seed(seed, {1})));
    out.x.insert(out.x.end(), s.begin(), s.end());

    map.cazac_begin = out.x.size();
    const auto zc = zadoff_chu(layout.cazac_len, layout.cazac_root);
    out.x.insert(out.x.end(), zc.begin(), zc.end());

    map.payload_begin = out.x.size();
    const std::size_t n_pilots =
        (payload.info_symbols.size() + layout.pilot_period - 1) / layout.pilot_period;
    const auto laced = insert_pilots(payload.info_symbols, layout.pilot_period,
                                     pilot_sequence(n_pilots));
    out.x.insert(out.x.end(), laced.begin(), laced.end());
    out.x.insert(out.x.end(), layout.guard_len, cplx(0.0, 0.0));
    map.total = out.x.size();
    return out;
}

}  // namespace cpon
