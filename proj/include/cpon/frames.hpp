/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <cstdint>
#include <vector>

#include "cpon/cap.hpp"
#include "cpon/common.hpp"
#include "cpon/dscm.hpp"
#include "cpon/framing.hpp"
#include "cpon/plan.hpp"
#include "cpon/rng.hpp"
#include "cpon/waveform.hpp"

namespace cpon {

inline constexpr double kDownstreamRate = 75e9;   // modulator sample rate
inline constexpr double kUpstreamRate = 37.5e9;

/* Everything needed to score a receiver against this frame without
 * re-deriving the transmitter. */
struct GroundTruth {
    SubcarrierPlan plan;
    FrameLayout layout;
    SectionMap sections;   // slot offsets, identical on every subcarrier
    std::vector<StreamTruth> streams;  // one per active subcarrier
    double sample_rate = 0.0;
    std::size_t samples_per_symbol = 0;
    std::uint64_t seed = 0;
};

struct BuiltFrame {
    Waveform wave;
    GroundTruth truth;
};

namespace detail {

/* Payload for one carrier: explicit bits first (uniform formats only),
 * the rest drawn at random.  Shaped formats ignore explicit bits. */
inline StreamTruth payload_with_bits(std::size_t n_symbols, const ModFormat& fmt,
                                     const std::vector<std::uint8_t>& bits,
                                     Rng& rng) {
    if (fmt.kind == ModKind::pcs_qam16) {
        if (!bits.empty())
            throw config_error("shaped payload is drawn from the prior, not from bits");
        StreamTruth t;
        t.format = fmt;
        auto s = draw_symbols(n_symbols, fmt, rng);
        t.bits = std::move(s.bits);
        t.info_symbols = std::move(s.symbols);
        return t;
    }
    const std::size_t cap = n_symbols * fmt.bits_per_symbol();
    if (bits.size() > cap) throw shape_error("payload bits exceed frame capacity");
    StreamTruth t;
    t.format = fmt;
    t.bits = bits;
    t.bits.resize(cap);
    for (std::size_t i = bits.size(); i < cap; ++i)
        t.bits[i] = static_cast<std::uint8_t>(rng.below(2));
    t.info_symbols = map_bits(t.bits, fmt);
    return t;
}

}  // namespace detail

/* Dual-lane continuous frame: every active subcarrier carries its own
 * space-time-coded, pilot-laced payload behind a shared preamble layout. */
inline BuiltFrame build_downstream_frame(
    const std::vector<std::vector<std::uint8_t>>& payload_bits,
    const SubcarrierPlan& plan, const FrameLayout& layout,
    const FilterSpec& filter, std::uint64_t seed, double fs = kDownstreamRate) {
    plan.validate();
    layout.check();
    if (plan.direction != Direction::downstream)
        throw config_error("downstream frame needs a downstream plan");
    const auto active = plan.active_indices();
    if (!payload_bits.empty() && payload_bits.size() != active.size())
        throw shape_error("one payload bit vector per active subcarrier");

    BuiltFrame out;
    out.truth.plan = plan;
    out.truth.layout = layout;
    out.truth.seed = seed;
    std::vector<LaneSymbols> streams;
    static const std::vector<std::uint8_t> kNoBits;
    for (std::size_t k = 0; k < active.size(); ++k) {
        const auto& sc = plan.subcarriers[active[k]];
        Rng rng(derive_seed(seed, {0xD0, active[k]}));
        StreamTruth t = detail::payload_with_bits(
            layout.payload_len, sc.format,
            payload_bits.empty() ? kNoBits : payload_bits[k], rng);
        t.subcarrier_index = active[k];
        streams.push_back(assemble_dual_lane(t, layout, out.truth.sections,
                                             derive_seed(seed, {0xD1, active[k]})));
        out.truth.streams.push_back(std::move(t));
    }
    out.wave = dscm_modulate(streams, plan, filter, fs);
    out.truth.sample_rate = fs;
    out.truth.samples_per_symbol =
        detail::integer_sps(fs, plan.subcarriers[active[0]].baud);
    return out;
}

/* Real-valued burst: both carrier positions transmit the same frame
 * structure with independent payloads; guard slots keep the transmitter
 * dark on both flanks. */
inline BuiltFrame build_upstream_burst(const std::vector<std::uint8_t>& payload_bits,
                                       const FrameLayout& layout,
                                       const SubcarrierPlan& plan,
                                       std::uint64_t seed,
                                       const FilterSpec& filter = FilterSpec{},
                                       double fs = kUpstreamRate) {
    plan.validate();
    layout.check();
    if (plan.direction != Direction::upstream)
        throw config_error("burst builder needs an upstream plan");
    const auto active = plan.active_indices();
    if (active.empty()) throw config_error("no active carriers");

    // Explicit bits fill the carriers in plan order; the rest is random.
    std::size_t total_cap = 0;
    for (std::size_t idx : active) {
        const auto& fmt = plan.subcarriers[idx].format;
        if (fmt.kind != ModKind::pcs_qam16)
            total_cap += layout.payload_len * fmt.bits_per_symbol();
    }
    if (!payload_bits.empty() && total_cap == 0)
        throw config_error("shaped payload is drawn from the prior, not from bits");
    if (payload_bits.size() > total_cap)
        throw shape_error("payload bits exceed burst capacity");

    BuiltFrame out;
    out.truth.plan = plan;
    out.truth.layout = layout;
    out.truth.seed = seed;
    Waveform sum;
    std::size_t consumed = 0;
    for (std::size_t k = 0; k < active.size(); ++k) {
        const auto& sc = plan.subcarriers[active[k]];
        Rng rng(derive_seed(seed, {0xB0, active[k]}));
        std::vector<std::uint8_t> slice;
        if (sc.format.kind != ModKind::pcs_qam16) {
            const std::size_t cap = layout.payload_len * sc.format.bits_per_symbol();
            const std::size_t take = std::min(cap, payload_bits.size() - consumed);
            slice.assign(payload_bits.begin() + consumed,
                         payload_bits.begin() + consumed + take);
            consumed += take;
        }
        StreamTruth t = detail::payload_with_bits(layout.payload_len, sc.format,
                                                  slice, rng);
        t.subcarrier_index = active[k];
        const LaneSymbols sym = assemble_single_lane(
            t, layout, out.truth.sections, derive_seed(seed, {0xB1, active[k]}));
        Waveform w = cap_modulate_sc(sym.x, plan, active[k], filter, fs);
        detail::scale_to_power(w, 1.0 / double(active.size()));
        if (sum.lanes.empty()) {
            sum = w;
        } else {
            for (std::size_t i = 0; i < sum.size() && i < w.size(); ++i)
                sum.lanes[0][i] += w.lanes[0][i];
            sum.valid_begin = std::max(sum.valid_begin, w.valid_begin);
            sum.valid_end = std::min(sum.valid_end, w.valid_end);
        }
        out.truth.streams.push_back(std::move(t));
    }
    out.wave = std::move(sum);
    out.truth.sample_rate = fs;
    out.truth.samples_per_symbol =
        detail::integer_sps(fs, plan.subcarriers[active[0]].baud);
    return out;
}

}  // namespace cpon
