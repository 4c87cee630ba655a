/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <cmath>
#include <vector>

#include "cpon/common.hpp"
#include "cpon/filter.hpp"
#include "cpon/framing.hpp"
#include "cpon/plan.hpp"
#include "cpon/waveform.hpp"

namespace cpon {

namespace detail {

inline std::size_t integer_sps(double fs, double baud) {
    const double sps = fs / baud;
    const double r = std::round(sps);
    if (!(r >= 2.0) || std::abs(sps - r) > 1e-9 * sps)
        throw config_error("sample rate must be an integer multiple (>= 2) of baud");
    return static_cast<std::size_t>(r);
}

/* Zero-stuff one symbol lane and pulse-shape it. */
inline Waveform shape_lanes(const std::vector<const std::vector<cplx>*>& lanes,
                            double baud, double fs, const FilterSpec& filter) {
    const std::size_t sps = integer_sps(fs, baud);
    const std::size_t n = lanes[0]->size();
    Waveform w(lanes.size(), n * sps, fs);
    for (std::size_t l = 0; l < lanes.size(); ++l) {
        if (lanes[l]->size() != n) throw shape_error("lane length mismatch");
        for (std::size_t i = 0; i < n; ++i)
            w.lanes[l][i * sps] = (*lanes[l])[i];
    }
    FilterSpec fspec = filter;
    fspec.sps = static_cast<int>(sps);
    return apply_fir(w, make_rrc(fspec));
}

inline void scale_to_power(Waveform& w, double target) {
    const double p = w.power();
    if (p <= 0.0) return;
    w = scale(w, std::sqrt(target / p));
}

}  // namespace detail

/* Sum of pulse-shaped subcarriers on two lanes.  `streams` holds one
 * dual-lane symbol stream per active subcarrier, in plan order.  Each
 * subcarrier is normalized to power 1/n_active, so the composite carries
 * unit power regardless of how many carriers are lit. */
inline Waveform dscm_modulate(const std::vector<LaneSymbols>& streams,
                              const SubcarrierPlan& plan,
                              const FilterSpec& filter, double fs) {
    plan.validate();
    if (plan.direction != Direction::downstream)
        throw config_error("dual-lane subcarrier modulation is a downstream operation");
    const auto active = plan.active_indices();
    if (streams.size() != active.size())
        throw shape_error("one symbol stream per active subcarrier required");
    if (streams.empty()) throw config_error("no active subcarriers");

    std::size_t n_samples = 0;
    for (std::size_t k = 0; k < streams.size(); ++k) {
        const auto& sc = plan.subcarriers[active[k]];
        const std::size_t sps = detail::integer_sps(fs, sc.baud);
        n_samples = std::max(n_samples, streams[k].x.size() * sps);
        if (streams[k].y.size() != streams[k].x.size())
            throw shape_error("lane length mismatch");
        const double half = 0.5 * (1.0 + plan.rolloff) * sc.baud;
        if (std::abs(sc.center_hz) + half > fs / 2.0)
            throw config_error("subcarrier falls outside the sampled band");
    }

    Waveform out(2, n_samples, fs);
    std::size_t vb = 0, ve = n_samples;
    for (std::size_t k = 0; k < streams.size(); ++k) {
        const auto& sc = plan.subcarriers[active[k]];
        Waveform w = detail::shape_lanes({&streams[k].x, &streams[k].y}, sc.baud,
                                         fs, filter);
        detail::scale_to_power(w, 1.0 / double(streams.size()));
        w = mix(w, sc.center_hz);
        for (int l = 0; l < 2; ++l)
            for (std::size_t i = 0; i < w.lanes[l].size(); ++i)
                out.lanes[l][i] += w.lanes[l][i];
        vb = std::max(vb, w.valid_begin);
        ve = std::min(ve, w.valid_end);
    }
    out.valid_begin = vb;
    out.valid_end = ve;
    return out;
}

/* Receiver front end for one subcarrier: shift it to DC, matched-filter,
 * and resample to out_sps samples per symbol. */
inline Waveform subcarrier_baseband(const Waveform& w, double center_hz,
                                    double baud, const FilterSpec& filter,
                                    std::size_t out_sps = 2) {
    w.check();
    Waveform bb = mix(w, -center_hz);
    const double in_sps = w.sample_rate / baud;
    FilterSpec fspec = filter;
    fspec.sps = static_cast<int>(std::max(2.0, std::round(in_sps)));
    bb = apply_fir(bb, make_rrc(fspec));
    return resample(bb, double(out_sps) * baud);
}

}  // namespace cpon
