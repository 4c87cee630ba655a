/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <cmath>
#include <vector>

#include "cpon/common.hpp"
#include "cpon/dscm.hpp"
#include "cpon/filter.hpp"
#include "cpon/plan.hpp"
#include "cpon/waveform.hpp"

namespace cpon {

/* Carrierless amplitude/phase modulation: the complex symbol stream is
 * pulse-shaped, rotated up to the carrier, and only the real part is
 * kept.  The two quadratures ride the in-phase/quadrature pulse pair, so
 * the output is exactly real by construction (imaginary parts are written
 * as zero, not rounded). */
inline Waveform cap_modulate_sc(const std::vector<cplx>& symbols,
                                const SubcarrierPlan& plan, std::size_t sc_index,
                                const FilterSpec& filter, double fs) {
    plan.validate();
    if (sc_index >= plan.subcarriers.size())
        throw config_error("no such subcarrier");
    const Subcarrier& sc = plan.subcarriers[sc_index];
    if (!sc.active) throw config_error("requested carrier position is inactive");
    const double half = 0.5 * (1.0 + plan.rolloff) * sc.baud;
    if (sc.center_hz + half > fs / 2.0)
        throw config_error("carrier falls outside the sampled band");

    Waveform shaped = detail::shape_lanes({&symbols}, sc.baud, fs, filter);
    shaped = mix(shaped, sc.center_hz);
    Waveform out(1, shaped.size(), fs);
    const double s2 = std::sqrt(2.0);  // keeps unit symbol energy on the real rail
    for (std::size_t i = 0; i < shaped.size(); ++i)
        out.lanes[0][i] = cplx(s2 * shaped.lanes[0][i].real(), 0.0);
    out.valid_begin = shaped.valid_begin;
    out.valid_end = shaped.valid_end;
    out.real_valued = true;
    return out;
}

inline Waveform cap_modulate(const std::vector<cplx>& symbols, CapPosition pos,
                             const SubcarrierPlan& plan, const FilterSpec& filter,
                             double fs) {
    const Subcarrier& sc = plan.at(pos);
    for (std::size_t i = 0; i < plan.subcarriers.size(); ++i)
        if (&plan.subcarriers[i] == &sc)
            return cap_modulate_sc(symbols, plan, i, filter, fs);
    throw config_error("no such carrier position");
}

/* Matched quadrature demodulator, the loopback inverse of cap_modulate:
 * rotate the carrier down, matched-filter, and sample the symbol centers.
 * Gain is normalized so noise-free loopback returns the symbols. */
inline std::vector<cplx> cap_demodulate(const Waveform& w, CapPosition pos,
                                        const SubcarrierPlan& plan,
                                        const FilterSpec& filter,
                                        std::size_t n_symbols) {
    w.check();
    const Subcarrier& sc = plan.at(pos);
    const std::size_t sps = detail::integer_sps(w.sample_rate, sc.baud);
    Waveform bb = mix(w, -sc.center_hz);
    FilterSpec fspec = filter;
    fspec.sps = static_cast<int>(sps);
    const auto taps = make_rrc(fspec);
    bb = apply_fir(bb, taps);
    // Cascade of the two unit-DC-gain pulses: symbol-center gain is the
    // lag-zero pulse autocorrelation.  The extra sqrt(2)/2 pairs the TX
    // rail scaling with the half kept by Re{}.
    double gain = 0.0;
    for (double t : taps) gain += t * t;
    gain *= std::sqrt(2.0) / 2.0;
    std::vector<cplx> out(n_symbols);
    for (std::size_t i = 0; i < n_symbols; ++i) {
        const std::size_t idx = i * sps;
        out[i] = (idx < bb.size()) ? bb.lanes[0][idx] / gain : cplx(0.0, 0.0);
    }
    return out;
}

}  // namespace cpon
