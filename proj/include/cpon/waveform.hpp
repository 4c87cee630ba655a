#pragma once

/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */

#include <vector>
#include <cstddef>
#include <algorithm>

#include "common.hpp"

namespace cpon {

// Sampled baseband signal, 1 or 2 polarization lanes, all lanes equal length.
// [valid_begin, valid_end) marks samples untouched by filter edge transients;
// operations that smear edges shrink it instead of zero-padding silently.
struct Waveform {
    std::vector<std::vector<cplx>> lanes;
    double sample_rate = 0.0;
    double center_offset = 0.0;   // Hz, digital band center relative to carrier
    bool real_valued = false;
    std::size_t valid_begin = 0;
    std::size_t valid_end = 0;

    Waveform() = default;
    Waveform(std::size_t n_lanes, std::size_t n, double fs)
        : lanes(n_lanes, std::vector<cplx>(n)), sample_rate(fs), valid_begin(0), valid_end(n) {}

    std::size_t n_lanes() const { return lanes.size(); }
    std::size_t size() const { return lanes.empty() ? 0 : lanes[0].size(); }

    void check() const {
        if (lanes.empty()) throw shape_error("waveform has no lanes");
        if (lanes.size() > 2) throw shape_error("waveform has more than 2 lanes");
        for (const auto& l : lanes)
            if (l.size() != lanes[0].size()) throw shape_error("waveform lanes differ in length");
        if (sample_rate <= 0.0) throw shape_error("waveform sample_rate must be > 0");
    }

    // Mean |x|^2 per time sample, summed across lanes, valid region only.
    double power() const {
        std::size_t b = valid_begin, e = std::min(valid_end, size());
        if (e <= b) { b = 0; e = size(); }
        if (e == b) return 0.0;
        double acc = 0.0;
        for (const auto& l : lanes)
            for (std::size_t i = b; i < e; ++i) acc += std::norm(l[i]);
        return acc / double(e - b);
    }

    void shrink_valid(std::size_t front, std::size_t back) {
        valid_begin = std::min(valid_begin + front, size());
        valid_end = (valid_end > back) ? valid_end - back : 0;
        if (valid_end < valid_begin) valid_end = valid_begin;
    }
};

// Frequency shift: x[n] *= exp(j(2 pi f n / fs + phi0)). Clears the
// real_valued tag for nonzero shifts.
inline Waveform mix(const Waveform& w, double f_hz, double phi0 = 0.0) {
    Waveform out = w;
    if (f_hz == 0.0 && phi0 == 0.0) return out;
    const double step = 2.0 * pi * f_hz / w.sample_rate;
    for (auto& lane : out.lanes) {
        for (std::size_t n = 0; n < lane.size(); ++n) {
            double ph = step * double(n) + phi0;
            lane[n] *= cplx(std::cos(ph), std::sin(ph));
        }
    }
    out.real_valued = false;
    return out;
}

inline Waveform scale(const Waveform& w, double g) {
    Waveform out = w;
    for (auto& lane : out.lanes)
        for (auto& x : lane) x *= g;
    return out;
}

} // namespace cpon
