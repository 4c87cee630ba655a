/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <utility>
#include <vector>

#include "cpon/common.hpp"

namespace cpon {

struct AlamoutiStreams {
    std::vector<cplx> x;  // lane X, one entry per time slot
    std::vector<cplx> y;  // lane Y
};

/* Rate-1/2 space-time block code.  Each input pair (s1, s2) occupies two
 * time slots: slot 1 sends (X=s1, Y=s2), slot 2 sends (X=-s2*, Y=s1*).
 * A single-polarization receiver seeing any fixed linear combination of
 * the lanes can recover both symbols by combining the two slots. */
inline AlamoutiStreams alamouti_encode(const std::vector<cplx>& s) {
    if (s.size() % 2 != 0) throw shape_error("Alamouti input must pair up");
    AlamoutiStreams out;
    out.x.resize(s.size());
    out.y.resize(s.size());
    for (std::size_t m = 0; m < s.size() / 2; ++m) {
        const cplx s1 = s[2 * m], s2 = s[2 * m + 1];
        out.x[2 * m] = s1;
        out.y[2 * m] = s2;
        out.x[2 * m + 1] = -std::conj(s2);
        out.y[2 * m + 1] = std::conj(s1);
    }
    return out;
}

/* Classic combiner for a known flat channel r = hx*X + hy*Y + n.
 * Output is normalized by |hx|^2 + |hy|^2, so noise-free input returns the
 * exact symbols and noisy input gets the full diversity gain. */
inline std::vector<cplx> alamouti_combine(const std::vector<cplx>& r, cplx hx,
                                          cplx hy) {
    if (r.size() % 2 != 0) throw shape_error("combiner needs whole slot pairs");
    const double g = std::norm(hx) + std::norm(hy);
    if (g <= 0.0) throw config_error("zero channel in Alamouti combiner");
    std::vector<cplx> s(r.size());
    for (std::size_t m = 0; m < r.size() / 2; ++m) {
        const cplx r1 = r[2 * m], r2c = std::conj(r[2 * m + 1]);
        s[2 * m] = (std::conj(hx) * r1 + hy * r2c) / g;
        s[2 * m + 1] = (std::conj(hy) * r1 - hx * r2c) / g;
    }
    return s;
}

}  // namespace cpon
