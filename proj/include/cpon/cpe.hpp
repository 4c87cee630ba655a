/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <cstddef>
#include <vector>

#include "cpon/common.hpp"

namespace cpon {

struct CpeState {
    std::size_t pilot_period = 32;   // payload symbols per pilot
    std::size_t ml_half_window = 8;  // Q
    double last_phase = 0.0;         // unwrapped, carried across calls
    bool has_last = false;
    double magnitude_floor = 0.1;    // relative pilot magnitude gate

    void check() const {
        if (pilot_period < 2) throw config_error("pilot period must be >= 2");
        if (ml_half_window < 1) throw config_error("ML half-window must be >= 1");
    }
};

/* Pilot-aided phase track: at each pilot, phi = arg(conj(r_p) * p), which
 * the sample correction multiply exp(+j phi) undoes.  Between pilots the
 * phase holds at the last pilot value; successive estimates are unwrapped
 * so the reported track is continuous.  A pilot received too weak is
 * skipped and the previous estimate holds. */
inline std::vector<double> pilot_cpe(const std::vector<cplx>& stream,
                                     const std::vector<std::size_t>& pilot_pos,
                                     const std::vector<cplx>& pilot_val,
                                     CpeState& st) {
    st.check();
    if (pilot_pos.size() != pilot_val.size())
        throw shape_error("pilot positions and values differ in count");
    std::vector<double> phi(stream.size(), st.has_last ? st.last_phase : 0.0);
    std::size_t fill_from = 0;
    for (std::size_t i = 0; i < pilot_pos.size(); ++i) {
        const std::size_t pos = pilot_pos[i];
        if (pos >= stream.size()) break;
        const cplx rp = stream[pos];
        const cplx p = pilot_val[i];
        const bool ok =
            std::abs(rp) > st.magnitude_floor * std::max(std::abs(p), 1e-300);
        double est = st.has_last ? st.last_phase : 0.0;
        if (ok) {
            const double raw = std::arg(std::conj(rp) * p);
            est = st.has_last ? st.last_phase + wrap_phase(raw - st.last_phase)
                              : raw;
        }
        if (!st.has_last) {
            // symbols before the first pilot inherit its estimate
            for (std::size_t k = fill_from; k < pos; ++k) phi[k] = est;
        }
        for (std::size_t k = pos; k < stream.size(); ++k) phi[k] = est;
        fill_from = pos;
        st.last_phase = est;
        st.has_last = true;
    }
    return phi;
}

/* Decision-aided residual phase: a symmetric boxcar of the per-symbol
 * angle mismatch, window shrunk symmetrically at the stream edges.  The
 * correction multiply is exp(-j phi). */
inline std::vector<double> ml_cpe(const std::vector<cplx>& stream,
                                  const std::vector<cplx>& decisions,
                                  std::size_t q) {
    if (q < 1) throw config_error("ML half-window must be >= 1");
    if (decisions.size() != stream.size())
        throw shape_error("one decision per symbol required");
    const std::size_t n = stream.size();
    std::vector<double> phi(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t qq = std::min({q, i, n - 1 - i});
        double acc = 0.0;
        for (std::size_t l = i - qq; l <= i + qq; ++l)
            acc += std::arg(stream[l] * std::conj(decisions[l]));
        phi[i] = acc / double(2 * qq + 1);
    }
    return phi;
}

/* Apply a per-symbol phase correction: out = in * exp(j sign * phi). */
inline std::vector<cplx> apply_phase(const std::vector<cplx>& stream,
                                     const std::vector<double>& phi,
                                     double sign) {
    if (phi.size() != stream.size())
        throw shape_error("one phase per symbol required");
    std::vector<cplx> out(stream.size());
    for (std::size_t i = 0; i < stream.size(); ++i)
        out[i] = stream[i] * std::polar(1.0, sign * phi[i]);
    return out;
}

}  // namespace cpon
