/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "cpon/common.hpp"

namespace cpon {

struct SyncResult {
    std::size_t position = 0;    // start of the sync section
    double metric_peak = 0.0;    // stacked metric at the winner
    std::vector<double> peaks;   // individual metrics at position + i*L
};

namespace detail {

/* Windowed differential correlation r(d+i) pn(i) conj(r(d+i+L)), which
 * collapses to |r|^2 at alignment; M(d) = |P|^2 / P_r^2 hits 1 there
 * regardless of complex gain, common phase, or moderate frequency
 * offset. */
inline std::vector<double> sync_metric(const std::vector<cplx>& r,
                                       const std::vector<double>& pn,
                                       std::size_t L) {
    const std::size_t n_m = r.size() - 2 * L + 1;
    std::vector<double> m(n_m);
    double pr = 0.0;
    for (std::size_t i = 0; i < L; ++i) pr += std::norm(r[L + i]);
    for (std::size_t d = 0; d < n_m; ++d) {
        cplx p(0.0, 0.0);
        for (std::size_t i = 0; i < L; ++i)
            p += r[d + i] * pn[i] * std::conj(r[d + i + L]);
        m[d] = (pr > 1e-300) ? std::norm(p) / (pr * pr) : 0.0;
        if (d + 1 < n_m) {
            pr -= std::norm(r[d + L]);
            pr += std::norm(r[d + 2 * L]);
        }
    }
    return m;
}

}  // namespace detail

/* Correlation frame sync over the [A B]x3 section, B = pn(*)A.  Stacking
 * the windowed metric at lags 0..(2 reps - 2) times L sharpens the peak.
 * Streams from several receive lanes carry the same frame, so their
 * metrics average before ranking, which halves the metric variance per
 * extra lane.  The stacked maximum below threshold means no frame. */
inline SyncResult frame_sync(const std::vector<std::vector<cplx>>& lanes,
                             const std::vector<double>& pn, std::size_t L,
                             double threshold = 2.0, std::size_t repeats = 3) {
    if (L == 0 || pn.size() != L) throw shape_error("pn length must equal L");
    if (repeats < 2) throw config_error("sync needs at least two repeated units");
    if (lanes.empty()) throw shape_error("sync needs at least one stream");
    const std::size_t n_peaks = 2 * repeats - 1;
    const std::size_t need = (n_peaks - 1) * L + 2 * L;
    for (const auto& r : lanes) {
        if (r.size() != lanes[0].size())
            throw shape_error("lane stream lengths differ");
        if (r.size() < need) throw shape_error("stream shorter than the sync span");
    }

    const std::size_t n_d = lanes[0].size() - need + 1;
    const std::size_t n_m = lanes[0].size() - 2 * L + 1;

    std::vector<double> m(n_m, 0.0);
    for (const auto& r : lanes) {
        auto ml = detail::sync_metric(r, pn, L);
        for (std::size_t d = 0; d < n_m; ++d) m[d] += ml[d];
    }
    for (auto& v : m) v /= double(lanes.size());

    SyncResult best;
    double best_acc = -1.0;
    for (std::size_t d = 0; d < n_d; ++d) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n_peaks; ++i) acc += m[d + i * L];
        if (acc > best_acc) {
            best_acc = acc;
            best.position = d;
        }
    }
    best.metric_peak = best_acc;
    best.peaks.resize(n_peaks);
    for (std::size_t i = 0; i < n_peaks; ++i)
        best.peaks[i] = m[best.position + i * L];
    if (best_acc < threshold)
        throw sync_error("frame sync metric below threshold");
    return best;
}

inline SyncResult frame_sync(const std::vector<cplx>& r,
                             const std::vector<double>& pn, std::size_t L,
                             double threshold = 2.0, std::size_t repeats = 3) {
    return frame_sync(std::vector<std::vector<cplx>>{r}, pn, L, threshold,
                      repeats);
}

struct FineFoe {
    double hz = 0.0;
    bool near_edge = false;  // within 5% of the unambiguous range boundary
};

/* Residual frequency offset from the phase advance between the repeated
 * sync units, each 2L symbols apart: Delta_f = Rs/(4 pi L) * arg of the
 * summed block inner products.  Unambiguous inside +/- Rs/(4L). */
inline FineFoe fine_foe(const std::vector<cplx>& b1, const std::vector<cplx>& b2,
                        const std::vector<cplx>& b3, std::size_t L, double baud) {
    if (b1.size() != 2 * L || b2.size() != 2 * L || b3.size() != 2 * L)
        throw shape_error("fine FOE blocks must each span 2L symbols");
    if (baud <= 0.0) throw config_error("baud must be positive");
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < 2 * L; ++i) {
        acc += b2[i] * std::conj(b1[i]);
        acc += b3[i] * std::conj(b2[i]);
    }
    const double a = std::arg(acc);
    FineFoe out;
    out.hz = baud * a / (4.0 * pi * double(L));
    out.near_edge = std::abs(a) > 0.95 * pi;
    return out;
}

}  // namespace cpon
