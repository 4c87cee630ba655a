#pragma once

/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */

#include <vector>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "waveform.hpp"
#include "fft.hpp"

namespace cpon {

struct BerReport {
    std::uint64_t bit_errors = 0;
    std::uint64_t bits_total = 0;
    double ber = 0.0;
    std::optional<double> evm_rms;
    std::ptrdiff_t alignment = 0;    // rx shift that matched tx
};

// Exact error count after a correlation alignment search over
// [-max_shift, max_shift]. Bits are 0/1 bytes.
inline BerReport measure_ber(const std::vector<std::uint8_t>& rx,
                             const std::vector<std::uint8_t>& tx,
                             std::ptrdiff_t max_shift = 4096,
                             double corr_threshold = 0.6) {
    if (rx.empty() || tx.empty()) throw shape_error("measure_ber: empty bit stream");
    const std::ptrdiff_t nr = std::ptrdiff_t(rx.size());
    const std::ptrdiff_t nt = std::ptrdiff_t(tx.size());
    const std::ptrdiff_t probe = std::min<std::ptrdiff_t>(65536, std::min(nr, nt));
    std::ptrdiff_t best_shift = 0;
    double best_corr = -2.0;
    for (std::ptrdiff_t s = -max_shift; s <= max_shift; ++s) {
        // rx[i + s] against tx[i]
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -s);
        const std::ptrdiff_t hi = std::min(nt, nr - s);
        const std::ptrdiff_t len = std::min(hi - lo, probe);
        if (len < 64) continue;
        std::ptrdiff_t agree = 0;
        for (std::ptrdiff_t i = lo; i < lo + len; ++i)
            agree += (rx[std::size_t(i + s)] == tx[std::size_t(i)]) ? 1 : -1;
        const double corr = double(agree) / double(len);
        if (corr > best_corr) {
            best_corr = corr;
            best_shift = s;
        }
    }
    if (best_corr < corr_threshold)
        throw sync_error("measure_ber: no alignment above correlation threshold");
    const std::ptrdiff_t s = best_shift;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -s);
    const std::ptrdiff_t hi = std::min(nt, nr - s);
    BerReport rep;
    rep.alignment = s;
    for (std::ptrdiff_t i = lo; i < hi; ++i) {
        rep.bits_total++;
        if (rx[std::size_t(i + s)] != tx[std::size_t(i)]) rep.bit_errors++;
    }
    rep.ber = rep.bits_total ? double(rep.bit_errors) / double(rep.bits_total) : 0.0;
    return rep;
}

// RMS error-vector magnitude relative to the reference RMS.
inline double evm_rms(const std::vector<cplx>& rx, const std::vector<cplx>& ref) {
    if (rx.size() != ref.size() || rx.empty()) throw shape_error("evm: length mismatch");
    double err = 0.0, pow = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        err += std::norm(rx[i] - ref[i]);
        pow += std::norm(ref[i]);
    }
    if (pow == 0.0) throw measurement_error("evm: zero reference power");
    return std::sqrt(err / pow);
}

// Occupied symbol bandwidth from the averaged periodogram: total power
// divided by the plateau spectral density. Exactly the symbol rate for an
// RRC-shaped carrier (the raised-cosine integral), the sum of symbol rates
// for a multicarrier plan of equal per-carrier density, and the full sample
// rate for white input.
inline double estimate_symbol_bandwidth(const Waveform& w, std::size_t n_fft = 1024) {
    w.check();
    if (w.size() < n_fft) n_fft = 256;
    if (w.size() < n_fft) throw measurement_error("bandwidth estimate: input too short");
    std::vector<double> psd(n_fft, 0.0);
    std::size_t blocks = 0;
    for (std::size_t start = 0; start + n_fft <= w.size(); start += n_fft) {
        for (std::size_t l = 0; l < w.n_lanes(); ++l) {
            std::vector<cplx> blk(w.lanes[l].begin() + std::ptrdiff_t(start),
                                  w.lanes[l].begin() + std::ptrdiff_t(start + n_fft));
            fft_inplace(blk);
            for (std::size_t k = 0; k < n_fft; ++k) psd[k] += std::norm(blk[k]);
        }
        ++blocks;
        if (blocks >= 64) break;
    }
    double total = 0.0, peak = 0.0;
    for (double v : psd) {
        total += v;
        peak = std::max(peak, v);
    }
    if (total <= 0.0) throw measurement_error("bandwidth estimate: zero power input");
    // Plateau level: median of bins above half the peak density.
    std::vector<double> high;
    for (double v : psd)
        if (v > 0.5 * peak) high.push_back(v);
    std::nth_element(high.begin(), high.begin() + std::ptrdiff_t(high.size() / 2), high.end());
    const double plateau = high[high.size() / 2];
    const double bin_hz = w.sample_rate / double(n_fft);
    return (total / plateau) * bin_hz;
}

} // namespace cpon
