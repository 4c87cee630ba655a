/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <cstddef>
#include <vector>

#include "cpon/common.hpp"
#include "cpon/fft.hpp"
#include "cpon/waveform.hpp"

namespace cpon {

struct ToneDetection {
    bool found = false;
    double f1 = 0.0;       // lower line, signed Hz at the decimated rate
    double f2 = 0.0;       // upper line
    double peak_snr = 0.0; // weaker line over the residual floor, dB
};

/* Preamble detection: decimate, average power spectra over the window
 * across all lanes, then drop every bin below the average power of the
 * survivors, three times over or until two bins remain.  A frame announces
 * itself as exactly two spectral lines whose midpoint sits near DC and
 * which clear the residual floor by min_snr_db; anything else is
 * not-found.  max_center_frac bounds the acceptable midpoint as a
 * fraction of the decimated Nyquist range. */
inline ToneDetection detect_frame(const Waveform& w, std::size_t n_fft,
                                  std::size_t downsample,
                                  double max_center_frac = 0.25,
                                  double min_snr_db = 10.0) {
    w.check();
    if (n_fft == 0 || downsample == 0)
        throw config_error("detect_frame needs a block size and decimation");
    if (w.size() < n_fft * downsample)
        throw shape_error("detection window shorter than one analysis block");

    const double fs_d = w.sample_rate / double(downsample);
    const std::size_t n_dec = w.size() / downsample;
    const std::size_t n_blocks = n_dec / n_fft;

    std::vector<double> p(n_fft, 0.0);
    std::vector<cplx> buf(n_fft);
    for (const auto& lane : w.lanes) {
        for (std::size_t b = 0; b < n_blocks; ++b) {
            for (std::size_t i = 0; i < n_fft; ++i)
                buf[i] = lane[(b * n_fft + i) * downsample];
            auto spec = (n_fft & (n_fft - 1)) ? dft(buf) : fft(buf);
            for (std::size_t k = 0; k < n_fft; ++k) p[k] += std::norm(spec[k]);
        }
    }

    std::vector<std::size_t> surv(n_fft);
    for (std::size_t k = 0; k < n_fft; ++k) surv[k] = k;
    for (int pass = 0; pass < 3 && surv.size() > 2; ++pass) {
        double mean = 0.0;
        for (auto k : surv) mean += p[k];
        mean /= double(surv.size());
        std::vector<std::size_t> keep;
        for (auto k : surv)
            if (p[k] >= mean * (1.0 - 1e-9)) keep.push_back(k);
        if (keep.empty()) break;
        surv.swap(keep);
    }

    ToneDetection det;
    if (surv.size() != 2) return det;
    double fa = bin_freq(surv[0], n_fft, fs_d);
    double fb = bin_freq(surv[1], n_fft, fs_d);
    if (fa > fb) std::swap(fa, fb);
    if (fa == fb) return det;
    if (std::abs(fa + fb) / 2.0 > max_center_frac * fs_d / 2.0) return det;

    double floor_sum = 0.0;
    for (std::size_t k = 0; k < n_fft; ++k)
        if (k != surv[0] && k != surv[1]) floor_sum += p[k];
    const double floor_mean = floor_sum / double(n_fft - 2);
    const double weaker = std::min(p[surv[0]], p[surv[1]]);
    const double snr = 10.0 * std::log10(weaker / std::max(floor_mean, 1e-300));
    if (snr < min_snr_db) return det;  // two bins poking out of noise

    det.found = true;
    det.f1 = fa;
    det.f2 = fb;
    det.peak_snr = snr;
    return det;
}

/* The tone pair is symmetric at the transmitter, so its midpoint is the
 * frequency offset. */
inline double coarse_foe(double f1, double f2) { return (f1 + f2) / 2.0; }

struct SamplingPhase {
    double tau_s = 0.0;
    bool confident = true;
};

/* Sampling-phase offset from the complex tone bins at +/-f0.  The common
 * oscillator phase appears in both bins and cancels in the product; the
 * differential phase is 4*pi*f0*tau. */
inline SamplingPhase init_sampling_phase(cplx r_pos, cplx r_neg, double f0,
                                         double magnitude_floor = 1e-9) {
    if (f0 <= 0.0) throw config_error("tone frequency must be positive");
    SamplingPhase out;
    const double mag = std::min(std::abs(r_pos), std::abs(r_neg));
    out.confident = mag > magnitude_floor;
    out.tau_s = std::arg(r_pos * std::conj(r_neg)) / (4.0 * pi * f0);
    return out;
}

/* Complex spectral bin nearest f_hz over [begin, begin+n) of a lane,
 * computed directly; used to feed init_sampling_phase. */
inline cplx tone_bin(const std::vector<cplx>& x, std::size_t begin,
                     std::size_t n, double fs, double f_hz) {
    if (begin + n > x.size()) throw shape_error("tone window past end of stream");
    const double step = -2.0 * pi * f_hz / fs;
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        acc += x[begin + i] * std::polar(1.0, step * double(i));
    return acc;
}

}  // namespace cpon
