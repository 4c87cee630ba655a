#pragma once

/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */

#include <vector>
#include <cstddef>
#include <cmath>

#include "common.hpp"
#include "waveform.hpp"
#include "fft.hpp"

namespace cpon {

// Root-raised-cosine pulse shaping parameters.
struct FilterSpec {
    double beta = 0.1;   // roll-off, 0 < beta <= 1
    int span = 48;       // symbols covered by the tap window
    int sps = 2;         // samples per symbol
};

// Symmetric odd-length RRC taps, DC gain normalized to 1 (sum of taps = 1).
inline std::vector<double> make_rrc(const FilterSpec& spec) {
    if (!(spec.beta > 0.0) || spec.beta > 1.0) throw config_error("rrc: beta must be in (0, 1]");
    if (spec.span < 4) throw config_error("rrc: span must be >= 4");
    if (spec.sps < 2) throw config_error("rrc: sps must be >= 2");
    const int n = spec.span * spec.sps;          // even
    const int half = n / 2;
    const double b = spec.beta;
    std::vector<double> taps(std::size_t(n) + 1);
    for (int k = -half; k <= half; ++k) {
        const double t = double(k) / double(spec.sps);   // in symbol periods
        double v;
        if (k == 0) {
            v = 1.0 - b + 4.0 * b / pi;
        } else if (std::abs(std::abs(4.0 * b * t) - 1.0) < 1e-9) {
            v = (b / std::sqrt(2.0)) *
                ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) +
                 (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
        } else {
            const double num = std::sin(pi * t * (1.0 - b)) +
                               4.0 * b * t * std::cos(pi * t * (1.0 + b));
            const double den = pi * t * (1.0 - 16.0 * b * b * t * t);
            v = num / den;
        }
        taps[std::size_t(k + half)] = v;
    }
    double sum = 0.0;
    for (double v : taps) sum += v;
    for (double& v : taps) v /= sum;
    return taps;
}

namespace detail {

// Linear convolution of one lane with real taps, group delay removed,
// output length equals input length. Direct form for small kernels,
// FFT overlap for long ones; the path depends only on sizes so outputs
// stay bit-identical for identical inputs.
inline std::vector<cplx> convolve_same(const std::vector<cplx>& x, const std::vector<double>& h) {
    const std::size_t n = x.size(), m = h.size();
    const std::size_t delay = (m - 1) / 2;
    std::vector<cplx> y(n, cplx(0.0, 0.0));
    if (n == 0) return y;
    if (double(n) * double(m) <= 4.0e6 || n + m < 64) {
        for (std::size_t i = 0; i < n; ++i) {
            // y[i] = sum_k x[i + delay - k] * h[k]
            const std::ptrdiff_t base = std::ptrdiff_t(i) + std::ptrdiff_t(delay);
            const std::size_t k_lo = std::size_t(std::max<std::ptrdiff_t>(0, base - std::ptrdiff_t(n) + 1));
            const std::size_t k_hi = std::min<std::size_t>(m - 1, std::size_t(base));
            cplx acc(0.0, 0.0);
            for (std::size_t k = k_lo; k <= k_hi; ++k)
                acc += x[std::size_t(base) - k] * h[k];
            y[i] = acc;
        }
        return y;
    }
    std::size_t nfft = 1;
    while (nfft < n + m) nfft <<= 1;
    std::vector<cplx> X(nfft, cplx(0, 0)), H(nfft, cplx(0, 0));
    for (std::size_t i = 0; i < n; ++i) X[i] = x[i];
    for (std::size_t i = 0; i < m; ++i) H[i] = cplx(h[i], 0.0);
    fft_inplace(X);
    fft_inplace(H);
    for (std::size_t i = 0; i < nfft; ++i) X[i] *= H[i];
    fft_inplace(X, true);
    for (std::size_t i = 0; i < n; ++i) y[i] = X[i + delay];
    return y;
}

// Kaiser window, beta ~14 puts sidelobes below -100 dB.
inline double kaiser(double x, double half_width, double beta_w) {
    double r = x / half_width;
    double t = 1.0 - r * r;
    if (t <= 0.0) return 0.0;
    // I0 via power series.
    auto bessel_i0 = [](double v) {
        double sum = 1.0, term = 1.0;
        for (int k = 1; k < 40; ++k) {
            term *= (v * v) / (4.0 * double(k) * double(k));
            sum += term;
            if (term < 1e-18 * sum) break;
        }
        return sum;
    };
    return bessel_i0(beta_w * std::sqrt(t)) / bessel_i0(beta_w);
}

inline double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(pi * x) / (pi * x);
}

constexpr int kInterpHalf = 32;      // 65-tap windowed-sinc kernel
constexpr double kInterpBeta = 14.0;

// Band-limited interpolation of x at fractional position pos (samples).
// Accurate to ~1e-7 round-trip for content below 0.4 of the sample rate.
// bw < 1 shrinks the kernel passband for decimating reads.
inline cplx sinc_interp(const std::vector<cplx>& x, double pos, double bw = 1.0) {
    const std::ptrdiff_t n = std::ptrdiff_t(x.size());
    const std::ptrdiff_t center = std::ptrdiff_t(std::floor(pos));
    const double half = double(kInterpHalf) / bw;
    const std::ptrdiff_t reach = std::ptrdiff_t(std::ceil(half));
    cplx acc(0.0, 0.0);
    for (std::ptrdiff_t k = center - reach; k <= center + reach; ++k) {
        if (k < 0 || k >= n) continue;
        const double d = double(k) - pos;
        const double w = kaiser(d, half, kInterpBeta);
        if (w == 0.0) continue;
        acc += x[std::size_t(k)] * (bw * sinc(bw * d) * w);
    }
    return acc;
}

} // namespace detail

// Linear convolution with group-delay compensation; output length equals
// input length; the filter transient region is removed from the valid range.
inline Waveform apply_fir(const Waveform& w, const std::vector<double>& taps) {
    w.check();
    if (taps.empty()) throw shape_error("apply_fir: empty taps");
    Waveform out = w;
    for (std::size_t l = 0; l < w.n_lanes(); ++l)
        out.lanes[l] = detail::convolve_same(w.lanes[l], taps);
    const std::size_t edge = taps.size() / 2;
    out.shrink_valid(edge, edge);
    out.real_valued = false;
    // A real input through real taps stays real; restore the tag exactly.
    if (w.real_valued) {
        for (auto& lane : out.lanes)
            for (auto& v : lane) v = cplx(v.real(), 0.0);
        out.real_valued = true;
    }
    return out;
}

// Delay by tau seconds via band-limited interpolation. Integer-sample
// delays are exact shifts; the kernel edge region is flagged invalid.
inline Waveform fractional_delay(const Waveform& w, double tau) {
    w.check();
    const double shift = tau * w.sample_rate;    // samples, positive = delay
    const double rounded = std::round(shift);
    Waveform out = w;
    const std::size_t n = w.size();
    if (std::abs(shift - rounded) < 1e-12) {
        const std::ptrdiff_t s = std::ptrdiff_t(rounded);
        for (std::size_t l = 0; l < w.n_lanes(); ++l) {
            auto& dst = out.lanes[l];
            const auto& src = w.lanes[l];
            for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(n); ++i) {
                std::ptrdiff_t j = i - s;
                dst[std::size_t(i)] = (j >= 0 && j < std::ptrdiff_t(n)) ? src[std::size_t(j)] : cplx(0, 0);
            }
        }
        const std::size_t a = std::size_t(std::abs(s));
        out.shrink_valid(a, a);
        return out;
    }
    for (std::size_t l = 0; l < w.n_lanes(); ++l) {
        auto& dst = out.lanes[l];
        const auto& src = w.lanes[l];
        for (std::size_t i = 0; i < n; ++i)
            dst[i] = detail::sinc_interp(src, double(i) - shift);
    }
    const std::size_t edge = std::size_t(detail::kInterpHalf) + std::size_t(std::ceil(std::abs(shift)));
    out.shrink_valid(edge, edge);
    if (w.real_valued) {
        for (auto& lane : out.lanes)
            for (auto& v : lane) v = cplx(v.real(), 0.0);
        out.real_valued = true;
    }
    return out;
}

// Rate conversion to out_rate with band-limited interpolation;
// decimating conversions narrow the kernel passband to anti-alias.
inline Waveform resample(const Waveform& w, double out_rate) {
    w.check();
    if (out_rate <= 0.0) throw config_error("resample: out_rate must be > 0");
    const double ratio = w.sample_rate / out_rate;   // input samples per output sample
    const double bw = (ratio > 1.0) ? 1.0 / ratio : 1.0;
    const std::size_t n_out = std::size_t(std::floor(double(w.size()) / ratio));
    Waveform out(w.n_lanes(), n_out, out_rate);
    out.center_offset = w.center_offset;
    out.real_valued = w.real_valued;
    for (std::size_t l = 0; l < w.n_lanes(); ++l)
        for (std::size_t i = 0; i < n_out; ++i)
            out.lanes[l][i] = detail::sinc_interp(w.lanes[l], double(i) * ratio, bw);
    const std::size_t edge = std::size_t(std::ceil(double(detail::kInterpHalf) / (bw * ratio))) + 1;
    out.valid_begin = std::min<std::size_t>(edge, n_out);
    out.valid_end = (n_out > edge) ? n_out - edge : 0;
    if (out.valid_end < out.valid_begin) out.valid_end = out.valid_begin;
    if (w.real_valued) {
        for (auto& lane : out.lanes)
            for (auto& v : lane) v = cplx(v.real(), 0.0);
    }
    return out;
}

} // namespace cpon
