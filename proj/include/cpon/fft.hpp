#pragma once

/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */

#include <vector>
#include <cstddef>

#include "common.hpp"
#include "waveform.hpp"

namespace cpon {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place. n must be a power of two.
// Forward transform has no scaling; inverse scales by 1/n.
inline void fft_inplace(std::vector<cplx>& a, bool inverse = false) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw shape_error("fft length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * pi / double(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) x /= double(n);
    }
}

inline std::vector<cplx> fft(std::vector<cplx> a) {
    fft_inplace(a, false);
    return a;
}

inline std::vector<cplx> ifft(std::vector<cplx> a) {
    fft_inplace(a, true);
    return a;
}

// Direct DFT for lengths the radix-2 transform cannot take (e.g. the
// timing detector's N=80 block). O(n^2), used only on small blocks.
inline std::vector<cplx> dft(const std::vector<cplx>& a) {
    const std::size_t n = a.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        const double w = -2.0 * pi * double(k) / double(n);
        for (std::size_t m = 0; m < n; ++m) {
            double ph = w * double(m);
            acc += a[m] * cplx(std::cos(ph), std::sin(ph));
        }
        out[k] = acc;
    }
    return out;
}

// Frequency of bin k for an n-point transform at rate fs, wrapped to
// (-fs/2, fs/2].
inline double bin_freq(std::size_t k, std::size_t n, double fs) {
    double f = double(k) * fs / double(n);
    if (f > fs / 2.0) f -= fs;
    return f;
}

// n_fft bins over the first n_fft valid samples of lane 0.
// Satisfies Parseval: sum |x|^2 = (1/N) sum |X|^2.
inline std::vector<cplx> spectrum_block(const Waveform& w, std::size_t n_fft) {
    w.check();
    if (!is_pow2(n_fft)) throw shape_error("spectrum_block n_fft must be a power of two");
    if (w.size() < n_fft) throw shape_error("spectrum_block input shorter than n_fft");
    std::vector<cplx> a(w.lanes[0].begin(), w.lanes[0].begin() + std::ptrdiff_t(n_fft));
    fft_inplace(a, false);
    return a;
}

} // namespace cpon
