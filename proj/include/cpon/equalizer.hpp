/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cpon/common.hpp"
#include "cpon/constellation.hpp"

namespace cpon {

enum class EqMode { burst, continuous };

/* Fractionally-indexed FIR bank: n_out outputs, each a sum over n_in
 * input streams convolved with tap_len taps.  Burst mode requires a
 * least-squares fill before decision-directed updates. */
struct EqualizerState {
    std::size_t n_in = 0, n_out = 0, tap_len = 0;
    EqMode mode = EqMode::burst;
    double mu = 1e-3;
    std::vector<cplx> taps;  // [out][in][tap]
    std::size_t update_count = 0;
    bool initialized = false;
    double init_evm_db = 0.0;

    // divergence watch: mean error power per 1e4-update window
    double err_acc = 0.0;
    std::size_t err_cnt = 0;
    double err_prev_window = -1.0;

    cplx& tap(std::size_t o, std::size_t i, std::size_t t) {
        return taps[(o * n_in + i) * tap_len + t];
    }
    const cplx& tap(std::size_t o, std::size_t i, std::size_t t) const {
        return taps[(o * n_in + i) * tap_len + t];
    }
    std::size_t half() const { return tap_len / 2; }
    void check() const {
        if (tap_len == 0 || tap_len % 2 == 0)
            throw config_error("equalizer tap count must be odd");
        if (n_in == 0 || n_out == 0) throw config_error("equalizer needs lanes");
    }
};

namespace detail {

/* In-place Cholesky of a Hermitian matrix stored row-major; returns false
 * if a pivot collapses. */
struct HermCholesky {
    std::size_t n = 0;
    std::vector<cplx> l;

    bool factor(const std::vector<cplx>& a, std::size_t dim) {
        n = dim;
        l = a;
        for (std::size_t j = 0; j < n; ++j) {
            double d = l[j * n + j].real();
            for (std::size_t k = 0; k < j; ++k) d -= std::norm(l[j * n + k]);
            if (d <= 0.0) return false;
            const double dj = std::sqrt(d);
            l[j * n + j] = dj;
            for (std::size_t i = j + 1; i < n; ++i) {
                cplx s = l[i * n + j];
                for (std::size_t k = 0; k < j; ++k)
                    s -= l[i * n + k] * std::conj(l[j * n + k]);
                l[i * n + j] = s / dj;
            }
        }
        return true;
    }

    void solve(std::vector<cplx>& b) const {
        for (std::size_t i = 0; i < n; ++i) {
            cplx s = b[i];
            for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * b[k];
            b[i] = s / l[i * n + i].real();
        }
        for (std::size_t ii = n; ii-- > 0;) {
            cplx s = b[ii];
            for (std::size_t k = ii + 1; k < n; ++k)
                s -= std::conj(l[k * n + ii]) * b[k];
            b[ii] = s / l[ii * n + ii].real();
        }
    }
};

}  // namespace detail

/* Least-squares tap estimation over a known training span.  inputs and
 * desired are aligned center-for-center; rows are formed at every index
 * in [half, rows_end) where the full regressor fits.  The normal matrix
 * gets a relative ridge, so a rank-deficient regressor (lanes carrying
 * the same signal) still yields the minimum-norm combiner.  A solution
 * that cannot predict at least half the reference power aborts. */
inline EqualizerState ls_init(const std::vector<std::vector<cplx>>& inputs,
                              const std::vector<std::vector<cplx>>& desired,
                              std::size_t tap_len, double mu = 1e-3,
                              EqMode mode = EqMode::burst, double ridge = 1e-8) {
    if (inputs.empty() || desired.empty())
        throw shape_error("equalizer needs input and reference streams");
    const std::size_t len = inputs[0].size();
    for (const auto& s : inputs)
        if (s.size() != len) throw shape_error("input stream lengths differ");
    EqualizerState st;
    st.n_in = inputs.size();
    st.n_out = desired.size();
    st.tap_len = tap_len;
    st.mode = mode;
    st.mu = mu;
    st.check();
    const std::size_t half = st.half();
    const std::size_t dim = st.n_in * tap_len;
    const std::size_t t_len = desired[0].size();
    for (const auto& d : desired)
        if (d.size() != t_len) throw shape_error("reference stream lengths differ");
    if (t_len > len) throw shape_error("reference longer than the input span");
    if (t_len < half + dim) throw shape_error("training span too short for the tap count");

    std::vector<cplx> a(dim * dim, cplx(0.0, 0.0));
    std::vector<std::vector<cplx>> rhs(st.n_out,
                                       std::vector<cplx>(dim, cplx(0.0, 0.0)));
    std::vector<cplx> phi(dim);
    const std::size_t m_end = std::min(t_len, len - half);
    for (std::size_t m = half; m < m_end; ++m) {
        for (std::size_t i = 0; i < st.n_in; ++i)
            for (std::size_t t = 0; t < tap_len; ++t)
                phi[i * tap_len + t] = inputs[i][m + half - t];
        for (std::size_t r = 0; r < dim; ++r) {
            const cplx cr = std::conj(phi[r]);
            for (std::size_t c = 0; c < dim; ++c) a[r * dim + c] += cr * phi[c];
            for (std::size_t o = 0; o < st.n_out; ++o)
                rhs[o][r] += cr * desired[o][m];
        }
    }
    double tr = 0.0;
    for (std::size_t i = 0; i < dim; ++i) tr += a[i * dim + i].real();
    const double lam = ridge * tr / double(dim);
    for (std::size_t i = 0; i < dim; ++i) a[i * dim + i] += lam;

    detail::HermCholesky ch;
    if (!ch.factor(a, dim))
        throw measurement_error("equalizer initialization failed: singular fit");

    st.taps.assign(st.n_out * dim, cplx(0.0, 0.0));
    for (std::size_t o = 0; o < st.n_out; ++o) {
        auto w = rhs[o];
        ch.solve(w);
        for (std::size_t k = 0; k < dim; ++k) st.taps[o * dim + k] = w[k];
    }

    double num = 0.0, den = 1e-300;
    for (std::size_t m = half; m < m_end; ++m) {
        for (std::size_t o = 0; o < st.n_out; ++o) {
            cplx y(0.0, 0.0);
            for (std::size_t i = 0; i < st.n_in; ++i)
                for (std::size_t t = 0; t < tap_len; ++t)
                    y += st.tap(o, i, t) * inputs[i][m + half - t];
            num += std::norm(y - desired[o][m]);
            den += std::norm(desired[o][m]);
        }
    }
    st.init_evm_db = 10.0 * std::log10(num / den);
    if (st.init_evm_db > -3.0)
        throw measurement_error("equalizer initialization failed: unpredictive fit");
    st.initialized = true;
    return st;
}

/* One equalizer output vector at center index m, no adaptation. */
inline std::vector<cplx> eq_output(const EqualizerState& st,
                                   const std::vector<std::vector<cplx>>& inputs,
                                   std::size_t m) {
    const std::size_t half = st.half();
    std::vector<cplx> y(st.n_out, cplx(0.0, 0.0));
    for (std::size_t o = 0; o < st.n_out; ++o)
        for (std::size_t i = 0; i < st.n_in; ++i)
            for (std::size_t t = 0; t < st.tap_len; ++t)
                y[o] += st.tap(o, i, t) * inputs[i][m + half - t];
    return y;
}

/* Decision-directed LMS update at center index m against the given
 * decisions (or known symbols).  Returns the pre-update output.  Mean
 * error power growing tenfold between consecutive 1e4-update windows is
 * loss of lock. */
inline std::vector<cplx> dd_lms_step(EqualizerState& st,
                                     const std::vector<std::vector<cplx>>& inputs,
                                     std::size_t m,
                                     const std::vector<cplx>& decisions) {
    if (!st.initialized && st.mode == EqMode::burst)
        throw config_error("burst equalizer updated before initialization");
    if (decisions.size() != st.n_out)
        throw shape_error("one decision per equalizer output required");
    const std::size_t half = st.half();
    auto y = eq_output(st, inputs, m);
    double ep = 0.0;
    for (std::size_t o = 0; o < st.n_out; ++o) {
        const cplx err = decisions[o] - y[o];
        ep += std::norm(err);
        const cplx g = st.mu * err;
        for (std::size_t i = 0; i < st.n_in; ++i)
            for (std::size_t t = 0; t < st.tap_len; ++t)
                st.tap(o, i, t) += g * std::conj(inputs[i][m + half - t]);
    }
    st.update_count++;
    if (!std::isfinite(ep))
        throw lock_error("equalizer error power overflowed; lock lost");
    st.err_acc += ep;
    st.err_cnt++;
    if (st.err_cnt == 10000) {
        const double mean = st.err_acc / double(st.err_cnt);
        if (st.err_prev_window > 0.0 && mean > 10.0 * st.err_prev_window)
            throw lock_error("equalizer error power grew tenfold; lock lost");
        st.err_prev_window = mean;
        st.err_acc = 0.0;
        st.err_cnt = 0;
    }
    return y;
}

namespace detail {

/* Laced-domain pilot lookup: flags and values aligned to output indices. */
struct PilotMap {
    std::vector<std::uint8_t> mask;
    std::vector<cplx> value;

    PilotMap(std::size_t n, const std::vector<std::size_t>* pos,
             const std::vector<cplx>* val)
        : mask(n, 0), value(n, cplx(0.0, 0.0)) {
        if (!pos || !val) return;
        if (pos->size() != val->size())
            throw shape_error("pilot positions and values differ in count");
        for (std::size_t i = 0; i < pos->size(); ++i) {
            if ((*pos)[i] >= n) continue;
            mask[(*pos)[i]] = 1;
            value[(*pos)[i]] = (*val)[i];
        }
    }
};

}  // namespace detail

struct EqRunResult {
    std::vector<cplx> symbols;  // laced payload domain
    EqualizerState state;
};

/* Downstream single-polarization equalizer for the space-time coded
 * stream.  Working on slot pairs u(m) = [r(2m), conj(r(2m+1))] turns the
 * coded channel into an ordinary 2x2 mix, so a standard MIMO FIR solves
 * it and the result is insensitive to the incoming polarization state.
 * The stream must start at the training section; training spans
 * cazac_info.size() slots, payload the next n_payload slots (even), and
 * the stream must extend at least tap_len further slots (guard). */
inline EqRunResult alamouti_equalize(const std::vector<cplx>& stream,
                                     const std::vector<cplx>& cazac_info,
                                     std::size_t n_payload, const ModFormat& fmt,
                                     std::size_t tap_len, double mu,
                                     const std::vector<std::size_t>* pilot_pos = nullptr,
                                     const std::vector<cplx>* pilot_val = nullptr,
                                     EqualizerState* warm = nullptr) {
    const std::size_t k = cazac_info.size();
    if (k == 0 || k % 2 != 0) throw shape_error("training section must pair up");
    if (n_payload % 2 != 0) throw shape_error("space-time payload must pair up");
    if (stream.size() < k + n_payload + tap_len)
        throw shape_error("stream too short for training, payload, and taps");

    const std::size_t m_total = stream.size() / 2;
    std::vector<std::vector<cplx>> u(2, std::vector<cplx>(m_total));
    for (std::size_t m = 0; m < m_total; ++m) {
        u[0][m] = stream[2 * m];
        u[1][m] = std::conj(stream[2 * m + 1]);
    }

    EqRunResult res;
    if (warm && warm->initialized) {
        res.state = *warm;
    } else {
        std::vector<std::vector<cplx>> d(2, std::vector<cplx>(k / 2));
        for (std::size_t m = 0; m < k / 2; ++m) {
            d[0][m] = cazac_info[2 * m];
            d[1][m] = cazac_info[2 * m + 1];
        }
        res.state = ls_init(u, d, tap_len, mu, EqMode::burst);
    }

    const auto pts = constellation_points(fmt);
    const int n_pts = fmt.kind == ModKind::qpsk ? 4 : 16;
    detail::PilotMap pm(n_payload, pilot_pos, pilot_val);
    res.symbols.resize(n_payload);
    const std::size_t half = res.state.half();
    const std::size_t m_begin = k / 2;
    const std::size_t m_end = m_begin + n_payload / 2;
    for (std::size_t m = m_begin; m < m_end; ++m) {
        if (m + half >= m_total) throw shape_error("payload runs past the stream");
        const std::size_t k0 = 2 * (m - m_begin);
        auto y = eq_output(res.state, u, m);
        std::vector<cplx> dec(2);
        for (std::size_t o = 0; o < 2; ++o)
            dec[o] = pm.mask[k0 + o] ? pm.value[k0 + o]
                                     : nearest_point(y[o], pts, n_pts);
        dd_lms_step(res.state, u, m, dec);
        res.symbols[k0] = y[0];
        res.symbols[k0 + 1] = y[1];
    }
    return res;
}

/* Upstream dual-polarization combiner: two received lanes, one real-valued
 * transmit stream, so a 2-in 1-out FIR is enough.  Stream layout mirrors
 * alamouti_equalize but without pairing. */
inline EqRunResult miso_equalize(const std::vector<std::vector<cplx>>& lanes,
                                 const std::vector<cplx>& cazac_ref,
                                 std::size_t n_payload, const ModFormat& fmt,
                                 std::size_t tap_len, double mu,
                                 const std::vector<std::size_t>* pilot_pos = nullptr,
                                 const std::vector<cplx>* pilot_val = nullptr,
                                 EqualizerState* warm = nullptr) {
    if (lanes.empty()) throw shape_error("combiner needs at least one lane");
    const std::size_t k = cazac_ref.size();
    const std::size_t len = lanes[0].size();
    if (k == 0) throw shape_error("empty training section");
    if (len < k + n_payload + tap_len)
        throw shape_error("stream too short for training, payload, and taps");

    EqRunResult res;
    if (warm && warm->initialized) {
        res.state = *warm;
    } else {
        std::vector<std::vector<cplx>> d(1, cazac_ref);
        res.state = ls_init(lanes, d, tap_len, mu, EqMode::burst);
    }

    const auto pts = constellation_points(fmt);
    const int n_pts = fmt.kind == ModKind::qpsk ? 4 : 16;
    detail::PilotMap pm(n_payload, pilot_pos, pilot_val);
    res.symbols.resize(n_payload);
    const std::size_t half = res.state.half();
    for (std::size_t j = 0; j < n_payload; ++j) {
        const std::size_t m = k + j;
        if (m + half >= len) throw shape_error("payload runs past the stream");
        auto y = eq_output(res.state, lanes, m);
        std::vector<cplx> dec(1);
        dec[0] = pm.mask[j] ? pm.value[j] : nearest_point(y[0], pts, n_pts);
        dd_lms_step(res.state, lanes, m, dec);
        res.symbols[j] = y[0];
    }
    return res;
}

}  // namespace cpon
