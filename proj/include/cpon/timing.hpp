/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cpon/common.hpp"
#include "cpon/filter.hpp"
#include "cpon/waveform.hpp"

namespace cpon {

/* Band-edge timing error from an N-point spectrum taken at sps samples
 * per symbol: e = sum Im[S_k * conj(S_{k+(1-1/sps)N})] over the rolloff
 * window k in [(1-beta)N/(2 sps), (1+beta)N/(2 sps)].  Both window bounds
 * and the partner offset must land on integers for the chosen N. */
inline double godard_error(const std::vector<cplx>& s, double beta,
                           std::size_t sps) {
    const std::size_t n = s.size();
    if (n == 0 || sps < 2) throw config_error("spectrum empty or sps < 2");
    const double lo_f = (1.0 - beta) * double(n) / (2.0 * double(sps));
    const double hi_f = (1.0 + beta) * double(n) / (2.0 * double(sps));
    const double off_f = (1.0 - 1.0 / double(sps)) * double(n);
    auto near_int = [](double v) { return std::abs(v - std::round(v)) < 1e-9; };
    if (!near_int(lo_f) || !near_int(hi_f) || !near_int(off_f))
        throw config_error("band-edge window bounds must be integers; pick N "
                           "so (1 +/- beta)N/(2 sps) lands on whole bins");
    const std::size_t lo = std::size_t(std::llround(lo_f));
    const std::size_t hi = std::size_t(std::llround(hi_f));
    const std::size_t off = std::size_t(std::llround(off_f));
    double e = 0.0;
    for (std::size_t k = lo; k <= hi; ++k)
        e += std::imag(s[k % n] * std::conj(s[(k + off) % n]));
    return e;
}

namespace detail {

/* Band-edge bins only, straight from the definition; the loop needs a
 * handful of bins of a non-power-of-two block, not a full transform. */
struct BandEdge {
    std::size_t lo, hi, off;
    std::vector<cplx> tw;  // exp(-j 2 pi k i / n) rows for k in [lo..hi] and partners
    double slope = 1.0;    // d(error)/d(tau) at tau = 0, symbol periods

    BandEdge(std::size_t n, double beta, std::size_t sps) {
        const double lo_f = (1.0 - beta) * double(n) / (2.0 * double(sps));
        const double hi_f = (1.0 + beta) * double(n) / (2.0 * double(sps));
        const double off_f = (1.0 - 1.0 / double(sps)) * double(n);
        if (std::abs(off_f - std::round(off_f)) > 1e-9)
            throw config_error("band-edge partner offset must be an integer");
        // window edges truncate to whole bins; the slope below absorbs that
        lo = std::size_t(std::ceil(lo_f - 1e-9));
        hi = std::size_t(std::floor(hi_f + 1e-9));
        if (lo > hi) throw config_error("block too short for the rolloff window");
        off = std::size_t(std::llround(off_f));
        const std::size_t rows = 2 * (hi - lo + 1);
        tw.resize(rows * n);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t k =
                (r < rows / 2) ? (lo + r) % n : (lo + r - rows / 2 + off) % n;
            for (std::size_t i = 0; i < n; ++i)
                tw[r * n + i] =
                    std::polar(1.0, -2.0 * pi * double(k) * double(i) / double(n));
        }

        // For a raised-cosine edge the normalized error is
        // rho sin(2 pi tau) with rho = sum(H H') / sum(H^2 + H'^2) over
        // the window pairs, so the small-offset slope is 2 pi rho.
        auto rc = [&](double f) {
            const double af = std::abs(f);
            if (af <= (1.0 - beta) / 2.0) return 1.0;
            if (af >= (1.0 + beta) / 2.0) return 0.0;
            return 0.5 * (1.0 + std::cos(pi / beta * (af - (1.0 - beta) / 2.0)));
        };
        double num = 0.0, den = 1e-30;
        for (std::size_t k = lo; k <= hi; ++k) {
            const double h = rc(bin_freq(k % n, n, double(sps)));
            const double hp = rc(bin_freq((k + off) % n, n, double(sps)));
            num += h * hp;
            den += h * h + hp * hp;
        }
        slope = 2.0 * pi * num / den;
    }

    // Normalized band-edge correlation.  The imaginary part is the
    // timing error, rho sin(2 pi tau); the real part is the lock
    // indicator, rho cos(2 pi tau), positive at lock and negative at
    // the anti-lock point half a symbol away.
    cplx correlation(const std::vector<cplx>& block) const {
        const std::size_t n = block.size();
        const std::size_t rows = tw.size() / n;
        const std::size_t half = rows / 2;
        cplx c(0.0, 0.0);
        double energy = 1e-30;
        for (std::size_t r = 0; r < half; ++r) {
            cplx a(0.0, 0.0), b(0.0, 0.0);
            const cplx* ta = &tw[r * n];
            const cplx* tb = &tw[(r + half) * n];
            for (std::size_t i = 0; i < n; ++i) {
                a += block[i] * ta[i];
                b += block[i] * tb[i];
            }
            c += a * std::conj(b);
            energy += std::norm(a) + std::norm(b);
        }
        return c / energy;
    }

    double error(const std::vector<cplx>& block) const {
        return std::imag(correlation(block));
    }
};

}  // namespace detail

struct TimingConfig {
    bool burst = false;
    double tau0_s = 0.0;        // NCO seed, burst mode only
    bool use_tau0 = false;
    std::size_t n_block = 320;  // spectrum block length at 2 samples/symbol
    double beta = 0.1;
    double loop_bw = 2e-4;      // normalized per-symbol tracking bandwidth;
                                // narrow enough that detector pattern noise
                                // stays off the recovered grid
    double acq_bw = 5e-4;       // burst acquisition bandwidth until the
                                // preamble ends
    std::size_t acq_block = 160;  // shorter acquisition block; the wider
                                  // bandwidth needs a faster update rate to
                                  // keep its margin over the transport delay
    std::size_t acq_symbols = 2000;
    double lock_floor = 0.1;    // minimum windowed lock indicator; the
                                // indicator reads near 1 at lock
};

struct TimingResult {
    Waveform out;                     // one sample per symbol, all lanes retimed
    std::vector<double> block_errors;  // detected grid lateness per block,
                                       // symbol periods
    std::vector<double> block_locks;   // lock indicator per block, near 1 at lock
    std::vector<std::size_t> block_starts;  // output symbol index per block
    double final_rate = 1.0;          // steady-state step in nominal units
};

/* Closed-loop timing recovery: an interpolating NCO resamples the matched
 * filter output onto a 2-sample-per-symbol grid, a band-edge detector
 * measures the residual phase per block, and a proportional-integral
 * filter steers the NCO.  Burst mode seeds the NCO from the tone-derived
 * sampling phase.  The windowed lock indicator staying below its floor
 * means the loop is parked between symbol instants or the stream has no
 * band-edge correlation to steer by; either raises loss of lock. */
inline TimingResult timing_recovery(const Waveform& w, double baud,
                                    const TimingConfig& cfg) {
    w.check();
    if (baud <= 0.0) throw config_error("baud must be positive");
    const double sps_in = w.sample_rate / baud;
    if (sps_in < 1.5) throw config_error("timing recovery needs >= 1.5 samples/symbol");
    detail::BandEdge be_trk(cfg.n_block, cfg.beta, 2);
    detail::BandEdge be_acq(cfg.burst ? cfg.acq_block : cfg.n_block, cfg.beta, 2);

    // Per-block 2nd-order loop gains.  ctrl is a rate held for a whole
    // block, so the plant integrates ctrl times n/2 symbols per update.
    // ctrl computed from one block applies to the next, and that
    // transport delay eats phase margin; the per-block bandwidth must
    // stay well under a radian, which is why acquisition runs on a
    // shorter block instead of just a hotter gain.
    auto gains = [&](double bw, const detail::BandEdge& be, std::size_t n,
                     double& kp, double& ki) {
        const double sym_per_block = double(n) / 2.0;
        const double plant = be.slope * sym_per_block;
        const double bn = 2.0 * pi * bw * sym_per_block;  // rad per block
        const double zeta = 0.7071;
        const double th = bn / (zeta + 0.25 / zeta);
        const double den = 1.0 + 2.0 * zeta * th + th * th;
        kp = 4.0 * zeta * th / (den * plant);
        ki = 4.0 * th * th / (den * plant);
    };
    double kp_a, ki_a, kp_t, ki_t;
    gains(cfg.acq_bw, be_acq, cfg.acq_block, kp_a, ki_a);
    gains(cfg.loop_bw, be_trk, cfg.n_block, kp_t, ki_t);
    bool in_acq = cfg.burst;

    const std::size_t n_lanes = w.n_lanes();
    const double nominal = sps_in / 2.0;  // input samples per half-symbol
    // tau0_s is the measured grid lateness, so the NCO starts that much
    // earlier; whole-symbol shifts are free.
    double pos = (cfg.burst && cfg.use_tau0) ? -cfg.tau0_s * w.sample_rate : 0.0;
    if (pos < 0.0) pos += std::ceil(-pos / sps_in) * sps_in;
    double integ = 0.0, ctrl = 0.0;

    TimingResult res;
    res.out = Waveform(n_lanes, 0, baud);
    res.out.real_valued = false;

    std::vector<std::vector<cplx>> block(
        n_lanes, std::vector<cplx>(std::max(cfg.n_block, cfg.acq_block)));
    const std::size_t win_blocks = 8;
    const std::size_t grace_windows = 3;  // room for acquisition to pull through
    double win_lock = 0.0;
    std::size_t win_count = 0, windows_done = 0, low_windows = 0;
    std::size_t out_symbols = 0;

    const double margin = double(detail::kInterpHalf + 2);
    for (;;) {
        const std::size_t n = in_acq ? cfg.acq_block : cfg.n_block;
        const detail::BandEdge& be = in_acq ? be_acq : be_trk;
        const double kp = in_acq ? kp_a : kp_t;
        const double ki = in_acq ? ki_a : ki_t;
        if (pos + double(n) * nominal * 1.25 + margin >= double(w.size())) break;
        double p = pos;
        const double step = nominal * (1.0 + ctrl);
        for (std::size_t l = 0; l < n_lanes; ++l) block[l].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t l = 0; l < n_lanes; ++l)
                block[l][i] = detail::sinc_interp(w.lanes[l], p);
            p += step;
        }
        cplx c(0.0, 0.0);
        for (std::size_t l = 0; l < n_lanes; ++l) c += be.correlation(block[l]);
        c /= double(n_lanes);
        const double rho = be.slope / (2.0 * pi);
        const double e = std::imag(c);
        res.block_errors.push_back(e / be.slope);
        res.block_locks.push_back(std::real(c) / rho);
        res.block_starts.push_back(out_symbols);

        // Positive e means the grid samples late, so the loop slows down.
        integ -= ki * e;
        ctrl = -kp * e + integ;
        if (ctrl > 0.2) ctrl = 0.2;
        if (ctrl < -0.2) ctrl = -0.2;
        pos = p;

        for (std::size_t i = 0; i < n; i += 2) {
            for (std::size_t l = 0; l < n_lanes; ++l)
                res.out.lanes[l].push_back(block[l][i]);
        }
        out_symbols += n / 2;
        if (in_acq && out_symbols >= cfg.acq_symbols) {
            in_acq = false;
            win_lock = 0.0;  // keep phases out of one monitor window
            win_count = 0;
        }

        // The floor check arms once tracking starts; acquisition wanders
        // too much for its lock reading to mean anything yet.
        if (!in_acq) {
            win_lock += std::real(c) / rho;
            if (++win_count == win_blocks) {
                win_lock /= double(win_blocks);
                if (++windows_done > grace_windows && win_lock < cfg.lock_floor)
                    ++low_windows;
                else
                    low_windows = 0;
                if (low_windows >= 2)
                    throw lock_error("timing lock indicator under floor; lock lost");
                win_lock = 0.0;
                win_count = 0;
            }
        }
    }
    if (res.out.size() == 0) throw shape_error("input too short for one timing block");
    res.out.valid_end = res.out.size();
    // the integrator holds the rate memory; the last ctrl sample would
    // add one block of proportional noise on top
    res.final_rate = 1.0 + integ;
    return res;
}

}  // namespace cpon
