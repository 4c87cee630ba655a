/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "cpon/common.hpp"
#include "cpon/fft.hpp"
#include "cpon/filter.hpp"
#include "cpon/metrics.hpp"
#include "cpon/rng.hpp"
#include "cpon/waveform.hpp"

namespace cpon {

/* Polarization rotation parameters.  The matrix is unitary for any
 * (theta, phi, delta), so total dual-lane power is preserved exactly. */
struct JonesParams {
    double theta = 0.0;
    double phi = 0.0;
    double delta = 0.0;

    std::array<cplx, 4> matrix() const {
        const double c = std::cos(theta), s = std::sin(theta);
        return {c * std::polar(1.0, phi), -s * std::polar(1.0, delta),
                s * std::polar(1.0, -delta), c * std::polar(1.0, -phi)};
    }
    static JonesParams random(Rng& rng) {
        JonesParams j;
        j.theta = rng.uniform() * 2.0 * pi;
        j.phi = rng.uniform() * 2.0 * pi;
        j.delta = rng.uniform() * 2.0 * pi;
        return j;
    }
};

/* Additive complex white Gaussian noise at a per-symbol SNR.  The symbol
 * bandwidth is measured from the signal's own spectrum (total power over
 * plateau density) unless an exact override is supplied; noise variance
 * per lane is P*Fs/(B*snr).  Real-valued inputs receive complex noise too
 * (optical noise carries both quadratures), which clears the real tag. */
inline Waveform apply_awgn(const Waveform& w, double snr_db, std::uint64_t seed,
                           double b_sym_hz = 0.0) {
    w.check();
    if (std::isinf(snr_db) && snr_db > 0.0) return w;
    const double p = w.power();
    if (p <= 0.0) throw measurement_error("zero-power input to apply_awgn");
    const double b = b_sym_hz > 0.0 ? b_sym_hz : estimate_symbol_bandwidth(w);
    const double snr = db_to_lin(snr_db);
    const double sigma2 = p * w.sample_rate / (b * snr);
    const double sigma = std::sqrt(sigma2);
    Waveform out = w;
    for (std::size_t l = 0; l < w.n_lanes(); ++l) {
        Rng rng(derive_seed(seed, {0xAE, l}));
        for (auto& x : out.lanes[l]) x += sigma * rng.cgaussian();
    }
    out.real_valued = false;
    return out;
}

/* Constant frequency offset. */
inline Waveform apply_cfo(const Waveform& w, double cfo_hz,
                          double band_edge_hz = 0.0) {
    w.check();
    if (std::abs(cfo_hz) + band_edge_hz >= w.sample_rate / 2.0)
        throw config_error("frequency offset pushes the band past Nyquist");
    return mix(w, cfo_hz);
}

/* Wiener-process laser phase noise, common to both lanes (one laser).
 * Increment variance 2*pi*linewidth/Fs per sample. */
inline Waveform apply_phase_noise(const Waveform& w, double linewidth_hz,
                                  std::uint64_t seed) {
    w.check();
    if (linewidth_hz < 0.0) throw config_error("negative linewidth");
    if (linewidth_hz == 0.0) return w;
    Waveform out = w;
    Rng rng(derive_seed(seed, {0x9F}));
    const double step = std::sqrt(2.0 * pi * linewidth_hz / w.sample_rate);
    double phase = 0.0;
    for (std::size_t n = 0; n < w.size(); ++n) {
        const cplx rot = std::polar(1.0, phase);
        for (auto& lane : out.lanes) lane[n] *= rot;
        phase += step * rng.gaussian();
    }
    out.real_valued = false;
    return out;
}

/* Per-sample Jones rotation of the two polarization lanes. */
inline Waveform apply_sop(const Waveform& w, const JonesParams& jones) {
    w.check();
    if (w.n_lanes() != 2) throw shape_error("polarization rotation needs 2 lanes");
    const auto u = jones.matrix();
    Waveform out = w;
    for (std::size_t n = 0; n < w.size(); ++n) {
        const cplx x = w.lanes[0][n], y = w.lanes[1][n];
        out.lanes[0][n] = u[0] * x + u[1] * y;
        out.lanes[1][n] = u[2] * x + u[3] * y;
    }
    out.real_valued = false;
    return out;
}

/* Static sampling-phase offset plus linear sample-clock drift: output
 * sample n is the input read at n*(1+ppm*1e-6) + offset. */
inline Waveform apply_timing(const Waveform& w, double timing_offset_s,
                             double clock_ppm) {
    w.check();
    if (timing_offset_s == 0.0 && clock_ppm == 0.0) return w;
    const double shift0 = timing_offset_s * w.sample_rate;
    const double rate = 1.0 + clock_ppm * 1e-6;
    Waveform out = w;
    for (std::size_t l = 0; l < w.n_lanes(); ++l)
        for (std::size_t n = 0; n < w.size(); ++n)
            out.lanes[l][n] =
                detail::sinc_interp(w.lanes[l], double(n) * rate + shift0);
    const double excursion =
        std::abs(shift0) + std::abs(rate - 1.0) * double(w.size());
    const std::size_t margin =
        static_cast<std::size_t>(std::ceil(excursion)) + detail::kInterpHalf + 1;
    out.shrink_valid(margin, margin);
    if (w.real_valued) {
        for (auto& lane : out.lanes)
            for (auto& x : lane) x = cplx(x.real(), 0.0);
    }
    return out;
}

/* All-pass quadratic spectral phase of accumulated dispersion.
 * cd_ps_nm is D times length in ps/nm; the group delay it spreads is
 * removed from the valid region. */
inline Waveform apply_cd(const Waveform& w, double cd_ps_nm,
                         double wavelength_nm = 1550.0) {
    w.check();
    if (!std::isfinite(cd_ps_nm)) throw config_error("dispersion must be finite");
    if (cd_ps_nm == 0.0) return w;
    const double lambda = wavelength_nm * 1e-9;
    const double d_total = cd_ps_nm * 1e-12 / 1e-9;  // s/m
    const double c0 = 299792458.0;
    const double k = pi * lambda * lambda * d_total / c0;  // phase = -k f^2

    const double f_max = w.sample_rate / 2.0;
    const double tau_max = lambda * lambda * d_total * f_max / c0;
    // Fresnel tails of the chirp kernel decay slowly past the group-delay
    // span, so the discarded edge is padded well beyond it.
    const std::size_t spread =
        static_cast<std::size_t>(std::ceil(std::abs(tau_max) * w.sample_rate)) + 64;

    std::size_t n_fft = 1;
    while (n_fft < w.size() + 4 * spread + 64) n_fft <<= 1;
    Waveform out = w;
    for (auto& lane : out.lanes) {
        std::vector<cplx> buf(n_fft, cplx(0.0, 0.0));
        std::copy(lane.begin(), lane.end(), buf.begin());
        fft_inplace(buf, false);
        for (std::size_t i = 0; i < n_fft; ++i) {
            const double f = bin_freq(i, n_fft, w.sample_rate);
            buf[i] *= std::polar(1.0, -k * f * f);
        }
        fft_inplace(buf, true);
        std::copy(buf.begin(), buf.begin() + lane.size(), lane.begin());
    }
    out.shrink_valid(spread, spread);
    out.real_valued = false;
    return out;
}

/* Unmodulated carrier leaking into the off period of a burst.  The on
 * region [on_begin, on_end) is untouched; everything outside gains a DC
 * term at laser_power/extinction. */
inline Waveform apply_dc_leakage(const Waveform& w, double extinction_db,
                                 double laser_power, std::size_t on_begin,
                                 std::size_t on_end) {
    w.check();
    if (extinction_db < 0.0) throw config_error("negative extinction ratio");
    if (on_begin >= on_end || on_end > w.size())
        throw shape_error("burst on/off mask is missing or inverted");
    if (std::isinf(extinction_db)) return w;
    const double amp = std::sqrt(laser_power / db_to_lin(extinction_db));
    Waveform out = w;
    for (auto& lane : out.lanes) {
        for (std::size_t n = 0; n < on_begin; ++n) lane[n] += amp;
        for (std::size_t n = on_end; n < lane.size(); ++n) lane[n] += amp;
    }
    return out;
}

/* Heterodyne single-polarization receiver model: one fixed linear
 * combination of the lanes, then the LO offset shift. */
inline Waveform single_pol_project(const Waveform& w, cplx hx, cplx hy,
                                   double het_offset_hz = 0.0) {
    w.check();
    if (w.n_lanes() != 2) throw shape_error("projection needs 2 lanes");
    Waveform out(1, w.size(), w.sample_rate);
    for (std::size_t n = 0; n < w.size(); ++n)
        out.lanes[0][n] = hx * w.lanes[0][n] + hy * w.lanes[1][n];
    out.valid_begin = w.valid_begin;
    out.valid_end = w.valid_end;
    out.center_offset = w.center_offset;
    if (het_offset_hz != 0.0) out = mix(out, het_offset_hz);
    return out;
}

/* Everything the receiver has to undo, in one bag. */
struct ChannelConfig {
    double snr_db = std::numeric_limits<double>::infinity();
    double cfo_hz = 0.0;
    double linewidth_hz = 0.0;
    JonesParams jones{};
    double timing_offset_s = 0.0;
    double clock_ppm = 0.0;
    double cd_ps_nm = 0.0;
    double wavelength_nm = 1550.0;
    double extinction_db = std::numeric_limits<double>::infinity();
    double laser_power = 1.0;
    double b_sym_hz = 0.0;  // exact symbol-bandwidth override for noise scaling
    std::uint64_t seed = 1;

    void validate() const {
        if (std::isnan(snr_db)) throw config_error("snr is not a number");
        if (extinction_db < 0.0) throw config_error("negative extinction ratio");
        if (linewidth_hz < 0.0) throw config_error("negative linewidth");
        if (std::abs(clock_ppm) > 200.0)
            throw config_error("clock drift beyond +/-200 ppm");
    }
};

/* Downstream path: common laser phase noise, fiber dispersion, random
 * polarization rotation, then the ONU's single-polarization heterodyne
 * view (row 0 of the Jones matrix), LO frequency offset, sampling error,
 * and receiver noise. */
inline Waveform apply_channel_downstream(const Waveform& w,
                                         const ChannelConfig& cfg) {
    cfg.validate();
    Waveform v = apply_phase_noise(w, cfg.linewidth_hz, derive_seed(cfg.seed, {1}));
    v = apply_cd(v, cfg.cd_ps_nm, cfg.wavelength_nm);
    const auto u = cfg.jones.matrix();
    v = single_pol_project(v, u[0], u[1]);
    v = apply_cfo(v, cfg.cfo_hz);
    v = apply_timing(v, cfg.timing_offset_s, cfg.clock_ppm);
    if (std::isfinite(cfg.snr_db))
        v = apply_awgn(v, cfg.snr_db, derive_seed(cfg.seed, {2}), cfg.b_sym_hz);
    return v;
}

/* Upstream path: the real burst rides the optical field directly; off-state
 * leakage, dispersion, LO offset, phase noise, sampling error, noise. */
inline Waveform apply_channel_upstream(const Waveform& w,
                                       const ChannelConfig& cfg,
                                       std::size_t on_begin, std::size_t on_end) {
    cfg.validate();
    Waveform v = apply_dc_leakage(w, cfg.extinction_db, cfg.laser_power, on_begin,
                                  on_end);
    v = apply_phase_noise(v, cfg.linewidth_hz, derive_seed(cfg.seed, {1}));
    v = apply_cd(v, cfg.cd_ps_nm, cfg.wavelength_nm);
    v = apply_cfo(v, cfg.cfo_hz);
    v = apply_timing(v, cfg.timing_offset_s, cfg.clock_ppm);
    if (std::isfinite(cfg.snr_db))
        v = apply_awgn(v, cfg.snr_db, derive_seed(cfg.seed, {2}), cfg.b_sym_hz);
    return v;
}

}  // namespace cpon
