#include <catch2/catch_amalgamated.hpp>

#include <cpon/channel.hpp>

using namespace cpon;
using Catch::Approx;

namespace {

Waveform white_wave(std::size_t n_lanes, std::size_t n, double fs,
                    std::uint64_t seed) {
    Waveform w(n_lanes, n, fs);
    Rng rng(seed);
    for (auto& lane : w.lanes)
        for (auto& x : lane) x = rng.cgaussian();
    return w;
}

Waveform tone_wave(std::size_t n, double fs, double f) {
    Waveform w(1, n, fs);
    for (std::size_t i = 0; i < n; ++i)
        w.lanes[0][i] = std::polar(1.0, 2.0 * pi * f * double(i) / fs);
    return w;
}

// Random signal confined below frac of Nyquist by construction, optionally
// with dark edges like a real burst.
Waveform bandlimited_wave(std::size_t n, double fs, double frac,
                          std::uint64_t seed, bool taper) {
    std::vector<cplx> spec(n, cplx(0.0, 0.0));
    Rng rng(seed);
    const std::size_t kmax = std::size_t(frac * double(n) / 2.0);
    for (std::size_t k = 1; k < kmax; ++k) {
        spec[k] = rng.cgaussian();
        spec[n - k] = rng.cgaussian();
    }
    auto x = ifft(spec);
    if (taper) {
        const std::size_t zpad = 512, ramp = 1024;
        for (std::size_t i = 0; i < n; ++i) {
            double g = 1.0;
            if (i < zpad || i >= n - zpad)
                g = 0.0;
            else if (i < zpad + ramp)
                g = 0.5 - 0.5 * std::cos(pi * double(i - zpad) / double(ramp));
            else if (i >= n - zpad - ramp)
                g = 0.5 - 0.5 * std::cos(pi * double(n - zpad - i) / double(ramp));
            x[i] *= g;
        }
    }
    Waveform w(1, n, fs);
    double p = 0.0;
    for (auto& v : x) p += std::norm(v);
    const double g = std::sqrt(double(n) / p);
    for (std::size_t i = 0; i < n; ++i) w.lanes[0][i] = x[i] * g;
    return w;
}

double rms_diff(const Waveform& a, const Waveform& b, std::size_t begin,
                std::size_t end) {
    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t l = 0; l < a.n_lanes(); ++l)
        for (std::size_t i = begin; i < end; ++i) {
            acc += std::norm(a.lanes[l][i] - b.lanes[l][i]);
            ++cnt;
        }
    return std::sqrt(acc / double(cnt));
}

}  // namespace

TEST_CASE("awgn hits the requested noise power on a white signal") {
    const double fs = 1e9;
    Waveform w = white_wave(1, 1 << 16, fs, 11);
    // Spectrally flat input: measured symbol bandwidth is the full rate,
    // so 0 dB SNR adds noise at the signal's own power.
    Waveform y = apply_awgn(w, 0.0, 5);
    double np = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        np += std::norm(y.lanes[0][i] - w.lanes[0][i]);
    np /= double(w.size());
    REQUIRE(np == Approx(w.power()).epsilon(0.02));
}

TEST_CASE("awgn respects an exact bandwidth override") {
    const double fs = 1e9;
    Waveform w = white_wave(2, 1 << 15, fs, 12);
    const double p = w.power();
    Waveform y = apply_awgn(w, 10.0, 6, fs / 2.0);
    double np = 0.0;
    for (std::size_t l = 0; l < 2; ++l)
        for (std::size_t i = 0; i < w.size(); ++i)
            np += std::norm(y.lanes[l][i] - w.lanes[l][i]);
    np /= double(w.size());
    // Per lane p*fs/(b*snr) = p*2/10, both lanes summed.
    REQUIRE(np == Approx(2.0 * p * 2.0 / 10.0).epsilon(0.02));
}

TEST_CASE("awgn edge cases") {
    Waveform w = white_wave(1, 4096, 1e9, 13);
    const double inf = std::numeric_limits<double>::infinity();
    Waveform same = apply_awgn(w, inf, 3);
    REQUIRE(rms_diff(same, w, 0, w.size()) == 0.0);

    Waveform z(1, 1024, 1e9);
    REQUIRE_THROWS_AS(apply_awgn(z, 10.0, 3), measurement_error);

    Waveform a = apply_awgn(w, 6.0, 77);
    Waveform b = apply_awgn(w, 6.0, 77);
    REQUIRE(rms_diff(a, b, 0, w.size()) == 0.0);
    Waveform c = apply_awgn(w, 6.0, 78);
    REQUIRE(rms_diff(a, c, 0, w.size()) > 0.0);
}

TEST_CASE("cfo shifts are exactly invertible") {
    Waveform w = white_wave(1, 8192, 1e9, 21);
    Waveform y = apply_cfo(apply_cfo(w, 12.34e6), -12.34e6);
    REQUIRE(rms_diff(y, w, 0, w.size()) < 1e-9);
    REQUIRE(rms_diff(apply_cfo(w, 0.0), w, 0, w.size()) == 0.0);
}

TEST_CASE("cfo past nyquist is rejected") {
    Waveform w = white_wave(1, 1024, 1e9, 22);
    REQUIRE_THROWS_AS(apply_cfo(w, 0.6e9), config_error);
    REQUIRE_THROWS_AS(apply_cfo(w, 0.4e9, 0.2e9), config_error);
    REQUIRE_NOTHROW(apply_cfo(w, 0.4e9, 0.05e9));
}

TEST_CASE("phase noise increments follow the linewidth") {
    const double fs = 1e9, lw = 1e6;
    const std::size_t n = 200000;
    Waveform w(1, n, fs);
    for (auto& x : w.lanes[0]) x = cplx(1.0, 0.0);
    Waveform y = apply_phase_noise(w, lw, 33);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double d = std::arg(y.lanes[0][i + 1] * std::conj(y.lanes[0][i]));
        s += d;
        s2 += d * d;
    }
    const double m = s / double(n - 1);
    const double var = s2 / double(n - 1) - m * m;
    REQUIRE(var == Approx(2.0 * pi * lw / fs).epsilon(0.05));
}

TEST_CASE("phase noise is common to both lanes") {
    Waveform w = white_wave(2, 4096, 1e9, 34);
    Waveform y = apply_phase_noise(w, 5e6, 9);
    for (std::size_t i = 0; i < w.size(); ++i) {
        cplx r0 = y.lanes[0][i] / w.lanes[0][i];
        cplx r1 = y.lanes[1][i] / w.lanes[1][i];
        REQUIRE(std::abs(r0 - r1) < 1e-9);
        REQUIRE(std::abs(std::abs(r0) - 1.0) < 1e-9);
    }
    REQUIRE(rms_diff(apply_phase_noise(w, 0.0, 9), w, 0, w.size()) == 0.0);
}

TEST_CASE("polarization rotation preserves total power") {
    Waveform w = white_wave(2, 16384, 1e9, 41);
    Rng rng(42);
    for (int t = 0; t < 8; ++t) {
        JonesParams j = JonesParams::random(rng);
        Waveform y = apply_sop(w, j);
        REQUIRE(y.power() == Approx(w.power()).margin(1e-12));
    }
}

TEST_CASE("quarter-turn rotation swaps the lanes") {
    Waveform w = white_wave(2, 2048, 1e9, 43);
    Waveform y = apply_sop(w, JonesParams{pi / 2.0, 0.0, 0.0});
    for (std::size_t i = 0; i < w.size(); ++i) {
        REQUIRE(std::abs(y.lanes[0][i] + w.lanes[1][i]) < 1e-12);
        REQUIRE(std::abs(y.lanes[1][i] - w.lanes[0][i]) < 1e-12);
    }
}

TEST_CASE("rotation round-trips and rejects single-lane input") {
    Waveform w = white_wave(2, 4096, 1e9, 44);
    JonesParams j{0.7, 1.1, 0.0};
    Waveform y = apply_sop(apply_sop(w, j), JonesParams{-j.theta, -j.phi, 0.0});
    REQUIRE(rms_diff(y, w, 0, w.size()) < 1e-12);

    Waveform one = white_wave(1, 256, 1e9, 45);
    REQUIRE_THROWS_AS(apply_sop(one, j), shape_error);
}

TEST_CASE("static timing offset delays a tone by the right amount") {
    const double fs = 1e9, f = 0.11e9;
    Waveform w = tone_wave(20000, fs, f);
    const double tau = 3.5 / fs;
    Waveform y = apply_timing(w, tau, 0.0);
    for (std::size_t i = y.valid_begin; i < y.valid_end; i += 97) {
        cplx want = std::polar(1.0, 2.0 * pi * f * (double(i) + 3.5) / fs);
        REQUIRE(std::abs(y.lanes[0][i] - want) < 1e-6);
    }
    REQUIRE(rms_diff(apply_timing(w, 0.0, 0.0), w, 0, w.size()) == 0.0);
}

TEST_CASE("clock drift accumulates ppm times elapsed samples") {
    const double fs = 1e9, f = 0.07e9, ppm = 50.0;
    const std::size_t n = 1000000;
    Waveform w = tone_wave(n, fs, f);
    Waveform y = apply_timing(w, 0.0, ppm);
    // At sample n the read position has drifted by n*50e-6 samples.
    const std::size_t probe = n - 200;
    REQUIRE(probe < y.valid_end);
    cplx want = std::polar(
        1.0, 2.0 * pi * f * double(probe) * (1.0 + ppm * 1e-6) / fs);
    const double drift_err =
        std::abs(std::arg(y.lanes[0][probe] * std::conj(want))) /
        (2.0 * pi * f / fs);
    REQUIRE(drift_err < 0.5);
}

TEST_CASE("timing is invertible within interpolation accuracy") {
    Waveform w = bandlimited_wave(1 << 16, 1e9, 0.7, 51, false);
    const double tau = 2.75 / 1e9, ppm = 80.0;
    Waveform fwd = apply_timing(w, tau, ppm);
    const double rate = 1.0 + ppm * 1e-6;
    Waveform back =
        apply_timing(fwd, -tau / rate, (1.0 / rate - 1.0) * 1e6);
    const std::size_t b = back.valid_begin, e = back.valid_end;
    REQUIRE(e > b + 1000);
    REQUIRE(rms_diff(back, w, b, e) / std::sqrt(w.power()) < 1e-6);
}

TEST_CASE("dispersion is all-pass and invertible") {
    Waveform w = bandlimited_wave(1 << 15, 75e9, 0.7, 61, true);
    Waveform y = apply_cd(w, 340.0);
    double ein = 0.0, eout = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        ein += std::norm(w.lanes[0][i]);
        eout += std::norm(y.lanes[0][i]);
    }
    REQUIRE(eout == Approx(ein).epsilon(1e-9));
    Waveform back = apply_cd(y, -340.0);
    const std::size_t b = back.valid_begin, e = back.valid_end;
    REQUIRE(e > b + 1000);
    REQUIRE(rms_diff(back, w, b, e) / std::sqrt(w.power()) < 1e-6);
    REQUIRE(rms_diff(apply_cd(w, 0.0), w, 0, w.size()) == 0.0);
}

TEST_CASE("dispersion commutes with gain") {
    Waveform w = white_wave(1, 8192, 75e9, 62);
    Waveform a = apply_cd(scale(w, 3.7), 120.0);
    Waveform b = scale(apply_cd(w, 120.0), 3.7);
    REQUIRE(rms_diff(a, b, a.valid_begin, a.valid_end) < 1e-9);
}

TEST_CASE("off-period leakage carries the extinction-ratio power") {
    const std::size_t n = 8192, on_b = 2048, on_e = 6144;
    Waveform w(1, n, 1e9);
    Rng rng(71);
    for (std::size_t i = on_b; i < on_e; ++i) w.lanes[0][i] = rng.cgaussian();
    Waveform y = apply_dc_leakage(w, 20.0, 1.0, on_b, on_e);
    double off_p = 0.0;
    for (std::size_t i = 0; i < on_b; ++i) off_p += std::norm(y.lanes[0][i]);
    off_p /= double(on_b);
    REQUIRE(off_p == Approx(0.01).epsilon(0.01));
    for (std::size_t i = on_b; i < on_e; ++i)
        REQUIRE(y.lanes[0][i] == w.lanes[0][i]);
}

TEST_CASE("leakage mask and extinction edge cases") {
    Waveform w = white_wave(1, 1024, 1e9, 72);
    REQUIRE_THROWS_AS(apply_dc_leakage(w, 20.0, 1.0, 600, 600), shape_error);
    REQUIRE_THROWS_AS(apply_dc_leakage(w, 20.0, 1.0, 600, 2000), shape_error);
    REQUIRE_THROWS_AS(apply_dc_leakage(w, -3.0, 1.0, 0, 1024), config_error);
    const double inf = std::numeric_limits<double>::infinity();
    Waveform y = apply_dc_leakage(w, inf, 1.0, 100, 900);
    REQUIRE(rms_diff(y, w, 0, w.size()) == 0.0);
}

TEST_CASE("single-polarization projection selects and combines lanes") {
    Waveform w = white_wave(2, 4096, 1e9, 81);
    Waveform px = single_pol_project(w, cplx(1, 0), cplx(0, 0));
    Waveform py = single_pol_project(w, cplx(0, 0), cplx(1, 0));
    for (std::size_t i = 0; i < w.size(); ++i) {
        REQUIRE(px.lanes[0][i] == w.lanes[0][i]);
        REQUIRE(py.lanes[0][i] == w.lanes[1][i]);
    }
    const cplx hx = std::polar(0.6, 0.3), hy = std::polar(0.8, -1.2);
    Waveform pm = single_pol_project(w, hx, hy, 5e6);
    Waveform ref = mix(single_pol_project(w, hx, hy), 5e6);
    REQUIRE(rms_diff(pm, ref, 0, w.size()) < 1e-12);
    REQUIRE_THROWS_AS(single_pol_project(px, hx, hy), shape_error);
}

TEST_CASE("composite downstream path is deterministic") {
    Waveform w = white_wave(2, 16384, 75e9, 91);
    ChannelConfig cfg;
    cfg.snr_db = 15.0;
    cfg.cfo_hz = 200e6;
    cfg.linewidth_hz = 1e6;
    cfg.jones = JonesParams{0.4, 0.9, 0.2};
    cfg.timing_offset_s = 0.3 / 75e9;
    cfg.cd_ps_nm = 40.0;
    cfg.seed = 7;
    Waveform a = apply_channel_downstream(w, cfg);
    Waveform b = apply_channel_downstream(w, cfg);
    REQUIRE(a.n_lanes() == 1);
    REQUIRE(rms_diff(a, b, 0, a.size()) == 0.0);

    cfg.seed = 8;
    Waveform c = apply_channel_downstream(w, cfg);
    REQUIRE(rms_diff(a, c, 0, a.size()) > 0.0);
}

TEST_CASE("clean composite path reduces to lane selection") {
    Waveform w = white_wave(2, 4096, 75e9, 92);
    ChannelConfig cfg;  // all impairments at neutral defaults
    Waveform y = apply_channel_downstream(w, cfg);
    for (std::size_t i = 0; i < w.size(); ++i)
        REQUIRE(std::abs(y.lanes[0][i] - w.lanes[0][i]) < 1e-12);
}

TEST_CASE("channel config validation") {
    ChannelConfig cfg;
    cfg.clock_ppm = 300.0;
    REQUIRE_THROWS_AS(cfg.validate(), config_error);
    cfg.clock_ppm = 0.0;
    cfg.extinction_db = -1.0;
    REQUIRE_THROWS_AS(cfg.validate(), config_error);
}
