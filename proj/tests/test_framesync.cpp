#include <catch2/catch_amalgamated.hpp>

#include <cpon/framesync.hpp>
#include <cpon/framing.hpp>
#include <cpon/rng.hpp>

using namespace cpon;
using Catch::Approx;

namespace {

// Random unit QPSK padding | sync section | more padding.
std::vector<cplx> embedded_stream(std::size_t L, std::size_t reps,
                                  std::size_t lead, std::size_t tail,
                                  std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cplx> r;
    auto pad = [&](std::size_t n) {
        for (std::size_t i = 0; i < n; ++i)
            r.push_back(std::polar(1.0, pi / 4.0 + pi / 2.0 * double(rng.next_u64() & 3)));
    };
    pad(lead);
    const auto sync = sync_section(L, reps, 0x11u);
    r.insert(r.end(), sync.begin(), sync.end());
    pad(tail);
    return r;
}

std::vector<cplx> repeated_blocks(std::size_t L, double cycles_per_sym,
                                  std::uint64_t seed, double noise = 0.0) {
    // three identical 2L-symbol units rotating under a frequency offset
    Rng rng(seed);
    std::vector<cplx> unit(2 * L);
    for (auto& u : unit)
        u = std::polar(1.0, pi / 4.0 + pi / 2.0 * double(rng.next_u64() & 3));
    std::vector<cplx> r;
    for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t i = 0; i < 2 * L; ++i) {
            const double n_sym = double(b * 2 * L + i);
            cplx v = unit[i] * std::polar(1.0, 2.0 * pi * cycles_per_sym * n_sym);
            if (noise > 0.0) v += noise * rng.cgaussian();
            r.push_back(v);
        }
    return r;
}

}  // namespace

TEST_CASE("aligned sync hits the unit metric on all five lags") {
    const std::size_t L = 10, lead = 137;
    auto r = embedded_stream(L, 3, lead, 60, 3);
    const auto pn = pn_sequence(L);
    auto res = frame_sync(r, pn, L);
    REQUIRE(res.position == lead);
    REQUIRE(res.peaks.size() == 5);
    for (double p : res.peaks) REQUIRE(p == Approx(1.0).margin(1e-12));
    REQUIRE(res.metric_peak == Approx(5.0).margin(1e-9));
}

TEST_CASE("sync is blind to complex gain and slow rotation") {
    const std::size_t L = 10, lead = 71;
    auto r = embedded_stream(L, 3, lead, 45, 5);
    const cplx g = std::polar(3.7, 1.2);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] *= g * std::polar(1.0, 2.0 * pi * 1e-3 * double(i));
    auto res = frame_sync(r, pn_sequence(L), L);
    REQUIRE(res.position == lead);
    REQUIRE(res.metric_peak > 4.9);
}

TEST_CASE("noisy bursts still lock nearly always") {
    const std::size_t L = 10;
    const double sigma = std::sqrt(std::pow(10.0, -0.5));  // SNR 5 dB
    int correct = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const std::size_t lead = 40 + std::size_t(s % 97);
        auto r = embedded_stream(L, 3, lead, 50, 1000 + s);
        Rng noise(2000 + s);
        for (auto& x : r) x += sigma * noise.cgaussian();
        try {
            if (frame_sync(r, pn_sequence(L), L).position == lead) ++correct;
        } catch (const sync_error&) {
        }
    }
    // the ten-symbol window is information limited near 5 dB; a receiver
    // wanting more combines lanes or refines against the known preamble
    REQUIRE(correct >= 190);
}

TEST_CASE("averaging the metric over two lanes tightens the lock") {
    const std::size_t L = 10;
    const double sigma = std::sqrt(std::pow(10.0, -0.5));  // SNR 5 dB
    int correct = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const std::size_t lead = 40 + std::size_t(s % 97);
        std::vector<std::vector<cplx>> lanes{
            embedded_stream(L, 3, lead, 50, 3000 + s),
            embedded_stream(L, 3, lead, 50, 4000 + s)};
        Rng noise(5000 + s);
        for (auto& lane : lanes)
            for (auto& x : lane) x += sigma * noise.cgaussian();
        try {
            if (frame_sync(lanes, pn_sequence(L), L).position == lead) ++correct;
        } catch (const sync_error&) {
        }
    }
    REQUIRE(correct >= 198);
}

TEST_CASE("noise without a frame stays below threshold") {
    Rng rng(9);
    std::vector<cplx> r(400);
    for (auto& x : r) x = rng.cgaussian();
    REQUIRE_THROWS_AS(frame_sync(r, pn_sequence(10), 10), sync_error);
}

TEST_CASE("sync argument shapes are enforced") {
    std::vector<cplx> r(200, cplx(1.0, 0.0));
    REQUIRE_THROWS_AS(frame_sync(r, pn_sequence(9), 10), shape_error);
    REQUIRE_THROWS_AS(frame_sync(r, pn_sequence(10), 10, 2.0, 1), config_error);
    std::vector<cplx> tiny(30, cplx(1.0, 0.0));
    REQUIRE_THROWS_AS(frame_sync(tiny, pn_sequence(10), 10), shape_error);
}

TEST_CASE("repeated units measure a frequency offset to the hertz") {
    const std::size_t L = 10;
    const double baud = 8e9;  // range +/- 200 MHz
    for (double f : {0.0, 50e6, -120e6, 199e6}) {
        auto r = repeated_blocks(L, f / baud, 21);
        std::vector<cplx> b1(r.begin(), r.begin() + 2 * L);
        std::vector<cplx> b2(r.begin() + 2 * L, r.begin() + 4 * L);
        std::vector<cplx> b3(r.begin() + 4 * L, r.end());
        auto est = fine_foe(b1, b2, b3, L, baud);
        REQUIRE(est.hz == Approx(f).margin(1.0));
        REQUIRE(est.near_edge == (std::abs(f) > 0.95 * 200e6));
    }
}

TEST_CASE("offsets past the range alias and flag the edge first") {
    const std::size_t L = 10;
    const double baud = 8e9;
    auto r = repeated_blocks(L, 250e6 / baud, 33);
    std::vector<cplx> b1(r.begin(), r.begin() + 2 * L);
    std::vector<cplx> b2(r.begin() + 2 * L, r.begin() + 4 * L);
    std::vector<cplx> b3(r.begin() + 4 * L, r.end());
    auto est = fine_foe(b1, b2, b3, L, baud);
    REQUIRE(est.hz == Approx(250e6 - 400e6).margin(1.0));  // wrapped
    auto near = repeated_blocks(L, 196e6 / baud, 34);
    std::vector<cplx> c1(near.begin(), near.begin() + 2 * L);
    std::vector<cplx> c2(near.begin() + 2 * L, near.begin() + 4 * L);
    std::vector<cplx> c3(near.begin() + 4 * L, near.end());
    REQUIRE(fine_foe(c1, c2, c3, L, baud).near_edge);
}

TEST_CASE("noisy offset estimates stay within megahertz accuracy") {
    const std::size_t L = 10;
    const double baud = 8e9;
    const double sigma = std::sqrt(0.1);  // SNR 10 dB
    Rng trial(55);
    double acc = 0.0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        const double f = (trial.uniform() - 0.5) * 300e6;
        auto r = repeated_blocks(L, f / baud, 5000 + std::uint64_t(t), sigma);
        std::vector<cplx> b1(r.begin(), r.begin() + 2 * L);
        std::vector<cplx> b2(r.begin() + 2 * L, r.begin() + 4 * L);
        std::vector<cplx> b3(r.begin() + 4 * L, r.end());
        const double err = fine_foe(b1, b2, b3, L, baud).hz - f;
        acc += err * err;
    }
    // two-lag averaging leaves sqrt(2 L sigma^2) / (4 L) radians of
    // phase noise, 2.25 MHz at this SNR; the bound leaves trial slack
    REQUIRE(std::sqrt(acc / trials) < 2.5e6);
}

TEST_CASE("fine offset block shapes are enforced") {
    std::vector<cplx> a(20), b(20), c(19);
    REQUIRE_THROWS_AS(fine_foe(a, b, c, 10, 8e9), shape_error);
    REQUIRE_THROWS_AS(fine_foe(a, b, b, 10, 0.0), config_error);
}
