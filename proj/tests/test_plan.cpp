/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#include <catch2/catch_amalgamated.hpp>

#include "cpon/plan.hpp"

using namespace cpon;

TEST_CASE("downstream default: five carriers, dark center, no overlap") {
    const auto p = SubcarrierPlan::downstream_default();
    REQUIRE_NOTHROW(p.validate());
    REQUIRE(p.subcarriers.size() == 5);
    CHECK_FALSE(p.subcarriers[2].active);
    CHECK(p.subcarriers[2].center_hz == 0.0);
    CHECK(p.active_indices() == std::vector<std::size_t>{0, 1, 3, 4});
    // Symmetric grid, uniform spacing wide enough for the rolloff skirts.
    const double spacing =
        p.subcarriers[1].center_hz - p.subcarriers[0].center_hz;
    CHECK(spacing == Catch::Approx((1.0 + p.rolloff) * 12.5e9));
    for (std::size_t i = 1; i < 5; ++i)
        CHECK(p.subcarriers[i].center_hz - p.subcarriers[i - 1].center_hz ==
              Catch::Approx(spacing));
    CHECK(p.subcarriers[0].center_hz == Catch::Approx(-2.0 * spacing));
}

TEST_CASE("aggregate information rate tracks format and carrier count") {
    CHECK(SubcarrierPlan::downstream_default(ModFormat::qam16()).aggregate_bits_per_s() ==
          Catch::Approx(200e9));
    CHECK(SubcarrierPlan::downstream_default(ModFormat::pcs(3.0)).aggregate_bits_per_s() ==
          Catch::Approx(150e9));
    CHECK(SubcarrierPlan::downstream_default(ModFormat::qpsk()).aggregate_bits_per_s() ==
          Catch::Approx(100e9));
    CHECK(SubcarrierPlan::upstream_default().aggregate_bits_per_s() ==
          Catch::Approx(25e9));
}

TEST_CASE("upstream default clears the DC guard on both positions") {
    const auto p = SubcarrierPlan::upstream_default();
    REQUIRE_NOTHROW(p.validate());
    REQUIRE(p.subcarriers.size() == 2);
    CHECK(p.at(CapPosition::inner).center_hz == Catch::Approx(4.0e9));
    CHECK(p.at(CapPosition::outer).center_hz == Catch::Approx(11.0e9));
    for (const auto& sc : p.subcarriers) {
        const double lo = sc.center_hz - 0.5 * (1.0 + p.rolloff) * sc.baud;
        CHECK(lo >= p.guard_hz / 2.0 - 1.0);
    }
}

TEST_CASE("overlapping carriers are rejected, abutting ones pass") {
    SubcarrierPlan p;
    p.direction = Direction::downstream;
    p.subcarriers = {{0.0, 12.5e9, true, ModFormat::qpsk()},
                     {12.5e9, 12.5e9, true, ModFormat::qpsk()}};
    CHECK_THROWS_AS(p.validate(), config_error);  // skirts collide at beta=0.1
    p.subcarriers[1].center_hz = (1.0 + p.rolloff) * 12.5e9;
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("real-signal carriers must respect the DC guard band") {
    SubcarrierPlan p;
    p.direction = Direction::upstream;
    p.subcarriers = {{3.0e9, 6.25e9, true, ModFormat::qpsk()}};
    // Band spans 3 +/- 3.4375 GHz: reaches through DC.
    CHECK_THROWS_AS(p.validate(), config_error);
    p.subcarriers[0].center_hz = 4.0e9;
    CHECK_NOTHROW(p.validate());
    // Shrinking the guard is not enough if bands themselves collide.
    p.subcarriers.push_back({10.0e9, 6.25e9, true, ModFormat::qpsk()});
    CHECK_THROWS_AS(p.validate(), config_error);  // 4+3.4375 > 10-3.4375
    p.subcarriers[1].center_hz = 11.0e9;
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("degenerate plans are rejected") {
    SubcarrierPlan p;
    CHECK_THROWS_AS(p.validate(), config_error);  // empty
    p = SubcarrierPlan::downstream_default();
    p.rolloff = 1.5;
    CHECK_THROWS_AS(p.validate(), config_error);
    p = SubcarrierPlan::downstream_default();
    p.subcarriers[0].baud = 0.0;
    CHECK_THROWS_AS(p.validate(), config_error);
    p = SubcarrierPlan::downstream_default();
    p.subcarriers[1].format.entropy_bits = 7.0;
    CHECK_THROWS_AS(p.validate(), config_error);
    CHECK_THROWS_AS(SubcarrierPlan::downstream_default().at(CapPosition::inner),
                    config_error);
}
