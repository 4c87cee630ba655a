/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cpon/common.hpp"
#include "cpon/constellation.hpp"

namespace cpon {

enum class Direction { downstream, upstream };
enum class CapPosition { inner, outer };

struct Subcarrier {
    double center_hz = 0.0;
    double baud = 12.5e9;
    bool active = true;
    ModFormat format = ModFormat::qpsk();
};

/* Frequency plan for one direction.  Downstream carriers are complex
 * (dual lane); upstream carriers ride a real-valued signal, so each one
 * also occupies its mirror image at -center_hz. */
struct SubcarrierPlan {
    Direction direction = Direction::downstream;
    std::vector<Subcarrier> subcarriers;
    double rolloff = 0.1;      // excess bandwidth used for occupancy checks
    double guard_hz = 1e9;     // upstream: total guard band straddling DC

    /* Five carriers fill the band; the middle one stays dark so the
     * receiver can sit a heterodyne LO there.  Spacing leaves room for
     * the rolloff so neighbours abut without overlapping. */
    static SubcarrierPlan downstream_default(ModFormat fmt = ModFormat::qpsk()) {
        SubcarrierPlan p;
        p.direction = Direction::downstream;
        const double baud = 12.5e9;
        const double spacing = (1.0 + p.rolloff) * baud;
        for (int k = -2; k <= 2; ++k) {
            Subcarrier sc;
            sc.center_hz = k * spacing;
            sc.baud = baud;
            sc.active = (k != 0);
            sc.format = fmt;
            p.subcarriers.push_back(sc);
        }
        return p;
    }

    /* Two real-valued carriers per burst, inner and outer, placed clear of
     * the DC guard band. */
    static SubcarrierPlan upstream_default(ModFormat fmt = ModFormat::qpsk()) {
        SubcarrierPlan p;
        p.direction = Direction::upstream;
        const double baud = 6.25e9;
        Subcarrier inner;
        inner.center_hz = p.guard_hz / 2.0 + 3.5e9;
        inner.baud = baud;
        inner.format = fmt;
        Subcarrier outer;
        outer.center_hz = p.guard_hz / 2.0 + 10.5e9;
        outer.baud = baud;
        outer.format = fmt;
        p.subcarriers = {inner, outer};
        return p;
    }

    const Subcarrier& at(CapPosition pos) const {
        if (direction != Direction::upstream || subcarriers.size() < 2)
            throw config_error("inner/outer positions need an upstream plan");
        return subcarriers[pos == CapPosition::inner ? 0 : 1];
    }

    std::vector<std::size_t> active_indices() const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < subcarriers.size(); ++i)
            if (subcarriers[i].active) idx.push_back(i);
        return idx;
    }

    /* Information rate over all active carriers, bits per second.  The
     * space-time code halves throughput relative to dual-polarization
     * capacity but still delivers one information symbol per slot. */
    double aggregate_bits_per_s() const {
        double r = 0.0;
        for (const auto& sc : subcarriers)
            if (sc.active) r += sc.baud * sc.format.entropy_bits;
        return r;
    }

    void validate() const {
        if (subcarriers.empty()) throw config_error("empty subcarrier plan");
        if (!(rolloff > 0.0 && rolloff < 1.0))
            throw config_error("plan rolloff out of range");
        for (const auto& sc : subcarriers) {
            if (!(sc.baud > 0.0)) throw config_error("non-positive baud");
            sc.format.check();
        }
        const double eps = 1.0;  // 1 Hz slack for exactly abutting bands
        struct Band {
            double lo, hi;
        };
        std::vector<Band> bands;
        for (const auto& sc : subcarriers) {
            if (!sc.active) continue;
            const double half = 0.5 * (1.0 + rolloff) * sc.baud;
            if (direction == Direction::upstream) {
                // Real signal: band must clear the DC guard, and the mirror
                // image at -center participates in overlap checks.
                if (sc.center_hz - half < guard_hz / 2.0 - eps)
                    throw config_error("carrier too close to DC for the rolloff");
                bands.push_back({sc.center_hz - half, sc.center_hz + half});
                bands.push_back({-sc.center_hz - half, -sc.center_hz + half});
            } else {
                bands.push_back({sc.center_hz - half, sc.center_hz + half});
            }
        }
        for (std::size_t a = 0; a < bands.size(); ++a)
            for (std::size_t b = a + 1; b < bands.size(); ++b) {
                const double lo = std::max(bands[a].lo, bands[b].lo);
                const double hi = std::min(bands[a].hi, bands[b].hi);
                if (hi - lo > eps)
                    throw config_error("subcarrier bands overlap");
            }
    }
};

}  // namespace cpon
