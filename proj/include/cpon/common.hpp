#pragma once

/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */

#include <complex>
#include <stdexcept>
#include <string>
#include <cmath>
#include <cstdint>
#include <cstddef>

namespace cpon {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Power ratios. db_to_lin(3.0103) ~= 2.
inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

// Invalid parameter combinations (bad specs, plans, ranges).
struct config_error : std::invalid_argument {
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

// Structurally incompatible data (lane mismatch, short input, overflow).
struct shape_error : std::invalid_argument {
    explicit shape_error(const std::string& what) : std::invalid_argument(what) {}
};

// Alignment / synchronization could not be established.
struct sync_error : std::runtime_error {
    explicit sync_error(const std::string& what) : std::runtime_error(what) {}
};

// A quantity needed by an operation could not be measured from the input.
struct measurement_error : std::runtime_error {
    explicit measurement_error(const std::string& what) : std::runtime_error(what) {}
};

// A tracking loop diverged.
struct lock_error : std::runtime_error {
    explicit lock_error(const std::string& what) : std::runtime_error(what) {}
};

inline double wrap_phase(double phi) {
    while (phi > pi) phi -= 2.0 * pi;
    while (phi < -pi) phi += 2.0 * pi;
    return phi;
}

} // namespace cpon
