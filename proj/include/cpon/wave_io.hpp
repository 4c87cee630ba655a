#pragma once

/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "common.hpp"
#include "waveform.hpp"

namespace cpon {

// Fixture file format: 32-byte header
//   magic "CPONWAVE" (8) | lanes u8 | real_flag u8 | reserved (6) |
//   sample_rate f64 LE | length u64 LE
// followed by float32 LE samples, interleaved (re, im) per lane per sample.
namespace wave_io_detail {

inline void put_u64(unsigned char* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = (unsigned char)((v >> (8 * i)) & 0xff);
}
inline std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
    return v;
}
inline void put_f64(unsigned char* p, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    put_u64(p, v);
}
inline double get_f64(const unsigned char* p) {
    std::uint64_t v = get_u64(p);
    double d;
    std::memcpy(&d, &v, 8);
    return d;
}
inline void put_f32(unsigned char* p, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    for (int i = 0; i < 4; ++i) p[i] = (unsigned char)((v >> (8 * i)) & 0xff);
}
inline float get_f32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

} // namespace wave_io_detail

inline void write_wave(const std::string& path, const Waveform& w) {
    w.check();
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw measurement_error("write_wave: cannot open " + path);
    unsigned char hdr[32] = {0};
    std::memcpy(hdr, "CPONWAVE", 8);
    hdr[8] = (unsigned char)w.n_lanes();
    hdr[9] = w.real_valued ? 1 : 0;
    wave_io_detail::put_f64(hdr + 16, w.sample_rate);
    wave_io_detail::put_u64(hdr + 24, w.size());
    std::fwrite(hdr, 1, 32, fp);
    std::vector<unsigned char> buf(w.n_lanes() * 8);
    for (std::size_t i = 0; i < w.size(); ++i) {
        unsigned char* p = buf.data();
        for (std::size_t l = 0; l < w.n_lanes(); ++l) {
            wave_io_detail::put_f32(p, float(w.lanes[l][i].real()));
            wave_io_detail::put_f32(p + 4, float(w.lanes[l][i].imag()));
            p += 8;
        }
        std::fwrite(buf.data(), 1, buf.size(), fp);
    }
    std::fclose(fp);
}

inline Waveform read_wave(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw measurement_error("read_wave: cannot open " + path);
    unsigned char hdr[32];
    if (std::fread(hdr, 1, 32, fp) != 32 || std::memcmp(hdr, "CPONWAVE", 8) != 0) {
        std::fclose(fp);
        throw shape_error("read_wave: bad magic in " + path);
    }
    const std::size_t lanes = hdr[8];
    const bool real_flag = hdr[9] != 0;
    const double fs = wave_io_detail::get_f64(hdr + 16);
    const std::uint64_t n = wave_io_detail::get_u64(hdr + 24);
    if (lanes < 1 || lanes > 2 || fs <= 0.0) {
        std::fclose(fp);
        throw shape_error("read_wave: bad header in " + path);
    }
    Waveform w(lanes, std::size_t(n), fs);
    w.real_valued = real_flag;
    std::vector<unsigned char> buf(lanes * 8);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fread(buf.data(), 1, buf.size(), fp) != buf.size()) {
            std::fclose(fp);
            throw shape_error("read_wave: truncated data in " + path);
        }
        const unsigned char* p = buf.data();
        for (std::size_t l = 0; l < lanes; ++l) {
            w.lanes[l][i] = cplx(wave_io_detail::get_f32(p), wave_io_detail::get_f32(p + 4));
            p += 8;
        }
    }
    std::fclose(fp);
    return w;
}

} // namespace cpon
