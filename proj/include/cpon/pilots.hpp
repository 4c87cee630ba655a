/** (C) 2026 cpon contributors / Apache-2.0 - see LICENSE file. */
#pragma once

#include <vector>

#include "cpon/common.hpp"

namespace cpon {

/* One pilot ahead of every group of M payload symbols (last group may be
 * short), so pilot i sits at index i*(M+1).  The pilot sequence repeats
 * cyclically if more pilots are needed than supplied. */
inline std::vector<cplx> insert_pilots(const std::vector<cplx>& payload,
                                       std::size_t M,
                                       const std::vector<cplx>& pilot_seq) {
    if (M == 0) throw config_error("pilot period must be positive");
    if (payload.empty()) return {};
    if (pilot_seq.empty()) throw config_error("empty pilot sequence");
    const std::size_t n_pilots = (payload.size() + M - 1) / M;
    std::vector<cplx> out;
    out.reserve(payload.size() + n_pilots);
    std::size_t src = 0;
    for (std::size_t p = 0; p < n_pilots; ++p) {
        out.push_back(pilot_seq[p % pilot_seq.size()]);
        for (std::size_t k = 0; k < M && src < payload.size(); ++k)
            out.push_back(payload[src++]);
    }
    return out;
}

/* Inverse of insert_pilots for any payload length. */
inline std::vector<cplx> strip_pilots(const std::vector<cplx>& stream,
                                      std::size_t M) {
    if (M == 0) throw config_error("pilot period must be positive");
    std::vector<cplx> out;
    out.reserve(stream.size());
    std::size_t i = 0;
    while (i < stream.size()) {
        ++i;  // pilot
        for (std::size_t k = 0; k < M && i < stream.size(); ++k)
            out.push_back(stream[i++]);
    }
    return out;
}

/* Indices of the pilots inside the combined stream. */
inline std::vector<std::size_t> pilot_positions(std::size_t n_payload,
                                                std::size_t M) {
    if (M == 0) throw config_error("pilot period must be positive");
    const std::size_t n_pilots = (n_payload + M - 1) / M;
    std::vector<std::size_t> pos(n_pilots);
    for (std::size_t p = 0; p < n_pilots; ++p) pos[p] = p * (M + 1);
    return pos;
}

}  // namespace cpon
