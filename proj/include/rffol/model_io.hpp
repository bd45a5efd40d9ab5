#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rffol/learner.hpp"

namespace rffol {

// Model file layout, all fields 64-bit little-endian:
//
//   "RFOL" magic, 1 version byte
//   map block:   variant tag, d, D, sigma (f64), seed,
//                frequencies d x D row-major (f64), phases D (f64)
//   model block: mode tag, m, eta_w, eta_u, eta_b (f64),
//                weights m x width row-major (f64)

inline constexpr char kModelMagic[4] = {'R', 'F', 'O', 'L'};
inline constexpr std::uint8_t kModelVersion = 1;

std::vector<std::uint8_t> encode_model(const OnlineModel& model);
/// Throws DataError on a truncated, oversized or inconsistent buffer.
OnlineModel decode_model(const std::vector<std::uint8_t>& bytes);

void write_model(std::ostream& out, const OnlineModel& model);
OnlineModel read_model(std::istream& in);

void save_model(const std::string& path, const OnlineModel& model);
OnlineModel load_model(const std::string& path);

}  // namespace rffol
