#pragma once

// Binary policy checkpoint.
//
//   bytes 0..7   magic "TMIRSGFN"
//   u32          format version (1)
//   u64          metadata length L
//   L bytes      metadata, JSON text; must hold "dims"
//   f64 * P      for each layer: weights row-major (fan_in x fan_out), then
//                biases; logz last
//   u64          FNV-1a 64 of every preceding byte
//
// All integers and floats are little-endian.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>

#include <json.hpp>

#include "tmirs/nn.hpp"

namespace tmirs {

inline constexpr std::string_view kCheckpointMagic = "TMIRSGFN";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nn::PolicyParams params;
  nlohmann::json metadata;
};

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::string_view text);

// Writes params; metadata["dims"] is overwritten with params.dims.
void save_checkpoint(std::ostream& out, const nn::PolicyParams& params, nlohmann::json metadata);
void save_checkpoint(const std::filesystem::path& path, const nn::PolicyParams& params, nlohmann::json metadata);

// Throws std::runtime_error on bad magic, version, truncation or checksum.
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace tmirs
