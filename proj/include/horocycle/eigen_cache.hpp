#pragma once

#include "horocycle/eigenform.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>

namespace horocycle {

// On-disk eigenvalue table, one file per (k, index):
//
//   line 1   JSON header {"format":"horocycle-lambda","format_version":1,
//            "k":..,"index":..,"N":..,"precision_bits":..}, then '\n'
//   n=1..N   int8 sign | int64 exponent | uint32 byte count | mantissa bytes
//            (big-endian magnitude) | float64 error bound
//   trailer  uint32 CRC-32 (zlib) of every preceding byte
//
// Integers and doubles are little-endian. lambda(n) = sign * mantissa * 2^exponent
// exactly, so a re-read reproduces the written values bit for bit.
inline constexpr int kCacheFormatVersion = 1;

class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CacheHeader {
  int format_version = kCacheFormatVersion;
  int k = 0;
  int index = 0;
  int N = 0;
  int precision_bits = 0;
};

// <dir>/k012_i00.lam
std::filesystem::path cache_file(const std::filesystem::path& dir, int k, int index);

// Writes atomically (temp file + rename).
void write_cache(const std::filesystem::path& path, const Eigenform& f);

// Throws CacheError on a malformed file or checksum mismatch.
Eigenform read_cache(const std::filesystem::path& path);

// Header only; nullopt if the file is missing or the header is unreadable.
std::optional<CacheHeader> peek_cache(const std::filesystem::path& path);

// True when the file exists, its checksum verifies, and it covers N at the
// given precision.
bool cache_valid(const std::filesystem::path& path, int N, int precision_bits);

}  // namespace horocycle
