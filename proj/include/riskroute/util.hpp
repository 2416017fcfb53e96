#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace riskroute {

/// 64-bit FNV-1a. Used for content fingerprints and RNG substream keys.
constexpr std::uint64_t fnv1a64(std::string_view text,
                                std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value);

std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

/// Strict decimal parse ('.' separator, whole field must be consumed).
/// Throws DataError mentioning `what` on failure.
double parse_number(std::string_view field, std::string_view what);
std::uint64_t parse_count(std::string_view field, std::string_view what);

/// Fixed-point rendering with `decimals` places; never uses locale.
std::string fixed(double value, int decimals);

/// Shortest text that round-trips to the same double.
std::string exact(double value);

}  // namespace riskroute
