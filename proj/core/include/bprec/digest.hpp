#pragma once

#include <cstdint>
#include <string_view>

namespace bprec {

// FNV-1a, 64-bit: a stable, platform-independent digest for tagging
// output files with the configuration they came from.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

}  // namespace bprec
