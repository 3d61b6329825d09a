#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace paymine {

// djb2, additive variant: h = h * 33 + c over a 64-bit accumulator.
// Feature contents are hashed with this and reduced modulo the
// fingerprint width elsewhere; keeping the full 64 bits here avoids
// truncating before the reduction.
constexpr std::uint64_t djb2(std::string_view bytes) noexcept {
  std::uint64_t h = 5381;
  for (char c : bytes) {
    h = h * 33u + static_cast<unsigned char>(c);
  }
  return h;
}

// FNV-1a, 32-bit (offset basis 2166136261, prime 16777619).
constexpr std::uint32_t fnv1a32(std::string_view bytes) noexcept {
  std::uint32_t h = 2166136261u;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 16777619u;
  }
  return h;
}

// FNV-1a over the 4 little-endian bytes of a bit index.
constexpr std::uint32_t fnv1a32_index(std::uint32_t index) noexcept {
  std::uint32_t h = 2166136261u;
  for (int shift = 0; shift < 32; shift += 8) {
    h ^= (index >> shift) & 0xffu;
    h *= 16777619u;
  }
  return h;
}

}  // namespace paymine
