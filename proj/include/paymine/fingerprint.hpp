#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "paymine/app_ir.hpp"
#include "paymine/bitvec.hpp"
#include "paymine/hash.hpp"

namespace paymine {

struct FingerprintConfig {
  std::uint32_t n = 2;              // gram size
  std::uint32_t bits = 8'388'608;   // fingerprint width in bit positions (1024 KB)

  void validate() const {
    if (n < 1) throw std::invalid_argument("gram size must be >= 1");
    if (bits < 1) throw std::invalid_argument("fingerprint width must be >= 1");
  }
};

/// Reverse map kept per app during feature hashing: bit index -> every
/// feature tuple that landed on it. Needed to walk from mined bits back to
/// source instructions.
using FeatureBitMap = std::map<std::uint32_t, std::vector<FeatureTuple>>;

inline std::uint32_t bit_index(std::string_view content, const FingerprintConfig& cfg) {
  cfg.validate();
  return static_cast<std::uint32_t>(djb2(content) % cfg.bits);
}

struct FingerprintResult {
  BitFingerprint fingerprint;
  FeatureBitMap feature_map;
};

inline FingerprintResult build_fingerprint(const std::vector<NGramFeature>& features,
                                           const FingerprintConfig& cfg) {
  cfg.validate();
  FingerprintResult out;
  out.fingerprint = BitFingerprint(cfg.bits);
  for (const NGramFeature& f : features) {
    std::uint32_t bit = static_cast<std::uint32_t>(djb2(f.content) % cfg.bits);
    out.fingerprint.set(bit);
    out.feature_map[bit].push_back(f.location);
  }
  return out;
}

/// Features and fingerprint in one go; the common per-app path.
inline FingerprintResult fingerprint_app(const AppIR& app, const FingerprintConfig& cfg) {
  return build_fingerprint(extract_ngram_features(app, cfg.n), cfg);
}

}  // namespace paymine
