#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "paymine/bitvec.hpp"
#include "paymine/clustering.hpp"
#include "paymine/hash.hpp"

namespace paymine {

struct MinHashConfig {
  std::uint32_t k = 256;
  std::uint64_t seed = 0;

  void validate() const {
    if (k == 0) throw std::invalid_argument("MinHashConfig: k must be positive");
  }
};

struct MinHashSignature {
  std::vector<std::uint32_t> values;

  bool operator==(const MinHashSignature&) const = default;
};

// The k per-permutation salts are the low 32 bits of successive mt19937_64
// draws, so a seed fully determines the hash family.
inline std::vector<std::uint32_t> minhash_salts(const MinHashConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::vector<std::uint32_t> salts(config.k);
  for (std::uint32_t i = 0; i < config.k; ++i) {
    salts[i] = static_cast<std::uint32_t>(rng() & 0xffffffffu);
  }
  return salts;
}

// Signature of a fingerprint under the salted FNV-1a family: for each set bit
// b, base = FNV-1a-32 of the four little-endian bytes of b, and permutation i
// scores base XOR salt[i]; the signature keeps the minimum per permutation.
inline MinHashSignature minhash_signature(const BitFingerprint& fingerprint,
                                          const std::vector<std::uint32_t>& salts) {
  if (salts.empty()) throw std::invalid_argument("minhash_signature: no salts");
  if (!fingerprint.any()) {
    throw std::domain_error("minhash_signature: fingerprint has no set bits");
  }
  MinHashSignature sig;
  sig.values.assign(salts.size(), 0xffffffffu);
  fingerprint.for_each_set_bit([&](std::uint32_t bit) {
    const std::uint32_t base = fnv1a32_index(bit);
    for (std::size_t i = 0; i < salts.size(); ++i) {
      const std::uint32_t h = base ^ salts[i];
      if (h < sig.values[i]) sig.values[i] = h;
    }
  });
  return sig;
}

inline MinHashSignature minhash_signature(const BitFingerprint& fingerprint,
                                          const MinHashConfig& config) {
  return minhash_signature(fingerprint, minhash_salts(config));
}

// Fraction of positions where the two signatures agree; an unbiased estimator
// of the Jaccard similarity of the underlying sets.
inline double signature_similarity(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.values.size() != b.values.size()) {
    throw std::invalid_argument("signature_similarity: signature length mismatch (" +
                                std::to_string(a.values.size()) + " vs " +
                                std::to_string(b.values.size()) + ")");
  }
  if (a.values.empty()) {
    throw std::invalid_argument("signature_similarity: empty signatures");
  }
  std::size_t equal = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i] == b.values[i]) ++equal;
  }
  return static_cast<double>(equal) / static_cast<double>(a.values.size());
}

// Clusters items by estimated similarity of their minHash signatures.
inline PayloadClusterSet cluster_signatures(
    const std::vector<std::pair<std::string, MinHashSignature>>& items,
    const ClusteringConfig& config) {
  std::vector<std::string> ids;
  ids.reserve(items.size());
  for (const auto& [id, sig] : items) ids.push_back(id);
  auto sim = [&](std::size_t i, std::size_t j) {
    return signature_similarity(items[i].second, items[j].second);
  };
  return detail::index_clusters_to_ids(hac(items.size(), sim, config), ids);
}

}  // namespace paymine
