#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "paymine/bitvec.hpp"

namespace paymine {

// A candidate payload: the intersection of two app fingerprints. The pair of
// source apps rides along so later stages can recover which apps produced it.
struct CandidatePayload {
  std::string payload_id;   // "<appA>\t<appB>" with appA < appB
  std::array<std::string, 2> apps;
  BitFingerprint fingerprint;
};

inline std::string candidate_payload_id(const std::string& a, const std::string& b) {
  return a <= b ? a + "\t" + b : b + "\t" + a;
}

// Extracts one candidate per unordered pair of apps whose intersection has at
// least `min_bits` set bits. Needs at least two apps. Output is ordered by
// payload id (i.e. by the sorted app pair), which is deterministic because the
// input map iterates in key order.
inline std::vector<CandidatePayload> extract_candidates(
    const std::map<std::string, BitFingerprint>& apps, std::uint64_t min_bits = 1) {
  if (apps.size() < 2) {
    throw std::invalid_argument("extract_candidates: need at least two apps, got " +
                                std::to_string(apps.size()));
  }
  std::vector<CandidatePayload> candidates;
  for (auto a = apps.begin(); a != apps.end(); ++a) {
    auto b = a;
    for (++b; b != apps.end(); ++b) {
      BitFingerprint inter = intersect(a->second, b->second);
      if (inter.popcount() < min_bits) continue;
      CandidatePayload cand;
      cand.apps = {a->first, b->first};
      cand.payload_id = candidate_payload_id(a->first, b->first);
      cand.fingerprint = std::move(inter);
      candidates.push_back(std::move(cand));
    }
  }
  return candidates;
}

}  // namespace paymine
