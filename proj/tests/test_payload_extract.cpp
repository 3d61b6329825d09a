#include "paymine/payload.hpp"

#include <gtest/gtest.h>

#include <map>
#include <string>

#include "paymine/bitvec.hpp"

namespace {

using namespace paymine;

BitFingerprint make(std::uint32_t width, std::initializer_list<std::uint32_t> bits) {
  BitFingerprint fp(width);
  for (std::uint32_t b : bits) fp.set(b);
  return fp;
}

std::map<std::string, BitFingerprint> shared_base_corpus(int n) {
  // Every app sets bit 0 (shared) plus a private bit, so every pair
  // intersects in exactly one bit.
  std::map<std::string, BitFingerprint> apps;
  for (int i = 0; i < n; ++i) {
    apps.emplace("app" + std::to_string(i),
                 make(256, {0u, static_cast<std::uint32_t>(i + 1)}));
  }
  return apps;
}

TEST(ExtractCandidates, PairCountLaw) {
  for (int n : {2, 5, 20}) {
    const auto candidates = extract_candidates(shared_base_corpus(n), 1);
    EXPECT_EQ(candidates.size(), static_cast<std::size_t>(n * (n - 1) / 2)) << "n=" << n;
  }
}

TEST(ExtractCandidates, FewerThanTwoAppsThrows) {
  std::map<std::string, BitFingerprint> apps;
  EXPECT_THROW(extract_candidates(apps, 1), std::invalid_argument);
  apps.emplace("only", make(64, {1}));
  EXPECT_THROW(extract_candidates(apps, 1), std::invalid_argument);
}

TEST(ExtractCandidates, CandidateIsThePairIntersection) {
  std::map<std::string, BitFingerprint> apps;
  apps.emplace("a", make(128, {1, 2, 3, 64}));
  apps.emplace("b", make(128, {2, 3, 99}));
  const auto candidates = extract_candidates(apps, 1);
  ASSERT_EQ(candidates.size(), 1u);
  EXPECT_EQ(candidates[0].fingerprint, make(128, {2, 3}));
  EXPECT_EQ(candidates[0].apps[0], "a");
  EXPECT_EQ(candidates[0].apps[1], "b");
  EXPECT_EQ(candidates[0].payload_id, "a\tb");
}

TEST(ExtractCandidates, ContainmentInBothParents) {
  const auto apps = shared_base_corpus(6);
  for (const CandidatePayload& cand : extract_candidates(apps, 1)) {
    const auto& fa = apps.at(cand.apps[0]);
    const auto& fb = apps.at(cand.apps[1]);
    // candidate == fa & fb, hence fully contained in both.
    EXPECT_EQ(intersect(cand.fingerprint, fa), cand.fingerprint);
    EXPECT_EQ(intersect(cand.fingerprint, fb), cand.fingerprint);
    EXPECT_DOUBLE_EQ(containment(cand.fingerprint, fa), 1.0);
    EXPECT_DOUBLE_EQ(containment(cand.fingerprint, fb), 1.0);
  }
}

TEST(ExtractCandidates, MinBitsFiltersSmallIntersections) {
  std::map<std::string, BitFingerprint> apps;
  apps.emplace("a", make(128, {1, 2, 3}));
  apps.emplace("b", make(128, {3, 4, 5}));      // shares 1 bit with a
  apps.emplace("c", make(128, {100}));          // shares nothing
  EXPECT_EQ(extract_candidates(apps, 1).size(), 1u);
  EXPECT_EQ(extract_candidates(apps, 2).size(), 0u);

  // min_bits = 0 keeps even empty intersections: all pairs.
  EXPECT_EQ(extract_candidates(apps, 0).size(), 3u);
}

TEST(ExtractCandidates, OutputOrderedByPayloadId) {
  const auto candidates = extract_candidates(shared_base_corpus(5), 1);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    EXPECT_LT(candidates[i - 1].payload_id, candidates[i].payload_id);
  }
}

TEST(CandidatePayloadId, SortsTheAppPair) {
  EXPECT_EQ(candidate_payload_id("b", "a"), "a\tb");
  EXPECT_EQ(candidate_payload_id("a", "b"), "a\tb");
}

}  // namespace
