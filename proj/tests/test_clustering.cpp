#include "paymine/clustering.hpp"

#include <gtest/gtest.h>

#include <string>
#include <utility>
#include <vector>

#include "paymine/bitvec.hpp"

namespace {

using namespace paymine;

BitFingerprint make(std::uint32_t width, std::uint32_t first, std::uint32_t count) {
  BitFingerprint fp(width);
  for (std::uint32_t b = first; b < first + count; ++b) fp.set(b);
  return fp;
}

using Matrix = std::vector<std::vector<double>>;

std::vector<std::vector<std::size_t>> run_hac(const Matrix& m, double theta,
                                              Linkage linkage) {
  ClusteringConfig cfg;
  cfg.theta = theta;
  cfg.linkage = linkage;
  auto sim = [&](std::size_t i, std::size_t j) { return m[i][j]; };
  return hac(m.size(), sim, cfg);
}

TEST(Hac, SingleLinkageChains) {
  // A-B 0.9, B-C 0.9, A-C 0.1: single linkage at 0.85 chains all three.
  const Matrix m = {{1.0, 0.9, 0.1}, {0.9, 1.0, 0.9}, {0.1, 0.9, 1.0}};
  const auto clusters = run_hac(m, 0.85, Linkage::single);
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_EQ(clusters[0], (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Hac, AverageLinkageBreaksWeakChains) {
  // Same graph: average linkage merges A,B (0.9), but sim({A,B},C) =
  // (0.1+0.9)/2 = 0.5 < 0.85, so C stays out.
  const Matrix m = {{1.0, 0.9, 0.1}, {0.9, 1.0, 0.9}, {0.1, 0.9, 1.0}};
  const auto clusters = run_hac(m, 0.85, Linkage::average);
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0], (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(clusters[1], (std::vector<std::size_t>{2}));
}

TEST(Hac, AverageLinkageLanceWilliamsUpdate) {
  // A-B 0.9 merges first; then sim({A,B},C) = (0.7+0.9)/2 = 0.8 >= 0.78
  // merges C too. At theta 0.81 the second merge must NOT happen.
  const Matrix m = {{1.0, 0.9, 0.7}, {0.9, 1.0, 0.9}, {0.7, 0.9, 1.0}};
  EXPECT_EQ(run_hac(m, 0.78, Linkage::average).size(), 1u);
  EXPECT_EQ(run_hac(m, 0.81, Linkage::average).size(), 2u);
}

TEST(Hac, ThresholdBoundaryIsInclusive) {
  const Matrix m = {{1.0, 0.85}, {0.85, 1.0}};
  EXPECT_EQ(run_hac(m, 0.85, Linkage::single).size(), 1u);
  EXPECT_EQ(run_hac(m, 0.8500001, Linkage::single).size(), 2u);
  EXPECT_EQ(run_hac(m, 0.85, Linkage::average).size(), 1u);
}

TEST(Hac, ThetaOneGroupsExactDuplicatesOnly) {
  const Matrix m = {{1.0, 1.0, 0.99}, {1.0, 1.0, 0.99}, {0.99, 0.99, 1.0}};
  const auto clusters = run_hac(m, 1.0, Linkage::single);
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0], (std::vector<std::size_t>{0, 1}));
}

TEST(Hac, ThetaZeroMergesEverything) {
  const Matrix m = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  EXPECT_EQ(run_hac(m, 0.0, Linkage::single).size(), 1u);
  EXPECT_EQ(run_hac(m, 0.0, Linkage::average).size(), 1u);
}

TEST(Hac, HigherThetaNeverMergesMore) {
  // Monotonicity: raising theta can only split clusters (single linkage is a
  // connectivity cut).
  const Matrix m = {{1.0, 0.9, 0.2, 0.1},
                    {0.9, 1.0, 0.86, 0.1},
                    {0.2, 0.86, 1.0, 0.8},
                    {0.1, 0.1, 0.8, 1.0}};
  std::size_t prev = run_hac(m, 0.0, Linkage::single).size();
  for (double theta : {0.5, 0.81, 0.87, 0.95, 1.0}) {
    const std::size_t count = run_hac(m, theta, Linkage::single).size();
    EXPECT_GE(count, prev) << "theta=" << theta;
    prev = count;
  }
}

TEST(Hac, EmptyAndSingletonInputs) {
  ClusteringConfig cfg;
  auto sim = [](std::size_t, std::size_t) { return 0.0; };
  EXPECT_TRUE(hac(0, sim, cfg).empty());
  const auto one = hac(1, sim, cfg);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], std::vector<std::size_t>{0});
}

TEST(Hac, InvalidThetaThrows) {
  ClusteringConfig cfg;
  cfg.theta = 1.5;
  auto sim = [](std::size_t, std::size_t) { return 0.0; };
  EXPECT_THROW(hac(2, sim, cfg), std::invalid_argument);
  cfg.theta = -0.1;
  EXPECT_THROW(hac(2, sim, cfg), std::invalid_argument);
}

TEST(ClusterFingerprints, GroupsByExactJaccard) {
  // Two tight groups far apart: {a1, a2} overlap 95/105 ~ 0.905,
  // {b1, b2} likewise; cross-group similarity 0.
  std::vector<std::pair<std::string, BitFingerprint>> items;
  items.emplace_back("a1", make(4096, 0, 100));
  items.emplace_back("a2", make(4096, 5, 100));    // shares 95 of 105
  items.emplace_back("b1", make(4096, 2000, 100));
  items.emplace_back("b2", make(4096, 2005, 100));
  ClusteringConfig cfg;
  cfg.theta = 0.85;
  const PayloadClusterSet clusters = cluster_fingerprints(items, cfg);
  ASSERT_EQ(clusters.clusters.size(), 2u);
  EXPECT_EQ(clusters.clusters[0], (std::vector<std::string>{"a1", "a2"}));
  EXPECT_EQ(clusters.clusters[1], (std::vector<std::string>{"b1", "b2"}));
}

TEST(ClusterFingerprints, ThetaOneGroupsIdenticalFingerprints) {
  std::vector<std::pair<std::string, BitFingerprint>> items;
  items.emplace_back("x", make(1024, 0, 50));
  items.emplace_back("y", make(1024, 0, 50));
  items.emplace_back("z", make(1024, 0, 51));  // one extra bit
  ClusteringConfig cfg;
  cfg.theta = 1.0;
  const PayloadClusterSet clusters = cluster_fingerprints(items, cfg);
  ASSERT_EQ(clusters.clusters.size(), 2u);
  EXPECT_EQ(clusters.clusters[0], (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(clusters.clusters[1], (std::vector<std::string>{"z"}));
}

TEST(ClusterFingerprints, EmptyFingerprintsClusterTogether) {
  // jaccard(empty, empty) == 1.0 by convention.
  std::vector<std::pair<std::string, BitFingerprint>> items;
  items.emplace_back("e1", BitFingerprint(256));
  items.emplace_back("e2", BitFingerprint(256));
  ClusteringConfig cfg;
  cfg.theta = 0.85;
  const PayloadClusterSet clusters = cluster_fingerprints(items, cfg);
  ASSERT_EQ(clusters.clusters.size(), 1u);
}

TEST(ClusterFingerprints, OutputOrderIsCanonical) {
  // Clusters sorted by smallest member id, members sorted within.
  std::vector<std::pair<std::string, BitFingerprint>> items;
  items.emplace_back("zz", make(1024, 500, 20));
  items.emplace_back("aa", make(1024, 0, 20));
  items.emplace_back("mm", make(1024, 0, 20));  // identical to aa
  ClusteringConfig cfg;
  cfg.theta = 0.9;
  const PayloadClusterSet clusters = cluster_fingerprints(items, cfg);
  ASSERT_EQ(clusters.clusters.size(), 2u);
  EXPECT_EQ(clusters.clusters[0], (std::vector<std::string>{"aa", "mm"}));
  EXPECT_EQ(clusters.clusters[1], (std::vector<std::string>{"zz"}));
}

TEST(ClusterIntersection, IntersectsAllMembers) {
  std::vector<std::pair<std::string, BitFingerprint>> items;
  items.emplace_back("a", make(1024, 0, 100));   // bits 0..99
  items.emplace_back("b", make(1024, 10, 100));  // bits 10..109
  items.emplace_back("c", make(1024, 20, 100));  // bits 20..119
  const BitFingerprint inter = cluster_intersection(items, {0, 1, 2});
  EXPECT_EQ(inter, make(1024, 20, 80));  // bits 20..99
  EXPECT_THROW(cluster_intersection(items, {}), std::invalid_argument);
}

TEST(Hac, DeterministicAcrossRepeats) {
  std::vector<std::pair<std::string, BitFingerprint>> items;
  for (int i = 0; i < 30; ++i) {
    items.emplace_back("it" + std::to_string(i),
                       make(4096, static_cast<std::uint32_t>((i % 5) * 300), 100));
  }
  ClusteringConfig cfg;
  cfg.theta = 0.85;
  const PayloadClusterSet first = cluster_fingerprints(items, cfg);
  for (int r = 0; r < 3; ++r) {
    EXPECT_EQ(cluster_fingerprints(items, cfg), first);
  }
  EXPECT_EQ(first.clusters.size(), 5u);
}

}  // namespace
