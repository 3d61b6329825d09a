#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "paymine/bitvec.hpp"
#include "paymine/clustering.hpp"
#include "paymine/rng.hpp"

namespace paymine {

struct PrototypeConfig {
  std::uint32_t group_size = 150;
  double inner_theta = -1.0;  // < 0: reuse the global clustering theta
  std::uint64_t seed = 0;

  void validate() const {
    if (group_size == 0) {
      throw std::invalid_argument("PrototypeConfig: group_size must be positive");
    }
    if (inner_theta > 1.0) {
      throw std::invalid_argument("PrototypeConfig: inner_theta must be <= 1");
    }
  }
};

// Two-level approximate clustering. The items are shuffled deterministically,
// split into groups of at most `group_size`, each group is clustered exactly,
// and every within-group cluster is collapsed to a prototype (the intersection
// of its members). The prototypes are then clustered at the global theta and
// each prototype cluster contributes the union of its member sets. With a
// single group this reduces to exact clustering of the whole input.
inline PayloadClusterSet prototype_cluster(
    const std::vector<std::pair<std::string, BitFingerprint>>& items,
    const ClusteringConfig& config, const PrototypeConfig& proto_config) {
  config.validate();
  proto_config.validate();
  if (items.size() <= proto_config.group_size) {
    return cluster_fingerprints(items, config);
  }

  std::mt19937_64 rng(proto_config.seed);
  const std::vector<std::size_t> order = shuffled_indices(items.size(), rng);

  ClusteringConfig inner = config;
  if (proto_config.inner_theta >= 0.0) inner.theta = proto_config.inner_theta;

  // Each prototype keeps the member ids of the within-group cluster it stands
  // for, so the final merge can recover the original items.
  std::vector<std::pair<std::string, BitFingerprint>> prototypes;
  std::vector<std::vector<std::string>> prototype_members;

  for (std::size_t start = 0; start < order.size(); start += proto_config.group_size) {
    const std::size_t end = std::min(order.size(), start + proto_config.group_size);
    std::vector<std::pair<std::string, BitFingerprint>> group;
    group.reserve(end - start);
    for (std::size_t pos = start; pos < end; ++pos) group.push_back(items[order[pos]]);

    std::vector<std::string> ids;
    std::vector<std::vector<std::uint32_t>> bits;
    ids.reserve(group.size());
    bits.reserve(group.size());
    for (const auto& [id, fp] : group) {
      ids.push_back(id);
      bits.push_back(fp.set_bits());
    }
    auto sim = [&](std::size_t i, std::size_t j) {
      return detail::sparse_jaccard(bits[i], bits[j]);
    };
    const auto group_clusters = hac(group.size(), sim, inner);

    for (const auto& member_indices : group_clusters) {
      BitFingerprint proto = cluster_intersection(group, member_indices);
      std::vector<std::string> members;
      members.reserve(member_indices.size());
      for (std::size_t idx : member_indices) members.push_back(ids[idx]);
      prototypes.emplace_back("p" + std::to_string(prototypes.size()), std::move(proto));
      prototype_members.push_back(std::move(members));
    }
  }

  std::vector<std::vector<std::uint32_t>> proto_bits;
  proto_bits.reserve(prototypes.size());
  for (const auto& [id, fp] : prototypes) proto_bits.push_back(fp.set_bits());
  auto proto_sim = [&](std::size_t i, std::size_t j) {
    return detail::sparse_jaccard(proto_bits[i], proto_bits[j]);
  };
  const auto proto_clusters = hac(prototypes.size(), proto_sim, config);

  PayloadClusterSet out;
  out.clusters.reserve(proto_clusters.size());
  for (const auto& proto_indices : proto_clusters) {
    std::vector<std::string> members;
    for (std::size_t pi : proto_indices) {
      members.insert(members.end(), prototype_members[pi].begin(),
                     prototype_members[pi].end());
    }
    std::sort(members.begin(), members.end());
    out.clusters.push_back(std::move(members));
  }
  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

}  // namespace paymine
