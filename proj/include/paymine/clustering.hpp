#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "paymine/bitvec.hpp"

namespace paymine {

enum class Linkage { single, average };

struct ClusteringConfig {
  double theta = 0.85;
  Linkage linkage = Linkage::single;

  void validate() const {
    if (!(theta >= 0.0 && theta <= 1.0)) {
      throw std::invalid_argument("ClusteringConfig: theta must be in [0, 1]");
    }
  }
};

// Clusters over string-identified items. Members inside a cluster are sorted;
// clusters are ordered by their smallest member, so the layout is a pure
// function of the input.
struct PayloadClusterSet {
  std::vector<std::vector<std::string>> clusters;

  bool operator==(const PayloadClusterSet&) const = default;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
};

// Single linkage cut at theta == connected components of the "sim >= theta"
// graph. The similarity callback is skipped for pairs already connected.
template <typename SimFn>
std::vector<std::vector<std::size_t>> single_linkage_indices(std::size_t n, SimFn&& sim,
                                                             double theta) {
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (uf.find(i) == uf.find(j)) continue;
      if (sim(i, j) >= theta) uf.unite(i, j);
    }
  }
  std::vector<std::vector<std::size_t>> by_root(n);
  for (std::size_t i = 0; i < n; ++i) by_root[uf.find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> clusters;
  for (auto& members : by_root) {
    if (!members.empty()) clusters.push_back(std::move(members));
  }
  return clusters;
}

// Naive agglomerative average linkage (UPGMA). Merges the highest-similarity
// pair while it stays >= theta, with Lance-Williams updates. Ties break on the
// lexicographically smallest pair of cluster representatives (min original
// index). Quadratic memory, cubic time: intended for modest n.
template <typename SimFn>
std::vector<std::vector<std::size_t>> average_linkage_indices(std::size_t n, SimFn&& sim,
                                                              double theta) {
  std::vector<std::vector<std::size_t>> clusters(n);
  std::vector<bool> alive(n, true);
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      m[i][j] = m[j][i] = sim(i, j);
    }
  }
  auto rep = [&](std::size_t c) { return clusters[c].front(); };  // min index stays front
  while (true) {
    double best = -1.0;
    std::size_t ba = n, bb = n;
    for (std::size_t a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!alive[b]) continue;
        double s = m[a][b];
        std::size_t ra = std::min(rep(a), rep(b));
        std::size_t rb = std::max(rep(a), rep(b));
        bool better = s > best;
        if (!better && s == best && ba < n) {
          std::size_t cra = std::min(rep(ba), rep(bb));
          std::size_t crb = std::max(rep(ba), rep(bb));
          better = ra < cra || (ra == cra && rb < crb);
        }
        if (better) {
          best = s;
          ba = a;
          bb = b;
        }
      }
    }
    if (ba == n || best < theta) break;
    const double na = static_cast<double>(clusters[ba].size());
    const double nb = static_cast<double>(clusters[bb].size());
    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c] || c == ba || c == bb) continue;
      m[ba][c] = m[c][ba] = (na * m[ba][c] + nb * m[bb][c]) / (na + nb);
    }
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    std::sort(clusters[ba].begin(), clusters[ba].end());
    alive[bb] = false;
    clusters[bb].clear();
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t c = 0; c < n; ++c) {
    if (alive[c]) out.push_back(std::move(clusters[c]));
  }
  return out;
}

// Two-pointer intersection size of sorted set-bit lists.
inline std::uint64_t sorted_intersection_size(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b) {
  std::uint64_t count = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (a[i] > b[j]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

inline double sparse_jaccard(const std::vector<std::uint32_t>& a,
                             const std::vector<std::uint32_t>& b) {
  const std::uint64_t inter = sorted_intersection_size(a, b);
  const std::uint64_t uni = a.size() + b.size() - inter;
  if (uni == 0) return 1.0;  // two empty sets are identical
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace detail

// Core engine: clusters `n` items 0..n-1 with a pairwise similarity callback.
template <typename SimFn>
std::vector<std::vector<std::size_t>> hac(std::size_t n, SimFn&& sim,
                                          const ClusteringConfig& config) {
  config.validate();
  if (n == 0) return {};
  std::vector<std::vector<std::size_t>> clusters;
  if (config.linkage == Linkage::single) {
    clusters = detail::single_linkage_indices(n, std::forward<SimFn>(sim), config.theta);
  } else {
    clusters = detail::average_linkage_indices(n, std::forward<SimFn>(sim), config.theta);
  }
  for (auto& members : clusters) std::sort(members.begin(), members.end());
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return clusters;
}

namespace detail {

inline PayloadClusterSet index_clusters_to_ids(
    const std::vector<std::vector<std::size_t>>& index_clusters,
    const std::vector<std::string>& ids) {
  PayloadClusterSet out;
  out.clusters.reserve(index_clusters.size());
  for (const auto& members : index_clusters) {
    std::vector<std::string> named;
    named.reserve(members.size());
    for (std::size_t idx : members) named.push_back(ids[idx]);
    std::sort(named.begin(), named.end());
    out.clusters.push_back(std::move(named));
  }
  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

}  // namespace detail

// Clusters fingerprints by exact Jaccard similarity. Set-bit lists are
// extracted once up front so each pair comparison walks only the sparse
// representation instead of the full bitmap.
inline PayloadClusterSet cluster_fingerprints(
    const std::vector<std::pair<std::string, BitFingerprint>>& items,
    const ClusteringConfig& config) {
  std::vector<std::string> ids;
  std::vector<std::vector<std::uint32_t>> bits;
  ids.reserve(items.size());
  bits.reserve(items.size());
  for (const auto& [id, fp] : items) {
    ids.push_back(id);
    bits.push_back(fp.set_bits());
  }
  auto sim = [&](std::size_t i, std::size_t j) {
    return detail::sparse_jaccard(bits[i], bits[j]);
  };
  return detail::index_clusters_to_ids(hac(items.size(), sim, config), ids);
}

// Intersection of all member fingerprints of one cluster (the shared payload).
inline BitFingerprint cluster_intersection(
    const std::vector<std::pair<std::string, BitFingerprint>>& items,
    const std::vector<std::size_t>& member_indices) {
  if (member_indices.empty()) {
    throw std::invalid_argument("cluster_intersection: empty cluster");
  }
  BitFingerprint result = items[member_indices.front()].second;
  for (std::size_t k = 1; k < member_indices.size(); ++k) {
    result.intersect_with(items[member_indices[k]].second);
  }
  return result;
}

}  // namespace paymine
