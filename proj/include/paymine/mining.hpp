#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "paymine/bitvec.hpp"
#include "paymine/clustering.hpp"
#include "paymine/payload.hpp"

namespace paymine {

// Popularity statistics of one payload cluster over the active apps:
//   l = remaining entries (candidate payloads) in the cluster,
//   m = distinct apps covered by those entries,
//   k = set bits in the intersection of the entries' fingerprints.
struct PayloadClusterStats {
  std::size_t l = 0;
  std::size_t m = 0;
  std::uint64_t k = 0;

  bool operator==(const PayloadClusterStats&) const = default;
};

struct MiningConfig {
  std::uint64_t min_k = 70;
  std::size_t min_l = 2;
  double refine_step = 0.05;

  void validate() const {
    if (min_l < 2) throw std::invalid_argument("MiningConfig: min_l must be >= 2");
    if (refine_step <= 0.0) {
      throw std::invalid_argument("MiningConfig: refine_step must be positive");
    }
  }
};

struct SelectedCluster {
  std::vector<std::string> members;  // payload ids, sorted
  std::vector<std::string> apps;     // distinct app ids, sorted
  PayloadClusterStats stats;
  double theta = 0.0;        // clustering level the cluster was selected at
  BitFingerprint payload;    // intersection of the member fingerprints
};

struct MiningResult {
  std::vector<SelectedCluster> selected;  // in selection order
};

namespace detail {

inline std::vector<std::uint32_t> sorted_intersection(const std::vector<std::uint32_t>& a,
                                                      const std::vector<std::uint32_t>& b) {
  std::vector<std::uint32_t> out;
  out.reserve(std::min(a.size(), b.size()));
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (a[i] > b[j]) {
      ++j;
    } else {
      out.push_back(a[i]);
      ++i;
      ++j;
    }
  }
  return out;
}

struct MiningClusterState {
  std::vector<std::size_t> entries;  // candidate indices
  double theta = 0.0;
  bool alive = true;
  bool dirty = true;
  // cached while clean:
  std::vector<std::size_t> active_entries;
  PayloadClusterStats stats;
  std::vector<std::string> app_list;              // sorted distinct active apps
  std::vector<std::uint32_t> intersection_bits;   // of active entries
};

}  // namespace detail

// Iterative popularity mining. Starting from the candidate clusters, the
// highest-ranked cluster (most entries l, then most apps m, then largest
// shared payload k, ties on the smallest app list) is examined each round:
//
//   * k >= min_k: the cluster is selected and all its apps are deactivated.
//     Entries touching a deactivated app drop out of every other cluster.
//   * k <  min_k: the cluster is too diluted; its entries are re-clustered at
//     theta + refine_step (exact Jaccard) and the pieces re-enter the pool.
//     A cluster already at theta = 1.0 that still misses min_k is discarded.
//
// Clusters with fewer than min_l remaining entries are never selectable and,
// since apps only ever deactivate, can be dropped for good. The loop ends
// when no selectable cluster remains.
inline MiningResult mine(const std::vector<CandidatePayload>& candidates,
                         const PayloadClusterSet& clusters, const ClusteringConfig& config,
                         const MiningConfig& mining_config) {
  config.validate();
  mining_config.validate();

  std::map<std::string, std::size_t> candidate_index;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    candidate_index.emplace(candidates[i].payload_id, i);
  }

  // Sparse set-bit lists, computed once: every k computation and every
  // refinement similarity works on these instead of the dense bitmaps.
  std::vector<std::vector<std::uint32_t>> bits(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bits[i] = candidates[i].fingerprint.set_bits();
  }

  std::map<std::string, bool> active;  // app id -> still active
  for (const CandidatePayload& cand : candidates) {
    active[cand.apps[0]] = true;
    active[cand.apps[1]] = true;
  }

  std::vector<detail::MiningClusterState> states;
  for (const auto& members : clusters.clusters) {
    detail::MiningClusterState state;
    state.theta = config.theta;
    for (const std::string& payload_id : members) {
      auto it = candidate_index.find(payload_id);
      if (it == candidate_index.end()) {
        throw std::invalid_argument("mine: cluster member '" + payload_id +
                                    "' is not a known candidate payload");
      }
      state.entries.push_back(it->second);
    }
    states.push_back(std::move(state));
  }

  // app id -> clusters containing an entry that touches it, for dirty marking.
  std::map<std::string, std::vector<std::size_t>> clusters_of_app;
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (std::size_t e : states[s].entries) {
      clusters_of_app[candidates[e].apps[0]].push_back(s);
      clusters_of_app[candidates[e].apps[1]].push_back(s);
    }
  }

  auto refresh = [&](detail::MiningClusterState& state) {
    state.active_entries.clear();
    for (std::size_t e : state.entries) {
      if (active[candidates[e].apps[0]] && active[candidates[e].apps[1]]) {
        state.active_entries.push_back(e);
      }
    }
    if (state.active_entries.size() < mining_config.min_l) {
      state.alive = false;  // l can only shrink: gone for good
      return;
    }
    std::set<std::string> apps;
    for (std::size_t e : state.active_entries) {
      apps.insert(candidates[e].apps[0]);
      apps.insert(candidates[e].apps[1]);
    }
    state.app_list.assign(apps.begin(), apps.end());
    state.intersection_bits = bits[state.active_entries.front()];
    for (std::size_t i = 1; i < state.active_entries.size(); ++i) {
      state.intersection_bits =
          detail::sorted_intersection(state.intersection_bits, bits[state.active_entries[i]]);
      if (state.intersection_bits.empty()) break;
    }
    state.stats.l = state.active_entries.size();
    state.stats.m = state.app_list.size();
    state.stats.k = state.intersection_bits.size();
    state.dirty = false;
  };

  auto outranks = [](const detail::MiningClusterState& a, const detail::MiningClusterState& b) {
    if (a.stats.l != b.stats.l) return a.stats.l > b.stats.l;
    if (a.stats.m != b.stats.m) return a.stats.m > b.stats.m;
    if (a.stats.k != b.stats.k) return a.stats.k > b.stats.k;
    return a.app_list < b.app_list;
  };

  MiningResult result;
  for (;;) {
    std::size_t best = states.size();
    for (std::size_t s = 0; s < states.size(); ++s) {
      if (!states[s].alive) continue;
      if (states[s].dirty) refresh(states[s]);
      if (!states[s].alive) continue;
      if (best == states.size() || outranks(states[s], states[best])) best = s;
    }
    if (best == states.size()) break;

    detail::MiningClusterState& top = states[best];
    if (top.stats.k >= mining_config.min_k) {
      SelectedCluster sel;
      for (std::size_t e : top.active_entries) sel.members.push_back(candidates[e].payload_id);
      std::sort(sel.members.begin(), sel.members.end());
      sel.apps = top.app_list;
      sel.stats = top.stats;
      sel.theta = top.theta;
      sel.payload = BitFingerprint(candidates[top.active_entries.front()].fingerprint.width());
      for (std::uint32_t bit : top.intersection_bits) sel.payload.set(bit);
      result.selected.push_back(std::move(sel));

      top.alive = false;
      for (const std::string& app : top.app_list) {
        active[app] = false;
        for (std::size_t s : clusters_of_app[app]) {
          if (states[s].alive) states[s].dirty = true;
        }
      }
      continue;
    }

    if (top.theta >= 1.0) {
      top.alive = false;  // cannot be refined further and never reaches min_k
      continue;
    }

    // Refine: re-cluster the remaining entries at a tighter threshold. The
    // similarity here is always exact Jaccard, so a refinement chain ending at
    // theta = 1.0 degenerates to exact-duplicate grouping and terminates.
    const double refined_theta = std::min(1.0, top.theta + mining_config.refine_step);
    const std::vector<std::size_t> pool = top.active_entries;
    auto sim = [&](std::size_t i, std::size_t j) {
      return detail::sparse_jaccard(bits[pool[i]], bits[pool[j]]);
    };
    ClusteringConfig refined_config = config;
    refined_config.theta = refined_theta;
    const auto pieces = hac(pool.size(), sim, refined_config);

    top.alive = false;
    for (const auto& piece : pieces) {
      if (piece.size() < mining_config.min_l) continue;
      detail::MiningClusterState child;
      child.theta = refined_theta;
      for (std::size_t local : piece) child.entries.push_back(pool[local]);
      const std::size_t child_index = states.size();
      for (std::size_t e : child.entries) {
        clusters_of_app[candidates[e].apps[0]].push_back(child_index);
        clusters_of_app[candidates[e].apps[1]].push_back(child_index);
      }
      states.push_back(std::move(child));
      // `top` may have been invalidated by the push_back; loop only reads
      // `pieces` and `pool` from here on.
    }
  }
  return result;
}

// The app groups implied by mining: one group per selected cluster, in
// selection order. Groups are disjoint because selection deactivates apps.
inline std::vector<std::vector<std::string>> group_apps(const MiningResult& result) {
  std::vector<std::vector<std::string>> groups;
  groups.reserve(result.selected.size());
  for (const SelectedCluster& sel : result.selected) groups.push_back(sel.apps);
  return groups;
}

}  // namespace paymine
