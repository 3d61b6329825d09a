#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "paymine/app_ir.hpp"
#include "paymine/bitvec.hpp"
#include "paymine/fingerprint.hpp"
#include "paymine/libstrip.hpp"
#include "paymine/reconstruct.hpp"
#include "paymine/rng.hpp"

namespace paymine {

// --- clustering quality -----------------------------------------------------

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
};

// Set-overlap precision/recall between a computed grouping and a reference
// grouping:
//   precision = (1/|computed members|) * sum_j max_i |C_j intersect R_i|
//   recall    = (1/|reference members|) * sum_i max_j |C_j intersect R_i|
// Both are 1.0 when the groupings are identical partitions.
inline PrecisionRecall clustering_precision_recall(
    const std::vector<std::vector<std::string>>& computed,
    const std::vector<std::vector<std::string>>& reference) {
  std::vector<std::set<std::string>> c, r;
  std::size_t c_total = 0, r_total = 0;
  for (const auto& g : computed) {
    c.emplace_back(g.begin(), g.end());
    c_total += c.back().size();
  }
  for (const auto& g : reference) {
    r.emplace_back(g.begin(), g.end());
    r_total += r.back().size();
  }
  if (c_total == 0 || r_total == 0) {
    throw std::invalid_argument("clustering_precision_recall: empty grouping");
  }
  auto overlap = [](const std::set<std::string>& a, const std::set<std::string>& b) {
    std::size_t n = 0;
    for (const std::string& x : a) n += b.count(x);
    return n;
  };
  std::size_t p_sum = 0, r_sum = 0;
  for (const auto& cj : c) {
    std::size_t best = 0;
    for (const auto& ri : r) best = std::max(best, overlap(cj, ri));
    p_sum += best;
  }
  for (const auto& ri : r) {
    std::size_t best = 0;
    for (const auto& cj : c) best = std::max(best, overlap(cj, ri));
    r_sum += best;
  }
  return {static_cast<double>(p_sum) / static_cast<double>(c_total),
          static_cast<double>(r_sum) / static_cast<double>(r_total)};
}

// Completes a grouping to a partition of `universe` by adding a singleton for
// every id not already covered. Lets mining output (which only groups apps
// that share payloads) be compared against a full reference partition.
inline std::vector<std::vector<std::string>> complete_with_singletons(
    const std::vector<std::vector<std::string>>& groups,
    const std::vector<std::string>& universe) {
  std::set<std::string> covered;
  for (const auto& g : groups) covered.insert(g.begin(), g.end());
  std::vector<std::vector<std::string>> out = groups;
  for (const std::string& id : universe) {
    if (!covered.count(id)) out.push_back({id});
  }
  return out;
}

inline std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// --- hash-collision accounting ----------------------------------------------

struct CollisionStats {
  std::uint64_t n_features = 0;  // distinct features fed in
  std::uint32_t width = 0;       // fingerprint width M
  double load = 0.0;             // N / M
  std::uint64_t occupied = 0;    // bits with >= 1 feature
  std::uint64_t colliding = 0;   // bits with >= 2 distinct features
};

// Feeds features through the bit indexer and counts occupied and colliding
// bits with two bitmaps. Set `assume_distinct` when the caller guarantees the
// features are already deduplicated (skips a hash-set pass).
inline CollisionStats collision_stats(const std::vector<std::string>& features,
                                      const FingerprintConfig& config,
                                      bool assume_distinct = false) {
  config.validate();
  CollisionStats stats;
  stats.width = config.bits;
  BitFingerprint seen(config.bits), collided(config.bits);
  auto feed = [&](const std::string& f) {
    ++stats.n_features;
    const std::uint32_t bit = bit_index(f, config);
    if (seen.test(bit)) {
      collided.set(bit);
    } else {
      seen.set(bit);
    }
  };
  if (assume_distinct) {
    for (const std::string& f : features) feed(f);
  } else {
    std::unordered_set<std::string> distinct(features.begin(), features.end());
    for (const std::string& f : distinct) feed(f);
  }
  stats.load = static_cast<double>(stats.n_features) / static_cast<double>(config.bits);
  stats.occupied = seen.popcount();
  stats.colliding = collided.popcount();
  return stats;
}

// Expected number of occupied bits when N uniform features land in M bits:
// M * (1 - e^(-N/M)).
inline double expected_occupied(std::uint64_t n_features, std::uint32_t width) {
  const double m = static_cast<double>(width);
  return m * (1.0 - std::exp(-static_cast<double>(n_features) / m));
}

// --- synthetic corpus generation --------------------------------------------

struct SizeRange {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;  // inclusive
};

struct FamilySpec {
  std::string name;
  std::uint32_t versions = 1;
  std::uint32_t apps_per_version = 1;
  std::uint32_t payload_methods = 6;
  std::uint32_t payload_method_len = 60;
  double version_overlap = 0.5;  // fraction of payload methods kept from the previous version
};

struct LibrarySpec {
  std::string name;  // also used as the namespace prefix
  std::uint32_t versions = 1;
  std::uint32_t methods = 20;
  std::uint32_t method_len = 30;
  double version_overlap = 0.5;
};

struct SynthSpec {
  std::uint64_t seed = 0;
  std::vector<FamilySpec> families;
  std::uint32_t benign_apps = 0;
  SizeRange benign_methods{3, 6};       // app-private methods per app
  SizeRange benign_method_len{10, 30};
  std::uint32_t pool_methods = 0;       // shared benign pool
  std::uint32_t pool_method_len = 12;
  SizeRange pool_picks{0, 0};           // pool methods each app draws
  std::uint32_t universal_methods = 0;  // methods present in every app
  std::uint32_t universal_method_len = 20;
  std::vector<LibrarySpec> libraries;
  SizeRange libs_per_app{0, 0};         // distinct libraries each app bundles
  // Fraction of malicious apps whose payload classes are renamed to sit under
  // a library namespace. The instruction content is untouched, so content-based
  // library stripping must leave such payloads intact (name-based would not).
  double inject_under_lib_namespace = 0.0;
  FingerprintConfig fingerprint;        // width/n used for ground-truth bits
};

struct GroundTruth {
  std::map<std::string, std::string> family_of_app;   // malicious apps only
  std::map<std::string, std::uint32_t> version_of_app;
  // Reference partitions over all apps (benign apps appear as singletons).
  std::vector<std::vector<std::string>> family_reference;
  std::vector<std::vector<std::string>> version_reference;
  // Per-app ground-truth bits under SynthSpec::fingerprint.
  std::map<std::string, BitFingerprint> library_bits;
  std::map<std::string, BitFingerprint> payload_bits;
  // Where the payload lives inside each malicious app.
  std::map<std::string, std::vector<ReconstructedRange>> payload_locations;
  // Which library versions each app bundles: app -> (library name, version index).
  std::map<std::string, std::vector<std::pair<std::string, std::uint32_t>>> app_libraries;
};

struct SynthCorpus {
  std::vector<AppIR> apps;
  std::vector<std::vector<LibraryIR>> libraries;  // [library][version]
  GroundTruth truth;
};

namespace detail {

class MethodFactory {
 public:
  explicit MethodFactory(std::mt19937_64& rng) : rng_(rng) {}

  // Every instruction carries a globally unique literal, so two generated
  // methods never share an n-gram unless one is a verbatim copy of the other.
  MethodIR make(const std::string& class_path, const std::string& name, std::uint32_t len) {
    static constexpr const char* kOps[] = {"invoke", "move", "const-str",
                                           "iget",   "goto", "ret"};
    MethodIR method;
    method.class_path = class_path;
    method.method_name = name;
    method.descriptor = "()V";
    method.instructions.reserve(len);
    for (std::uint32_t i = 0; i < len; ++i) {
      InstructionRecord rec;
      rec.opcode = kOps[salt_ % 6];
      rec.string_literal = "s" + std::to_string(salt_++);
      method.instructions.push_back(std::move(rec));
    }
    return method;
  }

  std::uint32_t draw_len(const SizeRange& range) {
    if (range.lo > range.hi) throw std::invalid_argument("SizeRange: lo > hi");
    return static_cast<std::uint32_t>(uniform_range(rng_, range.lo, range.hi));
  }

 private:
  std::mt19937_64& rng_;
  std::uint64_t salt_ = 0;
};

inline void add_method_bits(const MethodIR& method, const FingerprintConfig& config,
                            BitFingerprint& out) {
  AppIR tmp;
  tmp.methods.push_back(method);
  for (const NGramFeature& f : extract_ngram_features(tmp, config.n)) {
    out.set(bit_index(f.content, config));
  }
}

// Next version of a method list: keep the first `round(overlap * size)`
// methods, regenerate the rest under the same class paths / names.
inline std::vector<MethodIR> evolve_methods(const std::vector<MethodIR>& prev, double overlap,
                                            MethodFactory& factory, std::uint32_t len) {
  const auto keep = static_cast<std::size_t>(
      std::llround(overlap * static_cast<double>(prev.size())));
  std::vector<MethodIR> next;
  next.reserve(prev.size());
  for (std::size_t i = 0; i < prev.size(); ++i) {
    if (i < keep) {
      next.push_back(prev[i]);
    } else {
      next.push_back(factory.make(prev[i].class_path, prev[i].method_name,
                                  factory.draw_len({len, len})));
    }
  }
  return next;
}

}  // namespace detail

// Deterministically synthesizes a corpus: shared "universal" methods, a benign
// pool apps sample from, libraries with overlapping versions, and per-family
// payloads whose versions share a configurable fraction of methods. Payload,
// library and pool methods are copied verbatim into apps, so shared code means
// shared n-grams; everything else is globally unique by construction.
inline SynthCorpus generate_corpus(const SynthSpec& spec) {
  spec.fingerprint.validate();
  if (spec.inject_under_lib_namespace < 0.0 ||
      spec.inject_under_lib_namespace > 1.0) {
    throw std::invalid_argument(
        "SynthSpec: inject_under_lib_namespace must be in [0, 1]");
  }
  std::mt19937_64 rng(spec.seed);
  detail::MethodFactory factory(rng);
  SynthCorpus corpus;

  std::vector<MethodIR> universal;
  for (std::uint32_t i = 0; i < spec.universal_methods; ++i) {
    universal.push_back(factory.make("base.universal.U" + std::to_string(i), "u",
                                     spec.universal_method_len));
  }
  std::vector<MethodIR> pool;
  for (std::uint32_t i = 0; i < spec.pool_methods; ++i) {
    pool.push_back(
        factory.make("base.pool.P" + std::to_string(i), "p", spec.pool_method_len));
  }

  // Library versions, each evolved from the previous one.
  for (const LibrarySpec& lib : spec.libraries) {
    std::vector<LibraryIR> versions;
    std::vector<MethodIR> methods;
    for (std::uint32_t m = 0; m < lib.methods; ++m) {
      methods.push_back(factory.make(lib.name + ".C" + std::to_string(m), "f",
                                     lib.method_len));
    }
    for (std::uint32_t v = 0; v < lib.versions; ++v) {
      if (v > 0) {
        methods = detail::evolve_methods(methods, lib.version_overlap, factory,
                                         lib.method_len);
      }
      LibraryIR ir;
      ir.lib_name = lib.name;
      ir.namespace_prefixes = {lib.name};
      ir.code.app_id = lib.name + "-v" + std::to_string(v);
      for (std::uint32_t m = 0; m < methods.size(); ++m) {
        MethodIR method = methods[m];
        method.function_offset = m;
        ir.code.class_paths.insert(method.class_path);
        ir.code.methods.push_back(std::move(method));
      }
      versions.push_back(std::move(ir));
    }
    corpus.libraries.push_back(std::move(versions));
  }

  // Family payload versions.
  std::vector<std::vector<std::vector<MethodIR>>> payloads;  // [family][version]
  for (const FamilySpec& fam : spec.families) {
    std::vector<std::vector<MethodIR>> versions;
    std::vector<MethodIR> methods;
    for (std::uint32_t m = 0; m < fam.payload_methods; ++m) {
      methods.push_back(factory.make("fam." + fam.name + ".C" + std::to_string(m), "m",
                                     fam.payload_method_len));
    }
    for (std::uint32_t v = 0; v < fam.versions; ++v) {
      if (v > 0) {
        methods = detail::evolve_methods(methods, fam.version_overlap, factory,
                                         fam.payload_method_len);
      }
      versions.push_back(methods);
    }
    payloads.push_back(std::move(versions));
  }

  GroundTruth& truth = corpus.truth;

  // One app: universal + pool picks + library bundles + (payload) + private
  // methods, with ground truth recorded along the way.
  auto make_app = [&](const std::string& app_id, const std::vector<MethodIR>* payload) {
    AppIR app;
    app.app_id = app_id;
    BitFingerprint lib_bits(spec.fingerprint.bits);
    BitFingerprint pay_bits(spec.fingerprint.bits);
    std::vector<ReconstructedRange> locations;

    auto append = [&](MethodIR method) {
      method.function_offset = static_cast<std::uint32_t>(app.methods.size());
      app.class_paths.insert(method.class_path);
      app.methods.push_back(std::move(method));
      return app.methods.back().function_offset;
    };

    for (const MethodIR& m : universal) append(m);

    if (spec.pool_methods > 0 && spec.pool_picks.hi > 0) {
      const std::uint32_t picks = std::min<std::uint32_t>(
          factory.draw_len(spec.pool_picks), spec.pool_methods);
      const auto order = shuffled_indices(spec.pool_methods, rng);
      for (std::uint32_t i = 0; i < picks; ++i) append(pool[order[i]]);
    }

    if (!spec.libraries.empty() && spec.libs_per_app.hi > 0) {
      const std::uint32_t bundles = std::min<std::uint32_t>(
          factory.draw_len(spec.libs_per_app),
          static_cast<std::uint32_t>(spec.libraries.size()));
      const auto order = shuffled_indices(spec.libraries.size(), rng);
      for (std::uint32_t i = 0; i < bundles; ++i) {
        const std::size_t li = order[i];
        const std::uint32_t v = static_cast<std::uint32_t>(
            uniform_below(rng, corpus.libraries[li].size()));
        const LibraryIR& version = corpus.libraries[li][v];
        for (const MethodIR& m : version.code.methods) {
          append(m);
          detail::add_method_bits(m, spec.fingerprint, lib_bits);
        }
        truth.app_libraries[app_id].emplace_back(version.lib_name, v);
      }
    }

    if (payload != nullptr) {
      // Optionally disguise the payload under a library namespace. Only the
      // class path changes; the instruction stream (and therefore every
      // fingerprint bit) stays the same, so content-based stripping must keep
      // these methods while a name-based filter would drop them.
      std::string prefix;
      if (spec.inject_under_lib_namespace > 0.0 && !spec.libraries.empty()) {
        const double draw = static_cast<double>(uniform_below(rng, 1u << 24)) /
                            static_cast<double>(1u << 24);
        if (draw < spec.inject_under_lib_namespace) {
          const std::size_t li = static_cast<std::size_t>(
              uniform_below(rng, spec.libraries.size()));
          prefix = spec.libraries[li].name + ".";
        }
      }
      for (const MethodIR& m : *payload) {
        MethodIR disguised = m;
        disguised.class_path = prefix + disguised.class_path;
        const std::uint32_t fn = append(std::move(disguised));
        detail::add_method_bits(m, spec.fingerprint, pay_bits);
        locations.push_back(
            {fn, 0, static_cast<std::uint32_t>(m.instructions.size() - 1)});
      }
    }

    const std::uint32_t n_private = factory.draw_len(spec.benign_methods);
    for (std::uint32_t i = 0; i < n_private; ++i) {
      append(factory.make("app." + app_id + ".B" + std::to_string(i), "b",
                          factory.draw_len(spec.benign_method_len)));
    }

    truth.library_bits.emplace(app_id, std::move(lib_bits));
    if (payload != nullptr) {
      truth.payload_bits.emplace(app_id, std::move(pay_bits));
      truth.payload_locations.emplace(app_id, std::move(locations));
    }
    corpus.apps.push_back(std::move(app));
  };

  for (std::size_t f = 0; f < spec.families.size(); ++f) {
    const FamilySpec& fam = spec.families[f];
    std::vector<std::string> family_group;
    for (std::uint32_t v = 0; v < fam.versions; ++v) {
      std::vector<std::string> version_group;
      for (std::uint32_t a = 0; a < fam.apps_per_version; ++a) {
        const std::string app_id =
            fam.name + "-v" + std::to_string(v) + "-a" + std::to_string(a);
        make_app(app_id, &payloads[f][v]);
        truth.family_of_app[app_id] = fam.name;
        truth.version_of_app[app_id] = v;
        family_group.push_back(app_id);
        version_group.push_back(app_id);
      }
      std::sort(version_group.begin(), version_group.end());
      truth.version_reference.push_back(std::move(version_group));
    }
    std::sort(family_group.begin(), family_group.end());
    truth.family_reference.push_back(std::move(family_group));
  }
  for (std::uint32_t b = 0; b < spec.benign_apps; ++b) {
    const std::string app_id = "benign-a" + std::to_string(b);
    make_app(app_id, nullptr);
    truth.family_reference.push_back({app_id});
    truth.version_reference.push_back({app_id});
  }
  return corpus;
}

// --- library-removal evaluation ---------------------------------------------

struct RemovalEvaluation {
  std::vector<double> precisions;  // per app, where defined
  std::vector<double> recalls;
  std::optional<double> median_precision;
  std::optional<double> median_recall;
};

// Builds one profile per library from the versions `include_version` admits,
// strips every app, and scores the removed bits against the ground truth.
inline RemovalEvaluation evaluate_removal(
    const SynthCorpus& corpus, const FingerprintConfig& config,
    const std::function<bool(const std::string&, std::uint32_t)>& include_version) {
  std::vector<LibraryProfile> profiles;
  for (const auto& versions : corpus.libraries) {
    std::vector<LibraryIR> included;
    for (std::uint32_t v = 0; v < versions.size(); ++v) {
      if (include_version(versions[v].lib_name, v)) included.push_back(versions[v]);
    }
    if (!included.empty()) {
      profiles.push_back(build_library_profile(included, config));
    }
  }
  RemovalEvaluation eval;
  for (const AppIR& app : corpus.apps) {
    const FingerprintResult fp = fingerprint_app(app, config);
    const StripResult strip = strip_libraries(fp.fingerprint, app, profiles);
    const RemovalMetrics metrics =
        removal_metrics(corpus.truth.library_bits.at(app.app_id), strip.removed);
    if (metrics.precision) eval.precisions.push_back(*metrics.precision);
    if (metrics.recall) eval.recalls.push_back(*metrics.recall);
  }
  eval.median_precision = median(eval.precisions);
  eval.median_recall = median(eval.recalls);
  return eval;
}

}  // namespace paymine
