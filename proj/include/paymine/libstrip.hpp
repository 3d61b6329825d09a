#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "paymine/app_ir.hpp"
#include "paymine/bitvec.hpp"
#include "paymine/fingerprint.hpp"

namespace paymine {

// Union-of-versions profile for one library. The fingerprint covers every
// feature observed in any provided version, so stripping is robust to the
// exact version an app bundled.
struct LibraryProfile {
  std::string lib_name;
  std::vector<std::string> namespace_prefixes;
  BitFingerprint fingerprint;
};

// Builds the profile from one or more versions of the same library. All
// versions must agree on the library name; namespace prefixes are unioned
// (first-seen order, duplicates dropped).
inline LibraryProfile build_library_profile(const std::vector<LibraryIR>& versions,
                                            const FingerprintConfig& config) {
  config.validate();
  if (versions.empty()) {
    throw std::invalid_argument("build_library_profile: no versions given");
  }
  LibraryProfile profile;
  profile.lib_name = versions.front().lib_name;
  profile.fingerprint = BitFingerprint(config.bits);
  for (const LibraryIR& version : versions) {
    if (version.lib_name != profile.lib_name) {
      throw std::invalid_argument("build_library_profile: mixed library names '" +
                                  profile.lib_name + "' and '" + version.lib_name + "'");
    }
    for (const std::string& prefix : version.namespace_prefixes) {
      bool seen = false;
      for (const std::string& have : profile.namespace_prefixes) {
        if (have == prefix) {
          seen = true;
          break;
        }
      }
      if (!seen) profile.namespace_prefixes.push_back(prefix);
    }
    for (const NGramFeature& feature : extract_ngram_features(version.code, config.n)) {
      profile.fingerprint.set(bit_index(feature.content, config));
    }
  }
  return profile;
}

// True when the profile applies to the app: at least one of the profile's
// namespace prefixes matches one of the app's class paths on a dot boundary.
inline bool profile_applies(const LibraryProfile& profile, const AppIR& app) {
  for (const std::string& prefix : profile.namespace_prefixes) {
    for (const std::string& path : app.class_paths) {
      if (namespace_prefix_matches(prefix, path)) return true;
    }
  }
  return false;
}

struct StripResult {
  BitFingerprint stripped;                // fingerprint after masking
  BitFingerprint removed;                 // bits cleared by masking
  std::vector<std::string> applied_libs;  // profiles whose namespaces matched
};

// Masks out every profile whose namespaces are present in the app:
//   stripped = fingerprint AND NOT (union of applicable profiles).
// Profiles whose namespaces do not appear in the app leave it untouched.
inline StripResult strip_libraries(const BitFingerprint& fingerprint, const AppIR& app,
                                   const std::vector<LibraryProfile>& profiles) {
  StripResult result;
  result.stripped = fingerprint;
  for (const LibraryProfile& profile : profiles) {
    if (profile.fingerprint.width() != fingerprint.width()) {
      throw std::invalid_argument("strip_libraries: profile width mismatch for '" +
                                  profile.lib_name + "'");
    }
    if (!profile_applies(profile, app)) continue;
    result.stripped.and_not_with(profile.fingerprint);
    result.applied_libs.push_back(profile.lib_name);
  }
  result.removed = and_not(fingerprint, result.stripped);
  return result;
}

// Removal quality against ground truth. `true_library_bits` marks the bits
// that genuinely belong to bundled library code.
//   precision = S(true AND removed) / S(removed)   (undefined if nothing removed)
//   recall    = S(true AND removed) / S(true)      (undefined if no true bits)
struct RemovalMetrics {
  std::optional<double> precision;
  std::optional<double> recall;
};

inline RemovalMetrics removal_metrics(const BitFingerprint& true_library_bits,
                                      const BitFingerprint& removed) {
  const BitFingerprint hit = intersect(true_library_bits, removed);
  const std::uint64_t n_hit = hit.popcount();
  const std::uint64_t n_removed = removed.popcount();
  const std::uint64_t n_true = true_library_bits.popcount();
  RemovalMetrics metrics;
  if (n_removed > 0) {
    metrics.precision = static_cast<double>(n_hit) / static_cast<double>(n_removed);
  }
  if (n_true > 0) {
    metrics.recall = static_cast<double>(n_hit) / static_cast<double>(n_true);
  }
  return metrics;
}

}  // namespace paymine
