#include "paymine/libstrip.hpp"

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "paymine/app_ir.hpp"
#include "paymine/fingerprint.hpp"

namespace {

using namespace paymine;

FingerprintConfig cfg() {
  FingerprintConfig c;
  c.bits = 1 << 16;
  return c;
}

LibraryIR lib_version(const std::string& name, const std::string& prefix,
                      const std::vector<std::string>& salts) {
  std::string doc = "LIBRARY " + name + " " + prefix + "\nCLASS " + prefix + ".Core\n";
  doc += "METHOD f ()V\n";
  for (const std::string& s : salts) doc += "I op;;" + s + ";\n";
  doc += "END\n";
  return parse_library_ir(doc);
}

AppIR app_with(const std::string& id, const std::string& class_path,
               const std::vector<std::string>& salts) {
  std::string doc = "APP " + id + "\nCLASS " + class_path + "\nMETHOD m ()V\n";
  for (const std::string& s : salts) doc += "I op;;" + s + ";\n";
  doc += "END\n";
  return parse_app_ir(doc);
}

TEST(LibraryProfile, UnionsAllVersions) {
  const auto v0 = lib_version("ads", "com.ads", {"a1", "a2", "a3"});
  const auto v1 = lib_version("ads", "com.ads", {"a1", "a2", "b3"});
  const LibraryProfile profile = build_library_profile({v0, v1}, cfg());

  BitFingerprint expect(cfg().bits);
  for (const LibraryIR* v : {&v0, &v1}) {
    for (const NGramFeature& f : extract_ngram_features(v->code, cfg().n)) {
      expect.set(bit_index(f.content, cfg()));
    }
  }
  EXPECT_EQ(profile.fingerprint, expect);
  EXPECT_EQ(profile.lib_name, "ads");
  EXPECT_EQ(profile.namespace_prefixes, std::vector<std::string>{"com.ads"});
}

TEST(LibraryProfile, MergesPrefixesWithoutDuplicates) {
  auto v0 = lib_version("ads", "com.ads", {"x", "y"});
  auto v1 = lib_version("ads", "com.ads", {"x", "z"});
  v1.namespace_prefixes = {"com.ads", "org.ads"};
  const LibraryProfile profile = build_library_profile({v0, v1}, cfg());
  EXPECT_EQ(profile.namespace_prefixes,
            (std::vector<std::string>{"com.ads", "org.ads"}));
}

TEST(LibraryProfile, RejectsEmptyOrMixedInput) {
  EXPECT_THROW(build_library_profile({}, cfg()), std::invalid_argument);
  const auto a = lib_version("ads", "com.ads", {"x", "y"});
  const auto b = lib_version("track", "com.track", {"x", "y"});
  EXPECT_THROW(build_library_profile({a, b}, cfg()), std::invalid_argument);
}

TEST(StripLibraries, RemovesOnlyWhenNamespacePresent) {
  const auto lib = lib_version("ads", "com.ads", {"l1", "l2", "l3"});
  const LibraryProfile profile = build_library_profile({lib}, cfg());

  // Bundling app: shares the library instructions plus its own.
  AppIR bundling = app_with("withlib", "com.ads.Core", {"l1", "l2", "l3"});
  {
    AppIR own = app_with("x", "app.own.C", {"o1", "o2"});
    bundling.methods.push_back(own.methods[0]);
    bundling.methods.back().function_offset = 1;
    bundling.class_paths.insert("app.own.C");
  }
  const auto fp = fingerprint_app(bundling, cfg()).fingerprint;
  const StripResult result = strip_libraries(fp, bundling, {profile});
  EXPECT_EQ(result.applied_libs, std::vector<std::string>{"ads"});
  EXPECT_EQ(result.stripped, and_not(fp, profile.fingerprint));
  EXPECT_EQ(unite(result.stripped, result.removed), fp);
  EXPECT_EQ(intersect(result.stripped, result.removed).popcount(), 0u);
  EXPECT_GT(result.removed.popcount(), 0u);
}

TEST(StripLibraries, LeavesAppsWithoutTheNamespaceUntouched) {
  const auto lib = lib_version("ads", "com.ads", {"l1", "l2", "l3"});
  const LibraryProfile profile = build_library_profile({lib}, cfg());

  // Same instructions, but the app's classes are NOT under com.ads: the
  // shared bits must survive because the namespace gate fails.
  const AppIR copycat = app_with("copycat", "app.other.C", {"l1", "l2", "l3"});
  const auto fp = fingerprint_app(copycat, cfg()).fingerprint;
  const StripResult result = strip_libraries(fp, copycat, {profile});
  EXPECT_TRUE(result.applied_libs.empty());
  EXPECT_EQ(result.stripped, fp);
  EXPECT_EQ(result.removed.popcount(), 0u);
}

TEST(StripLibraries, DotBoundaryGatesTheMask) {
  const auto lib = lib_version("ads", "com.ads", {"l1", "l2"});
  const LibraryProfile profile = build_library_profile({lib}, cfg());
  const AppIR lookalike = app_with("l", "com.adsense.C", {"l1", "l2"});
  const auto fp = fingerprint_app(lookalike, cfg()).fingerprint;
  // "com.ads" must not match "com.adsense".
  const StripResult result = strip_libraries(fp, lookalike, {profile});
  EXPECT_TRUE(result.applied_libs.empty());
  EXPECT_EQ(result.stripped, fp);
}

TEST(StripLibraries, AppliesEveryMatchingProfile) {
  const auto lib1 = lib_version("ads", "com.ads", {"l1", "l2"});
  const auto lib2 = lib_version("track", "com.track", {"t1", "t2"});
  const auto p1 = build_library_profile({lib1}, cfg());
  const auto p2 = build_library_profile({lib2}, cfg());

  AppIR app = app_with("both", "com.ads.A", {"l1", "l2"});
  AppIR more = app_with("m", "com.track.B", {"t1", "t2"});
  app.methods.push_back(more.methods[0]);
  app.methods.back().function_offset = 1;
  app.class_paths.insert("com.track.B");
  const auto fp = fingerprint_app(app, cfg()).fingerprint;
  const StripResult result = strip_libraries(fp, app, {p1, p2});
  EXPECT_EQ(result.applied_libs, (std::vector<std::string>{"ads", "track"}));
  EXPECT_EQ(result.stripped.popcount(), 0u);  // nothing but library code inside
}

TEST(StripLibraries, WidthMismatchThrows) {
  const auto lib = lib_version("ads", "com.ads", {"l1", "l2"});
  const LibraryProfile profile = build_library_profile({lib}, cfg());
  const AppIR app = app_with("a", "com.ads.C", {"x", "y"});
  FingerprintConfig other = cfg();
  other.bits = 1 << 10;
  const auto fp = fingerprint_app(app, other).fingerprint;
  EXPECT_THROW(strip_libraries(fp, app, {profile}), std::invalid_argument);
}

TEST(RemovalMetrics, KnownValues) {
  BitFingerprint truth(64), removed(64);
  for (std::uint32_t b : {0u, 1u, 2u, 3u}) truth.set(b);     // 4 true bits
  for (std::uint32_t b : {2u, 3u, 4u}) removed.set(b);       // 3 removed, 2 correct
  const RemovalMetrics m = removal_metrics(truth, removed);
  ASSERT_TRUE(m.precision.has_value());
  ASSERT_TRUE(m.recall.has_value());
  EXPECT_DOUBLE_EQ(*m.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*m.recall, 2.0 / 4.0);
}

TEST(RemovalMetrics, UndefinedCasesAreEmpty) {
  BitFingerprint truth(64), removed(64);
  truth.set(1);
  const RemovalMetrics no_removal = removal_metrics(truth, removed);
  EXPECT_FALSE(no_removal.precision.has_value());  // nothing removed
  ASSERT_TRUE(no_removal.recall.has_value());
  EXPECT_DOUBLE_EQ(*no_removal.recall, 0.0);

  BitFingerprint none(64);
  removed.set(1);
  const RemovalMetrics no_truth = removal_metrics(none, removed);
  ASSERT_TRUE(no_truth.precision.has_value());
  EXPECT_DOUBLE_EQ(*no_truth.precision, 0.0);
  EXPECT_FALSE(no_truth.recall.has_value());  // no true library bits
}

}  // namespace
