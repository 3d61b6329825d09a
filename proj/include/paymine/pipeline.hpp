#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "paymine/app_ir.hpp"
#include "paymine/bitvec.hpp"
#include "paymine/clustering.hpp"
#include "paymine/evalgen.hpp"
#include "paymine/fingerprint.hpp"
#include "paymine/hash.hpp"
#include "paymine/libstrip.hpp"
#include "paymine/minhash.hpp"
#include "paymine/mining.hpp"
#include "paymine/parallel.hpp"
#include "paymine/payload.hpp"
#include "paymine/prototype.hpp"
#include "paymine/reconstruct.hpp"
#include "paymine/store.hpp"

namespace paymine {

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OptLevel { none, minhash, prototype };

inline std::string to_string(OptLevel opt) {
  switch (opt) {
    case OptLevel::none: return "none";
    case OptLevel::minhash: return "minhash";
    case OptLevel::prototype: return "prototype";
  }
  throw std::invalid_argument("unknown opt level");
}

inline OptLevel opt_level_from_string(const std::string& s) {
  if (s == "none") return OptLevel::none;
  if (s == "minhash") return OptLevel::minhash;
  if (s == "prototype") return OptLevel::prototype;
  throw std::invalid_argument("unknown opt level '" + s + "' (use none|minhash|prototype)");
}

struct PipelineConfig {
  std::filesystem::path corpus_dir;
  std::vector<std::filesystem::path> library_files;
  std::filesystem::path out_dir;
  FingerprintConfig fingerprint;  // n = 2, bits = 8,388,608
  ClusteringConfig clustering;    // theta = 0.85, single linkage
  MiningConfig mining;            // min_k = 70, min_l = 2
  std::uint64_t min_bits = 1;     // candidate intersection floor
  OptLevel opt = OptLevel::none;
  std::uint32_t minhash_k = 256;
  std::uint32_t group_size = 150;
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  // The prototype stage must not reuse the raw seed (the minhash salts do),
  // so it mixes in a fixed odd constant.
  std::uint64_t prototype_seed() const { return seed ^ 0x9e3779b97f4a7c15ull; }
};

inline const std::vector<std::string>& pipeline_stage_order() {
  static const std::vector<std::string> order = {
      "ingest", "fingerprint", "strip", "candidates", "cluster", "mine", "reconstruct"};
  return order;
}

namespace detail {

inline std::string sanitize_component(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? std::string("x") : out;
}

inline std::string zero_pad(std::size_t value, int width) {
  std::string s = std::to_string(value);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

inline std::uint64_t file_digest(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PipelineError("cannot read input file: " + path.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  const std::string contents = buf.str();
  return djb2(contents);
}

}  // namespace detail

// Orchestrates the analysis stages over an output directory. Each stage reads
// the artifacts of its predecessors from `out_dir` and writes its own, so
// stages can be rerun individually; a missing artifact names the stage that
// should have produced it. `manifest.json` accumulates parameters, input
// digests and per-stage status/timing.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config) : config_(std::move(config)) {
    config_.fingerprint.validate();
    config_.clustering.validate();
    config_.mining.validate();
    if (config_.out_dir.empty()) throw PipelineError("out_dir is required");
    std::filesystem::create_directories(config_.out_dir);
    load_manifest();
    record_params();
  }

  const PipelineConfig& config() const { return config_; }

  // --- artifact paths -------------------------------------------------------
  std::filesystem::path ir_dir() const { return config_.out_dir / "ir"; }
  std::filesystem::path ir_index_path() const { return ir_dir() / "index.tsv"; }
  std::filesystem::path lib_dir() const { return config_.out_dir / "lib"; }
  std::filesystem::path lib_index_path() const { return lib_dir() / "index.tsv"; }
  std::filesystem::path fingerprints_path() const {
    return config_.out_dir / "fingerprints.fpv";
  }
  std::filesystem::path maps_dir() const { return config_.out_dir / "maps"; }
  std::filesystem::path profiles_dir() const { return config_.out_dir / "profiles"; }
  std::filesystem::path stripped_path() const { return config_.out_dir / "stripped.fpv"; }
  std::filesystem::path strip_report_path() const {
    return config_.out_dir / "strip_report.tsv";
  }
  std::filesystem::path candidates_path() const {
    return config_.out_dir / "candidates.fpv";
  }
  std::filesystem::path signatures_path() const {
    return config_.out_dir / "signatures.mhs";
  }
  std::filesystem::path clusters_path() const { return config_.out_dir / "clusters.tsv"; }
  std::filesystem::path groups_path() const { return config_.out_dir / "groups.tsv"; }
  std::filesystem::path payloads_path() const { return config_.out_dir / "payloads.fpv"; }
  std::filesystem::path members_path() const {
    return config_.out_dir / "group_members.tsv";
  }
  std::filesystem::path stats_path() const { return config_.out_dir / "group_stats.tsv"; }
  std::filesystem::path reconstruction_dir() const {
    return config_.out_dir / "reconstruction";
  }
  std::filesystem::path manifest_path() const { return config_.out_dir / "manifest.json"; }

  // --- stage driver ---------------------------------------------------------

  void run_stage(const std::string& name) {
    const auto start = std::chrono::steady_clock::now();
    try {
      dispatch(name);
    } catch (const std::exception& e) {
      manifest_["stages"][name]["status"] = "error";
      manifest_["stages"][name]["error"] = e.what();
      save_manifest();
      throw;
    }
    const auto end = std::chrono::steady_clock::now();
    manifest_["stages"][name]["status"] = "ok";
    manifest_["stages"][name]["ms"] =
        std::chrono::duration<double, std::milli>(end - start).count();
    save_manifest();
  }

  void run_all() {
    for (const std::string& stage : pipeline_stage_order()) run_stage(stage);
  }

  // --- stage inputs loaded back from artifacts ------------------------------

  std::vector<AppIR> load_normalized_apps(const std::string& for_stage = "fingerprint") const {
    require(ir_index_path(), for_stage, "ingest");
    std::vector<AppIR> apps;
    for (const auto& [file, id] : read_index(ir_index_path())) {
      apps.push_back(parse_app_ir(slurp(ir_dir() / file)));
    }
    return apps;
  }

  // Library versions grouped by library name, in ingest order.
  std::vector<std::vector<LibraryIR>> load_normalized_libraries() const {
    require(lib_index_path(), "strip", "ingest");
    std::map<std::string, std::vector<LibraryIR>> grouped;
    std::vector<std::string> order;
    for (const auto& [file, name] : read_index(lib_index_path())) {
      if (!grouped.count(name)) order.push_back(name);
      grouped[name].push_back(parse_library_ir(slurp(lib_dir() / file)));
    }
    std::vector<std::vector<LibraryIR>> out;
    for (const std::string& name : order) out.push_back(std::move(grouped[name]));
    return out;
  }

  std::vector<CandidatePayload> load_candidates(const std::string& for_stage = "cluster") const {
    require(candidates_path(), for_stage, "candidates");
    std::vector<CandidatePayload> out;
    for (auto& [id, fp] : load_fingerprints(candidates_path())) {
      const std::size_t tab = id.find('\t');
      if (tab == std::string::npos) {
        throw PipelineError("candidate record id without app pair: " + id);
      }
      CandidatePayload cand;
      cand.payload_id = id;
      cand.apps = {id.substr(0, tab), id.substr(tab + 1)};
      cand.fingerprint = std::move(fp);
      out.push_back(std::move(cand));
    }
    return out;
  }

 private:
  void dispatch(const std::string& name) {
    if (name == "ingest") return stage_ingest();
    if (name == "fingerprint") return stage_fingerprint();
    if (name == "strip") return stage_strip();
    if (name == "candidates") return stage_candidates();
    if (name == "cluster") return stage_cluster();
    if (name == "mine") return stage_mine();
    if (name == "reconstruct") return stage_reconstruct();
    throw PipelineError("unknown stage '" + name + "'");
  }

  // --- stages ---------------------------------------------------------------

  void stage_ingest() {
    if (config_.corpus_dir.empty() || !std::filesystem::is_directory(config_.corpus_dir)) {
      throw PipelineError("ingest: corpus dir not found: " + config_.corpus_dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(config_.corpus_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".ir") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      throw PipelineError("ingest: no .ir files in " + config_.corpus_dir.string());
    }

    std::vector<AppIR> apps;
    nlohmann::json digests = nlohmann::json::object();
    for (const auto& file : files) {
      digests[file.filename().string()] = detail::file_digest(file);
      try {
        apps.push_back(parse_app_ir(slurp(file)));
      } catch (const ParseError& e) {
        throw PipelineError(file.string() + ": " + e.what());
      }
    }
    std::sort(apps.begin(), apps.end(),
              [](const AppIR& a, const AppIR& b) { return a.app_id < b.app_id; });
    for (std::size_t i = 1; i < apps.size(); ++i) {
      if (apps[i].app_id == apps[i - 1].app_id) {
        throw PipelineError("ingest: duplicate app id '" + apps[i].app_id + "'");
      }
    }
    std::filesystem::create_directories(ir_dir());
    std::ofstream index(ir_index_path(), std::ios::binary | std::ios::trunc);
    for (std::size_t i = 0; i < apps.size(); ++i) {
      const std::string file =
          detail::zero_pad(i, 5) + "-" + detail::sanitize_component(apps[i].app_id) + ".ir";
      std::ofstream os(ir_dir() / file, std::ios::binary | std::ios::trunc);
      os << serialize_app_ir(apps[i]);
      index << file << '\t' << apps[i].app_id << '\n';
    }

    std::filesystem::create_directories(lib_dir());
    std::map<std::string, std::uint32_t> version_counter;
    std::ofstream lib_index(lib_index_path(), std::ios::binary | std::ios::trunc);
    nlohmann::json lib_digests = nlohmann::json::object();
    std::size_t lib_files = 0;
    for (const auto& file : config_.library_files) {
      lib_digests[file.filename().string()] = detail::file_digest(file);
      LibraryIR lib;
      try {
        lib = parse_library_ir(slurp(file));
      } catch (const ParseError& e) {
        throw PipelineError(file.string() + ": " + e.what());
      }
      const std::uint32_t version = version_counter[lib.lib_name]++;
      const std::string out_file = detail::zero_pad(lib_files++, 5) + "-" +
                                   detail::sanitize_component(lib.lib_name) + "-v" +
                                   std::to_string(version) + ".ir";
      std::ofstream os(lib_dir() / out_file, std::ios::binary | std::ios::trunc);
      os << serialize_library_ir(lib);
      lib_index << out_file << '\t' << lib.lib_name << '\n';
    }
    manifest_["inputs"]["corpus"] = digests;
    manifest_["inputs"]["libraries"] = lib_digests;
    manifest_["stages"]["ingest"]["apps"] = apps.size();
    manifest_["stages"]["ingest"]["library_files"] = lib_files;
  }

  void stage_fingerprint() {
    const std::vector<AppIR> apps = load_normalized_apps();
    std::vector<FingerprintResult> results(apps.size());
    parallel_for(apps.size(), config_.jobs, [&](std::size_t i) {
      results[i] = fingerprint_app(apps[i], config_.fingerprint);
    });
    std::filesystem::create_directories(maps_dir());
    std::vector<std::pair<std::string, BitFingerprint>> fps;
    const auto index = read_index(ir_index_path());
    for (std::size_t i = 0; i < apps.size(); ++i) {
      fps.emplace_back(apps[i].app_id, std::move(results[i].fingerprint));
      const std::filesystem::path map_file =
          maps_dir() / (std::filesystem::path(index[i].first).stem().string() + ".map");
      save_feature_map(map_file, results[i].feature_map);
    }
    save_fingerprints(fingerprints_path(), fps);
    manifest_["stages"]["fingerprint"]["apps"] = apps.size();
  }

  void stage_strip() {
    require(fingerprints_path(), "strip", "fingerprint");
    const auto fps = load_fingerprints(fingerprints_path());
    const std::vector<AppIR> apps = load_normalized_apps("strip");
    if (apps.size() != fps.size()) {
      throw PipelineError("strip: fingerprint store does not match ingested corpus");
    }

    std::vector<LibraryProfile> profiles;
    std::filesystem::create_directories(profiles_dir());
    std::size_t pi = 0;
    for (const auto& versions : load_normalized_libraries()) {
      LibraryProfile profile = build_library_profile(versions, config_.fingerprint);
      save_library_profile(
          profiles_dir() / (detail::zero_pad(pi++, 5) + "-" +
                            detail::sanitize_component(profile.lib_name) + ".lib"),
          {profile.lib_name, profile.namespace_prefixes, profile.fingerprint});
      profiles.push_back(std::move(profile));
    }

    std::vector<StripResult> stripped(apps.size());
    parallel_for(apps.size(), config_.jobs, [&](std::size_t i) {
      stripped[i] = strip_libraries(fps[i].second, apps[i], profiles);
    });

    std::vector<std::pair<std::string, BitFingerprint>> out;
    std::ofstream report(strip_report_path(), std::ios::binary | std::ios::trunc);
    for (std::size_t i = 0; i < apps.size(); ++i) {
      report << fps[i].first << '\t' << stripped[i].removed.popcount() << '\t';
      for (std::size_t j = 0; j < stripped[i].applied_libs.size(); ++j) {
        if (j) report << ',';
        report << stripped[i].applied_libs[j];
      }
      report << '\n';
      out.emplace_back(fps[i].first, std::move(stripped[i].stripped));
    }
    save_fingerprints(stripped_path(), out);
    manifest_["stages"]["strip"]["profiles"] = profiles.size();
  }

  void stage_candidates() {
    require(stripped_path(), "candidates", "strip");
    std::map<std::string, BitFingerprint> apps;
    for (auto& [id, fp] : load_fingerprints(stripped_path())) {
      apps.emplace(id, std::move(fp));
    }
    const std::vector<CandidatePayload> candidates =
        extract_candidates(apps, config_.min_bits);
    std::vector<std::pair<std::string, BitFingerprint>> records;
    records.reserve(candidates.size());
    for (const CandidatePayload& cand : candidates) {
      records.emplace_back(cand.payload_id, cand.fingerprint);
    }
    save_fingerprints(candidates_path(), records);
    manifest_["stages"]["candidates"]["count"] = candidates.size();
  }

  void stage_cluster() {
    const std::vector<CandidatePayload> candidates = load_candidates();
    std::vector<std::pair<std::string, BitFingerprint>> items;
    items.reserve(candidates.size());
    for (const CandidatePayload& cand : candidates) {
      items.emplace_back(cand.payload_id, cand.fingerprint);
    }

    PayloadClusterSet clusters;
    if (config_.opt == OptLevel::minhash) {
      const MinHashConfig mh{config_.minhash_k, config_.seed};
      const std::vector<std::uint32_t> salts = minhash_salts(mh);
      std::vector<std::pair<std::string, MinHashSignature>> sigs(items.size());
      parallel_for(items.size(), config_.jobs, [&](std::size_t i) {
        sigs[i] = {items[i].first, minhash_signature(items[i].second, salts)};
      });
      SignatureStore store;
      store.k = mh.k;
      store.seed = mh.seed;
      store.salts = salts;
      for (const auto& [id, sig] : sigs) store.signatures.emplace_back(id, sig.values);
      save_signatures(signatures_path(), store);
      clusters = cluster_signatures(sigs, config_.clustering);
    } else if (config_.opt == OptLevel::prototype) {
      PrototypeConfig proto;
      proto.group_size = config_.group_size;
      proto.seed = config_.prototype_seed();
      clusters = prototype_cluster(items, config_.clustering, proto);
    } else {
      clusters = cluster_fingerprints(items, config_.clustering);
    }
    save_cluster_assignments(clusters_path(), clusters.clusters);
    manifest_["stages"]["cluster"]["clusters"] = clusters.clusters.size();
  }

  void stage_mine() {
    const std::vector<CandidatePayload> candidates = load_candidates("mine");
    require(clusters_path(), "mine", "cluster");
    PayloadClusterSet clusters;
    clusters.clusters = load_cluster_assignments(clusters_path());
    const MiningResult result = mine(candidates, clusters, config_.clustering, config_.mining);

    save_cluster_assignments(groups_path(), group_apps(result));
    std::vector<std::pair<std::string, BitFingerprint>> payload_records;
    std::vector<std::vector<std::string>> member_lists;
    std::ofstream stats(stats_path(), std::ios::binary | std::ios::trunc);
    for (std::size_t g = 0; g < result.selected.size(); ++g) {
      const SelectedCluster& sel = result.selected[g];
      payload_records.emplace_back("group" + std::to_string(g), sel.payload);
      member_lists.push_back(sel.members);
      stats << g << '\t' << sel.stats.l << '\t' << sel.stats.m << '\t' << sel.stats.k
            << '\t' << sel.theta << '\n';
    }
    save_fingerprints(payloads_path(), payload_records);
    save_cluster_assignments(members_path(), member_lists);
    manifest_["stages"]["mine"]["groups"] = result.selected.size();
  }

  void stage_reconstruct() {
    require(payloads_path(), "reconstruct", "mine");
    require(groups_path(), "reconstruct", "mine");
    require(ir_index_path(), "reconstruct", "ingest");
    const auto payloads = load_fingerprints(payloads_path());
    const auto groups = load_cluster_assignments(groups_path());
    if (payloads.size() != groups.size()) {
      throw PipelineError("reconstruct: payload store does not match groups");
    }
    std::map<std::string, std::string> file_of_app;
    for (const auto& [file, id] : read_index(ir_index_path())) file_of_app[id] = file;

    std::filesystem::create_directories(reconstruction_dir());
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (groups[g].empty()) continue;
      const std::string& exemplar = groups[g].front();
      auto it = file_of_app.find(exemplar);
      if (it == file_of_app.end()) {
        throw PipelineError("reconstruct: app '" + exemplar + "' missing from ingest index");
      }
      const AppIR app = parse_app_ir(slurp(ir_dir() / it->second));
      const std::filesystem::path map_file =
          maps_dir() / (std::filesystem::path(it->second).stem().string() + ".map");
      require(map_file, "reconstruct", "fingerprint");
      const FeatureBitMap map = load_feature_map(map_file);
      const std::string text =
          reconstruct_payload(payloads[g].second, app, map, config_.fingerprint.n);
      std::ofstream os(reconstruction_dir() / ("group" + std::to_string(g) + ".txt"),
                       std::ios::binary | std::ios::trunc);
      os << "payload group " << g << ", reconstructed from " << exemplar << "\n\n" << text;
    }
    manifest_["stages"]["reconstruct"]["groups"] = groups.size();
  }

  // --- manifest and small helpers ------------------------------------------

  void load_manifest() {
    manifest_ = nlohmann::json::object();
    if (std::filesystem::exists(manifest_path())) {
      std::ifstream is(manifest_path(), std::ios::binary);
      try {
        is >> manifest_;
      } catch (const nlohmann::json::exception&) {
        manifest_ = nlohmann::json::object();  // corrupt manifest: start over
      }
    }
  }

  void record_params() {
    nlohmann::json& p = manifest_["params"];
    p["ngram"] = config_.fingerprint.n;
    p["bits"] = config_.fingerprint.bits;
    p["theta"] = config_.clustering.theta;
    p["linkage"] = config_.clustering.linkage == Linkage::single ? "single" : "average";
    p["min_k"] = config_.mining.min_k;
    p["min_l"] = config_.mining.min_l;
    p["refine_step"] = config_.mining.refine_step;
    p["min_bits"] = config_.min_bits;
    p["opt"] = to_string(config_.opt);
    p["minhash_k"] = config_.minhash_k;
    p["group_size"] = config_.group_size;
    p["seed"] = config_.seed;
    p["jobs"] = config_.jobs;
    save_manifest();
  }

  void save_manifest() const {
    std::ofstream os(manifest_path(), std::ios::binary | std::ios::trunc);
    os << manifest_.dump(2) << '\n';
  }

  static void require(const std::filesystem::path& path, const std::string& stage,
                      const std::string& producer) {
    if (!std::filesystem::exists(path)) {
      throw PipelineError("stage '" + stage + "' requires artifact '" + path.string() +
                          "'; run the '" + producer + "' stage first");
    }
  }

  static std::string slurp(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw PipelineError("cannot read: " + path.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
  }

  // index.tsv rows: `<file>\t<id>`.
  static std::vector<std::pair<std::string, std::string>> read_index(
      const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw PipelineError("cannot read index: " + path.string());
    std::vector<std::pair<std::string, std::string>> rows;
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const std::size_t tab = line.find('\t');
      if (tab == std::string::npos) {
        throw PipelineError("malformed index line in " + path.string());
      }
      rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return rows;
  }

  PipelineConfig config_;
  nlohmann::json manifest_;
};

// --- evaluation over pipeline output ----------------------------------------

struct TruthRow {
  std::string app_id;
  std::string family;   // "-" marks a benign app
  std::string version;  // "-" for benign apps
};

// Truth file rows: `app_id\tfamily\tversion`.
inline std::vector<TruthRow> load_truth_tsv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PipelineError("cannot read truth file: " + path.string());
  std::vector<TruthRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw PipelineError("truth file " + path.string() + ": need 3 columns on line " +
                          std::to_string(line_no));
    }
    rows.push_back({line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), line.substr(t2 + 1)});
  }
  return rows;
}

inline void save_truth_tsv(const std::filesystem::path& path, const SynthCorpus& corpus) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw PipelineError("cannot write truth file: " + path.string());
  for (const AppIR& app : corpus.apps) {
    auto fam = corpus.truth.family_of_app.find(app.app_id);
    if (fam == corpus.truth.family_of_app.end()) {
      os << app.app_id << "\t-\t-\n";
    } else {
      os << app.app_id << '\t' << fam->second << '\t'
         << corpus.truth.version_of_app.at(app.app_id) << '\n';
    }
  }
}

// Reference partitions from truth rows: by family and by (family, version),
// with benign apps as singletons.
inline std::pair<std::vector<std::vector<std::string>>, std::vector<std::vector<std::string>>>
truth_partitions(const std::vector<TruthRow>& rows) {
  std::map<std::string, std::vector<std::string>> by_family, by_version;
  std::vector<std::vector<std::string>> family_groups, version_groups;
  for (const TruthRow& row : rows) {
    if (row.family == "-") {
      family_groups.push_back({row.app_id});
      version_groups.push_back({row.app_id});
    } else {
      by_family[row.family].push_back(row.app_id);
      by_version[row.family + "\t" + row.version].push_back(row.app_id);
    }
  }
  for (auto& [key, group] : by_family) {
    std::sort(group.begin(), group.end());
    family_groups.push_back(std::move(group));
  }
  for (auto& [key, group] : by_version) {
    std::sort(group.begin(), group.end());
    version_groups.push_back(std::move(group));
  }
  return {std::move(family_groups), std::move(version_groups)};
}

struct EvalReport {
  PrecisionRecall family;
  PrecisionRecall version;
};

// Scores mined app groups against the truth: each report compares the groups
// (completed with singletons over the truth universe) to the family and the
// family+version partitions.
inline EvalReport evaluate_groups(const std::vector<std::vector<std::string>>& groups,
                                  const std::vector<TruthRow>& rows) {
  std::vector<std::string> universe;
  universe.reserve(rows.size());
  for (const TruthRow& row : rows) universe.push_back(row.app_id);
  const auto completed = complete_with_singletons(groups, universe);
  const auto [family_ref, version_ref] = truth_partitions(rows);
  return {clustering_precision_recall(completed, family_ref),
          clustering_precision_recall(completed, version_ref)};
}

}  // namespace paymine
