// paymine: mines shared payloads from an app-IR corpus.
//
// Typical session:
//   paymine gen --corpus work/corpus --libs-dir work/libs --truth work/truth.tsv --seed 7
//   paymine run --corpus work/corpus --libs-dir work/libs --out work/out
//   paymine eval --out work/out --truth work/truth.tsv
//
// Every analysis stage can also be run on its own (ingest, fingerprint,
// strip, candidates, cluster, mine, reconstruct); each reads its inputs from
// --out and errors if a required upstream artifact is missing.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "paymine/paymine.hpp"

namespace fs = std::filesystem;

namespace {

struct CliOptions {
  std::string corpus;
  std::vector<std::string> libs;
  std::string libs_dir;
  std::string out;
  std::uint32_t ngram = 2;
  std::uint32_t bits = 8'388'608;
  double theta = 0.85;
  std::string linkage = "single";
  std::uint64_t min_k = 70;
  std::size_t min_l = 2;
  std::uint64_t min_bits = 1;
  std::string opt = "none";
  std::uint32_t minhash_k = 256;
  std::uint32_t group_size = 150;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

paymine::PipelineConfig make_pipeline_config(const CliOptions& opt) {
  paymine::PipelineConfig config;
  config.corpus_dir = opt.corpus;
  for (const std::string& lib : opt.libs) config.library_files.emplace_back(lib);
  if (!opt.libs_dir.empty()) {
    if (!fs::is_directory(opt.libs_dir)) {
      throw paymine::PipelineError("--libs-dir is not a directory: " + opt.libs_dir);
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(opt.libs_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".ir") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    config.library_files.insert(config.library_files.end(), files.begin(), files.end());
  }
  config.out_dir = opt.out;
  config.fingerprint.n = opt.ngram;
  config.fingerprint.bits = opt.bits;
  config.clustering.theta = opt.theta;
  config.clustering.linkage =
      opt.linkage == "average" ? paymine::Linkage::average : paymine::Linkage::single;
  config.mining.min_k = opt.min_k;
  config.mining.min_l = opt.min_l;
  config.min_bits = opt.min_bits;
  config.opt = paymine::opt_level_from_string(opt.opt);
  config.minhash_k = opt.minhash_k;
  config.group_size = opt.group_size;
  config.seed = opt.seed;
  config.jobs = opt.jobs;
  return config;
}

void add_common_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--corpus", opt.corpus, "Directory with app .ir files");
  cmd->add_option("--libs", opt.libs, "Library .ir files (repeatable)");
  cmd->add_option("--libs-dir", opt.libs_dir, "Directory with library .ir files");
  cmd->add_option("--out", opt.out, "Pipeline output directory");
  cmd->add_option("--ngram", opt.ngram, "n-gram window size")->capture_default_str();
  cmd->add_option("--bits", opt.bits, "Fingerprint width in bits")->capture_default_str();
  cmd->add_option("--theta", opt.theta, "Clustering similarity threshold")
      ->capture_default_str();
  cmd->add_option("--linkage", opt.linkage, "Cluster linkage")
      ->check(CLI::IsMember({"single", "average"}))
      ->capture_default_str();
  cmd->add_option("--min-k", opt.min_k, "Minimum shared payload bits to select a cluster")
      ->capture_default_str();
  cmd->add_option("--min-l", opt.min_l, "Minimum cluster entries")->capture_default_str();
  cmd->add_option("--min-bits", opt.min_bits, "Minimum candidate intersection bits")
      ->capture_default_str();
  cmd->add_option("--opt", opt.opt, "Acceleration: none|minhash|prototype")
      ->check(CLI::IsMember({"none", "minhash", "prototype"}))
      ->capture_default_str();
  cmd->add_option("--minhash-k", opt.minhash_k, "minHash signature length")
      ->capture_default_str();
  cmd->add_option("--group-size", opt.group_size, "Prototype clustering group size")
      ->capture_default_str();
  cmd->add_option("--seed", opt.seed, "Seed for randomized stages")->capture_default_str();
  cmd->add_option("--jobs", opt.jobs, "Worker threads (0 = all cores)")
      ->capture_default_str();
}

int run_stages(const CliOptions& opt, const std::vector<std::string>& stages) {
  paymine::Pipeline pipeline(make_pipeline_config(opt));
  for (const std::string& stage : stages) {
    pipeline.run_stage(stage);
    std::cout << "stage " << stage << ": ok\n";
  }
  return 0;
}

// --- gen --------------------------------------------------------------------

struct GenOptions {
  std::string truth;
  std::uint32_t families = 3;
  std::uint32_t versions = 2;
  std::uint32_t apps_per_version = 10;
  std::uint32_t benign = 6;
  std::uint32_t payload_methods = 6;
  std::uint32_t payload_method_len = 60;
  double version_overlap = 0.5;
  std::uint32_t libraries = 2;
  std::uint32_t lib_versions = 2;
  std::uint32_t pool_methods = 60;
  std::uint32_t universal_methods = 0;
  double inject_under_lib = 0.0;
};

int run_gen(const CliOptions& opt, const GenOptions& gen) {
  if (opt.corpus.empty()) throw paymine::PipelineError("gen: --corpus is required");

  paymine::SynthSpec spec;
  spec.seed = opt.seed;
  spec.fingerprint.n = opt.ngram;
  spec.fingerprint.bits = opt.bits;
  for (std::uint32_t f = 0; f < gen.families; ++f) {
    paymine::FamilySpec fam;
    fam.name = "fam" + std::to_string(f);
    fam.versions = gen.versions;
    fam.apps_per_version = gen.apps_per_version;
    fam.payload_methods = gen.payload_methods;
    fam.payload_method_len = gen.payload_method_len;
    fam.version_overlap = gen.version_overlap;
    spec.families.push_back(fam);
  }
  spec.benign_apps = gen.benign;
  spec.pool_methods = gen.pool_methods;
  spec.pool_picks = {2, 4};
  spec.universal_methods = gen.universal_methods;
  for (std::uint32_t l = 0; l < gen.libraries; ++l) {
    paymine::LibrarySpec lib;
    lib.name = "lib" + std::to_string(l) + ".core";
    lib.versions = gen.lib_versions;
    spec.libraries.push_back(lib);
  }
  if (!spec.libraries.empty()) spec.libs_per_app = {1, 2};
  spec.inject_under_lib_namespace = gen.inject_under_lib;

  const paymine::SynthCorpus corpus = paymine::generate_corpus(spec);

  fs::create_directories(opt.corpus);
  for (const paymine::AppIR& app : corpus.apps) {
    std::ofstream os(fs::path(opt.corpus) / (app.app_id + ".ir"),
                     std::ios::binary | std::ios::trunc);
    os << paymine::serialize_app_ir(app);
  }
  if (!opt.libs_dir.empty()) {
    fs::create_directories(opt.libs_dir);
    for (const auto& versions : corpus.libraries) {
      for (std::size_t v = 0; v < versions.size(); ++v) {
        std::ofstream os(fs::path(opt.libs_dir) /
                             (versions[v].code.app_id + ".ir"),
                         std::ios::binary | std::ios::trunc);
        os << paymine::serialize_library_ir(versions[v]);
      }
    }
  }
  if (!gen.truth.empty()) {
    paymine::save_truth_tsv(gen.truth, corpus);
  }
  std::cout << "generated " << corpus.apps.size() << " apps, "
            << corpus.libraries.size() << " libraries\n";
  return 0;
}

// --- eval -------------------------------------------------------------------

struct EvalOptions {
  std::string truth;
  std::string reference;
  std::string sweep;  // "lo:hi:step"
};

void print_report(const std::string& label, const paymine::EvalReport& report) {
  std::printf("%s family  P=%.4f R=%.4f\n", label.c_str(), report.family.precision,
              report.family.recall);
  std::printf("%s version P=%.4f R=%.4f\n", label.c_str(), report.version.precision,
              report.version.recall);
}

int run_eval(const CliOptions& opt, const EvalOptions& eval_opt) {
  if (opt.out.empty()) throw paymine::PipelineError("eval: --out is required");
  paymine::Pipeline pipeline(make_pipeline_config(opt));
  const fs::path groups_path = pipeline.groups_path();
  if (!fs::exists(groups_path)) {
    throw paymine::PipelineError("eval requires '" + groups_path.string() +
                                 "'; run the 'mine' stage first");
  }
  const auto groups = paymine::load_cluster_assignments(groups_path);
  nlohmann::json out;

  if (!eval_opt.reference.empty()) {
    const auto reference = paymine::load_cluster_assignments(eval_opt.reference);
    std::vector<std::string> universe;
    for (const auto& g : reference) universe.insert(universe.end(), g.begin(), g.end());
    const auto pr = paymine::clustering_precision_recall(
        paymine::complete_with_singletons(groups, universe), reference);
    std::printf("vs reference P=%.4f R=%.4f\n", pr.precision, pr.recall);
    out["reference"] = {{"precision", pr.precision}, {"recall", pr.recall}};
  }

  std::vector<paymine::TruthRow> truth;
  if (!eval_opt.truth.empty()) {
    truth = paymine::load_truth_tsv(eval_opt.truth);
    const paymine::EvalReport report = paymine::evaluate_groups(groups, truth);
    print_report("groups", report);
    out["truth"] = {
        {"family",
         {{"precision", report.family.precision}, {"recall", report.family.recall}}},
        {"version",
         {{"precision", report.version.precision}, {"recall", report.version.recall}}}};
  }

  if (!eval_opt.sweep.empty()) {
    if (truth.empty()) {
      throw paymine::PipelineError("--sweep-theta requires --truth");
    }
    double lo = 0, hi = 0, step = 0;
    if (std::sscanf(eval_opt.sweep.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 ||
        step <= 0) {
      throw paymine::PipelineError("--sweep-theta expects lo:hi:step");
    }
    const auto candidates = pipeline.load_candidates();
    std::vector<std::pair<std::string, paymine::BitFingerprint>> items;
    for (const auto& cand : candidates) items.emplace_back(cand.payload_id, cand.fingerprint);
    nlohmann::json sweep = nlohmann::json::array();
    for (double theta = lo; theta <= hi + 1e-9; theta += step) {
      paymine::ClusteringConfig ccfg = make_pipeline_config(opt).clustering;
      ccfg.theta = theta;
      const auto clusters = paymine::cluster_fingerprints(items, ccfg);
      const auto mined =
          paymine::mine(candidates, clusters, ccfg, make_pipeline_config(opt).mining);
      const paymine::EvalReport report =
          paymine::evaluate_groups(paymine::group_apps(mined), truth);
      std::printf("theta=%.2f ", theta);
      print_report("", report);
      sweep.push_back({{"theta", theta},
                       {"family",
                        {{"precision", report.family.precision},
                         {"recall", report.family.recall}}},
                       {"version",
                        {{"precision", report.version.precision},
                         {"recall", report.version.recall}}}});
    }
    out["sweep"] = sweep;
  }

  std::ofstream os(fs::path(opt.out) / "eval.json", std::ios::binary | std::ios::trunc);
  os << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paymine: shared-payload mining over app IR corpora"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file; command-line flags win");

  CliOptions opt;
  GenOptions gen_opt;
  EvalOptions eval_opt;

  CLI::App* run = app.add_subcommand("run", "Run all analysis stages");
  for (const std::string& stage : paymine::pipeline_stage_order()) {
    app.add_subcommand(stage, "Run only the '" + stage + "' stage");
  }
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic corpus");
  CLI::App* eval = app.add_subcommand("eval", "Score mined groups");

  for (CLI::App* cmd : app.get_subcommands({})) add_common_options(cmd, opt);

  gen->add_option("--truth", gen_opt.truth, "Write ground truth TSV here");
  gen->add_option("--families", gen_opt.families, "Malware families")->capture_default_str();
  gen->add_option("--versions", gen_opt.versions, "Payload versions per family")
      ->capture_default_str();
  gen->add_option("--apps-per-version", gen_opt.apps_per_version, "Apps per version")
      ->capture_default_str();
  gen->add_option("--benign", gen_opt.benign, "Benign apps")->capture_default_str();
  gen->add_option("--payload-methods", gen_opt.payload_methods, "Methods per payload")
      ->capture_default_str();
  gen->add_option("--payload-method-len", gen_opt.payload_method_len,
                  "Instructions per payload method")
      ->capture_default_str();
  gen->add_option("--version-overlap", gen_opt.version_overlap,
                  "Payload method overlap between versions")
      ->capture_default_str();
  gen->add_option("--libraries", gen_opt.libraries, "Synthetic libraries")
      ->capture_default_str();
  gen->add_option("--lib-versions", gen_opt.lib_versions, "Versions per library")
      ->capture_default_str();
  gen->add_option("--pool-methods", gen_opt.pool_methods, "Shared benign pool size")
      ->capture_default_str();
  gen->add_option("--inject-under-lib", gen_opt.inject_under_lib,
                  "Fraction of malicious apps whose payload classes are renamed "
                  "under a library namespace")
      ->capture_default_str();
  gen->add_option("--universal-methods", gen_opt.universal_methods,
                  "Methods shared by every app")
      ->capture_default_str();

  eval->add_option("--truth", eval_opt.truth, "Ground truth TSV");
  eval->add_option("--reference", eval_opt.reference, "Reference groups TSV");
  eval->add_option("--sweep-theta", eval_opt.sweep,
                   "Re-cluster and re-mine over thetas lo:hi:step");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_stages(opt, paymine::pipeline_stage_order());
    }
    for (const std::string& stage : paymine::pipeline_stage_order()) {
      if (app.get_subcommand(stage)->parsed()) return run_stages(opt, {stage});
    }
    if (gen->parsed()) return run_gen(opt, gen_opt);
    if (eval->parsed()) return run_eval(opt, eval_opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
