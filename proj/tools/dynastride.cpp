// Command-line front end: ingest -> caption -> evaluate -> report, plus a
// synthetic-corpus generator for mock runs.
//
// Exit codes: 0 success (or partial success), 1 nothing produced,
// 2 usage/config error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dynastride/pipeline.hpp"
#include "dynastride/synth.hpp"

namespace fs = std::filesystem;
using namespace dynastride;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNothingProduced = 1;
constexpr int kExitUsage = 2;

struct CliState {
  std::string config_path;
  bool mock = false;
  std::optional<long> seed;
  std::string out_dir;

  // Per-field overrides; only applied when the flag was passed.
  std::optional<std::string> manifest;
  std::optional<std::string> frames_root;
  std::optional<int> M, K, jobs;
  std::optional<double> s_base, s_max, alpha, tau;
  std::optional<bool> multi_image;
  std::optional<std::string> metrics;
};

RunConfig resolve_config(const CliState& cli) {
  RunConfig cfg;
  if (!cli.config_path.empty()) cfg = load_config_file(cli.config_path);
  if (cli.mock) cfg.mock = true;
  if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
  if (cli.manifest) cfg.manifest_path = *cli.manifest;
  if (cli.frames_root) cfg.frames_root = *cli.frames_root;
  if (cli.M) cfg.pipeline.subsample_rate = *cli.M;
  if (cli.K) cfg.pipeline.window_size = *cli.K;
  if (cli.s_base) cfg.pipeline.base_stride = *cli.s_base;
  if (cli.s_max) cfg.pipeline.max_stride = *cli.s_max;
  if (cli.alpha) cfg.pipeline.stride_alpha = *cli.alpha;
  if (cli.tau) cfg.pipeline.similarity_threshold = *cli.tau;
  if (cli.jobs) cfg.jobs = *cli.jobs;
  if (cli.multi_image) cfg.multi_image = *cli.multi_image;
  if (cli.metrics) apply_config_line(cfg, "metrics", *cli.metrics);
  apply_env_overrides(cfg);
  validate_config(cfg.pipeline);
  return cfg;
}

std::vector<long> resolve_seeds(const CliState& cli, const RunConfig& cfg) {
  if (cli.seed) return {*cli.seed};
  if (!cfg.seeds.empty()) return cfg.seeds;
  return {cfg.pipeline.seed};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_ingest(const std::string& annotations, const std::string& split,
               const std::string& manifest_out) {
  std::vector<std::string> skipped;
  const SceneManifest manifest = ingest_annotations(read_file(annotations), split, &skipped);
  fs::path out = manifest_out;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream f(out, std::ios::binary);
  if (!f) throw IoError("cannot write " + out.string());
  f << serialize_manifest(manifest);
  std::cout << "ingested " << manifest.entries.size() << " scene(s) into " << out.string()
            << "\n";
  if (manifest.entries.empty()) {
    std::cout << "warning: no scenes found for split '" << split << "'\n";
  }
  for (const std::string& s : skipped) std::cout << "skipped: " << s << "\n";
  return kExitOk;
}

int cmd_caption(const CliState& cli) {
  const RunConfig cfg = resolve_config(cli);
  if (cfg.manifest_path.empty() || cfg.frames_root.empty()) {
    throw ConfigError("caption requires --manifest and --frames-root (or config keys)");
  }
  int total_succeeded = 0;
  for (long seed : resolve_seeds(cli, cfg)) {
    const CaptionRunResult result = run_caption(cfg, seed);
    std::cout << "seed " << seed << ": " << result.scenes_succeeded << "/"
              << result.scenes_total << " scene(s) captioned -> " << result.captions_path.string()
              << "\n";
    for (const SceneFailure& f : result.failures) {
      std::cout << "  failed " << f.scene << ": " << f.error << "\n";
    }
    total_succeeded += result.scenes_succeeded;
  }
  return total_succeeded > 0 ? kExitOk : kExitNothingProduced;
}

int cmd_evaluate(const CliState& cli, const std::string& captions_path) {
  const RunConfig cfg = resolve_config(cli);
  if (cfg.manifest_path.empty()) {
    throw ConfigError("evaluate requires --manifest (or config key)");
  }
  int total_scored = 0;
  for (long seed : resolve_seeds(cli, cfg)) {
    const EvalRunResult result = run_eval(cfg, seed, captions_path);
    for (const std::string& miss : result.unmatched) {
      std::cout << "unmatched " << miss << "\n";
    }
    if (result.scenes_scored == 0) {
      std::cout << "seed " << seed << ": no matched scenes\n";
      continue;
    }
    std::cout << "seed " << seed << ": scored " << result.scenes_scored << " scene(s) -> "
              << result.report_path.string() << "\n";
    total_scored += result.scenes_scored;
  }
  return total_scored > 0 ? kExitOk : kExitNothingProduced;
}

int cmd_report(const std::vector<std::string>& report_files, const std::string& format_name,
               bool force, bool population_std, const std::string& out_file) {
  std::vector<RunRecord> records;
  for (const std::string& path : report_files) {
    RunRecord record;
    record.report = metric_report_from_json(read_file(path));
    record.seed = record.report.seed;
    record.config_fingerprint = record.report.config_fingerprint;
    records.push_back(std::move(record));
  }
  if (force && !records.empty()) {
    for (RunRecord& r : records) r.config_fingerprint = records.front().config_fingerprint;
  }
  const AggregateTable table = aggregate_runs(records, !population_std);
  const std::string rendered = emit_table(table, parse_table_format(format_name));
  if (out_file.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) throw IoError("cannot write " + out_file);
    out << rendered;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DynaStride scene-captioning pipeline and evaluation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  CliState cli;
  app.add_option("--config", cli.config_path, "flat key=value config file");
  app.add_flag("--mock", cli.mock, "use deterministic mock backends (no network)");
  long seed_value = 0;
  const auto seed_opt = app.add_option("--seed", seed_value, "run seed (overrides config)");
  app.add_option("--out", cli.out_dir, "output directory");

  // Pipeline overrides, shared by caption and evaluate so both resolve the
  // same config fingerprint.
  int M = 0, K = 0, jobs = 0;
  double s_base = 0, s_max = 0, alpha = 0, tau = 0;
  bool multi_image = false;
  std::string metrics_list;
  const auto m_opt = app.add_option("--M", M, "subsample rate");
  const auto k_opt = app.add_option("--K", K, "window size");
  const auto sb_opt = app.add_option("--s-base", s_base, "base stride");
  const auto sm_opt = app.add_option("--s-max", s_max, "max stride");
  const auto al_opt = app.add_option("--alpha", alpha, "stride scaling factor");
  const auto ta_opt = app.add_option("--tau", tau, "similarity threshold");
  const auto jo_opt = app.add_option("--jobs", jobs, "scene worker count");
  const auto mi_opt =
      app.add_flag("--multi-image", multi_image, "send one image per frame, not one wide image");
  app.add_option("--metrics", metrics_list, "comma list of metrics to compute");
  std::string manifest_in, frames_root;
  app.add_option("--manifest", manifest_in, "manifest JSON path");
  app.add_option("--frames-root", frames_root, "root directory of frame folders");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "convert an annotation database to a manifest");
  std::string annotations, split = "validation", manifest_out = "manifest.json";
  ingest->add_option("--annotations", annotations, "annotation JSON database")->required();
  ingest->add_option("--split", split, "split name to keep");
  ingest->add_option("--manifest-out", manifest_out, "manifest output path");

  // caption
  auto* caption = app.add_subcommand("caption", "run the captioning pipeline");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score captions against references");
  std::string captions_path;
  evaluate->add_option("--captions", captions_path,
                       "captions JSONL (default <out>/seed_<seed>/captions.jsonl)");

  // report
  auto* report = app.add_subcommand("report", "aggregate metric reports into a mean (std) table");
  std::vector<std::string> report_files;
  std::string format_name = "markdown", report_out;
  bool force = false, population_std = false;
  report->add_option("reports", report_files, "metric report JSON files")->required();
  report->add_option("--format", format_name, "json, csv or markdown");
  report->add_flag("--force", force, "aggregate despite mixed config fingerprints");
  report->add_flag("--population-std", population_std, "divide by n instead of n-1");
  report->add_option("--out-file", report_out, "write the table here instead of stdout");

  // synth
  auto* synth = app.add_subcommand("synth", "generate the bundled synthetic corpus");
  std::string synth_out = "synthetic_corpus";
  int synth_scenes = 12;
  long synth_seed = 1;
  synth->add_option("--out", synth_out, "corpus output directory");
  synth->add_option("--scenes", synth_scenes, "number of scenes");
  synth->add_option("--seed", synth_seed, "corpus generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (!seed_opt->empty()) cli.seed = seed_value;
  if (!m_opt->empty()) cli.M = M;
  if (!k_opt->empty()) cli.K = K;
  if (!sb_opt->empty()) cli.s_base = s_base;
  if (!sm_opt->empty()) cli.s_max = s_max;
  if (!al_opt->empty()) cli.alpha = alpha;
  if (!ta_opt->empty()) cli.tau = tau;
  if (!jo_opt->empty()) cli.jobs = jobs;
  if (!mi_opt->empty()) cli.multi_image = multi_image;
  if (!metrics_list.empty()) cli.metrics = metrics_list;
  if (!manifest_in.empty()) cli.manifest = manifest_in;
  if (!frames_root.empty()) cli.frames_root = frames_root;

  try {
    if (ingest->parsed()) return cmd_ingest(annotations, split, manifest_out);
    if (caption->parsed()) return cmd_caption(cli);
    if (evaluate->parsed()) return cmd_evaluate(cli, captions_path);
    if (report->parsed()) {
      return cmd_report(report_files, format_name, force, population_std, report_out);
    }
    if (synth->parsed()) {
      make_synth_corpus(synth_out, synth_seed, synth_scenes);
      std::cout << "wrote " << synth_scenes << " synthetic scene(s) under " << synth_out << "\n";
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNothingProduced;
  }
  return kExitUsage;
}
