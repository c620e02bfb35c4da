#ifndef DYNASTRIDE_PIPELINE_HPP
#define DYNASTRIDE_PIPELINE_HPP

#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "dynastride/aggregate.hpp"
#include "dynastride/backends.hpp"
#include "dynastride/backends_http.hpp"
#include "dynastride/ingest.hpp"
#include "dynastride/report.hpp"
#include "dynastride/stride.hpp"

namespace dynastride {

// Fully resolved run configuration: pipeline knobs plus paths, seeds,
// metric toggles and worker limits. Flags override config-file values,
// which override the defaults here.
struct RunConfig {
  PipelineConfig pipeline;
  std::string manifest_path;
  std::string frames_root;
  std::string out_dir = "out";
  std::vector<long> seeds;  // resolved before a run; never empty then
  std::set<std::string> metrics = {"bleu", "meteor", "cider",
                                   "bertscore", "sbert", "dtw", "nli", "nsp"};
  int jobs = 0;  // 0 = hardware concurrency; capped by backend limits
  bool mock = false;
  int mock_embed_dim = 32;
  bool multi_image = false;
  double temperature = 0.0;
  int http_retry_base_ms = 250;
  int http_timeout_sec = 120;
};

// Flat "key = value" config file; '#' starts a comment. Unknown keys raise
// ConfigError so typos fail loudly.
RunConfig load_config_file(const std::filesystem::path& path);
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value);

// DYNASTRIDE_<ROLE>_ENDPOINT variables override per-role endpoints.
void apply_env_overrides(RunConfig& cfg);

// Stable hash of everything that shapes the run's outputs. Seeds, worker
// counts, output paths and retry tuning are excluded so per-seed artifacts
// of one configuration share a fingerprint.
std::string config_fingerprint(const RunConfig& cfg);

// The four model roles, mock or HTTP depending on config.
struct BackendSet {
  std::unique_ptr<CaptionerInterface> captioner;
  std::unique_ptr<EmbedderInterface> embedder;
  std::unique_ptr<AggregatorInterface> aggregator;
  std::unique_ptr<PairScorerInterface> pair_scorer;  // may be null
  int max_concurrency = 0;  // tightest configured backend limit; 0 = unlimited
};

// Throws ConfigError when a required role is neither mocked nor configured.
// `need` lists the roles the command is about to use.
BackendSet make_backends(const RunConfig& cfg, long seed, const std::set<std::string>& need);

struct SceneFailure {
  std::string scene;  // "<video_id>_<segment_index>"
  std::string error;
};

struct CaptionRunResult {
  int scenes_total = 0;
  int scenes_succeeded = 0;
  std::vector<SceneFailure> failures;
  std::filesystem::path captions_path;
  std::filesystem::path subcaptions_path;
  std::filesystem::path traces_path;
  std::filesystem::path summary_path;
};

// Full caption pass for one seed: subsample -> stride-select -> aggregate for
// every manifest scene, scenes processed in parallel, artifacts written in
// manifest order under <out>/seed_<seed>/.
CaptionRunResult run_caption(const RunConfig& cfg, long seed);

struct EvalRunResult {
  int scenes_scored = 0;
  std::vector<std::string> unmatched;  // caption/reference key mismatches
  std::filesystem::path report_path;
  std::filesystem::path csv_path;
  MetricReport report;
};

// Scores a captions file against the manifest references; writes the metric
// report JSON and CSV next to the captions. `captions_override` replaces the
// default <out>/seed_<seed>/captions.jsonl.
EvalRunResult run_eval(const RunConfig& cfg, long seed,
                       const std::filesystem::path& captions_override = {});

// Worker count for a run: min(jobs or hardware, backend limit).
int effective_jobs(const RunConfig& cfg, int backend_limit);

}  // namespace dynastride

#endif  // DYNASTRIDE_PIPELINE_HPP
