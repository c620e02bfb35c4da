#include <doctest.h>

#include <fstream>

#include <json.hpp>

#include "dynastride/pipeline.hpp"
#include "dynastride/synth.hpp"
#include "support.hpp"

using namespace dynastride;
using testsupport::TempDir;

TEST_SUITE_BEGIN("pipeline");

namespace {

RunConfig mock_config(const std::filesystem::path& corpus, const std::filesystem::path& out) {
  RunConfig cfg;
  cfg.mock = true;
  cfg.manifest_path = (corpus / "manifest.json").string();
  cfg.frames_root = corpus.string();
  cfg.out_dir = out.string();
  cfg.pipeline.subsample_rate = 4;
  return cfg;
}

// Manifest + captions file where every candidate equals its reference.
void write_identity_fixture(const std::filesystem::path& dir, const std::string& fingerprint) {
  testsupport::write_file(dir / "manifest.json", R"({
    "split": "validation",
    "entries": [
      {"video_id": "vidA", "segment_index": 0, "start_frame": 0, "end_frame": 10,
       "reference_caption": "Chop the onions on the board.", "frames_dir": "vidA_0"},
      {"video_id": "vidA", "segment_index": 1, "start_frame": 11, "end_frame": 20,
       "reference_caption": "Whisk the eggs in the bowl.", "frames_dir": "vidA_1"}
    ]
  })");
  testsupport::write_file(
      dir / "captions.jsonl",
      R"({"video_id":"vidA","segment_index":0,"caption":"Chop the onions on the board.","retained_window_starts":[0],"config_fingerprint":")" +
          fingerprint + "\"}\n" +
          R"({"video_id":"vidA","segment_index":1,"caption":"Whisk the eggs in the bowl.","retained_window_starts":[0],"config_fingerprint":")" +
          fingerprint + "\"}\n");
}

}  // namespace

TEST_CASE("config files parse every documented key and reject unknown ones") {
  TempDir tmp("config");
  const auto path = tmp.path() / "run.conf";
  testsupport::write_file(path, R"(# pipeline
m = 4
k = 8
s_base = 5
s_max = 20
alpha = 2.0
tau = 0.4
seed = 3
seeds = 3, 4, 5
jobs = 2
mock = true
multi_image = false
metrics = bleu, meteor
manifest = corpus/manifest.json
frames_root = corpus
out = results
captioner_endpoint = http://localhost:9000/v1/chat/completions
captioner_model = vlm-7b
captioner_max_concurrency = 4
)");
  const RunConfig cfg = load_config_file(path);
  CHECK(cfg.pipeline.subsample_rate == 4);
  CHECK(cfg.pipeline.window_size == 8);
  CHECK(cfg.pipeline.base_stride == 5.0);
  CHECK(cfg.pipeline.max_stride == 20.0);
  CHECK(cfg.pipeline.stride_alpha == 2.0);
  CHECK(cfg.pipeline.similarity_threshold == 0.4);
  CHECK(cfg.pipeline.seed == 3);
  CHECK(cfg.seeds == std::vector<long>{3, 4, 5});
  CHECK(cfg.jobs == 2);
  CHECK(cfg.mock);
  CHECK(cfg.metrics == std::set<std::string>{"bleu", "meteor"});
  CHECK(cfg.manifest_path == "corpus/manifest.json");
  CHECK(cfg.pipeline.backends.at("captioner").model_id == "vlm-7b");
  CHECK(cfg.pipeline.backends.at("captioner").max_concurrency == 4);

  testsupport::write_file(path, "no_such_key = 1\n");
  CHECK_THROWS_AS(load_config_file(path), ConfigError);
  testsupport::write_file(path, "m 4\n");
  CHECK_THROWS_AS(load_config_file(path), ConfigError);
}

TEST_CASE("env vars override per-role endpoints") {
  RunConfig cfg;
  setenv("DYNASTRIDE_EMBEDDER_ENDPOINT", "http://env:1/v1/embeddings", 1);
  apply_env_overrides(cfg);
  unsetenv("DYNASTRIDE_EMBEDDER_ENDPOINT");
  CHECK(cfg.pipeline.backends.at("embedder").endpoint == "http://env:1/v1/embeddings");
}

TEST_CASE("fingerprint tracks content-shaping fields and ignores seeds and jobs") {
  RunConfig a;
  RunConfig b = a;
  CHECK(config_fingerprint(a) == config_fingerprint(b));

  b.pipeline.seed = 99;
  b.seeds = {1, 2, 3};
  b.jobs = 7;
  b.out_dir = "elsewhere";
  CHECK(config_fingerprint(a) == config_fingerprint(b));  // per-seed runs must share it

  b.pipeline.subsample_rate = 5;
  CHECK(config_fingerprint(a) != config_fingerprint(b));

  RunConfig c = a;
  c.pipeline.similarity_threshold = 0.7;
  CHECK(config_fingerprint(a) != config_fingerprint(c));

  RunConfig d = a;
  d.pipeline.backends["captioner"].model_id = "other-model";
  CHECK(config_fingerprint(a) != config_fingerprint(d));
}

TEST_CASE("make_backends provides mocks and enforces needed roles") {
  RunConfig cfg;
  cfg.mock = true;
  const BackendSet mocks = make_backends(cfg, 7, {"captioner", "embedder", "aggregator"});
  CHECK(mocks.captioner);
  CHECK(mocks.embedder);
  CHECK(mocks.aggregator);
  CHECK(mocks.pair_scorer);

  RunConfig live;
  live.mock = false;
  CHECK_THROWS_AS(make_backends(live, 7, {"captioner"}), ConfigError);
  live.pipeline.backends["captioner"] = {"http://x:1/v1/chat/completions", "m", 2};
  const BackendSet partial = make_backends(live, 7, {"captioner"});
  CHECK(partial.captioner);
  CHECK_FALSE(partial.embedder);
  CHECK(partial.max_concurrency == 2);
}

TEST_CASE("effective_jobs honors the tightest backend limit") {
  RunConfig cfg;
  cfg.jobs = 8;
  CHECK(effective_jobs(cfg, 0) == 8);
  CHECK(effective_jobs(cfg, 3) == 3);
  cfg.jobs = 2;
  CHECK(effective_jobs(cfg, 3) == 2);
}

TEST_CASE("mock caption run succeeds and is byte-identical across repeats") {
  TempDir tmp("caption_run");
  const auto corpus = tmp.path() / "corpus";
  make_synth_corpus(corpus, 1, 4);

  RunConfig cfg = mock_config(corpus, tmp.path() / "out1");
  const CaptionRunResult first = run_caption(cfg, 7);
  CHECK(first.scenes_total == 4);
  CHECK(first.scenes_succeeded == 4);
  CHECK(first.failures.empty());
  CHECK(std::filesystem::exists(first.captions_path));
  CHECK(std::filesystem::exists(first.subcaptions_path));
  CHECK(std::filesystem::exists(first.traces_path));
  CHECK(std::filesystem::exists(first.summary_path));

  cfg.out_dir = (tmp.path() / "out2").string();
  const CaptionRunResult second = run_caption(cfg, 7);
  CHECK(testsupport::read_file(first.captions_path) ==
        testsupport::read_file(second.captions_path));
  CHECK(testsupport::read_file(first.subcaptions_path) ==
        testsupport::read_file(second.subcaptions_path));
  CHECK(testsupport::read_file(first.traces_path) ==
        testsupport::read_file(second.traces_path));

  // jobs=1 serial pass produces the same bytes as the parallel pass.
  cfg.out_dir = (tmp.path() / "out3").string();
  cfg.jobs = 1;
  const CaptionRunResult serial = run_caption(cfg, 7);
  CHECK(testsupport::read_file(first.captions_path) ==
        testsupport::read_file(serial.captions_path));
}

TEST_CASE("caption artifacts share one fingerprint and the documented schemas") {
  TempDir tmp("fingerprints");
  const auto corpus = tmp.path() / "corpus";
  make_synth_corpus(corpus, 2, 2);
  RunConfig cfg = mock_config(corpus, tmp.path() / "out");
  const CaptionRunResult result = run_caption(cfg, 1);
  const std::string fp = config_fingerprint(cfg);
  for (const auto& path : {result.captions_path, result.subcaptions_path, result.traces_path,
                           result.summary_path}) {
    const std::string text = testsupport::read_file(path);
    CHECK(text.find(fp) != std::string::npos);
    CHECK(text.find("config_fingerprint") != std::string::npos);
  }

  auto first_line = [](const std::filesystem::path& p) {
    const std::string text = testsupport::read_file(p);
    return nlohmann::json::parse(text.substr(0, text.find('\n')));
  };
  const auto cap = first_line(result.captions_path);
  for (const char* key :
       {"video_id", "segment_index", "caption", "retained_window_starts", "config_fingerprint"}) {
    CHECK(cap.contains(key));
  }
  const auto sub = first_line(result.subcaptions_path);
  for (const char* key : {"video_id", "segment_index", "window_start", "action", "objects",
                          "raw", "config_fingerprint"}) {
    CHECK(sub.contains(key));
  }
  const auto visit = first_line(result.traces_path);
  for (const char* key : {"t", "decision", "sim", "s_after", "video_id", "segment_index"}) {
    CHECK(visit.contains(key));
  }
  CHECK(visit.at("decision") == "first");
  CHECK(visit.at("sim").is_null());
}

TEST_CASE("eval on identity captions hits the metric maxima") {
  TempDir tmp("eval_identity");
  RunConfig cfg;
  cfg.mock = true;
  cfg.manifest_path = (tmp.path() / "manifest.json").string();
  cfg.out_dir = (tmp.path() / "out").string();
  write_identity_fixture(tmp.path(), config_fingerprint(cfg));

  const EvalRunResult result = run_eval(cfg, 7, tmp.path() / "captions.jsonl");
  CHECK(result.scenes_scored == 2);
  CHECK(result.unmatched.empty());
  for (const SceneScore& s : result.report.scene_scores) {
    CHECK(*s.bleu4 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.bert->f1 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(*s.sbert == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(*s.dtw_align == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(std::filesystem::exists(result.report_path));
  CHECK(std::filesystem::exists(result.csv_path));
  const MetricReport parsed =
      metric_report_from_json(testsupport::read_file(result.report_path));
  CHECK(parsed.seed == 7);
  CHECK(parsed.config_fingerprint == config_fingerprint(cfg));
}

TEST_CASE("eval lists key mismatches and excludes them") {
  TempDir tmp("eval_mismatch");
  RunConfig cfg;
  cfg.mock = true;
  cfg.manifest_path = (tmp.path() / "manifest.json").string();
  cfg.out_dir = (tmp.path() / "out").string();
  write_identity_fixture(tmp.path(), "fp");

  // One caption replaced by an unknown scene key.
  testsupport::write_file(
      tmp.path() / "captions.jsonl",
      R"({"video_id":"vidA","segment_index":0,"caption":"Chop the onions on the board.","retained_window_starts":[0],"config_fingerprint":"fp"})"
      "\n"
      R"({"video_id":"ghost","segment_index":9,"caption":"Boo.","retained_window_starts":[0],"config_fingerprint":"fp"})"
      "\n");
  const EvalRunResult result = run_eval(cfg, 7, tmp.path() / "captions.jsonl");
  CHECK(result.scenes_scored == 1);
  REQUIRE(result.unmatched.size() == 2);
  CHECK(result.unmatched[0].find("vidA_1") != std::string::npos);
  CHECK(result.unmatched[1].find("ghost_9") != std::string::npos);

  // Zero overlap: nothing scored.
  testsupport::write_file(
      tmp.path() / "captions.jsonl",
      R"({"video_id":"ghost","segment_index":9,"caption":"Boo.","retained_window_starts":[0],"config_fingerprint":"fp"})"
      "\n");
  CHECK(run_eval(cfg, 7, tmp.path() / "captions.jsonl").scenes_scored == 0);
}

TEST_CASE("metric toggles restrict the report to the enabled fields") {
  TempDir tmp("eval_toggles");
  RunConfig cfg;
  cfg.mock = true;
  cfg.manifest_path = (tmp.path() / "manifest.json").string();
  cfg.out_dir = (tmp.path() / "out").string();
  cfg.metrics = {"bleu"};
  write_identity_fixture(tmp.path(), config_fingerprint(cfg));

  const EvalRunResult result = run_eval(cfg, 7, tmp.path() / "captions.jsonl");
  for (const SceneScore& s : result.report.scene_scores) {
    CHECK(s.bleu4.has_value());
    CHECK_FALSE(s.meteor.has_value());
    CHECK_FALSE(s.cider.has_value());
    CHECK_FALSE(s.bert.has_value());
    CHECK_FALSE(s.sbert.has_value());
    CHECK_FALSE(s.dtw_align.has_value());
    CHECK_FALSE(s.nli_contradict.has_value());
    CHECK_FALSE(s.nsp.has_value());
  }
  CHECK(result.report.corpus.bleu4.has_value());
  CHECK_FALSE(result.report.corpus.meteor.has_value());
}

TEST_CASE("evaluate is reproducible byte-for-byte for a fixed seed") {
  TempDir tmp("eval_repro");
  const auto corpus = tmp.path() / "corpus";
  make_synth_corpus(corpus, 3, 3);
  RunConfig cfg = mock_config(corpus, tmp.path() / "o1");
  run_caption(cfg, 5);
  const EvalRunResult e1 = run_eval(cfg, 5);
  cfg.out_dir = (tmp.path() / "o2").string();
  run_caption(cfg, 5);
  const EvalRunResult e2 = run_eval(cfg, 5);
  CHECK(testsupport::read_file(e1.report_path) == testsupport::read_file(e2.report_path));
  CHECK(testsupport::read_file(e1.csv_path) == testsupport::read_file(e2.csv_path));
}

// ---- CLI process-level checks ----

TEST_CASE("cli rejects out-of-range tau with exit code 2") {
  TempDir tmp("cli_tau");
  const auto r = testsupport::run_cli("caption --mock --tau 1.1 --manifest m.json "
                                      "--frames-root x",
                                      tmp.path());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("tau") != std::string::npos);
}

TEST_CASE("cli ingest reports parse failures with exit code 2") {
  TempDir tmp("cli_ingest");
  testsupport::write_file(tmp.path() / "broken.json", "{not json");
  const auto r = testsupport::run_cli("ingest --annotations broken.json", tmp.path());
  CHECK(r.exit_code == 2);
  const auto missing = testsupport::run_cli("ingest --annotations nope.json", tmp.path());
  CHECK(missing.exit_code == 2);
}

TEST_CASE("cli ingest writes a manifest and prints the entry count") {
  TempDir tmp("cli_ingest_ok");
  testsupport::write_file(tmp.path() / "ann.json", R"({
    "database": {"vidA": {"subset": "validation", "annotations": [
      {"id": 0, "segment": [0, 120], "sentence": "Chop."},
      {"id": 1, "segment": [121, 300], "sentence": "Stir."}
    ]}}})");
  const auto r = testsupport::run_cli(
      "ingest --annotations ann.json --manifest-out manifest.json", tmp.path());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("2 scene(s)") != std::string::npos);
  const SceneManifest m =
      parse_manifest(testsupport::read_file(tmp.path() / "manifest.json"));
  CHECK(m.entries.size() == 2);

  // Zero matching segments still succeeds, with a warning.
  const auto empty = testsupport::run_cli(
      "ingest --annotations ann.json --split training --manifest-out t.json", tmp.path());
  CHECK(empty.exit_code == 0);
  CHECK(empty.output.find("warning") != std::string::npos);
}

TEST_CASE("cli evaluate with zero matched scenes exits 1") {
  TempDir tmp("cli_eval_none");
  RunConfig cfg;
  write_identity_fixture(tmp.path(), "fp");
  testsupport::write_file(
      tmp.path() / "captions.jsonl",
      R"({"video_id":"ghost","segment_index":9,"caption":"Boo.","retained_window_starts":[0],"config_fingerprint":"fp"})"
      "\n");
  const auto r = testsupport::run_cli(
      "evaluate --mock --seed 1 --manifest manifest.json --captions captions.jsonl", tmp.path());
  CHECK(r.exit_code == 1);
}

TEST_CASE("cli runs every config seed and flags override config values") {
  TempDir tmp("cli_seeds");
  make_synth_corpus(tmp.path() / "corpus", 1, 2);
  testsupport::write_file(tmp.path() / "run.conf",
                          "mock = true\n"
                          "manifest = corpus/manifest.json\n"
                          "frames_root = corpus\n"
                          "m = 4\n"
                          "seeds = 1, 2\n"
                          "out = out\n");
  const auto r = testsupport::run_cli("caption --config run.conf", tmp.path());
  CHECK(r.exit_code == 0);
  CHECK(std::filesystem::exists(tmp.path() / "out" / "seed_1" / "captions.jsonl"));
  CHECK(std::filesystem::exists(tmp.path() / "out" / "seed_2" / "captions.jsonl"));

  // --seed beats the config seed list; --out beats the config out dir.
  const auto over =
      testsupport::run_cli("caption --config run.conf --seed 9 --out other", tmp.path());
  CHECK(over.exit_code == 0);
  CHECK(std::filesystem::exists(tmp.path() / "other" / "seed_9" / "captions.jsonl"));
  CHECK_FALSE(std::filesystem::exists(tmp.path() / "other" / "seed_1"));
}

TEST_CASE("cli report rejects mixed fingerprints unless forced") {
  TempDir tmp("cli_report");
  MetricReport a;
  a.config_fingerprint = "fpA";
  a.seed = 1;
  a.corpus.bleu4 = 0.5;
  MetricReport b = a;
  b.config_fingerprint = "fpB";
  b.seed = 2;
  testsupport::write_file(tmp.path() / "a.json", metric_report_to_json(a));
  testsupport::write_file(tmp.path() / "b.json", metric_report_to_json(b));

  const auto mixed = testsupport::run_cli("report a.json b.json", tmp.path());
  CHECK(mixed.exit_code == 2);
  const auto forced = testsupport::run_cli("report a.json b.json --force", tmp.path());
  CHECK(forced.exit_code == 0);
  CHECK(forced.output.find("0.50 (0.00)") != std::string::npos);

  // File output round-trips through the json format.
  const auto to_file = testsupport::run_cli(
      "report a.json --format json --out-file table.json", tmp.path());
  CHECK(to_file.exit_code == 0);
  const AggregateTable table =
      parse_aggregate_table(testsupport::read_file(tmp.path() / "table.json"));
  REQUIRE(table.cells.size() == 1);
  CHECK(table.cells[0].mean == doctest::Approx(0.5));
}

TEST_SUITE_END();
