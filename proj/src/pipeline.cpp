#include "dynastride/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include <json.hpp>

#include "dynastride/similarity.hpp"
#include "dynastride/text.hpp"

namespace dynastride {

namespace {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected integer, got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

const std::vector<std::string>& backend_roles() {
  static const std::vector<std::string> kRoles = {"captioner", "embedder", "aggregator",
                                                  "pair_scorer"};
  return kRoles;
}

std::string fmt_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string scene_key(const std::string& video_id, int segment_index) {
  return video_id + "_" + std::to_string(segment_index);
}

// Per-scene seed for the NSP shuffle, so scenes are independent of the
// order and parallelism they are scored in.
long scene_seed(long run_seed, const std::string& key) {
  return static_cast<long>(fnv1a64(key.data(), key.size()) ^
                           static_cast<std::uint64_t>(run_seed));
}

EmbeddingVector normalized(EmbeddingVector v) {
  double norm = 0.0;
  for (double x : v.values) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v.values) x /= norm;
  }
  return v;
}

}  // namespace

void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "manifest") {
    cfg.manifest_path = value;
  } else if (key == "frames_root") {
    cfg.frames_root = value;
  } else if (key == "out") {
    cfg.out_dir = value;
  } else if (key == "m") {
    cfg.pipeline.subsample_rate = static_cast<int>(parse_long(key, value));
  } else if (key == "k") {
    cfg.pipeline.window_size = static_cast<int>(parse_long(key, value));
  } else if (key == "s_base") {
    cfg.pipeline.base_stride = parse_double(key, value);
  } else if (key == "s_max") {
    cfg.pipeline.max_stride = parse_double(key, value);
  } else if (key == "alpha") {
    cfg.pipeline.stride_alpha = parse_double(key, value);
  } else if (key == "tau") {
    cfg.pipeline.similarity_threshold = parse_double(key, value);
  } else if (key == "seed") {
    cfg.pipeline.seed = parse_long(key, value);
  } else if (key == "seeds") {
    cfg.seeds.clear();
    for (const std::string& s : split_list(value)) cfg.seeds.push_back(parse_long(key, s));
  } else if (key == "jobs") {
    cfg.jobs = static_cast<int>(parse_long(key, value));
  } else if (key == "mock") {
    cfg.mock = parse_bool(key, value);
  } else if (key == "mock_embed_dim") {
    cfg.mock_embed_dim = static_cast<int>(parse_long(key, value));
  } else if (key == "multi_image") {
    cfg.multi_image = parse_bool(key, value);
  } else if (key == "temperature") {
    cfg.temperature = parse_double(key, value);
  } else if (key == "http_retry_base_ms") {
    cfg.http_retry_base_ms = static_cast<int>(parse_long(key, value));
  } else if (key == "http_timeout_sec") {
    cfg.http_timeout_sec = static_cast<int>(parse_long(key, value));
  } else if (key == "metrics") {
    cfg.metrics.clear();
    for (const std::string& m : split_list(value)) cfg.metrics.insert(to_lower(m));
  } else {
    for (const std::string& role : backend_roles()) {
      if (key == role + "_endpoint") {
        cfg.pipeline.backends[role].endpoint = value;
        return;
      }
      if (key == role + "_model") {
        cfg.pipeline.backends[role].model_id = value;
        return;
      }
      if (key == role + "_max_concurrency") {
        cfg.pipeline.backends[role].max_concurrency = static_cast<int>(parse_long(key, value));
        return;
      }
    }
    throw ConfigError("unknown config key '" + key + "'");
  }
}

RunConfig load_config_file(const std::filesystem::path& path) {
  RunConfig cfg;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_config_line(cfg, to_lower(trim(t.substr(0, eq))), trim(t.substr(eq + 1)));
  }
  return cfg;
}

void apply_env_overrides(RunConfig& cfg) {
  for (const std::string& role : backend_roles()) {
    std::string var = "DYNASTRIDE_" + role;
    for (char& c : var) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    var += "_ENDPOINT";
    if (const char* v = std::getenv(var.c_str())) {
      cfg.pipeline.backends[role].endpoint = v;
    }
  }
}

std::string config_fingerprint(const RunConfig& cfg) {
  // Canonical key=value text over everything that shapes output content.
  std::string text;
  text += "m=" + std::to_string(cfg.pipeline.subsample_rate);
  text += ";k=" + std::to_string(cfg.pipeline.window_size);
  text += ";s_base=" + fmt_double(cfg.pipeline.base_stride);
  text += ";s_max=" + fmt_double(cfg.pipeline.max_stride);
  text += ";alpha=" + fmt_double(cfg.pipeline.stride_alpha);
  text += ";tau=" + fmt_double(cfg.pipeline.similarity_threshold);
  text += ";manifest=" + cfg.manifest_path;
  text += ";frames_root=" + cfg.frames_root;
  text += ";mock=" + std::string(cfg.mock ? "1" : "0");
  text += ";mock_embed_dim=" + std::to_string(cfg.mock_embed_dim);
  text += ";multi_image=" + std::string(cfg.multi_image ? "1" : "0");
  text += ";temperature=" + fmt_double(cfg.temperature);
  text += ";metrics=";
  for (const std::string& m : cfg.metrics) text += m + ",";
  for (const std::string& role : backend_roles()) {
    const auto it = cfg.pipeline.backends.find(role);
    if (it == cfg.pipeline.backends.end()) continue;
    text += ";" + role + "=" + it->second.endpoint + "|" + it->second.model_id;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(text.data(), text.size())));
  return buf;
}

int effective_jobs(const RunConfig& cfg, int backend_limit) {
  int jobs = cfg.jobs > 0 ? cfg.jobs
                          : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (backend_limit > 0) jobs = std::min(jobs, backend_limit);
  return std::max(1, jobs);
}

BackendSet make_backends(const RunConfig& cfg, long seed, const std::set<std::string>& need) {
  BackendSet set;
  if (cfg.mock) {
    set.captioner = std::make_unique<MockCaptioner>(seed);
    set.embedder = std::make_unique<MockEmbedder>(cfg.mock_embed_dim);
    set.aggregator = std::make_unique<MockAggregator>();
    set.pair_scorer = std::make_unique<MockPairScorer>(cfg.mock_embed_dim);
    return set;
  }

  HttpOptions opts;
  opts.temperature = cfg.temperature;
  opts.seed = seed;
  opts.multi_image = cfg.multi_image;
  opts.retry_base_ms = cfg.http_retry_base_ms;
  opts.timeout_sec = cfg.http_timeout_sec;

  int limit = 0;
  auto merge_limit = [&](int backend) {
    if (backend >= 1) limit = limit == 0 ? backend : std::min(limit, backend);
  };
  auto find_role = [&](const std::string& role) -> const BackendRef* {
    const auto it = cfg.pipeline.backends.find(role);
    if (it == cfg.pipeline.backends.end() || it->second.endpoint.empty()) return nullptr;
    return &it->second;
  };

  if (const BackendRef* r = find_role("captioner")) {
    set.captioner = std::make_unique<HttpChatBackend>(*r, opts);
    merge_limit(r->max_concurrency);
  }
  if (const BackendRef* r = find_role("embedder")) {
    set.embedder = std::make_unique<HttpEmbedder>(*r, opts);
    merge_limit(r->max_concurrency);
  }
  if (const BackendRef* r = find_role("aggregator")) {
    set.aggregator = std::make_unique<HttpChatBackend>(*r, opts);
    merge_limit(r->max_concurrency);
  }
  if (const BackendRef* r = find_role("pair_scorer")) {
    set.pair_scorer = std::make_unique<HttpPairScorer>(*r, opts);
    merge_limit(r->max_concurrency);
  }
  set.max_concurrency = limit;

  for (const std::string& role : need) {
    const bool have = (role == "captioner" && set.captioner) ||
                      (role == "embedder" && set.embedder) ||
                      (role == "aggregator" && set.aggregator) ||
                      (role == "pair_scorer" && set.pair_scorer);
    if (!have) {
      throw ConfigError("backend role '" + role + "' is not configured (set " + role +
                        "_endpoint or use --mock)");
    }
  }
  return set;
}

CaptionRunResult run_caption(const RunConfig& cfg, long seed) {
  validate_config(cfg.pipeline);
  const SceneManifest manifest = parse_manifest(read_text_file(cfg.manifest_path));
  const std::string fingerprint = config_fingerprint(cfg);
  BackendSet backends = make_backends(cfg, seed, {"captioner", "embedder", "aggregator"});
  const int jobs = effective_jobs(cfg, backends.max_concurrency);

  struct SceneOutput {
    bool ok = false;
    bool has_trace = false;
    std::string error;
    AggregationRecord record;
    StrideTrace trace;
  };
  const int n = static_cast<int>(manifest.entries.size());
  std::vector<SceneOutput> outputs(n);

#if defined(_OPENMP)
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
#endif
  for (int i = 0; i < n; ++i) {
    const SceneManifestEntry& entry = manifest.entries[i];
    SceneOutput& out = outputs[i];
    try {
      const Scene scene = load_scene_frames(entry, cfg.frames_root, manifest.split);
      const SubsampledSequence seq = subsample(scene, cfg.pipeline.subsample_rate);
      StrideResult stride = select_windows(seq, cfg.pipeline, *backends.captioner,
                                           *backends.embedder);
      out.trace = std::move(stride.trace);
      out.has_trace = true;
      out.record = aggregate_scene(stride.retained, *backends.aggregator, entry.video_id,
                                   entry.segment_index, fingerprint);
      out.ok = true;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  }

  const std::filesystem::path dir =
      std::filesystem::path(cfg.out_dir) / ("seed_" + std::to_string(seed));
  std::filesystem::create_directories(dir);

  CaptionRunResult result;
  result.scenes_total = n;
  result.captions_path = dir / "captions.jsonl";
  result.subcaptions_path = dir / "subcaptions.jsonl";
  result.traces_path = dir / "traces.jsonl";
  result.summary_path = dir / "run_summary.json";

  std::string captions, subcaptions, traces;
  for (int i = 0; i < n; ++i) {
    const SceneManifestEntry& entry = manifest.entries[i];
    const SceneOutput& out = outputs[i];
    if (out.has_trace) {
      for (const StrideVisit& v : out.trace.visits) {
        json line = {{"video_id", entry.video_id},    {"segment_index", entry.segment_index},
                     {"t", v.t},                      {"decision", to_string(v.decision)},
                     {"s_after", v.stride_after},     {"config_fingerprint", fingerprint}};
        line["sim"] = v.similarity ? json(*v.similarity) : json(nullptr);
        traces += line.dump() + "\n";
      }
    }
    if (!out.ok) {
      result.failures.push_back({scene_key(entry.video_id, entry.segment_index), out.error});
      continue;
    }
    ++result.scenes_succeeded;
    const SceneCaption& cap = out.record.caption;
    captions += json{{"video_id", cap.video_id},
                     {"segment_index", cap.segment_index},
                     {"caption", cap.caption},
                     {"retained_window_starts", cap.retained_window_starts},
                     {"config_fingerprint", cap.config_fingerprint}}
                    .dump() +
                "\n";
    for (const Subcaption& sub : out.record.input_subcaptions) {
      subcaptions += json{{"video_id", cap.video_id},
                          {"segment_index", cap.segment_index},
                          {"window_start", sub.window_start},
                          {"action", sub.action},
                          {"objects", sub.objects},
                          {"raw", sub.raw},
                          {"config_fingerprint", fingerprint}}
                         .dump() +
                     "\n";
    }
  }

  json failures = json::array();
  for (const SceneFailure& f : result.failures) {
    failures.push_back({{"scene", f.scene}, {"error", f.error}});
  }
  const json summary = {{"split", manifest.split},
                        {"scenes_total", result.scenes_total},
                        {"scenes_succeeded", result.scenes_succeeded},
                        {"failures", failures},
                        {"config_fingerprint", fingerprint},
                        {"seed", seed}};

  write_text_file(result.captions_path, captions);
  write_text_file(result.subcaptions_path, subcaptions);
  write_text_file(result.traces_path, traces);
  write_text_file(result.summary_path, summary.dump(2) + "\n");
  return result;
}

EvalRunResult run_eval(const RunConfig& cfg, long seed,
                       const std::filesystem::path& captions_override) {
  validate_config(cfg.pipeline);
  const SceneManifest manifest = parse_manifest(read_text_file(cfg.manifest_path));
  const std::string fingerprint = config_fingerprint(cfg);
  const std::filesystem::path dir =
      std::filesystem::path(cfg.out_dir) / ("seed_" + std::to_string(seed));
  const std::filesystem::path captions_path =
      captions_override.empty() ? dir / "captions.jsonl" : captions_override;

  // Parse the captions file into a scene-key map.
  std::map<std::string, std::string> captions;
  {
    std::ifstream in(captions_path);
    if (!in) throw IoError("cannot open captions file " + captions_path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& ex) {
        throw ParseError("captions line " + std::to_string(line_no) + ": " + ex.what());
      }
      captions[scene_key(obj.at("video_id").get<std::string>(),
                         obj.at("segment_index").get<int>())] =
          obj.at("caption").get<std::string>();
    }
  }

  EvalRunResult result;
  struct Matched {
    const SceneManifestEntry* entry;
    std::string candidate;
  };
  std::vector<Matched> matched;
  std::set<std::string> seen;
  for (const SceneManifestEntry& entry : manifest.entries) {
    const std::string key = scene_key(entry.video_id, entry.segment_index);
    const auto it = captions.find(key);
    if (it == captions.end()) {
      result.unmatched.push_back(key + ": no caption");
      continue;
    }
    seen.insert(key);
    matched.push_back({&entry, it->second});
  }
  for (const auto& [key, cap] : captions) {
    if (!seen.count(key)) result.unmatched.push_back(key + ": no reference");
  }
  if (matched.empty()) {
    return result;  // caller reports zero matched scenes
  }

  BackendSet backends = make_backends(cfg, seed, {});
  auto enabled = [&](const char* name) { return cfg.metrics.count(name) > 0; };
  const bool want_embedding = enabled("bertscore") || enabled("sbert") || enabled("dtw");
  const bool want_pairs = enabled("nli") || enabled("nsp");
  const bool have_embedder = static_cast<bool>(backends.embedder);
  const bool have_scorer = static_cast<bool>(backends.pair_scorer);
  if (want_embedding && !have_embedder) {
    std::clog << "[eval] no embedder backend configured; skipping bertscore/sbert/dtw\n";
  }
  if (want_pairs && !have_scorer) {
    std::clog << "[eval] no pair-scorer backend configured; skipping nli/nsp\n";
  }

  const int jobs = effective_jobs(cfg, backends.max_concurrency);
  const int n = static_cast<int>(matched.size());
  std::vector<SceneScore> scores(n);

#if defined(_OPENMP)
#pragma omp parallel for num_threads(jobs) schedule(dynamic)
#endif
  for (int i = 0; i < n; ++i) {
    const SceneManifestEntry& entry = *matched[i].entry;
    const std::string& candidate = matched[i].candidate;
    const std::string& reference = entry.reference_caption;
    SceneScore& s = scores[i];
    s.video_id = entry.video_id;
    s.segment_index = entry.segment_index;

    const TokenSequence cand_tokens = tokenize(candidate);
    const TokenSequence ref_tokens = tokenize(reference);
    if (enabled("bleu")) s.bleu4 = bleu4(cand_tokens, {ref_tokens});
    if (enabled("meteor")) s.meteor = meteor_lite(cand_tokens, ref_tokens);

    if (have_embedder) {
      if (enabled("bertscore") && !cand_tokens.empty() && !ref_tokens.empty()) {
        try {
          std::vector<EmbeddingVector> ce = backends.embedder->embed_tokens(cand_tokens);
          std::vector<EmbeddingVector> re = backends.embedder->embed_tokens(ref_tokens);
          for (auto& v : ce) v = normalized(std::move(v));
          for (auto& v : re) v = normalized(std::move(v));
          s.bert = bertscore(ce, re);
        } catch (const Error&) {
        }
      }
      if (enabled("sbert")) {
        try {
          s.sbert = sbert_similarity(candidate, reference, *backends.embedder);
        } catch (const Error&) {
        }
      }
      if (enabled("dtw")) {
        try {
          std::vector<EmbeddingVector> xs, ys;
          for (const std::string& sent : split_sentences(candidate)) {
            xs.push_back(backends.embedder->embed(sent));
          }
          for (const std::string& sent : split_sentences(reference)) {
            ys.push_back(backends.embedder->embed(sent));
          }
          if (!xs.empty() && !ys.empty()) s.dtw_align = dtw_align(xs, ys);
        } catch (const Error&) {
        }
      }
    }
    if (have_scorer) {
      if (enabled("nli")) {
        const NliAggregate agg =
            nli_contradiction({{candidate, reference}}, *backends.pair_scorer);
        s.nli_contradict = agg.mean_contradiction;
      }
      if (enabled("nsp")) {
        const auto nsp =
            nsp_coherence(split_sentences(candidate), *backends.pair_scorer,
                          scene_seed(seed, scene_key(entry.video_id, entry.segment_index)));
        if (nsp) s.nsp = NspScores{nsp->nsp_true, nsp->nsp_shuffled, nsp->nsp_delta};
      }
    }
  }

  if (enabled("cider")) {
    std::vector<TokenSequence> cands;
    std::vector<std::vector<TokenSequence>> refs;
    cands.reserve(matched.size());
    for (const Matched& m : matched) {
      cands.push_back(tokenize(m.candidate));
      refs.push_back({tokenize(m.entry->reference_caption)});
    }
    const std::vector<double> cider_scores = cider(cands, refs);
    for (int i = 0; i < n; ++i) scores[i].cider = cider_scores[i];
  }

  MetricReport report;
  report.scene_scores = std::move(scores);
  report.config_fingerprint = fingerprint;
  report.seed = seed;

  // Corpus means over scenes where each metric is present.
  auto mean_of = [&](auto getter) -> std::optional<double> {
    double sum = 0.0;
    int count = 0;
    for (const SceneScore& s : report.scene_scores) {
      if (const auto v = getter(s)) {
        sum += *v;
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return sum / count;
  };
  report.corpus.bleu4 = mean_of([](const SceneScore& s) { return s.bleu4; });
  report.corpus.meteor = mean_of([](const SceneScore& s) { return s.meteor; });
  report.corpus.cider = mean_of([](const SceneScore& s) { return s.cider; });
  report.corpus.sbert = mean_of([](const SceneScore& s) { return s.sbert; });
  report.corpus.dtw_align = mean_of([](const SceneScore& s) { return s.dtw_align; });
  report.corpus.nli_contradict = mean_of([](const SceneScore& s) { return s.nli_contradict; });
  {
    const auto p = mean_of([](const SceneScore& s) {
      return s.bert ? std::optional<double>(s.bert->precision) : std::nullopt;
    });
    const auto r = mean_of([](const SceneScore& s) {
      return s.bert ? std::optional<double>(s.bert->recall) : std::nullopt;
    });
    const auto f = mean_of([](const SceneScore& s) {
      return s.bert ? std::optional<double>(s.bert->f1) : std::nullopt;
    });
    if (p && r && f) report.corpus.bert = ScoreTriple{*p, *r, *f};
  }
  {
    const auto t = mean_of([](const SceneScore& s) {
      return s.nsp ? std::optional<double>(s.nsp->nsp_true) : std::nullopt;
    });
    const auto sh = mean_of([](const SceneScore& s) {
      return s.nsp ? std::optional<double>(s.nsp->nsp_shuffled) : std::nullopt;
    });
    const auto d = mean_of([](const SceneScore& s) {
      return s.nsp ? std::optional<double>(s.nsp->nsp_delta) : std::nullopt;
    });
    if (t && sh && d) report.corpus.nsp = NspScores{*t, *sh, *d};
  }

  std::filesystem::create_directories(dir);
  result.report_path = dir / "metrics.json";
  result.csv_path = dir / "metrics.csv";
  write_text_file(result.report_path, metric_report_to_json(report));
  write_text_file(result.csv_path, metric_report_to_csv(report));
  result.scenes_scored = n;
  result.report = std::move(report);
  return result;
}

}  // namespace dynastride
