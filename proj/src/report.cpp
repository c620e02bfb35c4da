#include "dynastride/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

#include <json.hpp>

namespace dynastride {

namespace {

using nlohmann::json;

json triple_to_json(const ScoreTriple& t) {
  return {{"p", t.precision}, {"r", t.recall}, {"f1", t.f1}};
}

json nsp_to_json(const NspScores& n) {
  return {{"true", n.nsp_true}, {"shuffled", n.nsp_shuffled}, {"delta", n.nsp_delta}};
}

template <typename T, typename Fn>
void set_if(json& obj, const char* key, const std::optional<T>& value, Fn&& convert) {
  if (value) obj[key] = convert(*value);
}

json scores_to_json(const std::optional<double>& bleu, const std::optional<double>& meteor,
                    const std::optional<double>& cider_score,
                    const std::optional<ScoreTriple>& bert, const std::optional<double>& sbert,
                    const std::optional<double>& dtw, const std::optional<double>& nli,
                    const std::optional<NspScores>& nsp) {
  json obj = json::object();
  auto identity = [](double v) { return v; };
  set_if(obj, "bleu4", bleu, identity);
  set_if(obj, "meteor", meteor, identity);
  set_if(obj, "cider", cider_score, identity);
  set_if(obj, "bert", bert, triple_to_json);
  set_if(obj, "sbert", sbert, identity);
  set_if(obj, "dtw_align", dtw, identity);
  set_if(obj, "nli_contradict", nli, identity);
  set_if(obj, "nsp", nsp, nsp_to_json);
  return obj;
}

std::optional<double> get_opt(const json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  return obj[key].get<double>();
}

std::optional<ScoreTriple> get_triple(const json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  const json& t = obj[key];
  return ScoreTriple{t.at("p").get<double>(), t.at("r").get<double>(), t.at("f1").get<double>()};
}

std::optional<NspScores> get_nsp(const json& obj, const char* key) {
  if (!obj.contains(key)) return std::nullopt;
  const json& n = obj[key];
  return NspScores{n.at("true").get<double>(), n.at("shuffled").get<double>(),
                   n.at("delta").get<double>()};
}

// Accessors from a CorpusScores by canonical metric name.
std::optional<double> corpus_value(const CorpusScores& c, const std::string& metric) {
  if (metric == "B@4") return c.bleu4;
  if (metric == "METEOR") return c.meteor;
  if (metric == "CIDEr") return c.cider;
  if (metric == "BERT_P") return c.bert ? std::optional<double>(c.bert->precision) : std::nullopt;
  if (metric == "BERT_R") return c.bert ? std::optional<double>(c.bert->recall) : std::nullopt;
  if (metric == "BERT_F1") return c.bert ? std::optional<double>(c.bert->f1) : std::nullopt;
  if (metric == "SBERT") return c.sbert;
  if (metric == "Align_DTW") return c.dtw_align;
  if (metric == "Contradict_NLI") return c.nli_contradict;
  if (metric == "NSP_True") return c.nsp ? std::optional<double>(c.nsp->nsp_true) : std::nullopt;
  if (metric == "NSP_Shuffled")
    return c.nsp ? std::optional<double>(c.nsp->nsp_shuffled) : std::nullopt;
  if (metric == "NSP_Delta") return c.nsp ? std::optional<double>(c.nsp->nsp_delta) : std::nullopt;
  throw LogicError("unknown metric column: " + metric);
}

std::string csv_number(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", *v);
  return buf;
}

void append_score_cells(std::string& row, const std::optional<double>& bleu,
                        const std::optional<double>& meteor, const std::optional<double>& cid,
                        const std::optional<ScoreTriple>& bert, const std::optional<double>& sbert,
                        const std::optional<double>& dtw, const std::optional<double>& nli,
                        const std::optional<NspScores>& nsp) {
  auto opt = [](const std::optional<double>& v) { return csv_number(v); };
  row += "," + opt(bleu) + "," + opt(meteor) + "," + opt(cid);
  row += "," + (bert ? csv_number(bert->precision) : "");
  row += "," + (bert ? csv_number(bert->recall) : "");
  row += "," + (bert ? csv_number(bert->f1) : "");
  row += "," + opt(sbert) + "," + opt(dtw) + "," + opt(nli);
  row += "," + (nsp ? csv_number(nsp->nsp_true) : "");
  row += "," + (nsp ? csv_number(nsp->nsp_shuffled) : "");
  row += "," + (nsp ? csv_number(nsp->nsp_delta) : "");
}

}  // namespace

const std::vector<std::string>& metric_column_order() {
  static const std::vector<std::string> kOrder = {
      "B@4",   "METEOR",    "CIDEr",          "BERT_P",   "BERT_R",       "BERT_F1",
      "SBERT", "Align_DTW", "Contradict_NLI", "NSP_True", "NSP_Shuffled", "NSP_Delta"};
  return kOrder;
}

std::string metric_report_to_json(const MetricReport& report) {
  json scenes = json::array();
  for (const SceneScore& s : report.scene_scores) {
    json obj = scores_to_json(s.bleu4, s.meteor, s.cider, s.bert, s.sbert, s.dtw_align,
                              s.nli_contradict, s.nsp);
    obj["video_id"] = s.video_id;
    obj["segment_index"] = s.segment_index;
    scenes.push_back(obj);
  }
  json doc = {{"scene_scores", scenes},
              {"corpus", scores_to_json(report.corpus.bleu4, report.corpus.meteor,
                                        report.corpus.cider, report.corpus.bert,
                                        report.corpus.sbert, report.corpus.dtw_align,
                                        report.corpus.nli_contradict, report.corpus.nsp)},
              {"config_fingerprint", report.config_fingerprint},
              {"seed", report.seed}};
  return doc.dump(2) + "\n";
}

MetricReport metric_report_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ParseError(std::string("metric report: ") + ex.what());
  }
  MetricReport report;
  report.config_fingerprint = doc.at("config_fingerprint").get<std::string>();
  report.seed = doc.at("seed").get<long>();
  for (const json& s : doc.at("scene_scores")) {
    SceneScore score;
    score.video_id = s.at("video_id").get<std::string>();
    score.segment_index = s.at("segment_index").get<int>();
    score.bleu4 = get_opt(s, "bleu4");
    score.meteor = get_opt(s, "meteor");
    score.cider = get_opt(s, "cider");
    score.bert = get_triple(s, "bert");
    score.sbert = get_opt(s, "sbert");
    score.dtw_align = get_opt(s, "dtw_align");
    score.nli_contradict = get_opt(s, "nli_contradict");
    score.nsp = get_nsp(s, "nsp");
    report.scene_scores.push_back(std::move(score));
  }
  const json& c = doc.at("corpus");
  report.corpus.bleu4 = get_opt(c, "bleu4");
  report.corpus.meteor = get_opt(c, "meteor");
  report.corpus.cider = get_opt(c, "cider");
  report.corpus.bert = get_triple(c, "bert");
  report.corpus.sbert = get_opt(c, "sbert");
  report.corpus.dtw_align = get_opt(c, "dtw_align");
  report.corpus.nli_contradict = get_opt(c, "nli_contradict");
  report.corpus.nsp = get_nsp(c, "nsp");
  return report;
}

std::string metric_report_to_csv(const MetricReport& report) {
  std::string out =
      "scope,video_id,segment_index,bleu4,meteor,cider,bert_p,bert_r,bert_f1,sbert,dtw_align,"
      "nli_contradict,nsp_true,nsp_shuffled,nsp_delta\n";
  for (const SceneScore& s : report.scene_scores) {
    std::string row = "scene," + s.video_id + "," + std::to_string(s.segment_index);
    append_score_cells(row, s.bleu4, s.meteor, s.cider, s.bert, s.sbert, s.dtw_align,
                       s.nli_contradict, s.nsp);
    out += row + "\n";
  }
  std::string row = "corpus,,";
  append_score_cells(row, report.corpus.bleu4, report.corpus.meteor, report.corpus.cider,
                     report.corpus.bert, report.corpus.sbert, report.corpus.dtw_align,
                     report.corpus.nli_contradict, report.corpus.nsp);
  out += row + "\n";
  return out;
}

AggregateTable aggregate_runs(const std::vector<RunRecord>& records, bool sample_std) {
  if (records.empty()) {
    throw ConfigError("aggregate_runs: at least one record required");
  }
  std::set<long> seeds;
  for (const RunRecord& r : records) {
    if (r.config_fingerprint != records.front().config_fingerprint) {
      throw ValidationError("aggregate_runs: mixed config fingerprints (" +
                            r.config_fingerprint + " vs " + records.front().config_fingerprint +
                            ")");
    }
    if (!seeds.insert(r.seed).second) {
      throw ValidationError("aggregate_runs: duplicate seed " + std::to_string(r.seed));
    }
  }

  AggregateTable table;
  table.config_fingerprint = records.front().config_fingerprint;
  for (const std::string& metric : metric_column_order()) {
    std::vector<double> values;
    for (const RunRecord& r : records) {
      if (const auto v = corpus_value(r.report.corpus, metric)) values.push_back(*v);
    }
    if (values.empty()) continue;
    // Canonical summation order makes aggregation permutation-invariant.
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double std_dev = 0.0;
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      std_dev = std::sqrt(ss / (sample_std ? n - 1.0 : n));
    }
    table.cells.push_back({metric, mean, std_dev, static_cast<int>(values.size())});
  }
  return table;
}

TableFormat parse_table_format(const std::string& name) {
  if (name == "json") return TableFormat::json;
  if (name == "csv") return TableFormat::csv;
  if (name == "markdown") return TableFormat::markdown;
  throw ConfigError("unknown table format '" + name + "' (expected json, csv or markdown)");
}

std::string format_mean_std(double mean, double std_dev) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.2f (%.2f)", mean, std_dev);
  return buf;
}

std::string emit_table(const AggregateTable& table, TableFormat format) {
  auto find_cell = [&](const std::string& metric) -> const AggregateCell* {
    for (const AggregateCell& c : table.cells) {
      if (c.metric == metric) return &c;
    }
    return nullptr;
  };

  switch (format) {
    case TableFormat::json: {
      json cells = json::array();
      for (const AggregateCell& c : table.cells) {
        cells.push_back(
            {{"metric", c.metric}, {"mean", c.mean}, {"std", c.std_dev}, {"n_seeds", c.n_seeds}});
      }
      json doc = {{"config_fingerprint", table.config_fingerprint}, {"metrics", cells}};
      return doc.dump(2) + "\n";
    }
    case TableFormat::csv: {
      std::string header = "scope";
      std::string row = "corpus";
      for (const std::string& metric : metric_column_order()) {
        header += "," + metric;
        const AggregateCell* c = find_cell(metric);
        row += ",";
        row += c ? format_mean_std(c->mean, c->std_dev) : "-";
      }
      return header + "\n" + row + "\n";
    }
    case TableFormat::markdown: {
      std::string header = "| Scope |";
      std::string rule = "| --- |";
      std::string row = "| corpus |";
      for (const std::string& metric : metric_column_order()) {
        header += " " + metric + " |";
        rule += " --- |";
        const AggregateCell* c = find_cell(metric);
        row += " ";
        row += c ? format_mean_std(c->mean, c->std_dev) : "-";
        row += " |";
      }
      return header + "\n" + rule + "\n" + row + "\n";
    }
  }
  throw LogicError("emit_table: unhandled format");
}

AggregateTable parse_aggregate_table(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    throw ParseError(std::string("aggregate table: ") + ex.what());
  }
  AggregateTable table;
  table.config_fingerprint = doc.at("config_fingerprint").get<std::string>();
  for (const json& c : doc.at("metrics")) {
    table.cells.push_back({c.at("metric").get<std::string>(), c.at("mean").get<double>(),
                           c.at("std").get<double>(), c.at("n_seeds").get<int>()});
  }
  return table;
}

}  // namespace dynastride
