#ifndef DYNASTRIDE_REPORT_HPP
#define DYNASTRIDE_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "dynastride/metrics.hpp"

namespace dynastride {

struct NspScores {
  double nsp_true = 0.0;
  double nsp_shuffled = 0.0;
  double nsp_delta = 0.0;
};

// Per-scene metric values; a field is absent when the metric was toggled
// off or undefined for the scene (e.g. NSP on a one-sentence caption).
struct SceneScore {
  std::string video_id;
  int segment_index = 0;
  std::optional<double> bleu4;
  std::optional<double> meteor;
  std::optional<double> cider;
  std::optional<ScoreTriple> bert;
  std::optional<double> sbert;
  std::optional<double> dtw_align;
  std::optional<double> nli_contradict;
  std::optional<NspScores> nsp;
};

struct CorpusScores {
  std::optional<double> bleu4;
  std::optional<double> meteor;
  std::optional<double> cider;
  std::optional<ScoreTriple> bert;
  std::optional<double> sbert;
  std::optional<double> dtw_align;
  std::optional<double> nli_contradict;
  std::optional<NspScores> nsp;
};

// One evaluation run: per-scene scores plus corpus means.
struct MetricReport {
  std::vector<SceneScore> scene_scores;
  CorpusScores corpus;
  std::string config_fingerprint;
  long seed = 0;
};

std::string metric_report_to_json(const MetricReport& report);
MetricReport metric_report_from_json(const std::string& text);
std::string metric_report_to_csv(const MetricReport& report);

// One parsed report file, keyed by seed and config fingerprint.
struct RunRecord {
  long seed = 0;
  std::string timestamp;  // informational; not part of the report content
  std::string config_fingerprint;
  MetricReport report;
};

struct AggregateCell {
  std::string metric;
  double mean = 0.0;
  double std_dev = 0.0;
  int n_seeds = 0;
};

// Corpus-level mean/std over seeds, one cell per metric in the fixed
// presentation order (B@4, METEOR, CIDEr, BERT P/R/F1, SBERT, Align_DTW,
// Contradict_NLI, NSP True/Shuffled/Delta).
struct AggregateTable {
  std::string config_fingerprint;
  std::vector<AggregateCell> cells;
};

// The canonical column order shared by every output format.
const std::vector<std::string>& metric_column_order();

// Mean and standard deviation per metric over the records' corpus scores.
// All records must share one config fingerprint and have distinct seeds.
// sample_std selects the n-1 divisor (default); false selects n.
AggregateTable aggregate_runs(const std::vector<RunRecord>& records, bool sample_std = true);

enum class TableFormat { json, csv, markdown };

// Throws ConfigError on an unknown format name.
TableFormat parse_table_format(const std::string& name);

// Renders "mean (std)" cells at 2 decimal places in the canonical column
// order; JSON is structured and round-trips via parse_aggregate_table.
std::string emit_table(const AggregateTable& table, TableFormat format);
AggregateTable parse_aggregate_table(const std::string& json_text);

// "mean (std)" at two decimals, e.g. 4.18 (0.03).
std::string format_mean_std(double mean, double std_dev);

}  // namespace dynastride

#endif  // DYNASTRIDE_REPORT_HPP
