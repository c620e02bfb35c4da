#ifndef DYNASTRIDE_STRIDE_HPP
#define DYNASTRIDE_STRIDE_HPP

#include <optional>
#include <string>
#include <vector>

#include "dynastride/backends.hpp"
#include "dynastride/types.hpp"
#include "dynastride/windowing.hpp"

namespace dynastride {

enum class VisitDecision { first, retain, skip, error };

const char* to_string(VisitDecision d);

// One visited window start and what the walk did there. `similarity` is
// absent for the first visit and for captioner parse failures.
struct StrideVisit {
  int t = 0;
  VisitDecision decision = VisitDecision::first;
  std::optional<double> similarity;
  double stride_after = 0.0;
};

// Audit record of a whole walk over one subsampled sequence.
struct StrideTrace {
  std::vector<StrideVisit> visits;
  int final_t = 0;  // first t at or past the sequence end
};

struct StrideResult {
  std::vector<Subcaption> retained;  // c'_{i1..L_i}, in visit order
  StrideTrace trace;
};

// Stride growth on a skipped window, reset on a retained one:
// skipped -> min(alpha * s, s_max); retained -> s_base.
double stride_update(double stride, bool skipped, const PipelineConfig& cfg);

// Dynamic stride window selection. Walks the subsampled sequence from t=0;
// at each visit the window [t, t+K) is concatenated, captioned and embedded.
// The first window is always retained. Later windows are skipped (stride
// grows) when their embedding's cosine similarity to the last retained one
// reaches the threshold, and retained (stride resets) otherwise. The start
// index advances by max(1, floor(stride)) each visit.
//
// A captioner reply that fails to parse marks the visit "error" and skips
// the window without growing the stride. Embedder failures propagate.
StrideResult select_windows(const SubsampledSequence& seq, const PipelineConfig& cfg,
                            CaptionerInterface& captioner, EmbedderInterface& embedder);

}  // namespace dynastride

#endif  // DYNASTRIDE_STRIDE_HPP
