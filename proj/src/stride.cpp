#include "dynastride/stride.hpp"

#include <algorithm>
#include <cmath>

#include "dynastride/similarity.hpp"

namespace dynastride {

const char* to_string(VisitDecision d) {
  switch (d) {
    case VisitDecision::first:
      return "first";
    case VisitDecision::retain:
      return "retain";
    case VisitDecision::skip:
      return "skip";
    case VisitDecision::error:
      return "error";
  }
  return "unknown";
}

double stride_update(double stride, bool skipped, const PipelineConfig& cfg) {
  if (skipped) {
    return std::min(cfg.stride_alpha * stride, cfg.max_stride);
  }
  return cfg.base_stride;
}

StrideResult select_windows(const SubsampledSequence& seq, const PipelineConfig& cfg,
                            CaptionerInterface& captioner, EmbedderInterface& embedder) {
  validate_config(cfg);
  if (seq.size() == 0) {
    throw ValidationError("select_windows: empty subsampled sequence");
  }

  const std::string prompt = build_mmcot_prompt();
  StrideResult result;
  std::optional<EmbeddingVector> last_retained;  // e_ip
  double stride = cfg.base_stride;
  int t = 0;

  while (t < seq.size()) {
    StrideVisit visit;
    visit.t = t;

    std::optional<Subcaption> sub;
    try {
      const Window window = window_at(seq, t, cfg.window_size);
      const WideImage wide = hconcat(window);
      sub = parse_conclusion(captioner.caption(wide, prompt));
      sub->window_start = t;
    } catch (const ParseError&) {
      // Malformed reply: move on without growing the stride, so a transient
      // failure cannot jump the walk over unseen content.
      visit.decision = VisitDecision::error;
      visit.stride_after = stride;
      result.trace.visits.push_back(visit);
      t += std::max(1, static_cast<int>(std::floor(stride)));
      continue;
    }

    const EmbeddingVector embedding = embedder.embed(sub->delimited());
    if (!last_retained) {
      visit.decision = VisitDecision::first;
      stride = stride_update(stride, /*skipped=*/false, cfg);
      last_retained = embedding;
      result.retained.push_back(std::move(*sub));
    } else {
      const double sim = cosine_similarity(embedding, *last_retained);
      visit.similarity = sim;
      if (sim >= cfg.similarity_threshold) {
        visit.decision = VisitDecision::skip;
        stride = stride_update(stride, /*skipped=*/true, cfg);
      } else {
        visit.decision = VisitDecision::retain;
        stride = stride_update(stride, /*skipped=*/false, cfg);
        last_retained = embedding;
        result.retained.push_back(std::move(*sub));
      }
    }
    visit.stride_after = stride;
    result.trace.visits.push_back(visit);
    t += std::max(1, static_cast<int>(std::floor(stride)));
  }

  result.trace.final_t = t;
  return result;
}

}  // namespace dynastride
