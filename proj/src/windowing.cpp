#include "dynastride/windowing.hpp"

#include <algorithm>

namespace dynastride {

SubsampledSequence subsample(const Scene& scene, int subsample_rate) {
  if (subsample_rate < 1) {
    throw ConfigError("subsample: rate M must be >= 1, got " + std::to_string(subsample_rate));
  }
  if (scene.frames.empty()) {
    throw ValidationError("subsample: scene has no frames");
  }
  SubsampledSequence seq;
  seq.scene_ref = scene.video_id + "_" + std::to_string(scene.segment_index);
  for (int i = 0; i < scene.frame_count(); i += subsample_rate) {
    seq.frames.push_back(scene.frames[i]);
    seq.source_indices.push_back(i);
  }
  return seq;
}

Window window_at(const SubsampledSequence& seq, int t, int window_size) {
  if (t < 0 || t >= seq.size()) {
    throw LogicError("window_at: t=" + std::to_string(t) + " out of range [0, " +
                     std::to_string(seq.size()) + ")");
  }
  if (window_size < 1) {
    throw ConfigError("window_at: K must be >= 1");
  }
  const int end = std::min(t + window_size, seq.size());
  std::vector<Frame> frames(seq.frames.begin() + t, seq.frames.begin() + end);
  return Window(seq.scene_ref, t, std::move(frames));
}

WideImage hconcat(const Window& w) {
  WideImage wide;
  wide.image = hconcat_frames(w.frames);
  wide.frame_count = static_cast<int>(w.frames.size());
  return wide;
}

}  // namespace dynastride
