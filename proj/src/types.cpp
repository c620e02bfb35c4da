#include "dynastride/types.hpp"

#include <cmath>
#include <sstream>

namespace dynastride {

namespace {

void check_frame_shape(int h, int w, int c) {
  if (h <= 0 || w <= 0) {
    throw ValidationError("frame dimensions must be positive, got " + std::to_string(h) +
                          "x" + std::to_string(w));
  }
  if (c != 1 && c != 3) {
    throw ValidationError("frame channel count must be 1 or 3, got " + std::to_string(c));
  }
}

}  // namespace

Frame::Frame(int h, int w, int c) : height(h), width(w), channels(c) {
  check_frame_shape(h, w, c);
  pixels.assign(static_cast<std::size_t>(h) * w * c, 0);
}

Frame::Frame(int h, int w, int c, std::vector<std::uint8_t> px)
    : height(h), width(w), channels(c), pixels(std::move(px)) {
  check_frame_shape(h, w, c);
  const std::size_t expected = static_cast<std::size_t>(h) * w * c;
  if (pixels.size() != expected) {
    throw ValidationError("pixel buffer size " + std::to_string(pixels.size()) +
                          " does not match " + std::to_string(h) + "x" + std::to_string(w) +
                          "x" + std::to_string(c));
  }
}

Scene::Scene(std::string vid, int seg, long start, long end, std::vector<Frame> frs)
    : video_id(std::move(vid)),
      segment_index(seg),
      start_frame(start),
      end_frame(end),
      frames(std::move(frs)) {
  if (segment_index < 0) {
    throw ValidationError("scene segment_index must be non-negative");
  }
  if (frames.empty()) {
    throw ValidationError("scene " + video_id + "_" + std::to_string(seg) + " has no frames");
  }
  if (start_frame > end_frame) {
    throw ValidationError("scene " + video_id + "_" + std::to_string(seg) +
                          ": start_frame > end_frame");
  }
  for (const Frame& f : frames) {
    if (!f.same_shape(frames.front())) {
      throw ValidationError("scene " + video_id + "_" + std::to_string(seg) +
                            ": frames have mixed shapes");
    }
  }
}

Window::Window(std::string ref, int start, std::vector<Frame> frs)
    : scene_ref(std::move(ref)), start_index(start), frames(std::move(frs)) {
  if (frames.empty()) {
    throw ValidationError("window at t=" + std::to_string(start) + " is empty");
  }
  if (start_index < 0) {
    throw ValidationError("window start index must be non-negative");
  }
}

EmbeddingVector::EmbeddingVector(std::vector<double> vals) : values(std::move(vals)) {
  if (values.empty()) {
    throw ValidationError("embedding vector must have dim >= 1");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw ValidationError("embedding vector contains a non-finite entry");
    }
  }
}

std::string Subcaption::delimited() const {
  std::string out = action + " |";
  for (std::size_t i = 0; i < objects.size(); ++i) {
    out += (i == 0 ? " " : ", ");
    out += objects[i];
  }
  return out;
}

SceneCaption::SceneCaption(std::string vid, int seg, std::string cap, std::vector<int> starts,
                           std::string fingerprint)
    : video_id(std::move(vid)),
      segment_index(seg),
      caption(std::move(cap)),
      retained_window_starts(std::move(starts)),
      config_fingerprint(std::move(fingerprint)) {
  if (caption.empty() || caption.find('\n') != std::string::npos) {
    throw ValidationError("scene caption must be a single non-empty line");
  }
  for (std::size_t i = 1; i < retained_window_starts.size(); ++i) {
    if (retained_window_starts[i] <= retained_window_starts[i - 1]) {
      throw ValidationError("retained window starts must be strictly increasing");
    }
  }
}

void validate_config(const PipelineConfig& cfg) {
  std::ostringstream bad;
  if (cfg.subsample_rate < 1) bad << " subsample_rate(M)=" << cfg.subsample_rate;
  if (cfg.window_size < 1) bad << " window_size(K)=" << cfg.window_size;
  if (cfg.base_stride < 1.0) bad << " base_stride=" << cfg.base_stride;
  if (cfg.max_stride < cfg.base_stride) bad << " max_stride=" << cfg.max_stride;
  if (cfg.stride_alpha < 1.0) bad << " stride_alpha=" << cfg.stride_alpha;
  if (cfg.similarity_threshold < -1.0 || cfg.similarity_threshold > 1.0) {
    bad << " similarity_threshold(tau)=" << cfg.similarity_threshold;
  }
  const std::string msg = bad.str();
  if (!msg.empty()) {
    throw ConfigError("invalid pipeline config:" + msg);
  }
}

}  // namespace dynastride
