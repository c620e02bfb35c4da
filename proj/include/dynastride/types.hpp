#ifndef DYNASTRIDE_TYPES_HPP
#define DYNASTRIDE_TYPES_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dynastride/errors.hpp"

namespace dynastride {

// A single decoded video frame: 8-bit interleaved raster, 1 or 3 channels.
struct Frame {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;  // row-major, interleaved

  Frame() = default;
  Frame(int h, int w, int c);  // zero-filled
  Frame(int h, int w, int c, std::vector<std::uint8_t> px);

  bool empty() const { return pixels.empty(); }
  std::size_t index(int y, int x, int ch) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + ch;
  }
  std::uint8_t at(int y, int x, int ch) const { return pixels[index(y, x, ch)]; }
  std::uint8_t& at(int y, int x, int ch) { return pixels[index(y, x, ch)]; }

  bool same_shape(const Frame& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
  bool operator==(const Frame& o) const = default;
};

// One annotated scene: an ordered run of frames plus its source metadata.
struct Scene {
  std::string video_id;
  int segment_index = 0;
  long start_frame = 0;
  long end_frame = 0;
  std::vector<Frame> frames;

  Scene() = default;
  Scene(std::string video_id, int segment_index, long start_frame, long end_frame,
        std::vector<Frame> frames);

  int frame_count() const { return static_cast<int>(frames.size()); }
};

// K (or fewer, at the scene tail) consecutive frames of a subsampled sequence.
struct Window {
  std::string scene_ref;  // "<video_id>_<segment_index>"
  int start_index = 0;    // position in the subsampled sequence
  std::vector<Frame> frames;

  Window() = default;
  Window(std::string scene_ref, int start_index, std::vector<Frame> frames);
};

struct EmbeddingVector {
  std::vector<double> values;

  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> vals);

  int dim() const { return static_cast<int>(values.size()); }
  bool operator==(const EmbeddingVector& o) const = default;
};

// Parsed "action | objects" reply for one window.
struct Subcaption {
  std::string action;
  std::vector<std::string> objects;
  int window_start = 0;
  std::string raw;  // full backend reply, kept for provenance

  // The delimited form that gets embedded and fed to the aggregator.
  std::string delimited() const;
};

// Final aggregated caption for one scene.
struct SceneCaption {
  std::string video_id;
  int segment_index = 0;
  std::string caption;
  std::vector<int> retained_window_starts;
  std::string config_fingerprint;

  SceneCaption() = default;
  SceneCaption(std::string video_id, int segment_index, std::string caption,
               std::vector<int> retained_window_starts, std::string config_fingerprint);
};

// Identity of one backend role as resolved from config.
struct BackendRef {
  std::string endpoint;
  std::string model_id;
  int max_concurrency = 1;
};

// Core pipeline knobs. Defaults follow the published stride parameters
// (K=10, s_base=10, s_max=3*s_base, alpha=1.5, tau=0.5) and the best
// reported sampling rate (M=40).
struct PipelineConfig {
  int subsample_rate = 40;  // M
  int window_size = 10;     // K
  double base_stride = 10.0;
  double max_stride = 30.0;
  double stride_alpha = 1.5;
  double similarity_threshold = 0.5;  // tau
  long seed = 0;
  std::map<std::string, BackendRef> backends;  // role -> endpoint/model
};

// Throws ConfigError if any parameter is out of range.
void validate_config(const PipelineConfig& cfg);

}  // namespace dynastride

#endif  // DYNASTRIDE_TYPES_HPP
