#ifndef DYNASTRIDE_WINDOWING_HPP
#define DYNASTRIDE_WINDOWING_HPP

#include <string>
#include <vector>

#include "dynastride/image.hpp"
#include "dynastride/types.hpp"

namespace dynastride {

// A scene after keeping every M-th frame (starting at original index 0).
struct SubsampledSequence {
  std::string scene_ref;           // "<video_id>_<segment_index>"
  std::vector<Frame> frames;
  std::vector<int> source_indices;  // positions in the original scene

  int size() const { return static_cast<int>(frames.size()); }
};

// Horizontal concatenation of a window's frames.
struct WideImage {
  Frame image;
  int frame_count = 0;
};

// Keep original indices 0, M, 2M, ...; the first frame is always kept.
SubsampledSequence subsample(const Scene& scene, int subsample_rate);

// Frames at positions [t, min(t+K, |seq|)): half-open, at most K frames,
// shorter at the sequence tail. Throws LogicError when t is out of range.
Window window_at(const SubsampledSequence& seq, int t, int window_size);

// Wide image for the captioner; left-to-right order preserved.
WideImage hconcat(const Window& w);

}  // namespace dynastride

#endif  // DYNASTRIDE_WINDOWING_HPP
