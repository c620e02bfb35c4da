#ifndef DYNASTRIDE_AGGREGATE_HPP
#define DYNASTRIDE_AGGREGATE_HPP

#include <string>
#include <vector>

#include "dynastride/backends.hpp"
#include "dynastride/types.hpp"

namespace dynastride {

// Everything produced while fusing one scene's retained subcaptions.
struct AggregationRecord {
  std::vector<Subcaption> input_subcaptions;
  std::string prompt;
  std::string raw_reply;
  SceneCaption caption;
};

// Builds the aggregator prompt, calls the backend, and parses the <ANSWER>
// span into a single-line SceneCaption. On a tag-parse failure the call is
// retried once with a format reminder appended; a second failure raises
// ParseError and the caller marks the scene failed.
AggregationRecord aggregate_scene(const std::vector<Subcaption>& subcaptions,
                                  AggregatorInterface& backend, const std::string& video_id,
                                  int segment_index, const std::string& config_fingerprint);

}  // namespace dynastride

#endif  // DYNASTRIDE_AGGREGATE_HPP
