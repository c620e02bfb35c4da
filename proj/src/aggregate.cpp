#include "dynastride/aggregate.hpp"

namespace dynastride {

AggregationRecord aggregate_scene(const std::vector<Subcaption>& subcaptions,
                                  AggregatorInterface& backend, const std::string& video_id,
                                  int segment_index, const std::string& config_fingerprint) {
  if (subcaptions.empty()) {
    throw LogicError("aggregate_scene: no subcaptions for " + video_id + "_" +
                     std::to_string(segment_index));
  }

  AggregationRecord record;
  record.input_subcaptions = subcaptions;
  record.prompt = build_aggregator_prompt(subcaptions);

  std::string answer;
  try {
    record.raw_reply = backend.complete(record.prompt);
    answer = parse_answer(record.raw_reply);
  } catch (const ParseError&) {
    const std::string reminder =
        record.prompt + "\nRespond only with <ANSWER>...</ANSWER>.";
    record.raw_reply = backend.complete(reminder);
    answer = parse_answer(record.raw_reply);  // second failure propagates
  }

  std::vector<int> starts;
  starts.reserve(subcaptions.size());
  for (const Subcaption& sub : subcaptions) starts.push_back(sub.window_start);
  record.caption =
      SceneCaption(video_id, segment_index, answer, std::move(starts), config_fingerprint);
  return record;
}

}  // namespace dynastride
