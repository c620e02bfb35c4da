#ifndef DYNASTRIDE_INGEST_HPP
#define DYNASTRIDE_INGEST_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "dynastride/types.hpp"

namespace dynastride {

struct SceneManifestEntry {
  std::string video_id;
  int segment_index = 0;
  long start_frame = 0;
  long end_frame = 0;
  std::string reference_caption;
  std::string frames_dir;  // "<video_id>_<segment_index>", relative to the split root
};

struct SceneManifest {
  std::string split;
  std::vector<SceneManifestEntry> entries;
};

// Parses the manifest JSON document:
//   {"split": str, "entries": [{"video_id", "segment_index", "start_frame",
//    "end_frame", "reference_caption", "frames_dir"}]}
// Throws ParseError on malformed JSON, ValidationError on duplicate
// (video_id, segment_index) pairs or start_frame > end_frame.
SceneManifest parse_manifest(const std::string& manifest_text);

std::string serialize_manifest(const SceneManifest& manifest);

// Converts an annotation database document into a manifest. The accepted
// input is the usual JSON layout for scene-annotated video sets:
//   {"database": {"<video_id>": {"subset": str, "annotations":
//     [{"id": int, "segment": [start, end], "sentence": str}]}}}
// Entries with invalid boundaries are skipped and reported via `skipped`.
SceneManifest ingest_annotations(const std::string& annotations_text, const std::string& split,
                                 std::vector<std::string>* skipped = nullptr);

// Loads <root>/<split>/<frames_dir> in lexicographic filename order and
// resizes every frame to side x side. Throws IoError when the directory is
// missing, ValidationError on mixed channel counts, and ParseError when a
// file is not decodable.
Scene load_scene_frames(const SceneManifestEntry& entry, const std::filesystem::path& root,
                        const std::string& split, int side = 384);

// Bilinear resample to side x side; aspect ratio is not preserved.
Frame resize_frame(const Frame& frame, int side = 384);

}  // namespace dynastride

#endif  // DYNASTRIDE_INGEST_HPP
