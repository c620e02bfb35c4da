#include "dynastride/ingest.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include <json.hpp>

#include "dynastride/codec.hpp"
#include "dynastride/image.hpp"

namespace dynastride {

namespace {

using nlohmann::json;

std::string scene_key(const std::string& video_id, int segment_index) {
  return video_id + "_" + std::to_string(segment_index);
}

SceneManifestEntry entry_from_json(const json& e, std::size_t pos) {
  SceneManifestEntry out;
  try {
    out.video_id = e.at("video_id").get<std::string>();
    out.segment_index = e.at("segment_index").get<int>();
    out.start_frame = e.at("start_frame").get<long>();
    out.end_frame = e.at("end_frame").get<long>();
    out.reference_caption = e.at("reference_caption").get<std::string>();
    out.frames_dir = e.at("frames_dir").get<std::string>();
  } catch (const json::exception& ex) {
    throw ParseError("manifest entry " + std::to_string(pos) + ": " + ex.what());
  }
  return out;
}

void validate_entry(const SceneManifestEntry& e, std::size_t pos) {
  const std::string key = scene_key(e.video_id, e.segment_index);
  if (e.video_id.empty()) {
    throw ValidationError("manifest entry " + std::to_string(pos) + ": empty video_id");
  }
  if (e.segment_index < 0) {
    throw ValidationError("manifest entry " + key + ": negative segment_index");
  }
  if (e.start_frame > e.end_frame) {
    throw ValidationError("manifest entry " + key + ": start_frame " +
                          std::to_string(e.start_frame) + " > end_frame " +
                          std::to_string(e.end_frame));
  }
  if (e.frames_dir != key) {
    throw ValidationError("manifest entry " + key + ": frames_dir '" + e.frames_dir +
                          "' does not match '<video_id>_<segment_index>'");
  }
}

}  // namespace

SceneManifest parse_manifest(const std::string& manifest_text) {
  json doc;
  try {
    doc = json::parse(manifest_text);
  } catch (const json::parse_error& ex) {
    throw ParseError(std::string("manifest: ") + ex.what());
  }
  SceneManifest manifest;
  if (!doc.is_object() || !doc.contains("split") || !doc.contains("entries")) {
    throw ParseError("manifest: expected object with 'split' and 'entries'");
  }
  manifest.split = doc["split"].get<std::string>();
  std::set<std::pair<std::string, int>> seen;
  std::size_t pos = 0;
  for (const json& e : doc["entries"]) {
    SceneManifestEntry entry = entry_from_json(e, pos);
    validate_entry(entry, pos);
    if (!seen.insert({entry.video_id, entry.segment_index}).second) {
      throw ValidationError("manifest: duplicate scene " +
                            scene_key(entry.video_id, entry.segment_index));
    }
    manifest.entries.push_back(std::move(entry));
    ++pos;
  }
  return manifest;
}

std::string serialize_manifest(const SceneManifest& manifest) {
  json entries = json::array();
  for (const SceneManifestEntry& e : manifest.entries) {
    entries.push_back({{"video_id", e.video_id},
                       {"segment_index", e.segment_index},
                       {"start_frame", e.start_frame},
                       {"end_frame", e.end_frame},
                       {"reference_caption", e.reference_caption},
                       {"frames_dir", e.frames_dir}});
  }
  json doc = {{"split", manifest.split}, {"entries", entries}};
  return doc.dump(2) + "\n";
}

SceneManifest ingest_annotations(const std::string& annotations_text, const std::string& split,
                                 std::vector<std::string>* skipped) {
  json doc;
  try {
    doc = json::parse(annotations_text);
  } catch (const json::parse_error& ex) {
    throw ParseError(std::string("annotations: ") + ex.what());
  }
  if (!doc.is_object() || !doc.contains("database") || !doc["database"].is_object()) {
    throw ParseError("annotations: expected object with a 'database' map");
  }

  SceneManifest manifest;
  manifest.split = split;
  // Videos sorted by id so the manifest is stable across runs.
  std::vector<std::string> video_ids;
  for (auto it = doc["database"].begin(); it != doc["database"].end(); ++it) {
    video_ids.push_back(it.key());
  }
  std::sort(video_ids.begin(), video_ids.end());

  for (const std::string& vid : video_ids) {
    const json& video = doc["database"][vid];
    if (video.contains("subset") && video["subset"].get<std::string>() != split) continue;
    if (!video.contains("annotations")) continue;
    for (const json& ann : video["annotations"]) {
      SceneManifestEntry e;
      e.video_id = vid;
      try {
        e.segment_index = ann.at("id").get<int>();
        e.start_frame = ann.at("segment").at(0).get<long>();
        e.end_frame = ann.at("segment").at(1).get<long>();
        e.reference_caption = ann.at("sentence").get<std::string>();
      } catch (const json::exception& ex) {
        if (skipped) skipped->push_back(vid + ": " + ex.what());
        continue;
      }
      e.frames_dir = scene_key(e.video_id, e.segment_index);
      if (e.segment_index < 0 || e.start_frame > e.end_frame) {
        if (skipped) {
          skipped->push_back(e.frames_dir + ": invalid boundaries [" +
                             std::to_string(e.start_frame) + ", " +
                             std::to_string(e.end_frame) + "]");
        }
        continue;
      }
      manifest.entries.push_back(std::move(e));
    }
  }
  return manifest;
}

Frame resize_frame(const Frame& frame, int side) {
  return resize_bilinear(frame, side, side);
}

Scene load_scene_frames(const SceneManifestEntry& entry, const std::filesystem::path& root,
                        const std::string& split, int side) {
  namespace fs = std::filesystem;
  const fs::path dir = root / split / entry.frames_dir;
  if (!fs::is_directory(dir)) {
    throw IoError("scene frame directory missing: " + dir.string());
  }

  std::vector<fs::path> files;
  for (const auto& de : fs::directory_iterator(dir)) {
    if (!de.is_regular_file()) continue;
    std::string ext = de.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") files.push_back(de.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  if (files.empty()) {
    throw IoError("scene " + entry.frames_dir + ": no decodable frames in " + dir.string());
  }

  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const fs::path& f : files) {
    Frame decoded = decode_image_file(f);
    if (!frames.empty() && decoded.channels != frames.front().channels) {
      throw ValidationError("scene " + entry.frames_dir + ": mixed channel counts (" + f.string() +
                            ")");
    }
    frames.push_back(resize_frame(decoded, side));
  }
  return Scene(entry.video_id, entry.segment_index, entry.start_frame, entry.end_frame,
               std::move(frames));
}

}  // namespace dynastride
