#include "dynastride/synth.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <random>

#include "dynastride/codec.hpp"
#include "dynastride/ingest.hpp"

namespace dynastride {

namespace {

// Channel levels land in distinct mock-captioner quantization buckets.
constexpr std::array<std::uint8_t, 4> kLevels = {16, 80, 144, 208};

const std::array<const char*, 8> kReferenceCaptions = {
    "Chop the onions and add them to the hot pan.",
    "Stir the mixture until it thickens in the pot.",
    "Whisk the eggs in a bowl and pour them into the skillet.",
    "Season the meat and place it on the cutting board.",
    "Slice the bread and plate it with the cheese.",
    "Knead the dough on the board until smooth.",
    "Heat the oil and flip the pancake with a spatula.",
    "Drain the pasta and stir in the sauce with a ladle.",
};

Frame solid_frame(int side, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Frame f(side, side, 3);
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      f.at(y, x, 0) = r;
      f.at(y, x, 1) = g;
      f.at(y, x, 2) = b;
    }
  }
  return f;
}

}  // namespace

void make_synth_corpus(const std::filesystem::path& root, long seed, int scenes) {
  namespace fs = std::filesystem;
  const std::string split = "synthetic";
  fs::create_directories(root / split);

  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  SceneManifest manifest;
  manifest.split = split;

  for (int i = 0; i < scenes; ++i) {
    SceneManifestEntry entry;
    entry.video_id = "vid" + std::to_string(i / 3);
    entry.segment_index = i % 3;
    entry.frames_dir = entry.video_id + "_" + std::to_string(entry.segment_index);
    entry.reference_caption = kReferenceCaptions[rng() % kReferenceCaptions.size()];

    const fs::path dir = root / split / entry.frames_dir;
    fs::create_directories(dir);

    // 2-4 solid-color phases; frames within a phase are identical so the
    // mock captioner repeats itself and the stride walk gets real skips.
    const int phases = 2 + static_cast<int>(rng() % 3);
    int frame_index = 0;
    for (int p = 0; p < phases; ++p) {
      const Frame frame = solid_frame(64, kLevels[rng() % kLevels.size()],
                                      kLevels[rng() % kLevels.size()],
                                      kLevels[rng() % kLevels.size()]);
      const int length = 30 + static_cast<int>(rng() % 21);  // 30-50 frames
      for (int k = 0; k < length; ++k, ++frame_index) {
        char name[16];
        std::snprintf(name, sizeof(name), "%05d.png", frame_index);
        write_png_file(dir / name, frame);
      }
    }
    entry.start_frame = 0;
    entry.end_frame = frame_index - 1;
    manifest.entries.push_back(std::move(entry));
  }

  std::ofstream out(root / "manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write " + (root / "manifest.json").string());
  out << serialize_manifest(manifest);
}

}  // namespace dynastride
