#ifndef DYNASTRIDE_SYNTH_HPP
#define DYNASTRIDE_SYNTH_HPP

#include <filesystem>

namespace dynastride {

// Writes a small deterministic corpus for mock runs: `scenes` scenes of
// solid-color phase frames (64x64 PNG) under <root>/synthetic/, plus a
// manifest.json with reference captions. Same seed, same bytes.
void make_synth_corpus(const std::filesystem::path& root, long seed, int scenes = 12);

}  // namespace dynastride

#endif  // DYNASTRIDE_SYNTH_HPP
