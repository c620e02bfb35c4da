// Benchmark comparing the serial reference kernels against the OpenMP
// variants: bilinear resize, horizontal concat, and the metric suite over a
// batch of scenes run with 1 worker vs all workers.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "dynastride/backends.hpp"
#include "dynastride/image.hpp"
#include "dynastride/metrics.hpp"

using namespace dynastride;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Frame random_frame(std::mt19937_64& rng, int h, int w) {
  Frame f(h, w, 3);
  for (std::uint8_t& p : f.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);
  return f;
}

TokenSequence random_sentence(std::mt19937_64& rng, int max_len) {
  static const std::vector<std::string> kVocab = {
      "chop", "stir", "pour",  "whisk", "heat", "the",  "a",     "onion", "pan",
      "bowl", "eggs", "sauce", "slice", "add",  "salt", "onto",  "plate", "mix"};
  TokenSequence s;
  const int len = 1 + static_cast<int>(rng() % max_len);
  for (int i = 0; i < len; ++i) s.push_back(kVocab[rng() % kVocab.size()]);
  return s;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-24s serial %9.2f ms   openmp %9.2f ms   speedup %.2fx\n", name, serial_ms,
              parallel_ms, parallel_ms > 0 ? serial_ms / parallel_ms : 0.0);
}

}  // namespace

int main() {
#if defined(_OPENMP)
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without openmp; both columns run serial code\n");
#endif
  std::mt19937_64 rng(12345);

  {  // resize: 64 frames, 640x480 -> 384x384
    std::vector<Frame> frames;
    for (int i = 0; i < 64; ++i) frames.push_back(random_frame(rng, 480, 640));
    auto t0 = Clock::now();
    for (const Frame& f : frames) resize_bilinear_serial(f, 384, 384);
    const double serial = ms_since(t0);
    t0 = Clock::now();
    for (const Frame& f : frames) resize_bilinear(f, 384, 384);
    report("resize 640x480->384", serial, ms_since(t0));
  }

  {  // hconcat: 200 windows of 10 384x384 frames
    std::vector<Frame> window;
    for (int i = 0; i < 10; ++i) window.push_back(random_frame(rng, 384, 384));
    auto t0 = Clock::now();
    for (int i = 0; i < 200; ++i) hconcat_serial(window);
    const double serial = ms_since(t0);
    t0 = Clock::now();
    for (int i = 0; i < 200; ++i) hconcat_frames(window);
    report("hconcat 10x384x384", serial, ms_since(t0));
  }

  {  // metric suite over 400 scenes, 1 worker vs all
    const int scenes = 400;
    std::vector<TokenSequence> cands, refs;
    std::vector<std::string> cand_text, ref_text;
    for (int i = 0; i < scenes; ++i) {
      cands.push_back(random_sentence(rng, 14));
      refs.push_back(random_sentence(rng, 14));
    }
    MockEmbedder embedder(32);

    auto eval_scene = [&](int i) {
      bleu4(cands[i], {refs[i]});
      meteor_lite(cands[i], refs[i]);
      auto ce = embedder.embed_tokens(cands[i]);
      auto re = embedder.embed_tokens(refs[i]);
      bertscore(ce, re);
      dtw_align(ce, re);
    };

    auto t0 = Clock::now();
    for (int i = 0; i < scenes; ++i) eval_scene(i);
    const double serial = ms_since(t0);

    t0 = Clock::now();
#if defined(_OPENMP)
#pragma omp parallel for schedule(dynamic)
#endif
    for (int i = 0; i < scenes; ++i) eval_scene(i);
    report("metric suite x400", serial, ms_since(t0));
  }

  return 0;
}
