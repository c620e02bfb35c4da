#include <doctest.h>

#include <cmath>
#include <random>

#include "dynastride/similarity.hpp"
#include "dynastride/types.hpp"

using namespace dynastride;

TEST_SUITE_BEGIN("core");

namespace {

EmbeddingVector vec(std::vector<double> v) { return EmbeddingVector(std::move(v)); }

EmbeddingVector random_vec(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(dim);
  for (double& x : v) x = d(rng);
  return EmbeddingVector(std::move(v));
}

}  // namespace

TEST_CASE("cosine similarity matches the analytic examples") {
  CHECK(cosine_similarity(vec({1, 0}), vec({1, 0})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_similarity(vec({1, 0}), vec({0, 1})) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cosine_similarity(vec({1, 1}), vec({1, 0})) ==
        doctest::Approx(0.70710678).epsilon(1e-8));
  CHECK(cosine_similarity(vec({0, 0}), vec({1, 0})) == 0.0);  // zero-norm convention
}

TEST_CASE("cosine similarity rejects dimension mismatches") {
  CHECK_THROWS_AS(cosine_similarity(vec({1, 0}), vec({1, 0, 0})), ConfigError);
}

TEST_CASE("cosine similarity properties hold on random vectors") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    const int dim = 2 + static_cast<int>(rng() % 15);
    EmbeddingVector u = random_vec(rng, dim);
    EmbeddingVector v = random_vec(rng, dim);

    double norm = 0;
    for (double x : u.values) norm += x * x;
    if (norm > 0) {
      CHECK(cosine_similarity(u, u) == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(cosine_similarity(u, v) == cosine_similarity(v, u));

    const double c = 0.25 + (rng() % 1000) / 250.0;
    EmbeddingVector cu = u;
    for (double& x : cu.values) x *= c;
    CHECK(cosine_similarity(cu, v) == doctest::Approx(cosine_similarity(u, v)).epsilon(1e-9));
  }
}

TEST_CASE("frame invariants are constructor-enforced") {
  CHECK_NOTHROW(Frame(2, 3, 3));
  CHECK_NOTHROW(Frame(1, 1, 1));
  CHECK_THROWS_AS(Frame(0, 3, 3), ValidationError);
  CHECK_THROWS_AS(Frame(3, -1, 3), ValidationError);
  CHECK_THROWS_AS(Frame(2, 2, 2), ValidationError);  // channels must be 1 or 3
  CHECK_THROWS_AS(Frame(2, 2, 3, std::vector<std::uint8_t>(5)), ValidationError);
  CHECK_NOTHROW(Frame(2, 2, 3, std::vector<std::uint8_t>(12)));
}

TEST_CASE("scene invariants are constructor-enforced") {
  std::vector<Frame> frames = {Frame(2, 2, 3), Frame(2, 2, 3)};
  CHECK_NOTHROW(Scene("vid", 0, 0, 10, frames));
  CHECK_THROWS_AS(Scene("vid", 0, 0, 10, {}), ValidationError);
  CHECK_THROWS_AS(Scene("vid", -1, 0, 10, frames), ValidationError);
  CHECK_THROWS_AS(Scene("vid", 0, 11, 10, frames), ValidationError);
  std::vector<Frame> mixed = {Frame(2, 2, 3), Frame(2, 3, 3)};
  CHECK_THROWS_AS(Scene("vid", 0, 0, 10, mixed), ValidationError);
}

TEST_CASE("embedding vector rejects empty and non-finite input") {
  CHECK_THROWS_AS(EmbeddingVector(std::vector<double>{}), ValidationError);
  CHECK_THROWS_AS(EmbeddingVector({1.0, std::nan("")}), ValidationError);
  CHECK(EmbeddingVector({1.0, 2.0}).dim() == 2);
}

TEST_CASE("scene caption enforces single-line text and increasing starts") {
  CHECK_NOTHROW(SceneCaption("v", 0, "Stir the pot.", {0, 10, 25}, "abc"));
  CHECK_THROWS_AS(SceneCaption("v", 0, "", {0}, "abc"), ValidationError);
  CHECK_THROWS_AS(SceneCaption("v", 0, "two\nlines", {0}, "abc"), ValidationError);
  CHECK_THROWS_AS(SceneCaption("v", 0, "ok", {0, 10, 10}, "abc"), ValidationError);
  CHECK_THROWS_AS(SceneCaption("v", 0, "ok", {10, 0}, "abc"), ValidationError);
}

TEST_CASE("subcaption delimited form keeps the bar separator") {
  Subcaption sub;
  sub.action = "Chop the onion";
  sub.objects = {"knife", "onion", "board"};
  CHECK(sub.delimited() == "Chop the onion | knife, onion, board");
  sub.objects.clear();
  CHECK(sub.delimited() == "Chop the onion |");
}

TEST_CASE("pipeline config defaults follow the published stride parameters") {
  PipelineConfig cfg;
  CHECK(cfg.window_size == 10);
  CHECK(cfg.base_stride == 10.0);
  CHECK(cfg.max_stride == 30.0);  // 3 * s_base
  CHECK(cfg.stride_alpha == 1.5);
  CHECK(cfg.similarity_threshold == 0.5);
  CHECK(cfg.subsample_rate == 40);
  CHECK_NOTHROW(validate_config(cfg));
}

TEST_CASE("pipeline config bounds are enforced") {
  PipelineConfig cfg;
  SUBCASE("M") { cfg.subsample_rate = 0; }
  SUBCASE("K") { cfg.window_size = 0; }
  SUBCASE("s_base") { cfg.base_stride = 0.5; }
  SUBCASE("s_max") { cfg.max_stride = cfg.base_stride - 1; }
  SUBCASE("alpha") { cfg.stride_alpha = 0.99; }
  SUBCASE("tau high") { cfg.similarity_threshold = 1.1; }
  SUBCASE("tau low") { cfg.similarity_threshold = -1.1; }
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_SUITE_END();
