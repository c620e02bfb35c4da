#ifndef DYNASTRIDE_BACKENDS_HPP
#define DYNASTRIDE_BACKENDS_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dynastride/types.hpp"
#include "dynastride/windowing.hpp"

namespace dynastride {

// Scores returned by the sentence-pair backend. Whichever group is present
// obeys its range constraint: nsp_prob in [0,1]; the NLI triple is three
// probabilities summing to 1.
struct PairScore {
  std::optional<double> nsp_prob;
  std::optional<double> entail;
  std::optional<double> neutral;
  std::optional<double> contradict;

  static PairScore nsp(double p);
  static PairScore nli(double ent, double neu, double con);
  static PairScore both(double p, double ent, double neu, double con);
};

// The four model roles. Every implementation must be safe for concurrent
// calls or be wrapped behind the configured concurrency limit.

class CaptionerInterface {
 public:
  virtual ~CaptionerInterface() = default;
  // Wide image + instruction text -> raw reply text.
  virtual std::string caption(const WideImage& image, const std::string& prompt) = 0;
};

class EmbedderInterface {
 public:
  virtual ~EmbedderInterface() = default;
  virtual EmbeddingVector embed(const std::string& text) = 0;
  // One vector per token, for token-level scoring.
  virtual std::vector<EmbeddingVector> embed_tokens(const std::vector<std::string>& tokens) = 0;
};

class AggregatorInterface {
 public:
  virtual ~AggregatorInterface() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

class PairScorerInterface {
 public:
  virtual ~PairScorerInterface() = default;
  virtual PairScore score(const std::string& first, const std::string& second) = 0;
};

// ---- Prompt construction and reply parsing ----

// The window-captioning instruction. Constant; asks for exactly two outputs
// separated by "|" inside <CONCLUSION></CONCLUSION>.
std::string build_mmcot_prompt();

// Extracts the first <CONCLUSION>...</CONCLUSION> span and splits it on the
// FIRST "|": the left part is the action, the right part is a comma list of
// objects. A span with no "|" at all yields an action with no objects.
// Throws ParseError (carrying the raw reply) on missing tags or empty action.
Subcaption parse_conclusion(const std::string& reply);

// The aggregation instruction with the subcaptions as a numbered list in
// chronological order, one per line. Throws LogicError on an empty list.
std::string build_aggregator_prompt(const std::vector<Subcaption>& subcaptions);

// Extracts the first <ANSWER>...</ANSWER> span, trims it and collapses any
// internal newlines to spaces. Throws ParseError on missing tags or empty
// content.
std::string parse_answer(const std::string& reply);

// ---- Deterministic mocks ----

// Bag-of-words hash embedding: lowercase tokens hashed into `dim` buckets
// with count weights, then L2-normalized. Identical texts map to identical
// vectors; token-disjoint texts with non-colliding buckets are orthogonal.
// Empty text yields the zero vector. Throws ConfigError when dim < 2.
EmbeddingVector mock_embed(const std::string& text, int dim = 32);

// Stable 64-bit content hash used by the mocks (FNV-1a).
std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 14695981039346656037ull);

// Captions a wide image from a fixed action/object vocabulary, selected by
// a quantized content hash of the pixels. Pure function of (pixels, seed).
class MockCaptioner : public CaptionerInterface {
 public:
  explicit MockCaptioner(long seed = 0) : seed_(seed) {}
  std::string caption(const WideImage& image, const std::string& prompt) override;

 private:
  long seed_ = 0;
};

class MockEmbedder : public EmbedderInterface {
 public:
  explicit MockEmbedder(int dim = 32);
  EmbeddingVector embed(const std::string& text) override;
  std::vector<EmbeddingVector> embed_tokens(const std::vector<std::string>& tokens) override;

 private:
  int dim_ = 32;
};

// Reads the numbered captions back out of the aggregator prompt and turns
// their action parts into one imperative line, one sentence per action.
class MockAggregator : public AggregatorInterface {
 public:
  std::string complete(const std::string& prompt) override;
};

// NSP probability and NLI triple derived from the cosine similarity of the
// two sentences' mock embeddings.
class MockPairScorer : public PairScorerInterface {
 public:
  explicit MockPairScorer(int dim = 32) : dim_(dim) {}
  PairScore score(const std::string& first, const std::string& second) override;

 private:
  int dim_ = 32;
};

}  // namespace dynastride

#endif  // DYNASTRIDE_BACKENDS_HPP
