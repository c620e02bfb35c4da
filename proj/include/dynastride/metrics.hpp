#ifndef DYNASTRIDE_METRICS_HPP
#define DYNASTRIDE_METRICS_HPP

#include <array>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dynastride/backends.hpp"
#include "dynastride/text.hpp"
#include "dynastride/types.hpp"

namespace dynastride {

using TokenSequence = std::vector<std::string>;

// Intermediate values exposed for auditing; each metric fills its own part.
struct MetricBreakdown {
  std::array<double, 4> bleu_pn = {0, 0, 0, 0};  // smoothed p_1..p_4
  double brevity_penalty = 0.0;
  long candidate_len = 0;
  long effective_ref_len = 0;
  double meteor_fmean = 0.0;
  double meteor_penalty = 0.0;
  long meteor_chunks = 0;
  long meteor_matches = 0;
  std::array<double, 4> cider_per_n = {0, 0, 0, 0};  // reference-averaged cosines
};

struct ScoreTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Accumulated-cost matrix and optimal warping path of one DTW alignment.
// Path cells are 0-indexed; the path runs (0,0) .. (T-1,S-1) with steps
// (+1,0), (0,+1) or (+1,+1).
struct DtwTrace {
  std::vector<std::vector<double>> cost;
  std::vector<std::pair<int, int>> path;
};

struct NliAggregate {
  std::optional<double> mean_contradiction;  // absent when every pair failed
  int scored = 0;
  int excluded = 0;
};

struct NspResult {
  double nsp_true = 0.0;
  double nsp_shuffled = 0.0;
  double nsp_delta = 0.0;
  std::vector<int> permutation;  // the shuffled order actually used
};

// BLEU-4 with per-reference max clipping, uniform 1/4 weights and the
// brevity penalty BP = 1 if |c| > |r| else exp(1 - |r|/|c|), where |r| is
// the closest reference length (ties -> shorter). A zero n-gram precision
// is smoothed to 1/(2 * max(1, candidate n-gram count)). An empty candidate
// scores 0 without raising.
double bleu4(const TokenSequence& candidate, const std::vector<TokenSequence>& references,
             MetricBreakdown* breakdown = nullptr);

// Exact-match unigram METEOR: the alignment maximizes matches, then
// minimizes chunks (branch-and-bound, exact for <= 12 matches, greedy
// above). F_mean = P*R / (0.9*P + 0.1*R); penalty = 0.5 * (chunks/matches)^3;
// score = F_mean * (1 - penalty). Zero matches score 0.
double meteor_lite(const TokenSequence& candidate, const TokenSequence& reference,
                   MetricBreakdown* breakdown = nullptr);

// Corpus-level consensus score, N = 1..4 with uniform weights:
// per n, the mean over a scene's references of the cosine between TF-IDF
// n-gram vectors; the final score is the mean over n. IDF uses the number
// of reference sets as the document count, df clamped to >= 1; zero-norm
// vectors contribute cosine 0.
std::vector<double> cider(const std::vector<TokenSequence>& candidates,
                          const std::vector<std::vector<TokenSequence>>& reference_sets,
                          std::vector<MetricBreakdown>* breakdowns = nullptr);

// Greedy token matching on pre-normalized embeddings: P averages each
// candidate token's best dot product against the reference tokens, R is
// symmetric, F1 is their harmonic mean. Empty input yields (0,0,0) and
// sets *degenerate.
ScoreTriple bertscore(const std::vector<EmbeddingVector>& candidate_tokens,
                      const std::vector<EmbeddingVector>& reference_tokens,
                      bool* degenerate = nullptr);

// Cosine similarity of the two sentence embeddings.
double sbert_similarity(const std::string& candidate, const std::string& reference,
                        EmbedderInterface& embedder);

// DTW with local cost 1 - cos and predecessors {up, left, diagonal};
// backtracking prefers diagonal, then vertical, on cost ties. Returns the
// mean cosine similarity along the optimal path.
double dtw_align(const std::vector<EmbeddingVector>& xs, const std::vector<EmbeddingVector>& ys,
                 DtwTrace* trace = nullptr);

// Mean contradiction probability over the pairs. Pairs whose scorer call
// fails (or returns no NLI triple) are excluded and counted.
NliAggregate nli_contradiction(const std::vector<std::pair<std::string, std::string>>& pairs,
                               PairScorerInterface& scorer);

// NSP_True averages p_NSP over consecutive original-order pairs;
// NSP_Shuffled does the same over one seeded non-identity permutation;
// delta is their difference. Fewer than two sentences -> absent.
std::optional<NspResult> nsp_coherence(const std::vector<std::string>& sentences,
                                       PairScorerInterface& scorer, long seed);

// Portable Fisher-Yates using explicit modulo draws, so the permutation for
// a given seed is identical on every platform.
std::vector<int> seeded_permutation(int n, std::mt19937_64& rng);

}  // namespace dynastride

#endif  // DYNASTRIDE_METRICS_HPP
