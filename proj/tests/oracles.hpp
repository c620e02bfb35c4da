// Independent brute-force reference implementations used as test oracles.
// These deliberately share no code with src/: n-grams are keyed by token
// vectors, alignments are enumerated exhaustively, and the walk reference
// is a direct transcription of the published loop.

#ifndef DYNASTRIDE_TESTS_ORACLES_HPP
#define DYNASTRIDE_TESTS_ORACLES_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oracles {

using Tokens = std::vector<std::string>;

double bleu4_reference(const Tokens& candidate, const std::vector<Tokens>& references);

double meteor_reference(const Tokens& candidate, const Tokens& reference);

std::vector<double> cider_reference(const std::vector<Tokens>& candidates,
                                    const std::vector<std::vector<Tokens>>& reference_sets);

// Returns {precision, recall, f1}.
std::vector<double> bertscore_reference(const std::vector<std::vector<double>>& cand,
                                        const std::vector<std::vector<double>>& ref);

// Exhaustive enumeration of every monotone warping path (feasible for
// T, S <= 4): minimum total cost and the alignment means of all paths
// achieving it.
struct DtwEnumeration {
  double min_cost = 0.0;
  std::vector<double> optimal_aligns;  // mean cosine of each min-cost path
};
DtwEnumeration dtw_enumerate(const std::vector<std::vector<double>>& xs,
                             const std::vector<std::vector<double>>& ys);

// Direct transcription of the dynamic stride walk over scripted captions.
// caption_at(t) yields the caption id at window start t, or nullopt for a
// malformed reply (skipped without stride growth, matching the documented
// error rule). Returns the retained window starts.
std::vector<int> stride_walk_reference(
    int seq_len, const std::function<std::optional<int>(int)>& caption_at,
    const std::vector<std::vector<double>>& embeddings, double s_base, double s_max, double alpha,
    double tau);

}  // namespace oracles

#endif  // DYNASTRIDE_TESTS_ORACLES_HPP
