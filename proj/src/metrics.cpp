#include "dynastride/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dynastride/similarity.hpp"

namespace dynastride {

namespace {

// n-grams keyed as tokens joined with an unlikely separator byte.
using NgramCounts = std::map<std::string, long>;

NgramCounts ngram_counts(const TokenSequence& tokens, int n) {
  NgramCounts counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

// ---- METEOR alignment ----

struct MeteorAlignment {
  long matches = 0;
  long chunks = 0;
};

struct AlignmentProblem {
  const TokenSequence& cand;
  const TokenSequence& ref;
  std::map<std::string, long> quota;        // per-word matches to place
  std::map<std::string, long> cand_remaining;  // candidate occurrences not yet passed
  std::vector<char> ref_used;
  long best_chunks = 0;
  long total_matches = 0;
};

MeteorAlignment greedy_alignment(const TokenSequence& cand, const TokenSequence& ref,
                                 std::map<std::string, long> quota, long total) {
  std::vector<char> used(ref.size(), 0);
  long chunks = 0;
  long prev_i = -2, prev_j = -2;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    const std::string& w = cand[i];
    auto it = quota.find(w);
    if (it == quota.end() || it->second == 0) continue;
    long j = -1;
    const bool adjacent = static_cast<long>(i) == prev_i + 1 && prev_j + 1 < static_cast<long>(ref.size());
    if (adjacent && !used[prev_j + 1] && ref[prev_j + 1] == w) {
      j = prev_j + 1;  // continue the current chunk when possible
    } else {
      for (std::size_t k = 0; k < ref.size(); ++k) {
        if (!used[k] && ref[k] == w) {
          j = static_cast<long>(k);
          break;
        }
      }
    }
    if (j < 0) continue;
    if (!(static_cast<long>(i) == prev_i + 1 && j == prev_j + 1)) ++chunks;
    used[j] = 1;
    --it->second;
    prev_i = static_cast<long>(i);
    prev_j = j;
  }
  return {total, chunks};
}

// Depth-first search over candidate positions; exact minimum chunk count
// among maximum matchings. Prunes on the incumbent chunk count.
void min_chunks_dfs(AlignmentProblem& p, std::size_t i, long matched, long chunks, long prev_i,
                    long prev_j) {
  if (chunks >= p.best_chunks) return;
  if (matched == p.total_matches) {
    p.best_chunks = chunks;
    return;
  }
  if (i >= p.cand.size()) return;

  const std::string& w = p.cand[i];
  auto quota_it = p.quota.find(w);
  auto remain_it = p.cand_remaining.find(w);
  const long quota = quota_it == p.quota.end() ? 0 : quota_it->second;
  const long remaining = remain_it == p.cand_remaining.end() ? 0 : remain_it->second;

  if (quota > 0) {
    for (std::size_t j = 0; j < p.ref.size(); ++j) {
      if (p.ref_used[j] || p.ref[j] != w) continue;
      const bool adjacent =
          static_cast<long>(i) == prev_i + 1 && static_cast<long>(j) == prev_j + 1;
      p.ref_used[j] = 1;
      --quota_it->second;
      --remain_it->second;
      min_chunks_dfs(p, i + 1, matched + 1, chunks + (adjacent ? 0 : 1), static_cast<long>(i),
                     static_cast<long>(j));
      ++remain_it->second;
      ++quota_it->second;
      p.ref_used[j] = 0;
    }
  }
  // Skip position i only when the word's quota can still be met later.
  if (remaining - 1 >= quota) {
    if (remain_it != p.cand_remaining.end()) --remain_it->second;
    min_chunks_dfs(p, i + 1, matched, chunks, prev_i, prev_j);
    if (remain_it != p.cand_remaining.end()) ++remain_it->second;
  }
}

MeteorAlignment align_meteor(const TokenSequence& cand, const TokenSequence& ref) {
  std::map<std::string, long> count_c, count_r;
  for (const std::string& w : cand) ++count_c[w];
  for (const std::string& w : ref) ++count_r[w];
  std::map<std::string, long> quota;
  long total = 0;
  for (const auto& [w, cc] : count_c) {
    auto it = count_r.find(w);
    if (it == count_r.end()) continue;
    quota[w] = std::min(cc, it->second);
    total += quota[w];
  }
  if (total == 0) return {0, 0};

  const MeteorAlignment greedy = greedy_alignment(cand, ref, quota, total);
  constexpr long kExactLimit = 12;
  if (total > kExactLimit) return greedy;

  AlignmentProblem p{cand, ref, quota, count_c, std::vector<char>(ref.size(), 0), greedy.chunks,
                     total};
  min_chunks_dfs(p, 0, 0, 0, -2, -2);
  return {total, p.best_chunks};
}

double mean_or_zero(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double bleu4(const TokenSequence& candidate, const std::vector<TokenSequence>& references,
             MetricBreakdown* breakdown) {
  if (references.empty()) {
    throw ConfigError("bleu4: at least one reference required");
  }
  MetricBreakdown local;
  MetricBreakdown& b = breakdown ? *breakdown : local;
  b.candidate_len = static_cast<long>(candidate.size());

  if (candidate.empty()) {
    b.brevity_penalty = 0.0;
    return 0.0;
  }

  // Effective reference length: closest to |c|, ties to the shorter.
  long best_len = static_cast<long>(references.front().size());
  for (const TokenSequence& r : references) {
    const long len = static_cast<long>(r.size());
    const long cur = std::labs(len - b.candidate_len);
    const long best = std::labs(best_len - b.candidate_len);
    if (cur < best || (cur == best && len < best_len)) best_len = len;
  }
  b.effective_ref_len = best_len;
  b.brevity_penalty = b.candidate_len > best_len
                          ? 1.0
                          : std::exp(1.0 - static_cast<double>(best_len) / b.candidate_len);

  double log_sum = 0.0;
  for (int n = 1; n <= 4; ++n) {
    const NgramCounts cand_counts = ngram_counts(candidate, n);
    std::vector<NgramCounts> ref_counts;
    ref_counts.reserve(references.size());
    for (const TokenSequence& r : references) ref_counts.push_back(ngram_counts(r, n));

    long total = 0, clipped = 0;
    for (const auto& [gram, count] : cand_counts) {
      total += count;
      long max_ref = 0;
      for (const NgramCounts& rc : ref_counts) {
        const auto it = rc.find(gram);
        if (it != rc.end()) max_ref = std::max(max_ref, it->second);
      }
      clipped += std::min(count, max_ref);
    }
    const double pn = clipped > 0
                          ? static_cast<double>(clipped) / static_cast<double>(total)
                          : 1.0 / (2.0 * static_cast<double>(std::max<long>(total, 1)));
    b.bleu_pn[n - 1] = pn;
    log_sum += std::log(pn);
  }
  return b.brevity_penalty * std::exp(log_sum / 4.0);
}

double meteor_lite(const TokenSequence& candidate, const TokenSequence& reference,
                   MetricBreakdown* breakdown) {
  constexpr double kAlpha = 0.9;
  constexpr double kGamma = 0.5;
  constexpr double kBeta = 3.0;

  MetricBreakdown local;
  MetricBreakdown& b = breakdown ? *breakdown : local;
  const MeteorAlignment a = align_meteor(candidate, reference);
  b.meteor_matches = a.matches;
  b.meteor_chunks = a.chunks;
  if (a.matches == 0) return 0.0;

  const double precision = static_cast<double>(a.matches) / candidate.size();
  const double recall = static_cast<double>(a.matches) / reference.size();
  b.meteor_fmean = precision * recall / (kAlpha * precision + (1.0 - kAlpha) * recall);
  b.meteor_penalty =
      kGamma * std::pow(static_cast<double>(a.chunks) / a.matches, kBeta);
  return b.meteor_fmean * (1.0 - b.meteor_penalty);
}

std::vector<double> cider(const std::vector<TokenSequence>& candidates,
                          const std::vector<std::vector<TokenSequence>>& reference_sets,
                          std::vector<MetricBreakdown>* breakdowns) {
  constexpr int kMaxN = 4;
  if (candidates.empty() || candidates.size() != reference_sets.size()) {
    throw ConfigError("cider: need matching non-empty candidate and reference lists");
  }
  const double corpus_size = static_cast<double>(reference_sets.size());

  // Document frequencies per n over reference sets.
  std::array<std::map<std::string, long>, kMaxN> df;
  for (const auto& refs : reference_sets) {
    for (int n = 1; n <= kMaxN; ++n) {
      std::map<std::string, char> present;
      for (const TokenSequence& r : refs) {
        for (const auto& [gram, count] : ngram_counts(r, n)) present[gram] = 1;
      }
      for (const auto& [gram, one] : present) ++df[n - 1][gram];
    }
  }
  auto idf = [&](int n, const std::string& gram) {
    const auto it = df[n - 1].find(gram);
    const long d = it == df[n - 1].end() ? 0 : it->second;
    return std::log(corpus_size / static_cast<double>(std::max<long>(d, 1)));
  };
  auto tfidf = [&](const TokenSequence& s, int n) {
    std::map<std::string, double> vec;
    for (const auto& [gram, count] : ngram_counts(s, n)) {
      vec[gram] = static_cast<double>(count) * idf(n, gram);
    }
    return vec;
  };
  auto sparse_cos = [](const std::map<std::string, double>& a,
                       const std::map<std::string, double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [g, v] : a) {
      na += v * v;
      const auto it = b.find(g);
      if (it != b.end()) dot += v * it->second;
    }
    for (const auto& [g, v] : b) nb += v * v;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
  };

  if (breakdowns) breakdowns->assign(candidates.size(), MetricBreakdown{});
  std::vector<double> scores(candidates.size(), 0.0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& refs = reference_sets[i];
    double sum_over_n = 0.0;
    for (int n = 1; n <= kMaxN; ++n) {
      const auto cand_vec = tfidf(candidates[i], n);
      double ref_sum = 0.0;
      for (const TokenSequence& r : refs) {
        ref_sum += sparse_cos(cand_vec, tfidf(r, n));
      }
      const double avg = refs.empty() ? 0.0 : ref_sum / static_cast<double>(refs.size());
      if (breakdowns) (*breakdowns)[i].cider_per_n[n - 1] = avg;
      sum_over_n += avg;
    }
    scores[i] = sum_over_n / kMaxN;
  }
  return scores;
}

ScoreTriple bertscore(const std::vector<EmbeddingVector>& candidate_tokens,
                      const std::vector<EmbeddingVector>& reference_tokens, bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (candidate_tokens.empty() || reference_tokens.empty()) {
    if (degenerate) *degenerate = true;
    return {0.0, 0.0, 0.0};
  }
  const int dim = candidate_tokens.front().dim();
  for (const auto& v : candidate_tokens) {
    if (v.dim() != dim) throw ConfigError("bertscore: mixed embedding dims");
  }
  for (const auto& v : reference_tokens) {
    if (v.dim() != dim) throw ConfigError("bertscore: mixed embedding dims");
  }

  auto dot = [](const EmbeddingVector& a, const EmbeddingVector& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) s += a.values[k] * b.values[k];
    return s;
  };

  double precision = 0.0;
  for (const auto& e : candidate_tokens) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : reference_tokens) best = std::max(best, dot(e, r));
    precision += best;
  }
  precision /= static_cast<double>(candidate_tokens.size());

  double recall = 0.0;
  for (const auto& r : reference_tokens) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& e : candidate_tokens) best = std::max(best, dot(e, r));
    recall += best;
  }
  recall /= static_cast<double>(reference_tokens.size());

  const double denom = precision + recall;
  const double f1 = denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
  return {precision, recall, f1};
}

double sbert_similarity(const std::string& candidate, const std::string& reference,
                        EmbedderInterface& embedder) {
  return cosine_similarity(embedder.embed(candidate), embedder.embed(reference));
}

double dtw_align(const std::vector<EmbeddingVector>& xs, const std::vector<EmbeddingVector>& ys,
                 DtwTrace* trace) {
  if (xs.empty() || ys.empty()) {
    throw ConfigError("dtw_align: both sequences must be non-empty");
  }
  const int T = static_cast<int>(xs.size());
  const int S = static_cast<int>(ys.size());

  std::vector<std::vector<double>> sim(T, std::vector<double>(S, 0.0));
  for (int i = 0; i < T; ++i) {
    for (int j = 0; j < S; ++j) sim[i][j] = cosine_similarity(xs[i], ys[j]);
  }

  std::vector<std::vector<double>> cost(T, std::vector<double>(S, 0.0));
  for (int i = 0; i < T; ++i) {
    for (int j = 0; j < S; ++j) {
      const double d = 1.0 - sim[i][j];
      if (i == 0 && j == 0) {
        cost[i][j] = d;
      } else if (i == 0) {
        cost[i][j] = d + cost[i][j - 1];
      } else if (j == 0) {
        cost[i][j] = d + cost[i - 1][j];
      } else {
        cost[i][j] = d + std::min({cost[i - 1][j], cost[i][j - 1], cost[i - 1][j - 1]});
      }
    }
  }

  // Backtrack from (T-1, S-1); diagonal wins ties, then vertical.
  std::vector<std::pair<int, int>> path;
  int i = T - 1, j = S - 1;
  path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      const double diag = cost[i - 1][j - 1];
      const double up = cost[i - 1][j];
      const double left = cost[i][j - 1];
      const double best = std::min({diag, up, left});
      if (diag == best) {
        --i;
        --j;
      } else if (up == best) {
        --i;
      } else {
        --j;
      }
    }
    path.emplace_back(i, j);
  }
  std::reverse(path.begin(), path.end());

  double total = 0.0;
  for (const auto& [pi, pj] : path) total += sim[pi][pj];
  const double align = total / static_cast<double>(path.size());

  if (trace) {
    trace->cost = std::move(cost);
    trace->path = std::move(path);
  }
  return align;
}

NliAggregate nli_contradiction(const std::vector<std::pair<std::string, std::string>>& pairs,
                               PairScorerInterface& scorer) {
  if (pairs.empty()) {
    throw ConfigError("nli_contradiction: at least one pair required");
  }
  NliAggregate agg;
  double sum = 0.0;
  for (const auto& [cand, ref] : pairs) {
    try {
      const PairScore s = scorer.score(cand, ref);
      if (!s.contradict) {
        ++agg.excluded;
        continue;
      }
      sum += *s.contradict;
      ++agg.scored;
    } catch (const Error&) {
      ++agg.excluded;
    }
  }
  if (agg.scored > 0) {
    agg.mean_contradiction = sum / static_cast<double>(agg.scored);
  }
  return agg;
}

std::vector<int> seeded_permutation(int n, std::mt19937_64& rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i >= 1; --i) {
    const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(p[i], p[j]);
  }
  return p;
}

std::optional<NspResult> nsp_coherence(const std::vector<std::string>& sentences,
                                       PairScorerInterface& scorer, long seed) {
  const int n = static_cast<int>(sentences.size());
  if (n < 2) return std::nullopt;

  auto nsp_prob = [&](const std::string& a, const std::string& b) {
    const PairScore s = scorer.score(a, b);
    if (!s.nsp_prob) {
      throw ValidationError("nsp_coherence: scorer provides no NSP probability");
    }
    return *s.nsp_prob;
  };
  auto mean_consecutive = [&](const std::vector<int>& order) {
    std::vector<double> probs;
    probs.reserve(order.size() - 1);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      probs.push_back(nsp_prob(sentences[order[i]], sentences[order[i + 1]]));
    }
    return mean_or_zero(probs);
  };

  std::vector<int> identity(n);
  std::iota(identity.begin(), identity.end(), 0);

  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::vector<int> shuffled = seeded_permutation(n, rng);
  while (shuffled == identity) shuffled = seeded_permutation(n, rng);

  NspResult result;
  result.nsp_true = mean_consecutive(identity);
  result.nsp_shuffled = mean_consecutive(shuffled);
  result.nsp_delta = result.nsp_true - result.nsp_shuffled;
  result.permutation = std::move(shuffled);
  return result;
}

}  // namespace dynastride
