#ifndef DYNASTRIDE_BACKENDS_HTTP_HPP
#define DYNASTRIDE_BACKENDS_HTTP_HPP

#include <string>
#include <vector>

#include "dynastride/backends.hpp"

namespace dynastride {

struct HttpOptions {
  int max_attempts = 3;   // total tries for transient failures
  int retry_base_ms = 250;  // first backoff delay, doubled per retry
  int timeout_sec = 120;
  double temperature = 0.0;
  long seed = 0;
  bool multi_image = false;  // one image part per window frame instead of one wide image
  bool log_requests = true;
};

// Bearer token read from this env var when present.
extern const char* kApiKeyEnvVar;

// Chat-completions style backend:
//   POST {model, messages:[{role, content:[{type:"text",text}|{type:"image",
//   data:<base64 PNG>}]}], temperature, seed} -> {choices:[{message:{content}}]}
// Retries transient failures (5xx, timeouts, connection errors) with
// exponential backoff; 4xx raises a non-retryable BackendError.
class HttpChatBackend : public CaptionerInterface, public AggregatorInterface {
 public:
  HttpChatBackend(BackendRef ref, HttpOptions opts = {});

  std::string caption(const WideImage& image, const std::string& prompt) override;
  std::string complete(const std::string& prompt) override;

 private:
  std::string complete_impl(const std::string& prompt, const std::vector<Frame>& images);
  BackendRef ref_;
  HttpOptions opts_;
};

// Embeddings backend: POST {model, input:[str,...]} -> {data:[{embedding:[...]}]}.
class HttpEmbedder : public EmbedderInterface {
 public:
  HttpEmbedder(BackendRef ref, HttpOptions opts = {});

  EmbeddingVector embed(const std::string& text) override;
  std::vector<EmbeddingVector> embed_tokens(const std::vector<std::string>& tokens) override;

 private:
  std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& inputs);
  BackendRef ref_;
  HttpOptions opts_;
};

// Sentence-pair backend: POST {model, pairs:[[a,b]]} ->
//   {data:[{nsp, entailment, neutral, contradiction}]} (fields optional).
class HttpPairScorer : public PairScorerInterface {
 public:
  HttpPairScorer(BackendRef ref, HttpOptions opts = {});

  PairScore score(const std::string& first, const std::string& second) override;

 private:
  BackendRef ref_;
  HttpOptions opts_;
};

// POSTs a JSON body and returns the reply body, applying the retry policy.
// Exposed for the backend implementations and their tests.
std::string http_post_json(const std::string& endpoint, const std::string& body,
                           const HttpOptions& opts, const std::string& model_id);

// Cuts a wide image back into its equal-width frames (multi-image payloads).
std::vector<Frame> split_wide_image(const WideImage& wide);

}  // namespace dynastride

#endif  // DYNASTRIDE_BACKENDS_HTTP_HPP
