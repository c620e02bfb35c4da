#include "dynastride/backends_http.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "dynastride/codec.hpp"

namespace dynastride {

namespace {

using nlohmann::json;

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // /v1/...
};

SplitUrl split_url(const std::string& endpoint) {
  const std::size_t scheme = endpoint.find("://");
  if (scheme == std::string::npos) {
    throw ConfigError("backend endpoint is not a URL: " + endpoint);
  }
  const std::size_t slash = endpoint.find('/', scheme + 3);
  if (slash == std::string::npos) return {endpoint, "/"};
  return {endpoint.substr(0, slash), endpoint.substr(slash)};
}

std::string message_text(const json& content) {
  if (content.is_string()) return content.get<std::string>();
  if (content.is_array()) {
    std::string out;
    for (const json& part : content) {
      if (part.contains("text")) out += part["text"].get<std::string>();
    }
    return out;
  }
  throw ParseError("chat reply content has an unexpected shape");
}

json parse_reply(const std::string& body, const std::string& endpoint) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& ex) {
    throw BackendError(std::string("backend reply is not JSON: ") + ex.what(), false, endpoint);
  }
}

}  // namespace

const char* kApiKeyEnvVar = "DYNASTRIDE_API_KEY";

std::string http_post_json(const std::string& endpoint, const std::string& body,
                           const HttpOptions& opts, const std::string& model_id) {
  const SplitUrl url = split_url(endpoint);
  httplib::Client client(url.base);
  client.set_connection_timeout(opts.timeout_sec, 0);
  client.set_read_timeout(opts.timeout_sec, 0);
  client.set_write_timeout(opts.timeout_sec, 0);
  if (const char* key = std::getenv(kApiKeyEnvVar)) {
    client.set_bearer_token_auth(key);
  }

  std::string last_error;
  for (int attempt = 1; attempt <= opts.max_attempts; ++attempt) {
    const auto t0 = std::chrono::steady_clock::now();
    httplib::Result res = client.Post(url.path, body, "application/json");
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    if (opts.log_requests) {
      std::clog << "[http] POST " << endpoint << " model=" << model_id << " attempt=" << attempt
                << " status=" << (res ? std::to_string(res->status) : "ERR") << " " << ms
                << "ms\n";
    }
    if (res && res->status >= 200 && res->status < 300) {
      return res->body;
    }
    if (res && res->status >= 400 && res->status < 500) {
      throw BackendError("backend returned " + std::to_string(res->status) + ": " + res->body,
                         false, endpoint, model_id);
    }
    last_error = res ? ("HTTP " + std::to_string(res->status))
                     : ("transport error: " + httplib::to_string(res.error()));
    if (attempt < opts.max_attempts) {
      const int delay = opts.retry_base_ms << (attempt - 1);
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
  }
  throw BackendError("backend unreachable after " + std::to_string(opts.max_attempts) +
                         " attempts (" + last_error + ")",
                     true, endpoint, model_id);
}

std::vector<Frame> split_wide_image(const WideImage& wide) {
  const Frame& img = wide.image;
  if (wide.frame_count < 1 || img.width % wide.frame_count != 0) {
    throw ValidationError("wide image width is not divisible by its frame count");
  }
  const int w = img.width / wide.frame_count;
  std::vector<Frame> out;
  out.reserve(wide.frame_count);
  for (int i = 0; i < wide.frame_count; ++i) {
    Frame f(img.height, w, img.channels);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < w; ++x) {
        for (int ch = 0; ch < img.channels; ++ch) {
          f.at(y, x, ch) = img.at(y, i * w + x, ch);
        }
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

HttpChatBackend::HttpChatBackend(BackendRef ref, HttpOptions opts)
    : ref_(std::move(ref)), opts_(opts) {}

std::string HttpChatBackend::complete_impl(const std::string& prompt,
                                           const std::vector<Frame>& images) {
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", prompt}});
  for (const Frame& img : images) {
    content.push_back({{"type", "image"}, {"data", base64_encode(encode_png(img))}});
  }
  const json payload = {{"model", ref_.model_id},
                        {"messages", json::array({{{"role", "user"}, {"content", content}}})},
                        {"temperature", opts_.temperature},
                        {"seed", opts_.seed}};
  const std::string body = http_post_json(ref_.endpoint, payload.dump(), opts_, ref_.model_id);
  const json reply = parse_reply(body, ref_.endpoint);
  if (!reply.contains("choices") || reply["choices"].empty()) {
    throw BackendError("chat reply has no choices", false, ref_.endpoint, ref_.model_id);
  }
  return message_text(reply["choices"][0]["message"]["content"]);
}

std::string HttpChatBackend::caption(const WideImage& image, const std::string& prompt) {
  if (opts_.multi_image) {
    return complete_impl(prompt, split_wide_image(image));
  }
  return complete_impl(prompt, {image.image});
}

std::string HttpChatBackend::complete(const std::string& prompt) {
  return complete_impl(prompt, {});
}

HttpEmbedder::HttpEmbedder(BackendRef ref, HttpOptions opts)
    : ref_(std::move(ref)), opts_(opts) {}

std::vector<EmbeddingVector> HttpEmbedder::embed_batch(const std::vector<std::string>& inputs) {
  const json payload = {{"model", ref_.model_id}, {"input", inputs}};
  const std::string body = http_post_json(ref_.endpoint, payload.dump(), opts_, ref_.model_id);
  const json reply = parse_reply(body, ref_.endpoint);
  if (!reply.contains("data") || reply["data"].size() != inputs.size()) {
    throw BackendError("embedding reply size mismatch", false, ref_.endpoint, ref_.model_id);
  }
  std::vector<EmbeddingVector> out;
  out.reserve(inputs.size());
  for (const json& item : reply["data"]) {
    out.emplace_back(item.at("embedding").get<std::vector<double>>());
  }
  return out;
}

EmbeddingVector HttpEmbedder::embed(const std::string& text) {
  return embed_batch({text}).front();
}

std::vector<EmbeddingVector> HttpEmbedder::embed_tokens(const std::vector<std::string>& tokens) {
  return embed_batch(tokens);
}

HttpPairScorer::HttpPairScorer(BackendRef ref, HttpOptions opts)
    : ref_(std::move(ref)), opts_(opts) {}

PairScore HttpPairScorer::score(const std::string& first, const std::string& second) {
  const json payload = {{"model", ref_.model_id},
                        {"pairs", json::array({json::array({first, second})})}};
  const std::string body = http_post_json(ref_.endpoint, payload.dump(), opts_, ref_.model_id);
  const json reply = parse_reply(body, ref_.endpoint);
  if (!reply.contains("data") || reply["data"].empty()) {
    throw BackendError("pair scorer reply has no data", false, ref_.endpoint, ref_.model_id);
  }
  const json& item = reply["data"][0];
  PairScore score;
  if (item.contains("entailment")) {
    score = PairScore::nli(item.at("entailment").get<double>(), item.at("neutral").get<double>(),
                           item.at("contradiction").get<double>());
  }
  if (item.contains("nsp")) {
    const double p = item.at("nsp").get<double>();
    score.nsp_prob = p;
    PairScore::nsp(p);  // range check
  }
  return score;
}

}  // namespace dynastride
