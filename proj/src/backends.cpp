#include "dynastride/backends.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "dynastride/similarity.hpp"
#include "dynastride/text.hpp"

namespace dynastride {

namespace {

constexpr double kProbTol = 1e-6;

void check_prob(double p, const char* name) {
  if (!(p >= -kProbTol && p <= 1.0 + kProbTol)) {
    throw ValidationError(std::string(name) + " out of [0,1]: " + std::to_string(p));
  }
}

const char* kMmcotPrompt =
    "<image> <image> <image> ...\n"
    "These images show a sequence of events from left to right.\n"
    "Task:\n"
    "1. Carefully reason about the sequence of actions in the images (internally).\n"
    "2. Produce exactly two outputs separated by a \"|\":\n"
    "- Output 1: Description of the exact action being performed throughout the sequence.\n"
    "- Output 2: List of objects involved in the sequence.\n"
    "3. Do not show internal reasoning or extra captions — only the final outputs.\n"
    "4. Keep it short, clear, and concise.\n"
    "Output format: <CONCLUSION>Action | Objects</CONCLUSION>\n"
    "Focus on the full temporal progression of the sequence.";

const char* kAggregatorPromptHead =
    "You are given multiple captions from a short instructional clip, in chronological order.\n"
    "Write ONE concise sentence that is short and instructional.\n"
    "Use an imperative tone, as if giving instructions for performing a task.\n"
    "Your response MUST be enclosed between <ANSWER> and </ANSWER>, containing ONLY the final "
    "instruction sentence.\n"
    "Captions:\n";

// Returns the text between the first open/close tag pair, or nullopt.
std::optional<std::string> first_span(const std::string& text, const std::string& open,
                                      const std::string& close) {
  const std::size_t b = text.find(open);
  if (b == std::string::npos) return std::nullopt;
  const std::size_t start = b + open.size();
  const std::size_t e = text.find(close, start);
  if (e == std::string::npos) return std::nullopt;
  return text.substr(start, e - start);
}

const std::array<const char*, 12> kMockActions = {
    "Chop the onions",        "Stir the mixture",      "Pour the batter into the pan",
    "Whisk the eggs",         "Season the meat",       "Heat the oil in the skillet",
    "Slice the bread",        "Flip the pancake",      "Grate the cheese",
    "Knead the dough",        "Drain the pasta",       "Plate the finished dish"};

const std::array<const char*, 12> kMockObjects = {"knife",  "onion",  "bowl",   "whisk",
                                                  "pan",    "spatula", "oven",   "cutting board",
                                                  "cheese", "pot",     "ladle",  "plate"};

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

PairScore PairScore::nsp(double p) {
  check_prob(p, "nsp_prob");
  PairScore s;
  s.nsp_prob = p;
  return s;
}

PairScore PairScore::nli(double ent, double neu, double con) {
  check_prob(ent, "entail");
  check_prob(neu, "neutral");
  check_prob(con, "contradict");
  if (std::abs(ent + neu + con - 1.0) > kProbTol) {
    throw ValidationError("NLI triple does not sum to 1");
  }
  PairScore s;
  s.entail = ent;
  s.neutral = neu;
  s.contradict = con;
  return s;
}

PairScore PairScore::both(double p, double ent, double neu, double con) {
  PairScore s = nli(ent, neu, con);
  check_prob(p, "nsp_prob");
  s.nsp_prob = p;
  return s;
}

std::string build_mmcot_prompt() { return kMmcotPrompt; }

Subcaption parse_conclusion(const std::string& reply) {
  const auto span = first_span(reply, "<CONCLUSION>", "</CONCLUSION>");
  if (!span) {
    throw ParseError("captioner reply has no <CONCLUSION></CONCLUSION> span", reply);
  }
  Subcaption sub;
  sub.raw = reply;
  const std::size_t bar = span->find('|');
  if (bar == std::string::npos) {
    sub.action = trim(*span);
  } else {
    sub.action = trim(span->substr(0, bar));
    const std::string rest = span->substr(bar + 1);
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::string t = trim(item);
      if (!t.empty()) sub.objects.push_back(t);
    }
  }
  if (sub.action.empty()) {
    throw ParseError("captioner reply has an empty action", reply);
  }
  return sub;
}

std::string build_aggregator_prompt(const std::vector<Subcaption>& subcaptions) {
  if (subcaptions.empty()) {
    throw LogicError("build_aggregator_prompt: no subcaptions");
  }
  std::string prompt = kAggregatorPromptHead;
  for (std::size_t i = 0; i < subcaptions.size(); ++i) {
    prompt += std::to_string(i + 1) + ". " + subcaptions[i].delimited() + "\n";
  }
  prompt += "Output:";
  return prompt;
}

std::string parse_answer(const std::string& reply) {
  const auto span = first_span(reply, "<ANSWER>", "</ANSWER>");
  if (!span) {
    throw ParseError("aggregator reply has no <ANSWER></ANSWER> span", reply);
  }
  const std::string answer = collapse_whitespace(trim(*span));
  if (answer.empty()) {
    throw ParseError("aggregator reply has an empty <ANSWER> span", reply);
  }
  return answer;
}

EmbeddingVector mock_embed(const std::string& text, int dim) {
  if (dim < 2) throw ConfigError("mock_embed: dim must be >= 2");
  std::vector<double> values(static_cast<std::size_t>(dim), 0.0);
  for (const std::string& token : tokenize(text)) {
    const std::uint64_t h = fnv1a64(token.data(), token.size());
    values[h % static_cast<std::uint64_t>(dim)] += 1.0;
  }
  double norm = 0.0;
  for (double v : values) norm += v * v;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& v : values) v /= norm;
  }
  return EmbeddingVector(std::move(values));
}

std::string MockCaptioner::caption(const WideImage& image, const std::string& /*prompt*/) {
  // Quantized per-channel means, so near-identical windows caption alike.
  const Frame& f = image.image;
  std::array<std::uint8_t, 3> quantized = {0, 0, 0};
  const std::size_t n = static_cast<std::size_t>(f.height) * f.width;
  for (int ch = 0; ch < f.channels; ++ch) {
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < n; ++i) sum += f.pixels[i * f.channels + ch];
    quantized[ch] = static_cast<std::uint8_t>((sum / n) / 32);  // 8 levels
  }
  std::uint64_t h = fnv1a64(quantized.data(), quantized.size(),
                            14695981039346656037ull ^ static_cast<std::uint64_t>(seed_));
  const std::string action = kMockActions[h % kMockActions.size()];
  std::string objects;
  const int n_objects = 2 + static_cast<int>((h >> 8) % 2);
  for (int i = 0; i < n_objects; ++i) {
    if (i > 0) objects += ", ";
    objects += kMockObjects[(h >> (16 + 8 * i)) % kMockObjects.size()];
  }
  return "The frames depict one continuous step.\n<CONCLUSION>" + action + " | " + objects +
         "</CONCLUSION>";
}

MockEmbedder::MockEmbedder(int dim) : dim_(dim) {
  if (dim < 2) throw ConfigError("MockEmbedder: dim must be >= 2");
}

EmbeddingVector MockEmbedder::embed(const std::string& text) { return mock_embed(text, dim_); }

std::vector<EmbeddingVector> MockEmbedder::embed_tokens(const std::vector<std::string>& tokens) {
  std::vector<EmbeddingVector> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) out.push_back(mock_embed(t, dim_));
  return out;
}

std::string MockAggregator::complete(const std::string& prompt) {
  // Pull the numbered captions back out and echo their action parts as an
  // imperative sentence each.
  std::vector<std::string> actions;
  std::istringstream in(prompt);
  std::string line;
  bool in_captions = false;
  while (std::getline(in, line)) {
    if (trim(line) == "Captions:") {
      in_captions = true;
      continue;
    }
    if (!in_captions) continue;
    const std::string t = trim(line);
    if (t == "Output:") break;
    const std::size_t dot = t.find(". ");
    if (dot == std::string::npos) continue;
    std::string caption = t.substr(dot + 2);
    const std::size_t bar = caption.find('|');
    if (bar != std::string::npos) caption = caption.substr(0, bar);
    caption = trim(caption);
    if (!caption.empty()) actions.push_back(caption);
  }
  if (actions.empty()) {
    return "<ANSWER></ANSWER>";  // parse_answer rejects this downstream
  }
  std::string sentence;
  for (std::string& a : actions) {
    if (!sentence.empty()) sentence += " ";
    a[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(a[0])));
    sentence += a + ".";
  }
  return "<ANSWER>" + sentence + "</ANSWER>";
}

PairScore MockPairScorer::score(const std::string& first, const std::string& second) {
  double c = cosine_similarity(mock_embed(first, dim_), mock_embed(second, dim_));
  if (c < 0.0) c = 0.0;
  if (c > 1.0) c = 1.0;
  return PairScore::both(c, (1.0 + c) / 3.0, 1.0 / 3.0, (1.0 - c) / 3.0);
}

}  // namespace dynastride
