// Shared test instruments: scripted backends keyed by window start, scene
// builders, temp dirs, and a helper to spawn the CLI binary.

#ifndef DYNASTRIDE_TESTS_SUPPORT_HPP
#define DYNASTRIDE_TESTS_SUPPORT_HPP

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dynastride/backends.hpp"
#include "dynastride/windowing.hpp"

namespace testsupport {

// A scripted walk scenario: per window start, either a caption id or -1
// for a malformed reply; embeddings are fixed per caption id.
struct ScriptedScene {
  int seq_len = 0;
  std::vector<int> caption_id_at;                       // size seq_len
  std::vector<std::vector<double>> caption_embeddings;  // per caption id
};

inline std::string caption_text(int id) { return "c" + std::to_string(id) + " | obj"; }

// 1x1 grayscale frames whose pixel value encodes the position, so a
// captioner can recover the window start from the wide image.
inline dynastride::SubsampledSequence indexed_sequence(int len) {
  dynastride::SubsampledSequence seq;
  seq.scene_ref = "test_0";
  for (int i = 0; i < len; ++i) {
    dynastride::Frame f(1, 1, 1);
    f.pixels[0] = static_cast<std::uint8_t>(i);
    seq.frames.push_back(std::move(f));
    seq.source_indices.push_back(i);
  }
  return seq;
}

class ScriptedCaptioner : public dynastride::CaptionerInterface {
 public:
  explicit ScriptedCaptioner(const ScriptedScene& scene) : scene_(scene) {}

  std::string caption(const dynastride::WideImage& image, const std::string&) override {
    const int t = image.image.pixels.at(0);
    const int id = scene_.caption_id_at.at(t);
    if (id < 0) return "backend had a bad day, no tags here";
    return "<CONCLUSION>" + caption_text(id) + "</CONCLUSION>";
  }

 private:
  const ScriptedScene& scene_;
};

class ScriptedEmbedder : public dynastride::EmbedderInterface {
 public:
  explicit ScriptedEmbedder(const ScriptedScene& scene) : scene_(scene) {}

  dynastride::EmbeddingVector embed(const std::string& text) override {
    // Texts look like "c<id> | obj".
    const int id = std::stoi(text.substr(1));
    return dynastride::EmbeddingVector(scene_.caption_embeddings.at(id));
  }

  std::vector<dynastride::EmbeddingVector> embed_tokens(
      const std::vector<std::string>& tokens) override {
    std::vector<dynastride::EmbeddingVector> out;
    for (const auto& t : tokens) out.push_back(embed(t));
    return out;
  }

 private:
  const ScriptedScene& scene_;
};

// Replies from a fixed queue; repeats the last entry when exhausted.
class QueueAggregator : public dynastride::AggregatorInterface {
 public:
  explicit QueueAggregator(std::vector<std::string> replies) : replies_(std::move(replies)) {}

  std::string complete(const std::string& prompt) override {
    prompts.push_back(prompt);
    const std::string& r = next_ < replies_.size() ? replies_[next_] : replies_.back();
    ++next_;
    return r;
  }

  std::vector<std::string> prompts;

 private:
  std::vector<std::string> replies_;
  std::size_t next_ = 0;
};

// Pair scorer driven by explicit lookup tables.
class TableScorer : public dynastride::PairScorerInterface {
 public:
  std::map<std::pair<std::string, std::string>, double> nsp_table;
  std::map<std::pair<std::string, std::string>, double> contradiction_table;
  double default_nsp = 0.0;
  std::optional<double> default_contradiction = 0.0;  // nullopt = failure

  dynastride::PairScore score(const std::string& a, const std::string& b) override {
    dynastride::PairScore s;
    const auto n = nsp_table.find({a, b});
    s.nsp_prob = n != nsp_table.end() ? n->second : default_nsp;
    const auto c = contradiction_table.find({a, b});
    std::optional<double> con = c != contradiction_table.end()
                                    ? std::optional<double>(c->second)
                                    : default_contradiction;
    if (con) {
      s.contradict = *con;
      s.entail = (1.0 - *con) / 2.0;
      s.neutral = 1.0 - *s.contradict - *s.entail;
    }
    return s;
  }
};

// Random scripted scenes for the randomized walk comparisons.
inline ScriptedScene random_scripted_scene(std::mt19937_64& rng, int max_len = 200,
                                           double error_rate = 0.0) {
  ScriptedScene scene;
  scene.seq_len = 5 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_len - 4));
  const int n_captions = 1 + static_cast<int>(rng() % 6);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int c = 0; c < n_captions; ++c) {
    std::vector<double> v(8);
    double norm = 0.0;
    for (double& x : v) {
      x = unit(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) v[0] = norm = 1.0;
    for (double& x : v) x /= norm;
    scene.caption_embeddings.push_back(std::move(v));
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int t = 0; t < scene.seq_len; ++t) {
    if (error_rate > 0.0 && coin(rng) < error_rate) {
      scene.caption_id_at.push_back(-1);
    } else {
      scene.caption_id_at.push_back(static_cast<int>(rng() % n_captions));
    }
  }
  return scene;
}

// Unique scratch directory under the system temp dir; removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("dynastride_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

// Runs the built CLI binary (path from DYNASTRIDE_BIN) with the given args.
inline CliResult run_cli(const std::string& args, const std::filesystem::path& workdir) {
  const char* bin = std::getenv("DYNASTRIDE_BIN");
  if (!bin) return {-1, "DYNASTRIDE_BIN not set"};
  const std::filesystem::path log = workdir / "cli_output.log";
  const std::string cmd = "cd '" + workdir.string() + "' && '" + std::string(bin) + "' " + args +
                          " > '" + log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.output = read_file(log);
  return result;
}

}  // namespace testsupport

#endif  // DYNASTRIDE_TESTS_SUPPORT_HPP
