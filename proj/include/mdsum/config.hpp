#ifndef MDSUM_CONFIG_HPP
#define MDSUM_CONFIG_HPP

// Run configuration: `key = value` lines, '#' comments. Later assignments
// override earlier ones, which is how command-line overrides are applied.

#include <mdsum/error.hpp>
#include <mdsum/lifelong.hpp>
#include <mdsum/ranking.hpp>
#include <mdsum/summarizer.hpp>
#include <mdsum/topics.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mdsum {

enum class Model { single_mr, jtmmr, jltmmr, jltmmr_sf };
enum class Embedding { tfidf, topic };

inline std::string to_string(Model m) {
  switch (m) {
    case Model::single_mr: return "single_mr";
    case Model::jtmmr: return "jtmmr";
    case Model::jltmmr: return "jltmmr";
    case Model::jltmmr_sf: return "jltmmr_sf";
  }
  return "?";
}

inline std::string to_string(Embedding e) { return e == Embedding::tfidf ? "tfidf" : "topic"; }

struct RunConfig {
  Model model = Model::jltmmr_sf;

  int k_topics = 10;
  double beta = 0.1;
  double lambda = 0.1;
  int nmf_max_iters = 500;
  double nmf_rel_tol = 1e-5;

  double alpha_mr = 0.85;
  double alpha_v = 0.3;
  double alpha_a = 0.4;
  double alpha_overlap = 0.3;
  double mr_tol = 1e-13;
  int mr_max_iters = 100000;

  double alpha_ltm = 0.1;
  double gamma = 0.1;
  int top_words = 10;
  int outer_max_iters = 10;
  double outer_tol = 1e-4;
  bool use_column_weights = true;

  double omega = 1.0;
  double mu1 = 0.2, mu2 = 0.2, mu3 = 0.2, mu4 = 0.2, mu5 = 0.2;
  int length_budget = 250;
  Embedding sim_embedding = Embedding::tfidf;

  std::uint64_t seed = 42;
  int jobs = 1;
  bool remove_dialog = true;
  bool diagnostics = false;
  bool rouge_stem = true;
  bool rouge_remove_stopwords = false;

  std::string corpus;
  std::string kb;
  std::string output;
  std::string stopwords;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  NmfHyper nmf_hyper() const { return {k_topics, beta, lambda, nmf_max_iters, nmf_rel_tol}; }
  LtmHyper ltm_hyper() const {
    return {nmf_hyper(), alpha_ltm, gamma, static_cast<std::size_t>(top_words)};
  }
  MixWeights mix() const { return {alpha_v, alpha_a, alpha_overlap, alpha_mr}; }
  ManifoldRankOptions mr_options() const { return {mr_tol, mr_max_iters}; }
  JltmmrOptions jltmmr_options() const {
    return {outer_max_iters, outer_tol, use_column_weights, mr_options()};
  }
  SfWeights sf_weights() const {
    return {{mu1, mu2, mu3, mu4, mu5}, omega, static_cast<std::size_t>(length_budget)};
  }
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

inline void parse_value(const std::string& key, const std::string& v, std::string& out) { (void)key; out = v; }

inline void parse_value(const std::string& key, const std::string& v, double& out) {
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
}

inline void parse_value(const std::string& key, const std::string& v, int& out) {
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
}

inline void parse_value(const std::string& key, const std::string& v, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
}

inline void parse_value(const std::string& key, const std::string& v, bool& out) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") out = true;
  else if (v == "false" || v == "0" || v == "no" || v == "off") out = false;
  else throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

inline void parse_value(const std::string& key, const std::string& v, Model& out) {
  if (v == "single_mr") out = Model::single_mr;
  else if (v == "jtmmr") out = Model::jtmmr;
  else if (v == "jltmmr") out = Model::jltmmr;
  else if (v == "jltmmr_sf") out = Model::jltmmr_sf;
  else throw ConfigError("config: unknown model '" + v + "' for '" + key + "'");
}

inline void parse_value(const std::string& key, const std::string& v, Embedding& out) {
  if (v == "tfidf") out = Embedding::tfidf;
  else if (v == "topic") out = Embedding::topic;
  else throw ConfigError("config: '" + key + "' expects tfidf or topic, got '" + v + "'");
}

inline std::string format_value(const std::string& v) { return v; }
inline std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
inline std::string format_value(int v) { return std::to_string(v); }
inline std::string format_value(std::uint64_t v) { return std::to_string(v); }
inline std::string format_value(bool v) { return v ? "true" : "false"; }
inline std::string format_value(Model v) { return to_string(v); }
inline std::string format_value(Embedding v) { return to_string(v); }

// Visits every field as (key, member reference) in serialization order.
template <class Cfg, class F>
void for_each_field(Cfg& c, F&& f) {
  f("model", c.model);
  f("k_topics", c.k_topics);
  f("beta", c.beta);
  f("lambda", c.lambda);
  f("nmf_max_iters", c.nmf_max_iters);
  f("nmf_rel_tol", c.nmf_rel_tol);
  f("alpha_mr", c.alpha_mr);
  f("alpha_v", c.alpha_v);
  f("alpha_a", c.alpha_a);
  f("alpha_overlap", c.alpha_overlap);
  f("mr_tol", c.mr_tol);
  f("mr_max_iters", c.mr_max_iters);
  f("alpha_ltm", c.alpha_ltm);
  f("gamma", c.gamma);
  f("top_words", c.top_words);
  f("outer_max_iters", c.outer_max_iters);
  f("outer_tol", c.outer_tol);
  f("use_column_weights", c.use_column_weights);
  f("omega", c.omega);
  f("mu1", c.mu1);
  f("mu2", c.mu2);
  f("mu3", c.mu3);
  f("mu4", c.mu4);
  f("mu5", c.mu5);
  f("length_budget", c.length_budget);
  f("sim_embedding", c.sim_embedding);
  f("seed", c.seed);
  f("jobs", c.jobs);
  f("remove_dialog", c.remove_dialog);
  f("diagnostics", c.diagnostics);
  f("rouge_stem", c.rouge_stem);
  f("rouge_remove_stopwords", c.rouge_remove_stopwords);
  f("corpus", c.corpus);
  f("kb", c.kb);
  f("output", c.output);
  f("stopwords", c.stopwords);
}

}  // namespace config_detail

inline std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  RunConfig c;
  config_detail::for_each_field(c, [&](const char* k, auto&) { keys.emplace_back(k); });
  return keys;
}

/// Sets one field by name.
inline void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  bool found = false;
  config_detail::for_each_field(cfg, [&](const char* k, auto& member) {
    if (key == k) {
      config_detail::parse_value(key, value, member);
      found = true;
    }
  });
  if (!found) throw ConfigError("config: unknown key '" + key + "'");
}

inline void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = config_detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    set_config_value(cfg, config_detail::trim(std::string_view(line).substr(0, eq)),
                     config_detail::trim(std::string_view(line).substr(eq + 1)));
  }
}

inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  apply_config_text(cfg, text);
  return cfg;
}

inline std::string serialize_config(const RunConfig& cfg) {
  std::string out = "# effective configuration\n";
  config_detail::for_each_field(cfg, [&](const char* k, const auto& member) {
    out += k;
    out += " = ";
    out += config_detail::format_value(member);
    out += '\n';
  });
  return out;
}

/// Model-independent checks plus the inputs a summarize run needs.
inline void validate_config(const RunConfig& c) {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  check(c.k_topics >= 1, "k_topics must be >= 1");
  check(c.beta >= 0 && c.lambda >= 0, "beta and lambda must be >= 0");
  check(c.nmf_max_iters >= 1 && c.nmf_rel_tol > 0, "NMF stopping rule must be positive");
  check(c.alpha_mr > 0 && c.alpha_mr < 1, "alpha_mr must lie in (0,1)");
  check(c.alpha_v >= 0 && c.alpha_a >= 0 && c.alpha_overlap >= 0, "mixing weights must be >= 0");
  check(std::abs(c.alpha_v + c.alpha_a + c.alpha_overlap - 1.0) <= 1e-12,
        "alpha_v + alpha_a + alpha_overlap must equal 1");
  check(c.mr_tol > 0 && c.mr_max_iters >= 1, "manifold ranking stopping rule must be positive");
  check(c.alpha_ltm >= 0 && c.gamma >= 0, "alpha_ltm and gamma must be >= 0");
  check(c.top_words >= 2, "top_words must be >= 2");
  check(c.outer_max_iters >= 1 && c.outer_tol > 0, "outer stopping rule must be positive");
  check(c.omega >= 0, "omega must be >= 0");
  check(c.mu1 >= 0 && c.mu2 >= 0 && c.mu3 >= 0 && c.mu4 >= 0 && c.mu5 >= 0, "mu weights must be >= 0");
  check(c.length_budget >= 1, "length_budget must be >= 1");
  check(c.jobs >= 1, "jobs must be >= 1");
  if (c.model == Model::single_mr) check(c.alpha_a + c.alpha_overlap > 0, "single_mr needs alpha_a + alpha_overlap > 0");
}

inline void validate_paths_for_summarize(const RunConfig& c) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (c.corpus.empty() || !fs::is_directory(c.corpus, ec))
    throw ConfigError("config: corpus directory not found: '" + c.corpus + "'");
  if (c.stopwords.empty() || !fs::is_regular_file(c.stopwords, ec))
    throw ConfigError("config: stopword file not found: '" + c.stopwords + "'");
  if (c.output.empty()) throw ConfigError("config: output directory not set");
  if ((c.model == Model::jltmmr || c.model == Model::jltmmr_sf) && c.kb.empty())
    throw ConfigError("config: jltmmr models need a knowledge-base path (kb)");
}

}  // namespace mdsum

#endif  // MDSUM_CONFIG_HPP
