// mdsum: command-line front end.
//
//   mdsum summarize      [--config FILE] [--<key> VALUE ...] [--set key=value ...]
//   mdsum evaluate       [--config FILE] [--summaries DIR] [--<key> VALUE ...]
//   mdsum inspect-topics --factors FILE [--top N]
//   mdsum kb stats       [--config FILE] [--kb FILE] [--top N]
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <mdsum/pipeline.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using mdsum::RunConfig;

// Config-key flags for one subcommand. Values are applied after the
// config file so the command line wins.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::optional<std::string>> values;
  std::vector<std::string> sets;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "key = value configuration file");
    app->add_option("--set", sets, "override as key=value (repeatable)");
    for (const auto& key : mdsum::config_keys()) {
      auto& slot = values[key];
      app->add_option_function<std::string>(
          "--" + key, [&slot](const std::string& v) { slot = v; }, "configuration key '" + key + "'");
    }
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_file.empty()) {
      std::string text;
      try {
        text = mdsum::read_file(config_file);
      } catch (const mdsum::IoError& e) {
        throw mdsum::ConfigError(std::string("config: ") + e.what());
      }
      mdsum::apply_config_text(cfg, text);
    }
    for (const auto& [key, v] : values)
      if (v) mdsum::set_config_value(cfg, key, *v);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw mdsum::ConfigError("config: --set expects key=value, got '" + s + "'");
      mdsum::set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    return cfg;
  }
};

int cmd_summarize(const ConfigFlags& flags) {
  const RunConfig cfg = flags.resolve();
  return mdsum::run_summarize(cfg, std::cerr);
}

int cmd_evaluate(const ConfigFlags& flags, const std::string& summaries_flag) {
  const RunConfig cfg = flags.resolve();
  if (cfg.corpus.empty()) throw mdsum::ConfigError("config: corpus directory not set");
  const std::string summaries = summaries_flag.empty() ? cfg.output : summaries_flag;
  if (summaries.empty()) throw mdsum::ConfigError("config: no summaries directory (--summaries or output)");
  std::optional<mdsum::StopwordSet> stop;
  if (cfg.rouge_remove_stopwords) {
    std::error_code ec;
    if (cfg.stopwords.empty() || !std::filesystem::is_regular_file(cfg.stopwords, ec))
      throw mdsum::ConfigError("config: stopword file not found: '" + cfg.stopwords + "'");
    stop = mdsum::load_stopwords(cfg.stopwords);
  }
  const mdsum::EvalTokenOptions opts{cfg.rouge_stem, cfg.rouge_remove_stopwords};
  const auto rep = mdsum::evaluate_corpus(cfg.corpus, summaries, opts, stop ? &*stop : nullptr, std::cerr);
  std::cout << rep.text();
  return rep.failures == 0 ? mdsum::kExitOk : mdsum::kExitRuntime;
}

int cmd_inspect(const std::string& path, std::size_t top) {
  if (path.empty()) throw mdsum::IoError("inspect-topics: empty factor dump path");
  const auto dump = mdsum::parse_factors(mdsum::read_file(path));
  std::cout << mdsum::inspect_topics(dump, top);
  return mdsum::kExitOk;
}

int cmd_kb_stats(const ConfigFlags& flags, std::size_t top) {
  const RunConfig cfg = flags.resolve();
  if (cfg.kb.empty()) throw mdsum::ConfigError("config: knowledge-base path (kb) not set");
  std::cout << mdsum::kb_stats(mdsum::KnowledgeBase::load(cfg.kb), top);
  return mdsum::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-document summarization with lifelong topic models"};
  app.require_subcommand(1);

  ConfigFlags sum_flags;
  auto* summarize = app.add_subcommand("summarize", "summarize every cluster under the corpus root");
  sum_flags.attach(summarize);

  ConfigFlags eval_flags;
  std::string summaries;
  auto* evaluate = app.add_subcommand("evaluate", "ROUGE-1..4 of summaries against cluster references");
  eval_flags.attach(evaluate);
  evaluate->add_option("--summaries", summaries, "directory with <cluster>.summary.txt (default: output)");

  std::string factors;
  std::size_t inspect_top = 10;
  auto* inspect = app.add_subcommand("inspect-topics", "top words and coherence per topic from a factor dump");
  inspect->add_option("--factors", factors, "factor dump written by summarize")->required();
  inspect->add_option("--top", inspect_top, "words per topic")->check(CLI::PositiveNumber);

  ConfigFlags kb_flags;
  std::size_t kb_top = 10;
  auto* kb = app.add_subcommand("kb", "knowledge-base utilities");
  kb->require_subcommand(1);
  auto* kb_stats = kb->add_subcommand("stats", "summary counts of a knowledge-base file");
  kb_flags.attach(kb_stats);
  kb_stats->add_option("--top", kb_top, "most frequent pairs to list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? mdsum::kExitOk : mdsum::kExitConfig;
  }

  try {
    if (*summarize) return cmd_summarize(sum_flags);
    if (*evaluate) return cmd_evaluate(eval_flags, summaries);
    if (*inspect) return cmd_inspect(factors, inspect_top);
    if (*kb_stats) return cmd_kb_stats(kb_flags, kb_top);
  } catch (const mdsum::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mdsum::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return mdsum::kExitRuntime;
  }
  return mdsum::kExitConfig;
}
