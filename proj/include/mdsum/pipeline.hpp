#ifndef MDSUM_PIPELINE_HPP
#define MDSUM_PIPELINE_HPP

// Corpus-level orchestration behind the command-line tool: summarize every
// cluster, evaluate against references, inspect topic dumps, and report on
// the knowledge base.

#include <mdsum/config.hpp>
#include <mdsum/corpus.hpp>
#include <mdsum/error.hpp>
#include <mdsum/eval.hpp>
#include <mdsum/lifelong.hpp>
#include <mdsum/ranking.hpp>
#include <mdsum/summarizer.hpp>
#include <mdsum/topics.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace mdsum {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2 };

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_fixed(double v, int digits = 5) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("error writing " + path.string());
}

/// Cluster directories under root, sorted by name.
inline std::vector<fs::path> list_clusters(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("corpus root not found: " + root.string());
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root, ec))
    if (e.is_directory()) dirs.push_back(e.path());
  if (ec) throw IoError("cannot list corpus root: " + root.string());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

// ---------------------------------------------------------------------------
// Factor dumps
// ---------------------------------------------------------------------------

struct FactorDump {
  std::vector<std::string> words;
  FactorPair factors;
  Matrix occurrence;  // 1 where A is nonzero, else 0

  static FactorDump from(const PreparedCluster& c, const FactorPair& fp) {
    FactorDump d;
    d.words = c.wordmap.words();
    d.factors = fp;
    d.occurrence = (c.matrix.a.array() != 0.0).cast<double>().matrix();
    return d;
  }
};

/// Line format:
///   #mdsum-factors v1
///   dims <M> <K> <C>
///   word <i> <word> <U(i,0)> ... <U(i,K-1)>
///   v <k> <V(k,0)> ... <V(k,C-1)>
///   col <j> <rows with nonzero A entries...>
/// Fields are tab-separated.
inline std::string serialize_factors(const FactorDump& d) {
  const auto& u = d.factors.u;
  const auto& v = d.factors.v;
  std::string out = "#mdsum-factors v1\n";
  out += "dims\t" + std::to_string(u.rows()) + "\t" + std::to_string(u.cols()) + "\t" +
         std::to_string(v.cols()) + "\n";
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    out += "word\t" + std::to_string(i) + "\t" + d.words[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < u.cols(); ++k) out += "\t" + fmt_double(u(i, k));
    out += "\n";
  }
  for (Eigen::Index k = 0; k < v.rows(); ++k) {
    out += "v\t" + std::to_string(k);
    for (Eigen::Index j = 0; j < v.cols(); ++j) out += "\t" + fmt_double(v(k, j));
    out += "\n";
  }
  for (Eigen::Index j = 0; j < d.occurrence.cols(); ++j) {
    out += "col\t" + std::to_string(j);
    for (Eigen::Index i = 0; i < d.occurrence.rows(); ++i)
      if (d.occurrence(i, j) != 0.0) out += "\t" + std::to_string(i);
    out += "\n";
  }
  return out;
}

inline FactorDump parse_factors(const std::string& text) {
  auto fail = [](const std::string& m) -> FormatError { return FormatError("factor dump: " + m); };
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "#mdsum-factors v1") throw fail("missing header");
  auto split = [](const std::string& s) {
    std::vector<std::string> f;
    std::size_t b = 0;
    while (true) {
      auto e = s.find('\t', b);
      f.push_back(s.substr(b, e == std::string::npos ? std::string::npos : e - b));
      if (e == std::string::npos) break;
      b = e + 1;
    }
    return f;
  };
  auto to_index = [&](const std::string& s) {
    try {
      std::size_t p = 0;
      const long long v = std::stoll(s, &p);
      if (p != s.size() || v < 0) throw fail("bad index '" + s + "'");
      return static_cast<Eigen::Index>(v);
    } catch (const std::logic_error&) {
      throw fail("bad index '" + s + "'");
    }
  };
  auto to_double = [&](const std::string& s) {
    try {
      std::size_t p = 0;
      const double v = std::stod(s, &p);
      if (p != s.size()) throw fail("bad number '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      throw fail("bad number '" + s + "'");
    }
  };

  if (!std::getline(in, line)) throw fail("missing dims");
  auto dims = split(line);
  if (dims.size() != 4 || dims[0] != "dims") throw fail("bad dims line");
  const auto m = to_index(dims[1]);
  const auto k = to_index(dims[2]);
  const auto c = to_index(dims[3]);

  FactorDump d;
  d.words.resize(static_cast<std::size_t>(m));
  d.factors.u = Matrix::Zero(m, k);
  d.factors.v = Matrix::Zero(k, c);
  d.occurrence = Matrix::Zero(m, c);
  std::size_t words_seen = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split(line);
    if (f[0] == "word") {
      if (static_cast<Eigen::Index>(f.size()) != 3 + k) throw fail("bad word line");
      const auto i = to_index(f[1]);
      if (i >= m) throw fail("word index out of range");
      d.words[static_cast<std::size_t>(i)] = f[2];
      for (Eigen::Index t = 0; t < k; ++t) d.factors.u(i, t) = to_double(f[static_cast<std::size_t>(3 + t)]);
      ++words_seen;
    } else if (f[0] == "v") {
      if (static_cast<Eigen::Index>(f.size()) != 2 + c) throw fail("bad v line");
      const auto t = to_index(f[1]);
      if (t >= k) throw fail("topic index out of range");
      for (Eigen::Index j = 0; j < c; ++j) d.factors.v(t, j) = to_double(f[static_cast<std::size_t>(2 + j)]);
    } else if (f[0] == "col") {
      if (f.size() < 2) throw fail("bad col line");
      const auto j = to_index(f[1]);
      if (j >= c) throw fail("column index out of range");
      for (std::size_t r = 2; r < f.size(); ++r) {
        const auto i = to_index(f[r]);
        if (i >= m) throw fail("row index out of range");
        d.occurrence(i, j) = 1.0;
      }
    } else {
      throw fail("unknown record '" + f[0] + "'");
    }
  }
  if (words_seen != static_cast<std::size_t>(m)) throw fail("word count does not match dims");
  return d;
}

// ---------------------------------------------------------------------------
// Summarization
// ---------------------------------------------------------------------------

struct ClusterResult {
  PreparedCluster cluster;
  Vector scores;  // ranking scores handed to MMR
  Summary summary;
  std::optional<FactorPair> factors;
  std::vector<OuterIteration> history;
};

/// Runs the configured model on one prepared cluster. jltmmr models read
/// and extend *kb.
inline ClusterResult summarize_cluster(PreparedCluster cluster, const RunConfig& cfg,
                                       KnowledgeBase* kb) {
  ClusterResult out;
  const Matrix& a = cluster.matrix.a;
  const std::span<const Sentence> sents(cluster.sentences);
  WeightedGraph graph;

  switch (cfg.model) {
    case Model::single_mr: {
      auto r = single_mr(a, sents, cfg.mix(), cfg.mr_options());
      out.scores = std::move(r.f);
      graph = std::move(r.graph);
      break;
    }
    case Model::jtmmr: {
      auto r = jtmmr(a, sents, cfg.nmf_hyper(), cfg.mix(), cfg.seed, cfg.mr_options());
      out.scores = std::move(r.f);
      out.factors = std::move(r.factors);
      graph = std::move(r.graph);
      break;
    }
    case Model::jltmmr:
    case Model::jltmmr_sf: {
      require(kb != nullptr, "jltmmr needs a knowledge base");
      auto r = jltmmr(a, sents, cluster.wordmap, *kb, cfg.ltm_hyper(), cfg.mix(), cfg.seed,
                      cfg.jltmmr_options());
      out.scores = std::move(r.f);
      out.factors = std::move(r.factors);
      out.history = std::move(r.history);
      graph = std::move(r.graph);
      break;
    }
  }

  const SfWeights sw = cfg.sf_weights();
  if (cfg.model == Model::jltmmr_sf) {
    const Matrix& emb = (cfg.sim_embedding == Embedding::topic && out.factors) ? out.factors->v : a;
    const auto feats = statistical_features(sents, emb);
    out.scores = combined_score(out.scores, feats, sw);
  }
  const auto lengths = sentence_lengths(sents);
  out.summary = mmr_select(graph.w, out.scores, lengths, sw);
  out.cluster = std::move(cluster);
  return out;
}

inline std::string summary_text(const ClusterResult& r) {
  std::string s;
  for (auto i : r.summary.selected) s += r.cluster.sentences[i].raw_text + "\n";
  return s;
}

inline std::string summary_metadata(const ClusterResult& r) {
  std::string s;
  for (auto i : r.summary.selected)
    s += std::to_string(i) + "\t" + fmt_double(r.scores(static_cast<Eigen::Index>(i))) + "\n";
  return s;
}

inline std::string diagnostics_text(const std::string& id, const std::vector<OuterIteration>& hist) {
  std::string s;
  for (const auto& h : hist) {
    s += id + "\t" + std::to_string(h.iteration) + "\tobjective\t" + fmt_double(h.objective) + "\n";
    s += id + "\t" + std::to_string(h.iteration) + "\tf_change\t" + fmt_double(h.f_change) + "\n";
    s += id + "\t" + std::to_string(h.iteration) + "\tkb_pairs\t" + std::to_string(h.kb_pairs) + "\n";
    s += id + "\t" + std::to_string(h.iteration) + "\tkb_total\t" + std::to_string(h.kb_total) + "\n";
    s += id + "\t" + std::to_string(h.iteration) + "\tf";
    for (Eigen::Index i = 0; i < h.f.size(); ++i) s += "\t" + fmt_double(h.f(i));
    s += "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct EvalReport {
  // (cluster, metric, value) rows followed by MEAN rows.
  std::vector<std::tuple<std::string, std::string, double>> rows;
  int failures = 0;

  std::string text() const {
    std::string s;
    for (const auto& [c, m, v] : rows) s += c + "\t" + m + "\t" + fmt_fixed(v) + "\n";
    return s;
  }
};

/// ROUGE-1..4 of `<summaries>/<id>.summary.txt` against
/// `<corpus>/<id>/refs/*.txt`, for every cluster that has references.
inline EvalReport evaluate_corpus(const fs::path& corpus, const fs::path& summaries,
                                  const EvalTokenOptions& opts, const StopwordSet* stop,
                                  std::ostream& log) {
  EvalReport rep;
  std::map<std::string, std::pair<double, int>> sums;
  const std::vector<std::string> metrics{"ROUGE-1", "ROUGE-2", "ROUGE-3", "ROUGE-4"};
  for (const auto& dir : list_clusters(corpus)) {
    const std::string id = dir.filename().string();
    const fs::path refdir = dir / "refs";
    std::error_code ec;
    if (!fs::is_directory(refdir, ec)) continue;
    try {
      std::vector<fs::path> ref_files;
      for (const auto& e : fs::directory_iterator(refdir))
        if (e.is_regular_file() && e.path().extension() == ".txt") ref_files.push_back(e.path());
      std::sort(ref_files.begin(), ref_files.end());
      if (ref_files.empty()) continue;
      std::vector<std::vector<std::string>> refs;
      for (const auto& p : ref_files) refs.push_back(eval_tokens(read_file(p), opts, stop));
      const auto cand = eval_tokens(read_file(summaries / (id + ".summary.txt")), opts, stop);
      for (std::size_t n = 1; n <= metrics.size(); ++n) {
        const double v = rouge_n(refs, cand, n);
        rep.rows.emplace_back(id, metrics[n - 1], v);
        sums[metrics[n - 1]].first += v;
        sums[metrics[n - 1]].second += 1;
      }
    } catch (const Error& e) {
      ++rep.failures;
      log << "cluster " << id << " not evaluated: " << e.what() << "\n";
    }
  }
  for (const auto& m : metrics) {
    auto it = sums.find(m);
    if (it != sums.end() && it->second.second > 0)
      rep.rows.emplace_back("MEAN", m, it->second.first / it->second.second);
  }
  return rep;
}

inline bool uses_kb(Model m) { return m == Model::jltmmr || m == Model::jltmmr_sf; }

/// Processes every cluster under cfg.corpus in name order and writes, per
/// cluster id, `<id>.summary.txt`, `<id>.scores.tsv` and (for topic
/// models) `<id>.factors`, plus `effective.cfg`, `corpus_stats.tsv`,
/// optionally `diagnostics.tsv`, `evaluation.tsv` when references exist,
/// and the updated knowledge base. Returns
/// kExitRuntime when any cluster failed.
inline int run_summarize(const RunConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  validate_paths_for_summarize(cfg);
  const StopwordSet stop = load_stopwords(cfg.stopwords);
  const auto dirs = list_clusters(cfg.corpus);
  if (dirs.empty()) throw ConfigError("config: corpus has no cluster directories: " + cfg.corpus);

  const fs::path outdir(cfg.output);
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw IoError("cannot create output directory " + outdir.string());
  write_text(outdir / "effective.cfg", serialize_config(cfg));

  const PrepareOptions popts{cfg.remove_dialog, true};
  const std::size_t n = dirs.size();
  std::vector<std::optional<ClusterResult>> results(n);
  std::vector<std::string> errors(n);

  auto process = [&](std::size_t i, KnowledgeBase* kb) {
    try {
      auto prepared = prepare_cluster(load_cluster(dirs[i]), stop, popts);
      results[i] = summarize_cluster(std::move(prepared), cfg, kb);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  };

  std::optional<KnowledgeBase> kb;
  if (uses_kb(cfg.model)) {
    kb = KnowledgeBase::load_or_empty(cfg.kb);
    for (std::size_t i = 0; i < n; ++i) {
      KnowledgeBase scratch = *kb;
      process(i, &scratch);
      if (results[i]) *kb = std::move(scratch);
    }
  } else if (cfg.jobs <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) process(i, nullptr);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), n);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) process(i, nullptr);
      });
  }

  CorpusStats stats;
  std::string diagnostics;
  int failures = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = dirs[i].filename().string();
    if (!results[i]) {
      ++failures;
      log << "cluster " << id << " skipped: " << errors[i] << "\n";
      continue;
    }
    const auto& r = *results[i];
    stats.add(r.cluster);
    write_text(outdir / (id + ".summary.txt"), summary_text(r));
    write_text(outdir / (id + ".scores.tsv"), summary_metadata(r));
    if (r.factors) write_text(outdir / (id + ".factors"), serialize_factors(FactorDump::from(r.cluster, *r.factors)));
    if (cfg.diagnostics) diagnostics += diagnostics_text(id, r.history);
    log << "cluster " << id << ": " << r.summary.selected.size() << " sentences, "
        << r.summary.word_count << " words\n";
  }
  if (cfg.diagnostics) write_text(outdir / "diagnostics.tsv", diagnostics);
  if (kb) kb->save(cfg.kb);

  std::string st;
  st += "clusters\t" + std::to_string(stats.clusters()) + "\n";
  st += "avg_sentences_per_topic\t" + fmt_fixed(stats.avg_sentences_per_topic(), 2) + "\n";
  st += "avg_tokens_per_sentence\t" + fmt_fixed(stats.avg_tokens_per_sentence(), 2) + "\n";
  st += "wordmap_size\t" + std::to_string(stats.wordmap_size()) + "\n";
  write_text(outdir / "corpus_stats.tsv", st);
  log << st;

  const EvalTokenOptions eopts{cfg.rouge_stem, cfg.rouge_remove_stopwords};
  const auto rep = evaluate_corpus(cfg.corpus, outdir, eopts, &stop, log);
  if (!rep.rows.empty()) write_text(outdir / "evaluation.tsv", rep.text());
  return failures == 0 ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------------------
// Inspection
// ---------------------------------------------------------------------------

/// One line per topic: index, coherence, top words by descending weight.
inline std::string inspect_topics(const FactorDump& d, std::size_t top) {
  const std::size_t m = std::min(top, d.words.size());
  const auto coh = coherence(d.factors.u, d.occurrence, m);
  std::string s;
  for (Eigen::Index k = 0; k < d.factors.u.cols(); ++k) {
    s += "topic\t" + std::to_string(k) + "\tcoherence\t" + fmt_fixed(coh[static_cast<std::size_t>(k)]) + "\t";
    const auto idx = top_indices(d.factors.u, k, m);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (i > 0) s += " ";
      s += d.words[idx[i]];
    }
    s += "\n";
  }
  return s;
}

inline std::string kb_stats(const KnowledgeBase& kb, std::size_t top = 10) {
  std::string s;
  s += "tasks\t" + std::to_string(kb.task_count()) + "\n";
  s += "pairs\t" + std::to_string(kb.pairs().size()) + "\n";
  s += "words\t" + std::to_string(kb.word_totals().size()) + "\n";
  s += "total_count\t" + std::to_string(kb.total_count()) + "\n";
  std::vector<std::pair<KnowledgeBase::Pair, std::uint64_t>> v(kb.pairs().begin(), kb.pairs().end());
  std::stable_sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
  for (std::size_t i = 0; i < std::min(top, v.size()); ++i)
    s += "top\t" + v[i].first.first + "\t" + v[i].first.second + "\t" + std::to_string(v[i].second) + "\n";
  return s;
}

}  // namespace mdsum

#endif  // MDSUM_PIPELINE_HPP
