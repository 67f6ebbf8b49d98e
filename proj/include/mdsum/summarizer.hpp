#ifndef MDSUM_SUMMARIZER_HPP
#define MDSUM_SUMMARIZER_HPP

// Sentence scoring with statistical features and greedy MMR selection.

#include <mdsum/corpus.hpp>
#include <mdsum/error.hpp>
#include <mdsum/linalg.hpp>

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mdsum {

struct SfWeights {
  std::array<double, 5> mu{0.2, 0.2, 0.2, 0.2, 0.2};  // tf, sim_ts, overlap_st, overlap_si, pos
  double omega = 1.0;
  std::size_t length_budget = 250;

  void validate() const {
    for (double m : mu) require(m >= 0.0, "feature weights must be non-negative");
    require(omega >= 0.0, "omega must be non-negative");
    require(length_budget > 0, "length budget must be positive");
  }
};

struct SentenceFeatures {
  double tf = 0.0;
  double sim_ts = 0.0;
  double overlap_st = 0.0;
  double overlap_si = 0.0;
  double pos = 0.0;
};

struct Summary {
  std::vector<std::size_t> selected;
  std::size_t word_count = 0;
};

namespace summarizer_detail {

inline std::vector<std::string> unique_sorted(const std::vector<std::string>& t) {
  std::vector<std::string> s(t);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline std::size_t common_count(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else { ++n; ++i; ++j; }
  }
  return n;
}

}  // namespace summarizer_detail

/// Per-node features; node 0 is the topic sentence, `embeddings` holds one
/// column per node (TFIDF columns by default, topic columns V optionally).
///   tf          mean over the sentence's unique tokens of count(w) / max count,
///               counts taken over all non-topic sentences
///   sim_ts      cosine of the topic and sentence embeddings
///   overlap_st  |S_t n S_i| / |S_t|
///   overlap_si  |S_t n S_i| / |S_i|
///   pos         1 - (position - 1) / sentences in the document
inline std::vector<SentenceFeatures> statistical_features(std::span<const Sentence> sentences,
                                                          const Matrix& embeddings) {
  using namespace summarizer_detail;
  require(!sentences.empty(), "statistical_features needs the topic sentence");
  require(embeddings.cols() == static_cast<Eigen::Index>(sentences.size()),
          "one embedding column per sentence");

  std::map<std::string, double> counts;
  for (std::size_t i = 1; i < sentences.size(); ++i)
    for (const auto& t : sentences[i].tokens) counts[t] += 1.0;
  double max_count = 0.0;
  for (const auto& [_, c] : counts) max_count = std::max(max_count, c);

  const auto topic_set = unique_sorted(sentences[0].tokens);
  std::vector<SentenceFeatures> out(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& s = sentences[i];
    const auto set = unique_sorted(s.tokens);
    auto& f = out[i];
    if (!set.empty() && max_count > 0.0) {
      double sum = 0.0;
      for (const auto& w : set) {
        auto it = counts.find(w);
        if (it != counts.end()) sum += it->second / max_count;
      }
      f.tf = sum / static_cast<double>(set.size());
    }
    f.sim_ts = cosine(embeddings.col(0), embeddings.col(static_cast<Eigen::Index>(i)));
    const auto common = static_cast<double>(common_count(topic_set, set));
    if (!topic_set.empty()) f.overlap_st = common / static_cast<double>(topic_set.size());
    if (!set.empty()) f.overlap_si = common / static_cast<double>(set.size());
    if (s.position_in_doc > 0 && s.doc_sentence_count > 0)
      f.pos = 1.0 - static_cast<double>(s.position_in_doc - 1) / static_cast<double>(s.doc_sentence_count);
  }
  return out;
}

inline Vector combined_score(const Vector& f, std::span<const SentenceFeatures> features,
                             const SfWeights& w) {
  require(f.size() == static_cast<Eigen::Index>(features.size()), "scores and features must align");
  Vector out = f;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& x = features[i];
    out(static_cast<Eigen::Index>(i)) += w.mu[0] * x.tf + w.mu[1] * x.sim_ts + w.mu[2] * x.overlap_st +
                                         w.mu[3] * x.overlap_si + w.mu[4] * x.pos;
  }
  return out;
}

/// Greedy selection with a redundancy penalty. S = diag(W 1)^{-1} W; after
/// picking c, every remaining score drops by omega * S(i,c) * score(c).
/// Node 0 (topic sentence) is never a candidate. Selection stops at the
/// first pick that would push the summary past the word budget; ties go
/// to the lower index.
inline Summary mmr_select(const Matrix& w, const Vector& scores, std::span<const std::size_t> lengths,
                          const SfWeights& sw) {
  const auto n = w.rows();
  require(w.cols() == n, "W must be square");
  require(scores.size() == n, "one score per node");
  require(static_cast<Eigen::Index>(lengths.size()) == n, "one length per node");

  Matrix s = w;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = s.row(i).sum();
    if (d > 0.0) s.row(i) /= d;
  }

  Vector f = scores;
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  if (n > 0) taken[0] = true;
  Summary out;
  while (true) {
    Eigen::Index best = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || f(i) > f(best)) best = i;
    }
    if (best < 0) break;
    const std::size_t len = lengths[static_cast<std::size_t>(best)];
    if (out.word_count + len > sw.length_budget) break;
    taken[static_cast<std::size_t>(best)] = true;
    out.selected.push_back(static_cast<std::size_t>(best));
    out.word_count += len;
    const double chosen = f(best);
    for (Eigen::Index i = 0; i < n; ++i)
      if (!taken[static_cast<std::size_t>(i)]) f(i) -= sw.omega * s(i, best) * chosen;
  }
  return out;
}

inline std::vector<std::size_t> sentence_lengths(std::span<const Sentence> sentences) {
  std::vector<std::size_t> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(raw_word_count(s.raw_text));
  return out;
}

}  // namespace mdsum

#endif  // MDSUM_SUMMARIZER_HPP
