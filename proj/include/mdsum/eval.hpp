#ifndef MDSUM_EVAL_HPP
#define MDSUM_EVAL_HPP

// ROUGE-N recall with clipped n-gram matching, and document co-occurrence
// topic coherence.

#include <mdsum/corpus.hpp>
#include <mdsum/error.hpp>
#include <mdsum/lifelong.hpp>
#include <mdsum/linalg.hpp>

#include <cmath>
#include <iostream>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mdsum {

using Ngram = std::vector<std::string>;
using NgramCounts = std::map<Ngram, std::size_t>;

inline NgramCounts ngram_counts(std::span<const std::string> tokens, std::size_t n) {
  NgramCounts out;
  if (n == 0 || tokens.size() < n) return out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++out[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return out;
}

struct RougeCounts {
  std::size_t matched = 0;
  std::size_t total = 0;
};

inline RougeCounts rouge_n_counts(std::span<const std::vector<std::string>> references,
                                  std::span<const std::string> candidate, std::size_t n) {
  require(n >= 1, "ROUGE n must be at least 1");
  const auto cand = ngram_counts(candidate, n);
  RougeCounts rc;
  for (const auto& ref : references) {
    for (const auto& [gram, count] : ngram_counts(ref, n)) {
      rc.total += count;
      auto it = cand.find(gram);
      if (it != cand.end()) rc.matched += std::min(count, it->second);
    }
  }
  return rc;
}

/// Sum over references of clipped matches / sum of reference n-grams.
/// Throws when no reference has n tokens.
inline double rouge_n(std::span<const std::vector<std::string>> references,
                      std::span<const std::string> candidate, std::size_t n) {
  const auto rc = rouge_n_counts(references, candidate, n);
  if (rc.total == 0) throw Error("ROUGE-" + std::to_string(n) + " undefined: references too short");
  return static_cast<double>(rc.matched) / static_cast<double>(rc.total);
}

struct EvalTokenOptions {
  bool stem = true;
  bool remove_stopwords = false;
};

inline std::vector<std::string> eval_tokens(std::string_view text, const EvalTokenOptions& opts,
                                            const StopwordSet* stopwords = nullptr) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) {
    if (opts.remove_stopwords && stopwords != nullptr && stopwords->contains(t)) continue;
    out.push_back(opts.stem ? porter_stem(std::move(t)) : std::move(t));
  }
  return out;
}

/// Per-topic coherence over the top_m words of each column of U:
///   sum_{m>=2} sum_{l<m} log((D(v_m, v_l) + 1) / D(v_l))
/// where D counts columns of A with a nonzero entry for the word(s).
/// Pairs whose v_l never occurs are skipped; their number is added to
/// *skipped when given.
inline std::vector<double> coherence(const Matrix& u, const Matrix& a, std::size_t top_m,
                                     std::size_t* skipped = nullptr) {
  require(u.rows() == a.rows(), "U and A must share the vocabulary");
  require(top_m <= static_cast<std::size_t>(u.rows()), "top_m exceeds the vocabulary");
  const auto docs = a.cols();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(u.cols()));
  std::size_t skips = 0;
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    const auto top = top_indices(u, k, top_m);
    double value = 0.0;
    for (std::size_t m = 1; m < top.size(); ++m) {
      for (std::size_t l = 0; l < m; ++l) {
        const auto wm = static_cast<Eigen::Index>(top[m]);
        const auto wl = static_cast<Eigen::Index>(top[l]);
        double dl = 0.0;
        double dml = 0.0;
        for (Eigen::Index d = 0; d < docs; ++d) {
          const bool has_l = a(wl, d) != 0.0;
          dl += has_l ? 1.0 : 0.0;
          dml += (has_l && a(wm, d) != 0.0) ? 1.0 : 0.0;
        }
        if (dl == 0.0) {
          ++skips;
          continue;
        }
        value += std::log((dml + 1.0) / dl);
      }
    }
    out.push_back(value);
  }
  if (skips > 0) std::clog << "coherence: skipped " << skips << " pair(s) with zero document frequency\n";
  if (skipped != nullptr) *skipped = skips;
  return out;
}

}  // namespace mdsum

#endif  // MDSUM_EVAL_HPP
