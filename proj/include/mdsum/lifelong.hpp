#ifndef MDSUM_LIFELONG_HPP
#define MDSUM_LIFELONG_HPP

// Cross-task knowledge for the lifelong topic model.
//
// The knowledge base counts how often two stemmed words were both among the
// top words of one topic, summed over topics and past tasks. For a new task
// the counts are projected onto its wordmap as O (O_ij = count(i,j) /
// total(i)), giving the Laplacian L = P - O with P = diag(O 1). Sentence
// relations enter through Q and Z = T - Q with T = diag(Q 1).
//
// Objective:
//   ||A - UV||^2 + beta ||U^T U - I||^2 + lambda sum(V)
//     + alpha_ltm tr(U^T L U) + gamma tr(V Z V^T)
//
// The V update carries no gamma term, by design;
// gamma only shows up in the objective (and so in the stopping rule).

#include <mdsum/corpus.hpp>
#include <mdsum/error.hpp>
#include <mdsum/linalg.hpp>
#include <mdsum/topics.hpp>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mdsum {

class KnowledgeBase {
 public:
  using Pair = std::pair<std::string, std::string>;

  void add_pair(const std::string& a, const std::string& b, std::uint64_t count = 1) {
    if (a == b || count == 0) return;
    const auto key = a < b ? Pair{a, b} : Pair{b, a};
    pairs_[key] += count;
    totals_[a] += count;
    totals_[b] += count;
  }

  std::uint64_t pair_count(const std::string& a, const std::string& b) const {
    const auto key = a < b ? Pair{a, b} : Pair{b, a};
    auto it = pairs_.find(key);
    return it == pairs_.end() ? 0 : it->second;
  }

  std::uint64_t word_total(const std::string& w) const {
    auto it = totals_.find(w);
    return it == totals_.end() ? 0 : it->second;
  }

  void mark_task() { ++task_count_; }
  std::uint64_t task_count() const { return task_count_; }

  const std::map<Pair, std::uint64_t>& pairs() const { return pairs_; }
  const std::map<std::string, std::uint64_t>& word_totals() const { return totals_; }
  bool empty() const { return pairs_.empty(); }

  // Sum of all pair counts.
  std::uint64_t total_count() const {
    std::uint64_t s = 0;
    for (const auto& [_, c] : pairs_) s += c;
    return s;
  }

  /// `#tasks=<n>` then `wordA<TAB>wordB<TAB>count` lines, wordA < wordB,
  /// sorted lexicographically.
  std::string serialize() const {
    std::string out = "#tasks=" + std::to_string(task_count_) + "\n";
    for (const auto& [key, c] : pairs_) {
      out += key.first;
      out += '\t';
      out += key.second;
      out += '\t';
      out += std::to_string(c);
      out += '\n';
    }
    return out;
  }

  static KnowledgeBase parse(std::string_view text) {
    KnowledgeBase kb;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header = false;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!header) {
        constexpr std::string_view tag = "#tasks=";
        if (line.substr(0, tag.size()) != tag)
          throw FormatError("knowledge base: missing #tasks header");
        kb.task_count_ = parse_count(line.substr(tag.size()), line_no);
        header = true;
        continue;
      }
      if (line.empty()) continue;
      const auto t1 = line.find('\t');
      const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
      if (t2 == std::string_view::npos || line.find('\t', t2 + 1) != std::string_view::npos)
        throw FormatError("knowledge base: line " + std::to_string(line_no) + " needs 3 fields");
      const std::string a(line.substr(0, t1));
      const std::string b(line.substr(t1 + 1, t2 - t1 - 1));
      const auto c = parse_count(line.substr(t2 + 1), line_no);
      if (a.empty() || b.empty() || !(a < b) || c == 0)
        throw FormatError("knowledge base: bad pair on line " + std::to_string(line_no));
      if (kb.pair_count(a, b) != 0)
        throw FormatError("knowledge base: duplicate pair on line " + std::to_string(line_no));
      kb.add_pair(a, b, c);
    }
    if (!header) throw FormatError("knowledge base: missing #tasks header");
    return kb;
  }

  void save(const std::filesystem::path& path) const {
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write knowledge base: " + tmp);
      out << serialize();
      if (!out) throw IoError("error writing knowledge base: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot replace knowledge base " + path.string() + ": " + ec.message());
  }

  static KnowledgeBase load(const std::filesystem::path& path) { return parse(read_file(path)); }

  // Empty knowledge when the file does not exist yet.
  static KnowledgeBase load_or_empty(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return {};
    return load(path);
  }

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;

 private:
  static std::uint64_t parse_count(std::string_view s, std::size_t line_no) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
      throw FormatError("knowledge base: bad count on line " + std::to_string(line_no));
    return v;
  }

  std::map<Pair, std::uint64_t> pairs_;
  std::map<std::string, std::uint64_t> totals_;
  std::uint64_t task_count_ = 0;
};

/// Indices of the `top` largest entries of column k, largest first, ties
/// broken by lower index.
inline std::vector<std::size_t> top_indices(const Matrix& u, Eigen::Index k, std::size_t top) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(u.rows()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const std::size_t n = std::min(top, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ua = u(static_cast<Eigen::Index>(a), k);
                      const double ub = u(static_cast<Eigen::Index>(b), k);
                      return ua != ub ? ua > ub : a < b;
                    });
  idx.resize(n);
  return idx;
}

/// Adds one count for every pair among each topic's top words and marks a
/// task.
inline void record_knowledge(const Matrix& u, const Wordmap& wm, KnowledgeBase& kb,
                             std::size_t top_words = 10) {
  require(static_cast<std::size_t>(u.rows()) == wm.size(), "U rows must match the wordmap");
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    const auto top = top_indices(u, k, top_words);
    for (std::size_t i = 0; i < top.size(); ++i)
      for (std::size_t j = i + 1; j < top.size(); ++j) kb.add_pair(wm.word(top[i]), wm.word(top[j]));
  }
  kb.mark_task();
}

struct KnowledgeMatrices {
  SparseMatrix o;  // M x M
  Vector p;        // diagonal of P = diag(O 1)

  SparseMatrix laplacian() const {
    SparseMatrix pm(o.rows(), o.cols());
    std::vector<Eigen::Triplet<double>> diag;
    for (Eigen::Index i = 0; i < p.size(); ++i)
      if (p(i) != 0.0) diag.emplace_back(i, i, p(i));
    pm.setFromTriplets(diag.begin(), diag.end());
    return pm - o;
  }

  bool vanishes() const { return o.nonZeros() == 0; }

  static KnowledgeMatrices zero(Eigen::Index m) {
    KnowledgeMatrices km;
    km.o.resize(m, m);
    km.p = Vector::Zero(m);
    return km;
  }
};

/// Projects the knowledge base onto the current wordmap. Pairs touching a
/// word outside the wordmap are ignored; the row normalizer is the word's
/// total over all recorded pairs.
inline KnowledgeMatrices project_knowledge(const KnowledgeBase& kb, const Wordmap& wm) {
  const auto m = static_cast<Eigen::Index>(wm.size());
  std::vector<Eigen::Triplet<double>> trips;
  for (const auto& [key, count] : kb.pairs()) {
    const auto i = wm.find(key.first);
    const auto j = wm.find(key.second);
    if (!i || !j) continue;
    const double c = static_cast<double>(count);
    trips.emplace_back(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(*j),
                       c / static_cast<double>(kb.word_total(key.first)));
    trips.emplace_back(static_cast<Eigen::Index>(*j), static_cast<Eigen::Index>(*i),
                       c / static_cast<double>(kb.word_total(key.second)));
  }
  KnowledgeMatrices km;
  km.o.resize(m, m);
  km.o.setFromTriplets(trips.begin(), trips.end());
  km.o.makeCompressed();
  km.p = km.o * Vector::Ones(m);
  return km;
}

struct DocRelation {
  Matrix q;  // (N+1) x (N+1)
  Vector t;  // diagonal of T = diag(Q 1)
  Matrix z;  // T - Q
};

inline DocRelation make_doc_relation(Matrix q) {
  DocRelation dr;
  dr.t = q.rowwise().sum();
  dr.z = Matrix(dr.t.asDiagonal()) - q;
  dr.q = std::move(q);
  return dr;
}

/// Q_ij = cos(A_i, A_j) / sum_k cos(A_i, A_k), the sum including k = i.
/// Rows with no positive similarity stay zero.
inline DocRelation doc_relation_from_sim(const Matrix& a) {
  require(a.size() > 0, "doc_relation_from_sim needs a non-empty matrix");
  Matrix q = column_cosines(a);
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    const double s = q.row(i).sum();
    if (s > 0.0) q.row(i) /= s;
    else q.row(i).setZero();
  }
  return make_doc_relation(std::move(q));
}

/// Q_ij = 1 - |g_i - g_j| where g is f min-max mapped to [0,1].
inline DocRelation doc_relation_from_f(const Vector& f) {
  require(f.allFinite(), "ranking scores must be finite");
  const Vector g = minmax_unit(f);
  const auto n = g.size();
  Matrix q(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) q(i, j) = 1.0 - std::abs(g(i) - g(j));
  return make_doc_relation(std::move(q));
}

struct LtmHyper {
  NmfHyper nmf;
  double alpha_ltm = 0.1;
  double gamma = 0.1;
  std::size_t top_words = 10;

  void validate() const {
    nmf.validate();
    require(alpha_ltm >= 0.0, "alpha_ltm must be non-negative");
    require(gamma >= 0.0, "gamma must be non-negative");
  }
};

inline double knowledge_penalty(const Matrix& u, const KnowledgeMatrices& km) {
  return (km.laplacian() * u).cwiseProduct(u).sum();
}

inline double relation_penalty(const Matrix& v, const DocRelation& dr) {
  return (v * dr.z).cwiseProduct(v).sum();
}

inline double ltm_objective(const Matrix& a, const FactorPair& fp, const KnowledgeMatrices& km,
                            const DocRelation& dr, const LtmHyper& h) {
  double value = nmf_objective(a, fp, h.nmf);
  if (h.alpha_ltm != 0.0) {
    require(km.o.rows() == fp.u.rows(), "knowledge matrix must be M x M");
    value += h.alpha_ltm * knowledge_penalty(fp.u, km);
  }
  if (h.gamma != 0.0) {
    require(dr.z.rows() == fp.v.cols(), "relation matrix must be (N+1) x (N+1)");
    value += h.gamma * relation_penalty(fp.v, dr);
  }
  return value;
}

/// Partial derivatives as used by the updates: the U gradient gains
/// 2 alpha (P U - O U) (exact for symmetric O); the V gradient is the plain
/// NMF one, without the gamma relation term.
inline Gradient ltm_gradient(const Matrix& a, const FactorPair& fp, const KnowledgeMatrices& km,
                             const LtmHyper& h) {
  Gradient g = nmf_gradient(a, fp, h.nmf);
  g.du += 2.0 * h.alpha_ltm * (km.p.asDiagonal() * fp.u - km.o * fp.u);
  return g;
}

namespace ltm_detail {

inline Matrix knowledge_u_step(const Matrix& a_w, const Matrix& v_w, const Matrix& u,
                               const KnowledgeMatrices& km, const LtmHyper& h) {
  if (h.alpha_ltm == 0.0 || km.vanishes()) return nmf_detail::u_step(a_w, v_w, u, h.nmf.beta);
  require(km.o.rows() == u.rows(), "knowledge matrix must be M x M");
  const Matrix num = h.alpha_ltm * (km.o * u);
  const Matrix den = h.alpha_ltm * (km.p.asDiagonal() * u);
  return nmf_detail::u_step(a_w, v_w, u, h.nmf.beta, &num, &den);
}

}  // namespace ltm_detail

inline Matrix update_u_ltm(const Matrix& a, const FactorPair& fp, const KnowledgeMatrices& km,
                           const LtmHyper& h) {
  check_dims(a, fp);
  return ltm_detail::knowledge_u_step(a, fp.v, fp.u, km, h);
}

inline Matrix update_v_ltm(const Matrix& a, const FactorPair& fp, const LtmHyper& h) {
  return update_v(a, fp, h.nmf);
}

inline FactorPair fit_ltm(const Matrix& a, const KnowledgeMatrices& km, const DocRelation& dr,
                          const LtmHyper& h, std::uint64_t seed, FitTrace* trace = nullptr) {
  h.validate();
  require(a.size() > 0, "fit_ltm needs a non-empty matrix");
  auto fp = init_factors(a.rows(), h.nmf.k_topics, a.cols(), seed);
  return alternate_until_converged(
      std::move(fp), h.nmf.max_iters, h.nmf.rel_tol,
      [&](FactorPair& f) {
        f.u = update_u_ltm(a, f, km, h);
        f.v = update_v_ltm(a, f, h);
      },
      [&](const FactorPair& f) { return ltm_objective(a, f, km, dr, h); }, trace);
}

}  // namespace mdsum

#endif  // MDSUM_LIFELONG_HPP
