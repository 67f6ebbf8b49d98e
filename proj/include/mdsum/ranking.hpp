#ifndef MDSUM_RANKING_HPP
#define MDSUM_RANKING_HPP

// Manifold ranking over the sentence graph and the joint solvers that couple
// it with the topic models.
//
// Node 0 is the topic sentence (y_0 = 1). Edge weights mix topic-space
// cosine, TFIDF cosine and unigram overlap:
//   W_ij = a_V cos(V_i, V_j) + a_A cos(A_i, A_j) + a_overlap SS_ij
// and scores are propagated with f <- a_mr S f + (1 - a_mr) y,
// S = D^{-1/2} W D^{-1/2}.

#include <mdsum/corpus.hpp>
#include <mdsum/error.hpp>
#include <mdsum/lifelong.hpp>
#include <mdsum/linalg.hpp>
#include <mdsum/topics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mdsum {

struct RankState {
  Vector f;
  Vector y;
};

struct MixWeights {
  double alpha_v = 0.3;
  double alpha_a = 0.4;
  double alpha_overlap = 0.3;
  double alpha_mr = 0.85;

  void validate() const {
    require(alpha_v >= 0.0 && alpha_a >= 0.0 && alpha_overlap >= 0.0,
            "mixing weights must be non-negative");
    require(std::abs(alpha_v + alpha_a + alpha_overlap - 1.0) <= 1e-12,
            "alpha_v + alpha_a + alpha_overlap must equal 1");
    require(alpha_mr > 0.0 && alpha_mr < 1.0, "alpha_mr must lie in (0,1)");
  }

  // Surface-feature-only weights (alpha_v = 0), renormalized.
  MixWeights without_topics() const {
    const double s = alpha_a + alpha_overlap;
    require(s > 0.0, "alpha_a + alpha_overlap must be positive without topic features");
    return MixWeights{0.0, alpha_a / s, alpha_overlap / s, alpha_mr};
  }
};

struct WeightedGraph {
  Matrix ss;      // unigram overlap
  Matrix w;       // combined similarity, zero diagonal
  Vector degree;  // D = diag(W 1), floored
  Matrix s_norm;  // D^{-1/2} W D^{-1/2}
};

/// r_j = exp(g_j) with g = f mapped to [0,1]; r_sqrt realizes R' as a
/// column scaling.
struct ColumnWeights {
  Vector r;
  Vector r_sqrt;

  static ColumnWeights from_scores(const Vector& f) {
    ColumnWeights cw;
    cw.r = minmax_unit(f).array().exp();
    cw.r_sqrt = cw.r.array().sqrt();
    return cw;
  }
  static ColumnWeights uniform(Eigen::Index n) {
    return ColumnWeights{Vector::Ones(n), Vector::Ones(n)};
  }
};

inline constexpr double kDegreeFloor = 1e-12;

/// SS_ij = |S_i n S_j| / |S_i| on unique tokens.
inline Matrix overlap_matrix(std::span<const std::vector<std::string>> token_lists) {
  const auto n = static_cast<Eigen::Index>(token_lists.size());
  std::vector<std::vector<std::string>> sets;
  sets.reserve(token_lists.size());
  for (const auto& t : token_lists) {
    std::vector<std::string> s(t.begin(), t.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    require(!s.empty(), "overlap_matrix: every sentence needs at least one token");
    sets.push_back(std::move(s));
  }
  Matrix ss(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& si = sets[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& sj = sets[static_cast<std::size_t>(j)];
      std::size_t common = 0;
      auto a = si.begin();
      auto b = sj.begin();
      while (a != si.end() && b != sj.end()) {
        if (*a < *b) ++a;
        else if (*b < *a) ++b;
        else { ++common; ++a; ++b; }
      }
      ss(i, j) = static_cast<double>(common) / static_cast<double>(si.size());
    }
  }
  return ss;
}

inline Matrix overlap_matrix(std::span<const Sentence> sentences) {
  std::vector<std::vector<std::string>> toks;
  toks.reserve(sentences.size());
  for (const auto& s : sentences) toks.push_back(s.tokens);
  return overlap_matrix(std::span<const std::vector<std::string>>(toks));
}

/// V is only read when alpha_v > 0.
inline WeightedGraph build_w(const Matrix& v, const Matrix& a, Matrix ss, const MixWeights& mw) {
  mw.validate();
  const auto n = a.cols();
  require(ss.rows() == n && ss.cols() == n, "SS must be (N+1) x (N+1)");
  WeightedGraph g;
  g.w = Matrix::Zero(n, n);
  if (mw.alpha_v > 0.0) {
    require(v.cols() == n, "V must have one column per sentence");
    g.w += mw.alpha_v * column_cosines(v);
  }
  if (mw.alpha_a > 0.0) g.w += mw.alpha_a * column_cosines(a);
  if (mw.alpha_overlap > 0.0) g.w += mw.alpha_overlap * ss;
  g.w.diagonal().setZero();
  g.degree = g.w.rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i) g.degree(i) = std::max(g.degree(i), kDegreeFloor);
  const Vector inv_sqrt = g.degree.array().rsqrt();
  g.s_norm = inv_sqrt.asDiagonal() * g.w * inv_sqrt.asDiagonal();
  g.ss = std::move(ss);
  return g;
}

struct ManifoldRankOptions {
  double tol = 1e-13;
  int max_iters = 100000;
};

/// Iterates f <- a_mr S f + (1 - a_mr) y from f = 0 until successive
/// iterates differ by less than tol in the max norm.
inline Vector manifold_rank(const WeightedGraph& g, const Vector& y, double alpha_mr,
                            const ManifoldRankOptions& opts = {}) {
  require(y.size() == g.s_norm.rows(), "y must have one entry per node");
  require(alpha_mr > 0.0 && alpha_mr < 1.0, "alpha_mr must lie in (0,1)");
  const Vector base = (1.0 - alpha_mr) * y;
  Vector f = Vector::Zero(y.size());
  for (int it = 0; it < opts.max_iters; ++it) {
    Vector next = alpha_mr * (g.s_norm * f) + base;
    if (!next.allFinite()) throw NumericalFailure("manifold ranking produced non-finite scores");
    const double delta = (next - f).lpNorm<Eigen::Infinity>();
    f = std::move(next);
    if (delta < opts.tol) return f;
  }
  throw NumericalFailure("manifold ranking did not converge");
}

inline Vector topic_indicator(Eigen::Index n) {
  Vector y = Vector::Zero(n);
  if (n > 0) y(0) = 1.0;
  return y;
}

inline std::vector<std::vector<std::string>> token_lists(std::span<const Sentence> sentences) {
  std::vector<std::vector<std::string>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(s.tokens);
  return out;
}

struct JointResult {
  FactorPair factors;
  Vector f;
  WeightedGraph graph;
};

/// Manifold ranking on surface features only (TFIDF cosine and overlap).
inline JointResult single_mr(const Matrix& a, std::span<const Sentence> sentences,
                             const MixWeights& mw, const ManifoldRankOptions& mr = {}) {
  require(static_cast<Eigen::Index>(sentences.size()) == a.cols(), "one sentence per column");
  JointResult out;
  out.graph = build_w(Matrix(), a, overlap_matrix(sentences), mw.without_topics());
  out.f = manifold_rank(out.graph, topic_indicator(a.cols()), mw.alpha_mr, mr);
  return out;
}

/// NMF topics, then the mixed graph, then manifold ranking.
inline JointResult jtmmr(const Matrix& a, std::span<const Sentence> sentences, const NmfHyper& h,
                         const MixWeights& mw, std::uint64_t seed,
                         const ManifoldRankOptions& mr = {}) {
  require(static_cast<Eigen::Index>(sentences.size()) == a.cols(), "one sentence per column");
  mw.validate();
  JointResult out;
  out.factors = fit_nmf(a, h, seed);
  out.graph = build_w(out.factors.v, a, overlap_matrix(sentences), mw);
  out.f = manifold_rank(out.graph, topic_indicator(a.cols()), mw.alpha_mr, mr);
  return out;
}

// ---------------------------------------------------------------------------
// Column-weighted lifelong updates
// ---------------------------------------------------------------------------

/// sum_j r_j ||A_j - U V_j||^2 + the remaining lifelong objective terms.
inline double weighted_objective(const Matrix& a, const FactorPair& fp, const KnowledgeMatrices& km,
                                 const DocRelation& dr, const ColumnWeights& cw,
                                 const LtmHyper& h) {
  check_dims(a, fp);
  require(cw.r.size() == a.cols(), "column weights must match A columns");
  double value = ((a - fp.u * fp.v) * cw.r_sqrt.asDiagonal()).squaredNorm();
  const NmfHyper& nh = h.nmf;
  if (nh.beta != 0.0) {
    const auto k = fp.u.cols();
    value += nh.beta * (fp.u.transpose() * fp.u - Matrix::Identity(k, k)).squaredNorm();
  }
  if (nh.lambda != 0.0) value += nh.lambda * fp.v.sum();
  if (h.alpha_ltm != 0.0) value += h.alpha_ltm * knowledge_penalty(fp.u, km);
  if (h.gamma != 0.0) value += h.gamma * relation_penalty(fp.v, dr);
  return value;
}

/// Analytic gradient of weighted_objective in the form the updates use (V part
/// without the gamma term).
inline Gradient weighted_gradient(const Matrix& a, const FactorPair& fp,
                                  const KnowledgeMatrices& km, const ColumnWeights& cw,
                                  const LtmHyper& h) {
  check_dims(a, fp);
  const Matrix& u = fp.u;
  const Matrix a_w = a * cw.r_sqrt.asDiagonal();
  const Matrix v_w = fp.v * cw.r_sqrt.asDiagonal();
  const double beta = h.nmf.beta;
  Gradient g;
  g.du = 2.0 * u * (v_w * v_w.transpose()) - 2.0 * a_w * v_w.transpose() +
         2.0 * h.alpha_ltm * (km.p.asDiagonal() * u - km.o * u) +
         4.0 * beta * u * (u.transpose() * u) - 4.0 * beta * u;
  g.dv = 2.0 * ((u.transpose() * u) * v_w) * cw.r_sqrt.asDiagonal() -
         2.0 * (u.transpose() * a_w) * cw.r_sqrt.asDiagonal() +
         Matrix::Constant(fp.v.rows(), fp.v.cols(), h.nmf.lambda);
  return g;
}

/// One U step then one V step of the column-weighted lifelong rules. With
/// r == 1 these are exactly update_u_ltm / update_v_ltm.
inline FactorPair weighted_updates(const Matrix& a, const FactorPair& fp,
                                   const KnowledgeMatrices& km, const ColumnWeights& cw,
                                   const LtmHyper& h) {
  check_dims(a, fp);
  require(cw.r_sqrt.size() == a.cols(), "column weights must match A columns");
  const Matrix a_w = a * cw.r_sqrt.asDiagonal();
  const Matrix v_w = fp.v * cw.r_sqrt.asDiagonal();
  FactorPair out;
  out.u = ltm_detail::knowledge_u_step(a_w, v_w, fp.u, km, h);
  out.v = nmf_detail::v_step(a_w, out.u, fp.v, v_w, h.nmf.lambda, &cw.r_sqrt);
  return out;
}

/// Lifelong fit with optional column weights; without weights this is
/// fit_ltm.
inline FactorPair fit_weighted(const Matrix& a, const KnowledgeMatrices& km, const DocRelation& dr,
                               const ColumnWeights* cw, const LtmHyper& h, std::uint64_t seed,
                               FitTrace* trace = nullptr) {
  if (cw == nullptr) return fit_ltm(a, km, dr, h, seed, trace);
  h.validate();
  auto fp = init_factors(a.rows(), h.nmf.k_topics, a.cols(), seed);
  return alternate_until_converged(
      std::move(fp), h.nmf.max_iters, h.nmf.rel_tol,
      [&](FactorPair& f) { f = weighted_updates(a, f, km, *cw, h); },
      [&](const FactorPair& f) { return weighted_objective(a, f, km, dr, *cw, h); }, trace);
}

// ---------------------------------------------------------------------------
// JLTMMR outer loop
// ---------------------------------------------------------------------------

struct JltmmrOptions {
  int outer_max_iters = 10;
  double outer_tol = 1e-4;
  bool use_column_weights = true;
  ManifoldRankOptions mr;
};

struct OuterIteration {
  int iteration = 0;
  double objective = 0.0;   // weighted lifelong objective at the inner fit's end
  double f_change = 0.0;    // relative inf-norm change from the previous f (f_0 = y)
  std::size_t kb_pairs = 0; // distinct pairs after recording
  std::uint64_t kb_total = 0;
  Vector f;
};

struct JltmmrResult {
  FactorPair factors;
  Vector f;
  WeightedGraph graph;
  std::vector<OuterIteration> history;
  bool converged = false;
};

/// Alternates the lifelong topic model and manifold ranking. Each outer
/// iteration projects O from kb, derives Q and R from the current scores
/// (the first from f = y), refits the factors from the seeded start,
/// records the new top-word pairs into kb, rebuilds the graph and reranks.
/// Stops once the relative score change (inf-norm) falls below outer_tol (from the second
/// iteration on) or after outer_max_iters.
inline JltmmrResult jltmmr(const Matrix& a, std::span<const Sentence> sentences, const Wordmap& wm,
                           KnowledgeBase& kb, const LtmHyper& h, const MixWeights& mw,
                           std::uint64_t seed, const JltmmrOptions& opts = {},
                           const std::function<void(const OuterIteration&)>& on_iteration = {}) {
  require(static_cast<Eigen::Index>(sentences.size()) == a.cols(), "one sentence per column");
  require(static_cast<Eigen::Index>(wm.size()) == a.rows(), "wordmap must match A rows");
  require(opts.outer_max_iters >= 1, "outer_max_iters must be positive");
  mw.validate();
  h.validate();

  const Matrix ss = overlap_matrix(sentences);
  const Vector y = topic_indicator(a.cols());
  JltmmrResult out;
  Vector f = y;
  for (int t = 1; t <= opts.outer_max_iters; ++t) {
    const KnowledgeMatrices km = project_knowledge(kb, wm);
    const DocRelation dr = doc_relation_from_f(f);
    std::optional<ColumnWeights> cw;
    if (opts.use_column_weights) cw = ColumnWeights::from_scores(f);

    FactorPair fp = fit_weighted(a, km, dr, cw ? &*cw : nullptr, h, seed);
    record_knowledge(fp.u, wm, kb, h.top_words);
    WeightedGraph g = build_w(fp.v, a, ss, mw);
    Vector next = manifold_rank(g, y, mw.alpha_mr, opts.mr);

    OuterIteration rec;
    rec.iteration = t;
    rec.objective = weighted_objective(a, fp, km, dr, cw ? *cw : ColumnWeights::uniform(a.cols()), h);
    const double scale = std::max(f.lpNorm<Eigen::Infinity>(), kEpsFloor);
    rec.f_change = (next - f).lpNorm<Eigen::Infinity>() / scale;
    rec.kb_pairs = kb.pairs().size();
    rec.kb_total = kb.total_count();
    rec.f = next;
    if (on_iteration) on_iteration(rec);
    out.history.push_back(rec);

    f = std::move(next);
    out.factors = std::move(fp);
    out.graph = std::move(g);
    if (t > 1 && rec.f_change < opts.outer_tol) {
      out.converged = true;
      break;
    }
  }
  out.f = std::move(f);
  return out;
}

}  // namespace mdsum

#endif  // MDSUM_RANKING_HPP
