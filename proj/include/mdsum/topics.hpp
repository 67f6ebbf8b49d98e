#ifndef MDSUM_TOPICS_HPP
#define MDSUM_TOPICS_HPP

// Non-negative matrix factorization topic model A ~ U V with an
// orthogonality penalty on U and an L1 sparsity penalty on V:
//
//   ||A - UV||_F^2 + beta ||U^T U - I||_F^2 + lambda * sum(V)
//
// U is words x topics, V is topics x sentences. Updates are multiplicative,
// so factors stay non-negative; every entry is floored at kEpsFloor.

#include <mdsum/error.hpp>
#include <mdsum/linalg.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mdsum {

struct FactorPair {
  Matrix u;  // M x K
  Matrix v;  // K x (N+1)
};

struct NmfHyper {
  int k_topics = 10;
  double beta = 0.1;
  double lambda = 0.1;
  int max_iters = 500;
  double rel_tol = 1e-5;

  void validate() const {
    require(k_topics >= 1, "k_topics must be positive");
    require(beta >= 0.0, "beta must be non-negative");
    require(lambda >= 0.0, "lambda must be non-negative");
    require(max_iters >= 1, "max_iters must be positive");
    require(rel_tol > 0.0, "rel_tol must be positive");
  }
};

// Objective value after each full (U then V) iteration of a fit.
struct FitTrace {
  std::vector<double> objective;
  int iterations = 0;
  bool converged = false;
};

inline void check_dims(const Matrix& a, const FactorPair& fp) {
  require(fp.u.rows() == a.rows(), "U rows must equal A rows");
  require(fp.v.cols() == a.cols(), "V cols must equal A cols");
  require(fp.u.cols() == fp.v.rows(), "U cols must equal V rows");
}

inline double nmf_objective(const Matrix& a, const FactorPair& fp, const NmfHyper& h) {
  check_dims(a, fp);
  double value = (a - fp.u * fp.v).squaredNorm();
  if (h.beta != 0.0) {
    const auto k = fp.u.cols();
    value += h.beta * (fp.u.transpose() * fp.u - Matrix::Identity(k, k)).squaredNorm();
  }
  if (h.lambda != 0.0) value += h.lambda * fp.v.sum();
  return value;
}

struct Gradient {
  Matrix du;
  Matrix dv;
};

/// Analytic partial derivatives of nmf_objective.
inline Gradient nmf_gradient(const Matrix& a, const FactorPair& fp, const NmfHyper& h) {
  check_dims(a, fp);
  const Matrix& u = fp.u;
  const Matrix& v = fp.v;
  Gradient g;
  g.du = 2.0 * u * (v * v.transpose()) - 2.0 * a * v.transpose() +
         4.0 * h.beta * u * (u.transpose() * u) - 4.0 * h.beta * u;
  g.dv = 2.0 * (u.transpose() * u) * v - 2.0 * u.transpose() * a +
         Matrix::Constant(v.rows(), v.cols(), h.lambda);
  return g;
}

namespace nmf_detail {

inline Matrix multiplicative(const Matrix& x, const Matrix& num, const Matrix& den) {
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const double d = den(i, j);
      if (!(d > 0.0)) throw ContractViolation("non-positive denominator in multiplicative update");
      out(i, j) = std::max(x(i, j) * num(i, j) / d, kEpsFloor);
    }
  }
  return out;
}

// U <- U o (A_w V_w^T + extra_num + 2 beta U) / (U V_w V_w^T + extra_den + 2 beta U U^T U)
// A_w, V_w are the (optionally column-weighted) data and coefficients.
inline Matrix u_step(const Matrix& a_w, const Matrix& v_w, const Matrix& u, double beta,
                     const Matrix* extra_num = nullptr, const Matrix* extra_den = nullptr) {
  Matrix num = a_w * v_w.transpose();
  Matrix den = u * (v_w * v_w.transpose());
  if (extra_num != nullptr) num += *extra_num;
  if (extra_den != nullptr) den += *extra_den;
  if (beta != 0.0) {
    num += 2.0 * beta * u;
    den += 2.0 * beta * (u * (u.transpose() * u));
  }
  return multiplicative(u, num, den);
}

// V <- V o ((U^T A_w) o r) / ((U^T U V_w) o r + lambda/2); r == nullptr means no column weights.
inline Matrix v_step(const Matrix& a_w, const Matrix& u, const Matrix& v, const Matrix& v_w,
                     double lambda, const Vector* col_weights = nullptr) {
  Matrix num = u.transpose() * a_w;
  Matrix den = (u.transpose() * u) * v_w;
  if (col_weights != nullptr) {
    num = num * col_weights->asDiagonal();
    den = den * col_weights->asDiagonal();
  }
  if (lambda != 0.0) den.array() += lambda / 2.0;
  return multiplicative(v, num, den);
}

}  // namespace nmf_detail

inline Matrix update_u(const Matrix& a, const FactorPair& fp, const NmfHyper& h) {
  check_dims(a, fp);
  return nmf_detail::u_step(a, fp.v, fp.u, h.beta);
}

inline Matrix update_v(const Matrix& a, const FactorPair& fp, const NmfHyper& h) {
  check_dims(a, fp);
  return nmf_detail::v_step(a, fp.u, fp.v, fp.v, h.lambda);
}

/// U and V drawn from Uniform(0.1, 1.1) with a seeded mt19937_64,
/// U filled column-major first, then V.
inline FactorPair init_factors(Eigen::Index rows, Eigen::Index k, Eigen::Index cols,
                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.1, 1.1);
  FactorPair fp{Matrix(rows, k), Matrix(k, cols)};
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) fp.u(i, j) = dist(rng);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < k; ++i) fp.v(i, j) = dist(rng);
  return fp;
}

/// Alternates `step` (which must update U, then V) until the relative
/// change of `objective` drops below rel_tol or max_iters is reached.
template <class Step, class Objective>
FactorPair alternate_until_converged(FactorPair fp, int max_iters, double rel_tol, Step&& step,
                                     Objective&& objective, FitTrace* trace) {
  double prev = objective(fp);
  if (!std::isfinite(prev)) throw NumericalFailure("non-finite initial objective");
  if (trace != nullptr) *trace = FitTrace{};
  for (int it = 1; it <= max_iters; ++it) {
    step(fp);
    const double cur = objective(fp);
    if (!std::isfinite(cur)) throw NumericalFailure("non-finite objective at iteration " + std::to_string(it));
    if (trace != nullptr) {
      trace->objective.push_back(cur);
      trace->iterations = it;
    }
    const double scale = std::max(std::abs(prev), 1e-300);
    if (std::abs(prev - cur) / scale < rel_tol) {
      if (trace != nullptr) trace->converged = true;
      break;
    }
    prev = cur;
  }
  return fp;
}

inline FactorPair fit_nmf(const Matrix& a, const NmfHyper& h, std::uint64_t seed,
                          FitTrace* trace = nullptr) {
  h.validate();
  require(a.size() > 0, "fit_nmf needs a non-empty matrix");
  auto fp = init_factors(a.rows(), h.k_topics, a.cols(), seed);
  return alternate_until_converged(
      std::move(fp), h.max_iters, h.rel_tol,
      [&](FactorPair& f) {
        f.u = update_u(a, f, h);
        f.v = update_v(a, f, h);
      },
      [&](const FactorPair& f) { return nmf_objective(a, f, h); }, trace);
}

}  // namespace mdsum

#endif  // MDSUM_TOPICS_HPP
