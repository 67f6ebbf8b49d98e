#ifndef MDSUM_LINALG_HPP
#define MDSUM_LINALG_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cmath>

namespace mdsum {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Entries are floored here after every multiplicative update.
inline constexpr double kEpsFloor = 1e-12;

// Cosine of two vectors; zero when either has zero norm.
template <class A, class B>
double cosine(const Eigen::MatrixBase<A>& x, const Eigen::MatrixBase<B>& y) {
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return x.dot(y) / (nx * ny);
}

// Pairwise cosine similarity between the columns of X.
inline Matrix column_cosines(const Matrix& x) {
  Vector norms = x.colwise().norm().transpose();
  Matrix gram = x.transpose() * x;
  const auto n = x.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = norms(i) * norms(j);
      gram(i, j) = d == 0.0 ? 0.0 : gram(i, j) / d;
    }
  }
  return gram;
}

// Min-max maps v onto [0,1]; a constant vector maps to 0.5 everywhere.
inline Vector minmax_unit(const Vector& v) {
  if (v.size() == 0) return v;
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (!(hi > lo)) return Vector::Constant(v.size(), 0.5);
  return (v.array() - lo) / (hi - lo);
}

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace mdsum

#endif  // MDSUM_LINALG_HPP
