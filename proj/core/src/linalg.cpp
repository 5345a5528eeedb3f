#include "mefm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mefm/errors.hpp"

namespace mefm::linalg {

Matrix double_center(const Matrix& y) {
  const Vector row_means = y.rowwise().mean();
  const Eigen::RowVectorXd col_means = y.colwise().mean();
  const double grand = y.mean();
  Matrix out = y;
  out.colwise() -= row_means;
  out.rowwise() -= col_means;
  out.array() += grand;
  return out;
}

void normalize_signs(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double a = std::abs(vectors(r, c));
      // strict comparison keeps the lowest index on ties
      if (a > best) {
        best = a;
        arg = r;
      }
    }
    if (vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

EigenTopK sym_eig_topk(const Matrix& s, Eigen::Index k) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw DataError("sym_eig_topk: matrix must be square and non-empty");
  }
  const Eigen::Index n = s.rows();
  if (k < 1 || k > n) {
    throw UsageError("sym_eig_topk: k=" + std::to_string(k) +
                     " outside [1, " + std::to_string(n) + "]");
  }
  const double scale = std::max(s.cwiseAbs().maxCoeff(), 1e-300);
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw DataError("sym_eig_topk: matrix is not symmetric");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  if (solver.info() != Eigen::Success) {
    throw NumericError("sym_eig_topk: eigendecomposition did not converge");
  }
  // Eigen returns ascending order; take the tail reversed.
  EigenTopK out;
  out.values = solver.eigenvalues().tail(k).reverse();
  out.vectors = solver.eigenvectors().rightCols(k).rowwise().reverse();
  normalize_signs(out.vectors);
  return out;
}

EigenTopK sym_eig_topk_centered(const Matrix& s, Eigen::Index k) {
  if (s.rows() != s.cols() || s.rows() < 2) {
    throw DataError("sym_eig_topk_centered: matrix must be square with n >= 2");
  }
  const Eigen::Index n = s.rows();
  if (k < 1 || k > n - 1) {
    throw UsageError("sym_eig_topk_centered: k=" + std::to_string(k) + " outside [1, " +
                     std::to_string(n - 1) + "]");
  }
  // Householder reflector whose first column is 1/sqrt(n); the others span 1-perp.
  Vector v = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  v(0) -= 1.0;
  Matrix h = Matrix::Identity(n, n);
  const double vv = v.squaredNorm();
  if (vv > 0.0) h -= (2.0 / vv) * v * v.transpose();
  const Matrix basis = h.rightCols(n - 1);
  Matrix block = basis.transpose() * s * basis;
  block = 0.5 * (block + block.transpose());
  EigenTopK out = sym_eig_topk(block, k);
  out.vectors = basis * out.vectors;
  normalize_signs(out.vectors);
  return out;
}

Matrix column_projector(const Matrix& q) {
  if (q.cols() == 0 || q.rows() < q.cols()) {
    throw DataError("column_projector: matrix must have full column rank");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(q);
  if (qr.rank() < q.cols()) {
    throw DataError("column_projector: matrix is rank deficient");
  }
  // Orthonormal basis of the span; P = U U'.
  const Matrix u = qr.householderQ() * Matrix::Identity(q.rows(), q.cols());
  return u * u.transpose();
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  const Matrix gram = a.transpose() * a;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(solver.eigenvalues().maxCoeff(), 0.0));
}

double space_distance(const Matrix& q1, const Matrix& q2) {
  if (q1.rows() != q2.rows()) {
    throw DataError("space_distance: row counts differ");
  }
  return spectral_norm(column_projector(q1) - column_projector(q2));
}

Matrix inverse_sqrt_psd(const Matrix& s, double floor_rel, bool* truncated) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  if (solver.info() != Eigen::Success) {
    throw NumericError("inverse_sqrt_psd: eigendecomposition failed");
  }
  const double floor = floor_rel * std::abs(s.trace());
  Vector inv = solver.eigenvalues();
  bool cut = false;
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    if (inv(i) > floor && inv(i) > 0.0) {
      inv(i) = 1.0 / std::sqrt(inv(i));
    } else {
      inv(i) = 0.0;
      cut = true;
    }
  }
  if (truncated != nullptr) *truncated = cut;
  const Matrix& v = solver.eigenvectors();
  return v * inv.asDiagonal() * v.transpose();
}

void CompensatedSum::add(const Matrix& term) {
  const Matrix y = term - carry_;
  const Matrix t = sum_ + y;
  carry_ = (t - sum_) - y;
  sum_ = t;
}

}  // namespace mefm::linalg
