#pragma once

#include <Eigen/Dense>

namespace mefm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Top-k eigenpairs of a symmetric matrix, eigenvalues in descending order.
///
/// Each eigenvector column is sign-normalised so that its entry of largest
/// absolute value is positive (ties go to the lowest index).
struct EigenTopK {
  Vector values;
  Matrix vectors;
};

/// Y minus its row means and column means plus its grand mean, i.e. M_p Y M_q
/// without forming the centering matrices.
[[nodiscard]] Matrix double_center(const Matrix& y);

/// Dense symmetric eigendecomposition truncated to the k largest eigenvalues.
///
/// Throws UsageError when k is outside [1, n] and DataError when `s` is not
/// square or not symmetric to 1e-10 relative.
[[nodiscard]] EigenTopK sym_eig_topk(const Matrix& s, Eigen::Index k);

/// Top-k eigenpairs of a symmetric matrix restricted to the complement of the
/// ones vector, for matrices whose null space contains it. Eigenvectors have
/// zero column sums to rounding; k must lie in [1, n-1].
[[nodiscard]] EigenTopK sym_eig_topk_centered(const Matrix& s, Eigen::Index k);

/// Flip eigenvector columns in place to the sign convention documented on
/// EigenTopK.
void normalize_signs(Matrix& vectors);

/// Orthogonal projector onto the column space of q. Throws DataError when q
/// is rank deficient.
[[nodiscard]] Matrix column_projector(const Matrix& q);

/// Spectral norm of the difference between the column-space projectors of
/// q1 and q2. Zero iff the spans coincide; lies in [0, 1] for equal ranks.
[[nodiscard]] double space_distance(const Matrix& q1, const Matrix& q2);

/// Spectral norm of a general matrix via the largest eigenvalue of its Gram
/// matrix.
[[nodiscard]] double spectral_norm(const Matrix& a);

/// Symmetric inverse square root. Eigenvalues below floor_rel * trace are
/// treated as zero (pseudo-inverse); `truncated` reports whether that happened.
[[nodiscard]] Matrix inverse_sqrt_psd(const Matrix& s, double floor_rel,
                                      bool* truncated = nullptr);

/// Elementwise Kahan-compensated accumulator for sums of same-shaped matrices.
class CompensatedSum {
 public:
  CompensatedSum(Eigen::Index rows, Eigen::Index cols)
      : sum_(Matrix::Zero(rows, cols)), carry_(Matrix::Zero(rows, cols)) {}

  void add(const Matrix& term);
  [[nodiscard]] const Matrix& value() const { return sum_; }

 private:
  Matrix sum_;
  Matrix carry_;
};

}  // namespace linalg
}  // namespace mefm
