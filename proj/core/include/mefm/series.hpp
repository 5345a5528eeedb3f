#pragma once

#include <cstddef>
#include <vector>

#include "mefm/linalg.hpp"

namespace mefm {

/// A length-T sequence of p x q observation matrices sharing one shape.
class MatrixSeries {
 public:
  MatrixSeries() = default;
  /// T zero frames of shape p x q.
  MatrixSeries(std::size_t t, Eigen::Index p, Eigen::Index q);
  /// Throws DataError when frames disagree in shape or contain non-finite values.
  explicit MatrixSeries(std::vector<Matrix> frames);

  [[nodiscard]] std::size_t length() const { return frames_.size(); }
  [[nodiscard]] Eigen::Index rows() const { return p_; }
  [[nodiscard]] Eigen::Index cols() const { return q_; }
  [[nodiscard]] bool empty() const { return frames_.empty(); }

  [[nodiscard]] const Matrix& operator[](std::size_t t) const { return frames_[t]; }
  [[nodiscard]] Matrix& operator[](std::size_t t) { return frames_[t]; }
  [[nodiscard]] const std::vector<Matrix>& frames() const { return frames_; }

  auto begin() const { return frames_.begin(); }
  auto end() const { return frames_.end(); }

 private:
  std::vector<Matrix> frames_;
  Eigen::Index p_ = 0;
  Eigen::Index q_ = 0;
};

/// Time-varying grand mean, row effects and column effects.
struct MeanEffects {
  std::vector<double> mu;
  std::vector<Vector> alpha;  // length p each
  std::vector<Vector> beta;   // length q each

  [[nodiscard]] std::size_t length() const { return mu.size(); }

  /// mu_t 11' + alpha_t 1' + 1 beta_t' for frame t.
  [[nodiscard]] Matrix additive_frame(std::size_t t) const;

  /// All-zero effects for T frames of shape p x q.
  static MeanEffects zeros(std::size_t t, Eigen::Index p, Eigen::Index q);
};

}  // namespace mefm
