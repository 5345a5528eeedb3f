#include "mefm/series.hpp"

#include <string>
#include <utility>

#include "mefm/errors.hpp"

namespace mefm {

MatrixSeries::MatrixSeries(std::size_t t, Eigen::Index p, Eigen::Index q)
    : frames_(t, Matrix::Zero(p, q)), p_(p), q_(q) {}

MatrixSeries::MatrixSeries(std::vector<Matrix> frames) : frames_(std::move(frames)) {
  if (frames_.empty()) return;
  p_ = frames_.front().rows();
  q_ = frames_.front().cols();
  if (p_ < 1 || q_ < 1) throw DataError("MatrixSeries: frames must be non-empty");
  for (std::size_t t = 0; t < frames_.size(); ++t) {
    if (frames_[t].rows() != p_ || frames_[t].cols() != q_) {
      throw DataError("MatrixSeries: frame " + std::to_string(t + 1) +
                      " has a different shape");
    }
    if (!frames_[t].allFinite()) {
      throw DataError("MatrixSeries: frame " + std::to_string(t + 1) +
                      " contains non-finite values");
    }
  }
}

Matrix MeanEffects::additive_frame(std::size_t t) const {
  const Eigen::Index p = alpha[t].size();
  const Eigen::Index q = beta[t].size();
  Matrix out = Matrix::Constant(p, q, mu[t]);
  out.colwise() += alpha[t];
  out.rowwise() += beta[t].transpose();
  return out;
}

MeanEffects MeanEffects::zeros(std::size_t t, Eigen::Index p, Eigen::Index q) {
  MeanEffects e;
  e.mu.assign(t, 0.0);
  e.alpha.assign(t, Vector::Zero(p));
  e.beta.assign(t, Vector::Zero(q));
  return e;
}

}  // namespace mefm
