#include "mefm/inference.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mefm/errors.hpp"

namespace mefm {
namespace {

constexpr double kInvSqrtFloor = 1e-12;

double safe_ratio(double num, double sd, bool& degenerate) {
  if (!(sd > 0.0)) {
    degenerate = true;
    return std::numeric_limits<double>::quiet_NaN();
  }
  return num / sd;
}

void require_nondegenerate(const MEFMFit& fit, const char* who) {
  if (fit.status == FitStatus::degenerate || fit.dr.size() == 0 || fit.dc.size() == 0 ||
      fit.dr.minCoeff() <= 0.0 || fit.dc.minCoeff() <= 0.0) {
    throw NumericError(std::string(who) + ": D-hat is singular");
  }
}

void require_time(const MatrixSeries& s, std::size_t t, const char* who) {
  if (t >= s.length()) {
    throw UsageError(std::string(who) + ": time index " + std::to_string(t + 1) +
                     " outside [1, " + std::to_string(s.length()) + "]");
  }
}

}  // namespace

GammaEstimates gamma_estimates(const MatrixSeries& residual, std::size_t t) {
  require_time(residual, t, "gamma_estimates");
  const Matrix& e = residual[t];
  const auto p = static_cast<double>(e.rows());
  const auto q = static_cast<double>(e.cols());
  GammaEstimates g;
  g.alpha_sq = e.rowwise().squaredNorm() / q;
  g.beta_sq = e.colwise().squaredNorm().transpose() / p;
  g.mu_sq = e.squaredNorm() / (p * q);
  g.t_used = t;
  return g;
}

GammaEstimates gamma_estimates_time_averaged(const MatrixSeries& residual) {
  if (residual.empty()) throw DataError("gamma_estimates_time_averaged: empty series");
  GammaEstimates acc = gamma_estimates(residual, 0);
  for (std::size_t t = 1; t < residual.length(); ++t) {
    const GammaEstimates g = gamma_estimates(residual, t);
    acc.alpha_sq += g.alpha_sq;
    acc.beta_sq += g.beta_sq;
    acc.mu_sq += g.mu_sq;
  }
  const auto n = static_cast<double>(residual.length());
  acc.alpha_sq /= n;
  acc.beta_sq /= n;
  acc.mu_sq /= n;
  return acc;
}

EffectStats standardized_effect_stats(const MEFMFit& fit, std::size_t t,
                                      const MeanEffects& reference) {
  require_time(fit.residual, t, "standardized_effect_stats");
  if (reference.length() <= t || reference.alpha[t].size() != fit.rows() ||
      reference.beta[t].size() != fit.cols()) {
    throw DataError("standardized_effect_stats: reference effects do not match the fit");
  }
  const GammaEstimates g = gamma_estimates(fit.residual, t);
  const auto p = static_cast<double>(fit.rows());
  const auto q = static_cast<double>(fit.cols());
  EffectStats out;
  out.mu = std::sqrt(p * q) *
           safe_ratio(fit.effects.mu[t] - reference.mu[t], std::sqrt(g.mu_sq), out.degenerate);
  out.alpha.resize(fit.rows());
  for (Eigen::Index i = 0; i < fit.rows(); ++i) {
    out.alpha(i) = std::sqrt(q) * safe_ratio(fit.effects.alpha[t](i) - reference.alpha[t](i),
                                             std::sqrt(g.alpha_sq(i)), out.degenerate);
  }
  out.beta.resize(fit.cols());
  for (Eigen::Index j = 0; j < fit.cols(); ++j) {
    out.beta(j) = std::sqrt(p) * safe_ratio(fit.effects.beta[t](j) - reference.beta[t](j),
                                            std::sqrt(g.beta_sq(j)), out.degenerate);
  }
  return out;
}

double effect_contrast_z(const MEFMFit& fit, std::size_t t, Side side,
                         const std::vector<Eigen::Index>& indices, const Vector& weights,
                         const Vector& reference_theta) {
  require_time(fit.residual, t, "effect_contrast_z");
  const auto m = static_cast<Eigen::Index>(indices.size());
  if (weights.size() != m || reference_theta.size() != m || m == 0) {
    throw DataError("effect_contrast_z: indices, weights and reference must align");
  }
  const GammaEstimates g = gamma_estimates(fit.residual, t);
  const bool rows = side == Side::row;
  const Vector& estimate = rows ? fit.effects.alpha[t] : fit.effects.beta[t];
  const Vector& gamma_sq = rows ? g.alpha_sq : g.beta_sq;
  const double n = static_cast<double>(rows ? fit.cols() : fit.rows());

  double variance = 0.0;
  double diff = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index idx = indices[static_cast<std::size_t>(k)];
    if (idx < 0 || idx >= estimate.size()) {
      throw UsageError("effect_contrast_z: index out of range");
    }
    variance += weights(k) * weights(k) * gamma_sq(idx);
    diff += weights(k) * (estimate(idx) - reference_theta(k));
  }
  if (!(variance > 0.0)) throw NumericError("effect_contrast_z: zero contrast variance");
  return std::sqrt(n) * diff / std::sqrt(variance);
}

std::pair<RotationMatrix, RotationMatrix> rotation_h(const MEFMFit& fit, const Matrix& truth_qr,
                                                     const Matrix& truth_qc,
                                                     const std::vector<Matrix>& truth_fz) {
  const auto kr = fit.qr.cols();
  const auto kc = fit.qc.cols();
  if (truth_qr.rows() != fit.rows() || truth_qr.cols() != kr || truth_qc.rows() != fit.cols() ||
      truth_qc.cols() != kc || truth_fz.size() != fit.length()) {
    throw DataError("rotation_h: truth dimensions do not match the fit");
  }
  require_nondegenerate(fit, "rotation_h");
  const Matrix qc_gram = truth_qc.transpose() * truth_qc;
  const Matrix qr_gram = truth_qr.transpose() * truth_qr;
  Matrix row_sum = Matrix::Zero(kr, kr);
  Matrix col_sum = Matrix::Zero(kc, kc);
  for (const Matrix& f : truth_fz) {
    if (f.rows() != kr || f.cols() != kc) {
      throw DataError("rotation_h: factor dimensions do not match the fit");
    }
    row_sum.noalias() += f * qc_gram * f.transpose();
    col_sum.noalias() += f.transpose() * qr_gram * f;
  }
  const double t_len = static_cast<double>(fit.length());
  RotationMatrix hr{Side::row, fit.dr.cwiseInverse().asDiagonal() *
                                   (fit.qr.transpose() * truth_qr) * row_sum / t_len};
  RotationMatrix hc{Side::column, fit.dc.cwiseInverse().asDiagonal() *
                                      (fit.qc.transpose() * truth_qc) * col_sum / t_len};
  return {std::move(hr), std::move(hc)};
}

int default_hac_bandwidth(std::size_t t, Eigen::Index p, Eigen::Index q) {
  const double prod = static_cast<double>(t) * static_cast<double>(p) * static_cast<double>(q);
  return static_cast<int>(std::floor(std::pow(prod, 0.25) / 5.0));
}

std::vector<Vector> hac_scores(const MEFMFit& fit, Side side, Eigen::Index j) {
  require_nondegenerate(fit, "hac_loading");
  const bool rows = side == Side::row;
  const Eigen::Index n = rows ? fit.rows() : fit.cols();
  if (j < 0 || j >= n) {
    throw UsageError("hac_loading: index " + std::to_string(j + 1) + " outside [1, " +
                     std::to_string(n) + "]");
  }
  const std::size_t t_len = fit.length();
  Matrix gram = Matrix::Zero(n, n);
  for (const Matrix& c : fit.common) {
    if (rows) {
      gram.selfadjointView<Eigen::Lower>().rankUpdate(c);
    } else {
      gram.selfadjointView<Eigen::Lower>().rankUpdate(c.transpose());
    }
  }
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  const Vector& d = rows ? fit.dr : fit.dc;
  const Matrix& qhat = rows ? fit.qr : fit.qc;
  const Matrix w =
      d.cwiseInverse().asDiagonal() * (qhat.transpose() * gram) / static_cast<double>(t_len);

  std::vector<Vector> scores;
  scores.reserve(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    const Matrix& c = fit.common[t];
    const Matrix& e = fit.residual[t];
    // column j of C_t E_t' is C_t E_t.row(j)'; column j of C_t' E_t is C_t' E_t.col(j)
    const Vector v = rows ? Vector(c * e.row(j).transpose()) : Vector(c.transpose() * e.col(j));
    scores.emplace_back(w * v);
  }
  return scores;
}

HACCovariance hac_loading(const MEFMFit& fit, Side side, Eigen::Index j,
                          std::optional<int> bandwidth) {
  const std::size_t t_len = fit.length();
  const int eta = bandwidth.value_or(default_hac_bandwidth(t_len, fit.rows(), fit.cols()));
  if (eta < 0 || static_cast<std::size_t>(eta) >= t_len) {
    throw UsageError("hac_loading: bandwidth " + std::to_string(eta) + " must lie in [0, T-1]");
  }
  const std::vector<Vector> g = hac_scores(fit, side, j);
  const Eigen::Index k = g.front().size();

  auto lag_sum = [&](int lag) {
    Matrix d = Matrix::Zero(k, k);
    for (std::size_t t = static_cast<std::size_t>(lag); t < t_len; ++t) {
      d.noalias() += g[t] * g[t - static_cast<std::size_t>(lag)].transpose();
    }
    return d;
  };

  HACCovariance out;
  out.side = side;
  out.j = j;
  out.bandwidth = eta;
  out.matrix = lag_sum(0);
  for (int v = 1; v <= eta; ++v) {
    const double weight = 1.0 - static_cast<double>(v) / (1.0 + eta);
    const Matrix dv = lag_sum(v);
    out.matrix += weight * (dv + dv.transpose());
  }
  return out;
}

LoadingZ loading_row_z(const MEFMFit& fit, Side side, Eigen::Index j, const HACCovariance& hac,
                       const RotationMatrix& h, const Vector& truth_row) {
  const bool rows = side == Side::row;
  const Matrix& qhat = rows ? fit.qr : fit.qc;
  const Vector& d = rows ? fit.dr : fit.dc;
  const Eigen::Index k = qhat.cols();
  if (j < 0 || j >= qhat.rows()) throw UsageError("loading_row_z: row index out of range");
  if (hac.matrix.rows() != k || h.matrix.rows() != k || h.matrix.cols() != k ||
      truth_row.size() != k) {
    throw DataError("loading_row_z: dimension mismatch");
  }
  LoadingZ out;
  const Matrix inv_sqrt = linalg::inverse_sqrt_psd(hac.matrix, kInvSqrtFloor, &out.pseudo_inverse);
  const Vector diff = qhat.row(j).transpose() - h.matrix * truth_row;
  out.z = static_cast<double>(fit.length()) * (inv_sqrt * (d.asDiagonal() * diff));
  return out;
}

}  // namespace mefm
