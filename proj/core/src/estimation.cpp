#include "mefm/estimation.hpp"

#include <string>

#include "mefm/errors.hpp"

namespace mefm {
namespace {

constexpr double kCompensatedThreshold = 1e7;
constexpr double kDegenerateRel = 1e-12;

void require_nonempty(const MatrixSeries& y, const char* who) {
  if (y.empty()) throw DataError(std::string(who) + ": empty series");
}

// sum_t X_t X_t' (transpose=false) or sum_t X_t' X_t (transpose=true).
Matrix gram_sum(const MatrixSeries& series, bool transpose) {
  const Eigen::Index n = transpose ? series.cols() : series.rows();
  const double entries = static_cast<double>(series.length()) *
                         static_cast<double>(series.rows() * series.cols());
  if (entries > kCompensatedThreshold) {
    linalg::CompensatedSum acc(n, n);
    Matrix term(n, n);
    for (const Matrix& x : series) {
      if (transpose) {
        term.noalias() = x.transpose() * x;
      } else {
        term.noalias() = x * x.transpose();
      }
      acc.add(term);
    }
    return acc.value();
  }
  Matrix acc = Matrix::Zero(n, n);
  for (const Matrix& x : series) {
    if (transpose) {
      acc.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
    } else {
      acc.selfadjointView<Eigen::Lower>().rankUpdate(x);
    }
  }
  acc.triangularView<Eigen::StrictlyUpper>() = acc.transpose();
  return acc;
}

bool is_degenerate(const Vector& selected, const Matrix& cov) {
  const double trace = cov.trace();
  if (!(trace > 0.0)) return true;
  return selected.minCoeff() <= kDegenerateRel * trace;
}

void check_orthonormal_shape(const MatrixSeries& y, const Matrix& qr, const Matrix& qc) {
  if (qr.cols() < 1 || qc.cols() < 1) {
    throw UsageError("estimate_factors: loading matrices must have at least one column");
  }
  if (qr.rows() != y.rows() || qc.rows() != y.cols()) {
    throw DataError("estimate_factors: loading dimensions do not match the series");
  }
}

}  // namespace

MeanEffects estimate_mean_effects(const MatrixSeries& y) {
  MeanEffects e;
  const std::size_t t_len = y.length();
  e.mu.resize(t_len);
  e.alpha.resize(t_len);
  e.beta.resize(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    const Matrix& frame = y[t];
    const double mu = frame.mean();
    e.mu[t] = mu;
    e.alpha[t] = frame.rowwise().mean().array() - mu;
    e.beta[t] = frame.colwise().mean().transpose().array() - mu;
  }
  return e;
}

MatrixSeries detrend(const MatrixSeries& y) {
  std::vector<Matrix> frames;
  frames.reserve(y.length());
  for (const Matrix& frame : y) frames.push_back(linalg::double_center(frame));
  return MatrixSeries(std::move(frames));
}

Matrix row_covariance(const MatrixSeries& series) {
  require_nonempty(series, "row_covariance");
  return gram_sum(series, false) / static_cast<double>(series.length());
}

Matrix col_covariance(const MatrixSeries& series) {
  require_nonempty(series, "col_covariance");
  return gram_sum(series, true) / static_cast<double>(series.length());
}

Loadings estimate_loadings(const MatrixSeries& centered, int kr, int kc) {
  require_nonempty(centered, "estimate_loadings");
  const auto p = centered.rows();
  const auto q = centered.cols();
  if (kr < 1 || kr > p - 1) {
    throw UsageError("estimate_loadings: kr=" + std::to_string(kr) + " outside [1, " +
                     std::to_string(p - 1) + "]");
  }
  if (kc < 1 || kc > q - 1) {
    throw UsageError("estimate_loadings: kc=" + std::to_string(kc) + " outside [1, " +
                     std::to_string(q - 1) + "]");
  }
  const Matrix row_cov = row_covariance(centered);
  const Matrix col_cov = col_covariance(centered);
  auto row = linalg::sym_eig_topk_centered(row_cov, kr);
  auto col = linalg::sym_eig_topk_centered(col_cov, kc);

  Loadings out;
  out.qr = std::move(row.vectors);
  out.dr = std::move(row.values);
  out.qc = std::move(col.vectors);
  out.dc = std::move(col.values);
  if (is_degenerate(out.dr, row_cov) || is_degenerate(out.dc, col_cov)) {
    out.status = FitStatus::degenerate;
  }
  return out;
}

FactorEstimates estimate_factors_centered(const MatrixSeries& centered, const Matrix& qr,
                                          const Matrix& qc) {
  check_orthonormal_shape(centered, qr, qc);
  FactorEstimates out;
  const std::size_t t_len = centered.length();
  out.fz.reserve(t_len);
  std::vector<Matrix> common;
  std::vector<Matrix> residual;
  common.reserve(t_len);
  residual.reserve(t_len);
  for (const Matrix& l : centered) {
    Matrix fz = qr.transpose() * l * qc;
    Matrix c = qr * fz * qc.transpose();
    residual.push_back(l - c);
    common.push_back(std::move(c));
    out.fz.push_back(std::move(fz));
  }
  out.common = MatrixSeries(std::move(common));
  out.residual = MatrixSeries(std::move(residual));
  return out;
}

FactorEstimates estimate_factors(const MatrixSeries& y, const Matrix& qr, const Matrix& qc) {
  check_orthonormal_shape(y, qr, qc);
  return estimate_factors_centered(detrend(y), qr, qc);
}

MEFMFit fit_mefm(const MatrixSeries& y, std::optional<Ranks> ranks, double c_xi) {
  require_nonempty(y, "fit_mefm");
  if (y.rows() < 2 || y.cols() < 2) {
    throw DataError("fit_mefm: need p >= 2 and q >= 2");
  }
  MEFMFit fit;
  fit.effects = estimate_mean_effects(y);
  const MatrixSeries centered = detrend(y);
  if (!ranks) {
    fit.rank_selection = select_ranks(centered, c_xi);
    ranks = fit.rank_selection->ranks;
  }
  fit.ranks = *ranks;
  Loadings loadings = estimate_loadings(centered, ranks->kr, ranks->kc);
  FactorEstimates factors = estimate_factors_centered(centered, loadings.qr, loadings.qc);
  fit.qr = std::move(loadings.qr);
  fit.qc = std::move(loadings.qc);
  fit.dr = std::move(loadings.dr);
  fit.dc = std::move(loadings.dc);
  fit.status = loadings.status;
  fit.fz = std::move(factors.fz);
  fit.common = std::move(factors.common);
  fit.residual = std::move(factors.residual);
  return fit;
}

FMFit fit_fm(const MatrixSeries& y, int lr, int lc) {
  require_nonempty(y, "fit_fm");
  const auto p = y.rows();
  const auto q = y.cols();
  if (lr < 1 || lr > p || lc < 1 || lc > q) {
    throw UsageError("fit_fm: (lr, lc)=(" + std::to_string(lr) + ", " + std::to_string(lc) +
                     ") outside [1, p] x [1, q]");
  }
  FMFit fit;
  fit.ar = linalg::sym_eig_topk(gram_sum(y, false), lr).vectors;
  fit.ac = linalg::sym_eig_topk(gram_sum(y, true), lc).vectors;
  const Matrix pr = fit.ar * fit.ar.transpose();
  const Matrix pc = fit.ac * fit.ac.transpose();
  std::vector<Matrix> common;
  std::vector<Matrix> residual;
  common.reserve(y.length());
  residual.reserve(y.length());
  for (const Matrix& frame : y) {
    Matrix c = pr * frame * pc;
    residual.push_back(frame - c);
    common.push_back(std::move(c));
  }
  fit.common = MatrixSeries(std::move(common));
  fit.residual = MatrixSeries(std::move(residual));
  return fit;
}

FMConversion fm_to_mefm(const MatrixSeries& common) {
  // Identical algebra to the main-effects estimator applied to C_t.
  return FMConversion{estimate_mean_effects(common), detrend(common)};
}

}  // namespace mefm
