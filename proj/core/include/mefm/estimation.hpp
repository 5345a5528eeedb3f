#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mefm/rank.hpp"
#include "mefm/series.hpp"

namespace mefm {

enum class FitStatus {
  ok,
  /// The selected eigenvalues of a centered covariance are (numerically)
  /// zero, so loadings are arbitrary and D-hat is singular. Inference that
  /// inverts D-hat must check this flag.
  degenerate,
};

struct Loadings {
  Matrix qr;  // p x kr, orthonormal
  Vector dr;  // kr eigenvalues, descending
  Matrix qc;  // q x kc
  Vector dc;
  FitStatus status = FitStatus::ok;
};

struct FactorEstimates {
  std::vector<Matrix> fz;  // kr x kc, in the estimator's own basis
  MatrixSeries common;     // C-hat_t
  MatrixSeries residual;   // E-hat_t = L-hat_t - C-hat_t
};

/// Full fitted MEFM decomposition.
///
/// `fz` is reported exactly as Q_r' Y_t Q_c. The loadings are identified only
/// up to an invertible rotation, so FZ is meaningful only together with the
/// returned Q matrices; compare against a truth through space_distance or the
/// common component.
struct MEFMFit {
  MeanEffects effects;
  Matrix qr;
  Matrix qc;
  Vector dr;
  Vector dc;
  std::vector<Matrix> fz;
  MatrixSeries common;
  MatrixSeries residual;
  Ranks ranks;
  FitStatus status = FitStatus::ok;
  std::optional<RankSelection> rank_selection;  // set when ranks were estimated

  [[nodiscard]] std::size_t length() const { return fz.size(); }
  [[nodiscard]] Eigen::Index rows() const { return qr.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return qc.rows(); }
  /// L-hat_t, recovered as C-hat_t + E-hat_t.
  [[nodiscard]] Matrix centered(std::size_t t) const { return common[t] + residual[t]; }
};

/// Plain matrix factor model fit (no main effects).
struct FMFit {
  Matrix ar;  // p x lr, orthonormal
  Matrix ac;  // q x lc
  MatrixSeries common;
  MatrixSeries residual;  // Y_t - C_t
};

struct FMConversion {
  MeanEffects effects;
  MatrixSeries centered_common;  // M_p C_t M_q
};

/// mu_t = 1'Y_t1/(pq), alpha_t = Y_t1/q - mu_t 1, beta_t = Y_t'1/p - mu_t 1.
[[nodiscard]] MeanEffects estimate_mean_effects(const MatrixSeries& y);

/// Frame-wise double centering, L-hat_t = M_p Y_t M_q.
[[nodiscard]] MatrixSeries detrend(const MatrixSeries& y);

/// T^{-1} sum_t L_t L_t' (rows) or T^{-1} sum_t L_t' L_t (columns). Uses
/// compensated summation when T*p*q exceeds 1e7 entries.
[[nodiscard]] Matrix row_covariance(const MatrixSeries& series);
[[nodiscard]] Matrix col_covariance(const MatrixSeries& series);

/// Leading eigenpairs of the row and column covariances of a centered
/// series. Requires 1 <= kr <= p-1 and 1 <= kc <= q-1.
[[nodiscard]] Loadings estimate_loadings(const MatrixSeries& centered, int kr, int kc);

/// F_Z,t = Q_r' L_t Q_c, C_t = Q_r F_Z,t Q_c', E_t = L_t - C_t, where L_t is
/// the double-centered Y_t.
[[nodiscard]] FactorEstimates estimate_factors(const MatrixSeries& y, const Matrix& qr,
                                               const Matrix& qc);
/// Same as estimate_factors but takes the already centered series.
[[nodiscard]] FactorEstimates estimate_factors_centered(const MatrixSeries& centered,
                                                        const Matrix& qr, const Matrix& qc);

/// The complete pipeline: effects, centering, loadings and factors. When
/// `ranks` is empty they are estimated with select_ranks(c_xi).
[[nodiscard]] MEFMFit fit_mefm(const MatrixSeries& y, std::optional<Ranks> ranks,
                               double c_xi = kDefaultXiScale);

/// Plain factor model: A_r, A_c are the leading eigenvectors of sum_t Y_tY_t'
/// and sum_t Y_t'Y_t; C_t = A_rA_r'Y_tA_cA_c'. Requires 1 <= lr <= p, 1 <= lc <= q.
[[nodiscard]] FMFit fit_fm(const MatrixSeries& y, int lr, int lc);

/// Rewrite a factor-model common component in main-effects form.
[[nodiscard]] FMConversion fm_to_mefm(const MatrixSeries& common);

}  // namespace mefm
