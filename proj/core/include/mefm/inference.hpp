#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "mefm/estimation.hpp"

namespace mefm {

enum class Side { row, column };

/// Per-row and per-column mean squared residuals at one time index.
struct GammaEstimates {
  Vector alpha_sq;  // q^{-1} (E_t E_t')_{ii}
  Vector beta_sq;   // p^{-1} (E_t' E_t)_{jj}
  double mu_sq = 0.0;
  std::size_t t_used = 0;
};

/// gamma-hat estimates from the residual frame at zero-based index t.
[[nodiscard]] GammaEstimates gamma_estimates(const MatrixSeries& residual, std::size_t t);

/// Not part of the estimator's theory: the same quantities averaged over all
/// time indices. Useful as a lower-variance diagnostic only.
[[nodiscard]] GammaEstimates gamma_estimates_time_averaged(const MatrixSeries& residual);

/// Standardized deviations of the effect estimates from reference values.
/// Components whose gamma-hat is zero are NaN and set `degenerate`.
struct EffectStats {
  double mu = 0.0;
  Vector alpha;
  Vector beta;
  bool degenerate = false;
};

/// sqrt(pq)/gamma_mu (mu-hat - mu), sqrt(q)/gamma_alpha,i (alpha-hat_i - alpha_i),
/// sqrt(p)/gamma_beta,j (beta-hat_j - beta_j) at time index t. `reference`
/// is the truth in simulation or the null values in a test.
[[nodiscard]] EffectStats standardized_effect_stats(const MEFMFit& fit, std::size_t t,
                                                    const MeanEffects& reference);

/// Standardized linear contrast g'(theta-hat - theta) over the selected
/// entries of alpha_t (Side::row) or beta_t (Side::column):
/// sqrt(n) (g' diag(gamma^2) g)^{-1/2} g'(theta-hat - theta), n = q or p.
[[nodiscard]] double effect_contrast_z(const MEFMFit& fit, std::size_t t, Side side,
                                       const std::vector<Eigen::Index>& indices,
                                       const Vector& weights, const Vector& reference_theta);

struct RotationMatrix {
  Side side = Side::row;
  Matrix matrix;
};

/// H_r = T^{-1} D_r^{-1} Qhat_r' Q_r sum_t F_Z,t Q_c'Q_c F_Z,t' and the column
/// analogue, using the true (Q_r, Q_c, F_Z). Simulation only.
[[nodiscard]] std::pair<RotationMatrix, RotationMatrix> rotation_h(
    const MEFMFit& fit, const Matrix& truth_qr, const Matrix& truth_qc,
    const std::vector<Matrix>& truth_fz);

struct HACCovariance {
  Side side = Side::row;
  Eigen::Index j = 0;
  int bandwidth = 0;
  Matrix matrix;
};

/// floor((T p q)^{1/4} / 5).
[[nodiscard]] int default_hac_bandwidth(std::size_t t, Eigen::Index p, Eigen::Index q);

/// Bartlett-weighted HAC estimate for row j (zero-based) of Q-hat_r or Q-hat_c:
///   Sigma = D_0 + sum_{v=1}^{eta} (1 - v/(1+eta)) (D_v + D_v'),
///   D_v = sum_{t=v+1}^{T} g_t g_{t-v}',
/// with g_t = W (C_t E_t')_{.j} for rows, W = T^{-1} D_r^{-1} Q_r' sum_s C_s C_s',
/// and g_t = W (C_t' E_t)_{.j} for columns, W = T^{-1} D_c^{-1} Q_c' sum_s C_s' C_s.
/// The default bandwidth is default_hac_bandwidth. Throws UsageError when
/// the bandwidth is negative or >= T, NumericError when D-hat is singular.
[[nodiscard]] HACCovariance hac_loading(const MEFMFit& fit, Side side, Eigen::Index j,
                                        std::optional<int> bandwidth = std::nullopt);

/// Per-time summands g_t used by hac_loading (exposed for diagnostics).
[[nodiscard]] std::vector<Vector> hac_scores(const MEFMFit& fit, Side side, Eigen::Index j);

struct LoadingZ {
  Vector z;
  /// The HAC matrix was singular and a pseudo-inverse square root was used.
  bool pseudo_inverse = false;
};

/// T * Sigma^{-1/2} D-hat (Q-hat_{j.} - H Q_{j.}). `truth_row` is row j of the
/// true normalized loading matrix.
[[nodiscard]] LoadingZ loading_row_z(const MEFMFit& fit, Side side, Eigen::Index j,
                                     const HACCovariance& hac, const RotationMatrix& h,
                                     const Vector& truth_row);

}  // namespace mefm
