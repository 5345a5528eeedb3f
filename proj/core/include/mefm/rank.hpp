#pragma once

#include <string>
#include <vector>

#include "mefm/series.hpp"

namespace mefm {

/// Default multiplier of the ratio perturbation. Retuning it is discouraged:
/// 1/5 was found to work best across a wide range of settings.
inline constexpr double kDefaultXiScale = 0.2;

/// Row and column core ranks.
struct Ranks {
  int kr = 0;
  int kc = 0;
  friend bool operator==(const Ranks&, const Ranks&) = default;
  friend auto operator<=>(const Ranks&, const Ranks&) = default;
};

/// Output of the perturbed eigenvalue-ratio rank estimator.
struct RankSelection {
  std::vector<double> eigenvalues_row;  // floor(p/2)+1 leading eigenvalues, clamped at 0
  std::vector<double> eigenvalues_col;  // floor(q/2)+1 leading eigenvalues, clamped at 0
  double xi_row = 0.0;
  double xi_col = 0.0;
  std::vector<double> ratios_row;  // ratios_row[j-1] = (lambda_{j+1}+xi)/(lambda_j+xi)
  std::vector<double> ratios_col;
  Ranks ranks;
  /// Median frame Frobenius norm of the input, and whether it is more than
  /// 100x away from sqrt(pq), the scale the xi calibration presumes.
  double median_frame_norm = 0.0;
  bool scale_warning = false;
  std::string warning;
};

/// xi_r = c pq [ (Tq)^{-1/2} + p^{-1/2} ]
[[nodiscard]] double xi_row(std::size_t t, Eigen::Index p, Eigen::Index q, double c_xi);
/// xi_c = c pq [ (Tp)^{-1/2} + q^{-1/2} ]
[[nodiscard]] double xi_col(std::size_t t, Eigen::Index p, Eigen::Index q, double c_xi);

/// argmin over j in [1, max_j] of (lambda_{j+1}+xi)/(lambda_j+xi); ties go to
/// the smallest j. `eigenvalues` must hold at least max_j+1 descending values.
/// Writes the ratios into `ratios` when non-null.
[[nodiscard]] int ratio_argmin(const std::vector<double>& eigenvalues, double xi,
                               int max_j, std::vector<double>* ratios = nullptr);

/// Estimate (k_r, k_c) from a double-centered series L_t.
[[nodiscard]] RankSelection select_ranks(const MatrixSeries& centered,
                                         double c_xi = kDefaultXiScale);

}  // namespace mefm
