#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mefm/estimation.hpp"

namespace mefm {

/// Per-time maxima of the row and column mean squared residuals:
///   row_max[t] = max_i q^{-1}(E_t E_t')_{ii},  col_max[t] = max_j p^{-1}(E_t' E_t)_{jj}.
struct ResidualMaxStats {
  std::vector<double> row_max;
  std::vector<double> col_max;
};

[[nodiscard]] ResidualMaxStats residual_max_stats(const MatrixSeries& residual);

/// Generalized-inverse quantile inf{c : F(c) >= theta} of the empirical CDF
/// F(c) = #{x <= c}/n. Always returns one of the samples; no interpolation.
[[nodiscard]] double empirical_quantile(std::span<const double> samples, double theta);

/// Fraction of `stats` that are >= threshold.
[[nodiscard]] double rejection_rate(std::span<const double> stats, double threshold);

/// Two-sample Kolmogorov-Smirnov distance sup_c |F_a(c) - F_b(c)|.
[[nodiscard]] double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct FMTestOptions {
  double theta = 0.95;
  /// Core ranks of the MEFM fit; estimated when empty.
  std::optional<Ranks> ranks;
  /// FM ranks; default to (kr+1, kc+1), capped at (p, q).
  std::optional<Ranks> fm_ranks;
  double c_xi = kDefaultXiScale;
};

/// Outcome of the FM sufficiency test over t in [T].
struct TestResult {
  double theta = 0.95;
  std::vector<double> x_alpha;  // from the MEFM residuals
  std::vector<double> y_alpha;  // from the FM residuals
  std::vector<double> x_beta;
  std::vector<double> y_beta;
  double q_x_alpha = 0.0;
  double q_x_beta = 0.0;
  double reject_alpha = 0.0;
  double reject_beta = 0.0;
  Ranks ranks;     // (kr, kc) used for MEFM
  Ranks fm_ranks;  // (lr, lc) used for FM
  FitStatus mefm_status = FitStatus::ok;
};

/// Fit MEFM and FM once each, build the x/y max statistics, compare the FM
/// statistics against theta-quantiles of the MEFM statistics (the reference
/// sample includes every t).
[[nodiscard]] TestResult run_fm_vs_mefm_test(const MatrixSeries& y,
                                             const FMTestOptions& options = {});

}  // namespace mefm
