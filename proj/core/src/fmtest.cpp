#include "mefm/fmtest.hpp"

#include <algorithm>
#include <cmath>

#include "mefm/errors.hpp"

namespace mefm {

ResidualMaxStats residual_max_stats(const MatrixSeries& residual) {
  ResidualMaxStats out;
  out.row_max.reserve(residual.length());
  out.col_max.reserve(residual.length());
  for (const Matrix& e : residual) {
    const auto p = static_cast<double>(e.rows());
    const auto q = static_cast<double>(e.cols());
    out.row_max.push_back(e.rowwise().squaredNorm().maxCoeff() / q);
    out.col_max.push_back(e.colwise().squaredNorm().maxCoeff() / p);
  }
  return out;
}

double empirical_quantile(std::span<const double> samples, double theta) {
  if (samples.empty()) throw DataError("empirical_quantile: empty sample");
  if (!(theta > 0.0 && theta < 1.0)) {
    throw UsageError("empirical_quantile: theta must lie in (0, 1)");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  // F(x_(k)) >= k/n, with equality unless ties follow; the smallest order
  // statistic with #{x <= c} >= theta n is the answer.
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const auto upper = std::upper_bound(sorted.begin(), sorted.end(), sorted[k]);
    const auto count = static_cast<double>(upper - sorted.begin());
    if (count / n >= theta) return sorted[k];
  }
  return sorted.back();
}

double rejection_rate(std::span<const double> stats, double threshold) {
  if (stats.empty()) return 0.0;
  const auto hits = std::count_if(stats.begin(), stats.end(),
                                  [threshold](double v) { return v >= threshold; });
  return static_cast<double>(hits) / static_cast<double>(stats.size());
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DataError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double c = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= c) ++i;
    while (j < b.size() && b[j] <= c) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

TestResult run_fm_vs_mefm_test(const MatrixSeries& y, const FMTestOptions& options) {
  if (y.rows() < 2 || y.cols() < 2) throw DataError("run_fm_vs_mefm_test: need p, q >= 2");
  if (!(options.theta > 0.0 && options.theta < 1.0)) {
    throw UsageError("run_fm_vs_mefm_test: theta must lie in (0, 1)");
  }
  const MEFMFit fit = fit_mefm(y, options.ranks, options.c_xi);

  TestResult out;
  out.theta = options.theta;
  out.ranks = fit.ranks;
  out.mefm_status = fit.status;
  out.fm_ranks = options.fm_ranks.value_or(
      Ranks{std::min<int>(fit.ranks.kr + 1, static_cast<int>(y.rows())),
            std::min<int>(fit.ranks.kc + 1, static_cast<int>(y.cols()))});
  const FMFit fm = fit_fm(y, out.fm_ranks.kr, out.fm_ranks.kc);

  ResidualMaxStats x = residual_max_stats(fit.residual);
  ResidualMaxStats yy = residual_max_stats(fm.residual);
  out.x_alpha = std::move(x.row_max);
  out.x_beta = std::move(x.col_max);
  out.y_alpha = std::move(yy.row_max);
  out.y_beta = std::move(yy.col_max);

  out.q_x_alpha = empirical_quantile(out.x_alpha, options.theta);
  out.q_x_beta = empirical_quantile(out.x_beta, options.theta);
  out.reject_alpha = rejection_rate(out.y_alpha, out.q_x_alpha);
  out.reject_beta = rejection_rate(out.y_beta, out.q_x_beta);
  return out;
}

}  // namespace mefm
