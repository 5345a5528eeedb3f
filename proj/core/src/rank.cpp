#include "mefm/rank.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mefm/errors.hpp"
#include "mefm/estimation.hpp"

namespace mefm {
namespace {

std::vector<double> leading_eigenvalues(const Matrix& cov, Eigen::Index count) {
  const auto top = linalg::sym_eig_topk(cov, count);
  std::vector<double> out(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = std::max(top.values(i), 0.0);
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  double m = values[mid];
  if (values.size() % 2 == 0) {
    m = 0.5 * (m + *std::max_element(values.begin(),
                                     values.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return m;
}

}  // namespace

double xi_row(std::size_t t, Eigen::Index p, Eigen::Index q, double c_xi) {
  const double dp = static_cast<double>(p);
  const double dq = static_cast<double>(q);
  const double dt = static_cast<double>(t);
  return c_xi * dp * dq * (1.0 / std::sqrt(dt * dq) + 1.0 / std::sqrt(dp));
}

double xi_col(std::size_t t, Eigen::Index p, Eigen::Index q, double c_xi) {
  const double dp = static_cast<double>(p);
  const double dq = static_cast<double>(q);
  const double dt = static_cast<double>(t);
  return c_xi * dp * dq * (1.0 / std::sqrt(dt * dp) + 1.0 / std::sqrt(dq));
}

int ratio_argmin(const std::vector<double>& eigenvalues, double xi, int max_j,
                 std::vector<double>* ratios) {
  if (max_j < 1 || eigenvalues.size() < static_cast<std::size_t>(max_j) + 1) {
    throw UsageError("ratio_argmin: need at least max_j+1 eigenvalues");
  }
  if (ratios != nullptr) ratios->assign(static_cast<std::size_t>(max_j), 0.0);
  int best_j = 1;
  double best = 0.0;
  for (int j = 1; j <= max_j; ++j) {
    const double num = eigenvalues[static_cast<std::size_t>(j)] + xi;
    const double den = eigenvalues[static_cast<std::size_t>(j - 1)] + xi;
    const double r = num / den;
    if (ratios != nullptr) (*ratios)[static_cast<std::size_t>(j - 1)] = r;
    if (j == 1 || r < best) {
      best = r;
      best_j = j;
    }
  }
  return best_j;
}

RankSelection select_ranks(const MatrixSeries& centered, double c_xi) {
  if (centered.empty()) throw DataError("select_ranks: empty series");
  const auto p = centered.rows();
  const auto q = centered.cols();
  if (p < 2 || q < 2) throw DataError("select_ranks: need p >= 2 and q >= 2");
  if (!(c_xi > 0.0)) throw UsageError("select_ranks: c_xi must be positive");

  const int max_r = static_cast<int>(p / 2);
  const int max_c = static_cast<int>(q / 2);
  const std::size_t t_len = centered.length();

  RankSelection sel;
  sel.eigenvalues_row = leading_eigenvalues(row_covariance(centered), max_r + 1);
  sel.eigenvalues_col = leading_eigenvalues(col_covariance(centered), max_c + 1);
  sel.xi_row = xi_row(t_len, p, q, c_xi);
  sel.xi_col = xi_col(t_len, p, q, c_xi);
  sel.ranks.kr = ratio_argmin(sel.eigenvalues_row, sel.xi_row, max_r, &sel.ratios_row);
  sel.ranks.kc = ratio_argmin(sel.eigenvalues_col, sel.xi_col, max_c, &sel.ratios_col);

  std::vector<double> norms;
  norms.reserve(t_len);
  for (const Matrix& frame : centered) norms.push_back(frame.norm());
  sel.median_frame_norm = median(std::move(norms));
  const double reference = std::sqrt(static_cast<double>(p * q));
  if (sel.median_frame_norm > 100.0 * reference ||
      sel.median_frame_norm < reference / 100.0) {
    sel.scale_warning = true;
    std::ostringstream msg;
    msg << "median frame Frobenius norm " << sel.median_frame_norm
        << " is more than 100x away from sqrt(pq)=" << reference
        << "; the ratio perturbation assumes unit-scale noise";
    sel.warning = msg.str();
  }
  return sel;
}

}  // namespace mefm
