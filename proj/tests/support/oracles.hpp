#pragma once

// Literal index-expansion reference implementations. Deliberately naive:
// every sum is an explicit loop over the defining indices.

#include <algorithm>
#include <cmath>
#include <vector>

#include "mefm/estimation.hpp"

namespace mefm::oracle {

inline double centering(Eigen::Index n, Eigen::Index a, Eigen::Index b) {
  return (a == b ? 1.0 : 0.0) - 1.0 / static_cast<double>(n);
}

/// (M_p Y M_q)_{ij} = sum_k sum_l (M_p)_{ik} Y_{kl} (M_q)_{lj}.
inline Matrix double_center(const Matrix& y) {
  const Eigen::Index p = y.rows();
  const Eigen::Index q = y.cols();
  Matrix out(p, q);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < p; ++k) {
        for (Eigen::Index l = 0; l < q; ++l) s += centering(p, i, k) * y(k, l) * centering(q, l, j);
      }
      out(i, j) = s;
    }
  }
  return out;
}

struct Effects {
  double mu;
  std::vector<double> alpha;
  std::vector<double> beta;
};

inline Effects mean_effects(const Matrix& y) {
  const Eigen::Index p = y.rows();
  const Eigen::Index q = y.cols();
  Effects e{0.0, std::vector<double>(p, 0.0), std::vector<double>(q, 0.0)};
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) e.mu += y(i, j);
  }
  e.mu /= static_cast<double>(p * q);
  for (Eigen::Index i = 0; i < p; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < q; ++j) s += y(i, j);
    e.alpha[i] = s / static_cast<double>(q) - e.mu;
  }
  for (Eigen::Index j = 0; j < q; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) s += y(i, j);
    e.beta[j] = s / static_cast<double>(p) - e.mu;
  }
  return e;
}

/// Four relative MSE ratios; a negative value marks a zero denominator.
inline std::vector<double> relative_mse(const MeanEffects& est, const MatrixSeries& est_c,
                                        const MeanEffects& truth, const MatrixSeries& true_c) {
  double num[4] = {0, 0, 0, 0};
  double den[4] = {0, 0, 0, 0};
  for (std::size_t t = 0; t < truth.length(); ++t) {
    num[0] += (truth.mu[t] - est.mu[t]) * (truth.mu[t] - est.mu[t]);
    den[0] += truth.mu[t] * truth.mu[t];
    for (Eigen::Index i = 0; i < truth.alpha[t].size(); ++i) {
      const double d = truth.alpha[t](i) - est.alpha[t](i);
      num[1] += d * d;
      den[1] += truth.alpha[t](i) * truth.alpha[t](i);
    }
    for (Eigen::Index j = 0; j < truth.beta[t].size(); ++j) {
      const double d = truth.beta[t](j) - est.beta[t](j);
      num[2] += d * d;
      den[2] += truth.beta[t](j) * truth.beta[t](j);
    }
    for (Eigen::Index i = 0; i < true_c[t].rows(); ++i) {
      for (Eigen::Index j = 0; j < true_c[t].cols(); ++j) {
        const double d = true_c[t](i, j) - est_c[t](i, j);
        num[3] += d * d;
        den[3] += true_c[t](i, j) * true_c[t](i, j);
      }
    }
  }
  std::vector<double> out(4);
  for (int k = 0; k < 4; ++k) out[k] = den[k] > 0.0 ? num[k] / den[k] : -1.0;
  return out;
}

/// min { x_k : #{x <= x_k} / n >= theta }, scanning every sample.
inline double quantile(const std::vector<double>& x, double theta) {
  const double n = static_cast<double>(x.size());
  double best = INFINITY;
  for (double c : x) {
    double count = 0.0;
    for (double v : x) count += v <= c ? 1.0 : 0.0;
    if (count / n >= theta) best = std::min(best, c);
  }
  return best;
}

/// HAC matrix for row j of Q-hat_r (rows = true) or Q-hat_c, from the fitted
/// C-hat, E-hat, Q-hat and D-hat, by explicit summation over every index.
inline Matrix hac(const MEFMFit& fit, bool rows, Eigen::Index j, int eta) {
  const std::size_t t_len = fit.length();
  const Eigen::Index p = fit.rows();
  const Eigen::Index q = fit.cols();
  const Eigen::Index n = rows ? p : q;
  const Eigen::Index m = rows ? q : p;  // contracted dimension
  const Matrix& qhat = rows ? fit.qr : fit.qc;
  const Vector& d = rows ? fit.dr : fit.dc;
  const Eigen::Index k = qhat.cols();
  auto c_at = [&](std::size_t t, Eigen::Index a, Eigen::Index b) {
    return rows ? fit.common[t](a, b) : fit.common[t](b, a);
  };
  auto e_at = [&](std::size_t t, Eigen::Index a, Eigen::Index b) {
    return rows ? fit.residual[t](a, b) : fit.residual[t](b, a);
  };
  // gram(a, b) = sum_s sum_l C_s(a, l) C_s(b, l) in the oriented layout
  Matrix gram = Matrix::Zero(n, n);
  for (std::size_t s = 0; s < t_len; ++s) {
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) {
        for (Eigen::Index l = 0; l < m; ++l) gram(a, b) += c_at(s, a, l) * c_at(s, b, l);
      }
    }
  }
  Matrix w = Matrix::Zero(k, n);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index b = 0; b < n; ++b) {
      for (Eigen::Index a = 0; a < n; ++a) w(r, b) += qhat(a, r) * gram(a, b);
      w(r, b) /= static_cast<double>(t_len) * d(r);
    }
  }
  std::vector<Vector> g(t_len, Vector::Zero(k));
  for (std::size_t t = 0; t < t_len; ++t) {
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index a = 0; a < n; ++a) {
        double ce = 0.0;  // (C_t E_t')_{a j} in the oriented layout
        for (Eigen::Index l = 0; l < m; ++l) ce += c_at(t, a, l) * e_at(t, j, l);
        g[t](r) += w(r, a) * ce;
      }
    }
  }
  Matrix sigma = Matrix::Zero(k, k);
  for (int v = 0; v <= eta; ++v) {
    const double weight = v == 0 ? 1.0 : 1.0 - static_cast<double>(v) / (1.0 + eta);
    for (std::size_t t = static_cast<std::size_t>(v); t < t_len; ++t) {
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) {
          const double dv = g[t](a) * g[t - v](b);
          sigma(a, b) += weight * dv;
          if (v > 0) sigma(b, a) += weight * dv;
        }
      }
    }
  }
  return sigma;
}

/// gamma_alpha,i^2 = q^{-1} sum_j E_ij^2, gamma_beta,j^2 = p^{-1} sum_i E_ij^2,
/// gamma_mu^2 = (pq)^{-1} sum_ij E_ij^2.
inline void gammas(const Matrix& e, Vector& alpha_sq, Vector& beta_sq, double& mu_sq) {
  const Eigen::Index p = e.rows();
  const Eigen::Index q = e.cols();
  alpha_sq = Vector::Zero(p);
  beta_sq = Vector::Zero(q);
  mu_sq = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < q; ++j) {
      alpha_sq(i) += e(i, j) * e(i, j) / static_cast<double>(q);
      beta_sq(j) += e(i, j) * e(i, j) / static_cast<double>(p);
      mu_sq += e(i, j) * e(i, j) / static_cast<double>(p * q);
    }
  }
}

/// sup_x |F_n(x) - Phi(x)| for a sample against the standard normal.
inline double ks_normal(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double cdf = 0.5 * std::erfc(-x[k] / std::sqrt(2.0));
    d = std::max(d, std::max(static_cast<double>(k + 1) / n - cdf, cdf - static_cast<double>(k) / n));
  }
  return d;
}

/// Two-sample KS by evaluating both empirical CDFs at every pooled point.
inline double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  double d = 0.0;
  for (double c : pooled) {
    double fa = 0.0;
    double fb = 0.0;
    for (double v : a) fa += v <= c ? 1.0 : 0.0;
    for (double v : b) fb += v <= c ? 1.0 : 0.0;
    d = std::max(d, std::abs(fa / static_cast<double>(a.size()) - fb / static_cast<double>(b.size())));
  }
  return d;
}

}  // namespace mefm::oracle
