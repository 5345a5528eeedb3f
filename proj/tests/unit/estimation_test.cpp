#include <gtest/gtest.h>

#include "generators.hpp"
#include "mefm/dgp.hpp"
#include "mefm/errors.hpp"
#include "mefm/estimation.hpp"
#include "oracles.hpp"

namespace mefm {
namespace {

using testing::Gen;

TEST(MeanEffects, MatchesIndexExpansion) {
  Gen gen(31);
  for (int rep = 0; rep < 100; ++rep) {
    const MatrixSeries y = gen.series(gen.integer(1, 5), gen.integer(1, 6), gen.integer(1, 6), 4.0);
    const MeanEffects e = estimate_mean_effects(y);
    for (std::size_t t = 0; t < y.length(); ++t) {
      const oracle::Effects o = oracle::mean_effects(y[t]);
      EXPECT_NEAR(e.mu[t], o.mu, 1e-12);
      for (Eigen::Index i = 0; i < y.rows(); ++i) EXPECT_NEAR(e.alpha[t](i), o.alpha[i], 1e-12);
      for (Eigen::Index j = 0; j < y.cols(); ++j) EXPECT_NEAR(e.beta[t](j), o.beta[j], 1e-12);
    }
  }
}

TEST(MeanEffects, ConstantSeries) {
  const MatrixSeries y(std::vector<Matrix>{Matrix::Constant(3, 4, 2.5), Matrix::Constant(3, 4, -1.0)});
  const MeanEffects e = estimate_mean_effects(y);
  EXPECT_DOUBLE_EQ(e.mu[0], 2.5);
  EXPECT_DOUBLE_EQ(e.mu[1], -1.0);
  EXPECT_LE(e.alpha[0].cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE(e.beta[1].cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MeanEffects, RecoversPureAdditiveFrame) {
  Vector a(3);
  a << 1.0, -3.0, 2.0;
  Vector b(2);
  b << 0.5, -0.5;
  MeanEffects truth;
  truth.mu = {7.0};
  truth.alpha = {a};
  truth.beta = {b};
  const MatrixSeries y(std::vector<Matrix>{truth.additive_frame(0)});
  const MeanEffects e = estimate_mean_effects(y);
  EXPECT_NEAR(e.mu[0], 7.0, 1e-14);
  EXPECT_LE((e.alpha[0] - a).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((e.beta[0] - b).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Covariance, MatchesDirectSum) {
  Gen gen(32);
  const MatrixSeries l = gen.series(5, 4, 3);
  Matrix row = Matrix::Zero(4, 4);
  Matrix col = Matrix::Zero(3, 3);
  for (const Matrix& x : l) {
    row += x * x.transpose();
    col += x.transpose() * x;
  }
  EXPECT_LE((row_covariance(l) - row / 5.0).norm(), 1e-12);
  EXPECT_LE((col_covariance(l) - col / 5.0).norm(), 1e-12);
}

TEST(Covariance, CompensatedPathAgreesWithPlainSum) {
  Gen gen(33);
  // 26000 * 20 * 20 > 1e7 entries triggers compensated summation.
  const MatrixSeries big = gen.series(26000, 20, 20);
  const Matrix cov = col_covariance(big);
  Matrix direct = Matrix::Zero(20, 20);
  for (const Matrix& x : big) direct.noalias() += x.transpose() * x;
  direct /= 26000.0;
  EXPECT_LE((cov - direct).cwiseAbs().maxCoeff(), 1e-9 * direct.cwiseAbs().maxCoeff());
}

// Exact identities that must hold for any input and ranks.
TEST(FitIdentities, HoldOnRandomInstances) {
  Gen gen(34);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t t = static_cast<std::size_t>(gen.integer(2, 8));
    const Eigen::Index p = gen.integer(3, 9);
    const Eigen::Index q = gen.integer(3, 9);
    const int kr = gen.integer(1, static_cast<int>(p) - 1);
    const int kc = gen.integer(1, static_cast<int>(q) - 1);
    const MatrixSeries y = gen.structured(t, p, q, kr, kc, 0.5);
    const MEFMFit fit = fit_mefm(y, Ranks{kr, kc});
    double scale = 0.0;
    for (const Matrix& f : y) scale = std::max(scale, f.cwiseAbs().maxCoeff());
    const double tol = 1e-10 * scale;

    EXPECT_LE((fit.qr.transpose() * fit.qr - Matrix::Identity(kr, kr)).norm(), 1e-10);
    EXPECT_LE((fit.qc.transpose() * fit.qc - Matrix::Identity(kc, kc)).norm(), 1e-10);
    EXPECT_LE(fit.qr.colwise().sum().cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(fit.qc.colwise().sum().cwiseAbs().maxCoeff(), 1e-10);
    for (std::size_t s = 0; s < t; ++s) {
      const Matrix rebuilt =
          fit.effects.additive_frame(s) + fit.common[s] + fit.residual[s];
      EXPECT_LE((rebuilt - y[s]).cwiseAbs().maxCoeff(), tol);
      EXPECT_LE(std::abs(fit.effects.alpha[s].sum()), tol);
      EXPECT_LE(std::abs(fit.effects.beta[s].sum()), tol);
      const Matrix l = fit.centered(s);
      EXPECT_LE(l.rowwise().sum().cwiseAbs().maxCoeff(), tol * static_cast<double>(q));
      EXPECT_LE(l.colwise().sum().cwiseAbs().maxCoeff(), tol * static_cast<double>(p));
      EXPECT_LE((fit.qr.transpose() * fit.residual[s] * fit.qc).cwiseAbs().maxCoeff(), tol);
      EXPECT_LE((fit.qr * fit.fz[s] * fit.qc.transpose() - fit.common[s]).cwiseAbs().maxCoeff(),
                tol);
    }
  }
}

TEST(Loadings, EigenvaluesMatchCovariance) {
  Gen gen(35);
  const MatrixSeries l = detrend(gen.structured(10, 6, 5, 2, 2, 0.3));
  const Loadings ld = estimate_loadings(l, 2, 2);
  const Matrix rc = row_covariance(l);
  EXPECT_LE((rc * ld.qr - ld.qr * ld.dr.asDiagonal()).norm(), 1e-9 * rc.norm());
  EXPECT_EQ(ld.status, FitStatus::ok);
}

TEST(Loadings, RankBounds) {
  Gen gen(36);
  const MatrixSeries l = detrend(gen.series(4, 4, 3));
  EXPECT_THROW((void)estimate_loadings(l, 0, 1), UsageError);
  EXPECT_THROW((void)estimate_loadings(l, 4, 1), UsageError);
  EXPECT_THROW((void)estimate_loadings(l, 1, 3), UsageError);
  EXPECT_NO_THROW((void)estimate_loadings(l, 3, 2));
}

TEST(Loadings, ConstantSeriesIsDegenerate) {
  const MatrixSeries y(std::vector<Matrix>(3, Matrix::Constant(4, 4, 1.0)));
  const MEFMFit fit = fit_mefm(y, Ranks{1, 1});
  EXPECT_EQ(fit.status, FitStatus::degenerate);
  EXPECT_LE(fit.common[0].cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Factors, ShapeErrors) {
  Gen gen(37);
  const MatrixSeries y = gen.series(3, 4, 3);
  EXPECT_THROW((void)estimate_factors(y, Matrix(4, 0), Matrix::Identity(3, 1)), UsageError);
  EXPECT_THROW((void)estimate_factors(y, Matrix::Identity(5, 1), Matrix::Identity(3, 1)),
               DataError);
}

TEST(FitMefm, TinyDimensionsRejected) {
  const MatrixSeries y(std::vector<Matrix>{Matrix::Ones(1, 4)});
  EXPECT_THROW((void)fit_mefm(y, Ranks{1, 1}), DataError);
  EXPECT_THROW((void)fit_mefm(MatrixSeries{}, Ranks{1, 1}), DataError);
}

TEST(FitMefm, AutoRankRecordsSelection) {
  Gen gen(38);
  const MEFMFit fit = fit_mefm(gen.structured(40, 12, 12, 2, 1, 0.2), std::nullopt);
  ASSERT_TRUE(fit.rank_selection.has_value());
  EXPECT_EQ(fit.ranks, (Ranks{2, 1}));
}

TEST(FitMefm, NoiselessPervasiveRecovery) {
  DGPConfig c = preset("Ia");
  c.noise_scale = 0.0;
  c.ker = 0;
  c.kec = 0;
  c.seed = 3;
  const Dataset d = gen_dataset(c);
  const MEFMFit fit = fit_mefm(d.y, std::nullopt);
  EXPECT_EQ(fit.ranks, (Ranks{1, 2}));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t t = 0; t < d.y.length(); ++t) {
    num += (fit.common[t] - d.truth.common[t]).squaredNorm();
    den += d.truth.common[t].squaredNorm();
  }
  EXPECT_LT(num / den, 1e-12);
  EXPECT_LE(linalg::space_distance(fit.qr, d.truth.qr()), 1e-6);
}

TEST(FitFm, ProjectsOntoLeadingSpaces) {
  Gen gen(39);
  const MatrixSeries y = gen.series(6, 5, 4);
  const FMFit fm = fit_fm(y, 2, 3);
  for (std::size_t t = 0; t < y.length(); ++t) {
    EXPECT_LE((fm.common[t] + fm.residual[t] - y[t]).norm(), 1e-12);
    EXPECT_LE((fm.ar.transpose() * fm.residual[t] * fm.ac).norm(), 1e-10);
  }
  const FMFit full = fit_fm(y, 5, 4);
  EXPECT_LE(full.residual[0].norm(), 1e-10);
  EXPECT_THROW((void)fit_fm(y, 0, 1), UsageError);
  EXPECT_THROW((void)fit_fm(y, 1, 5), UsageError);
}

TEST(FmToMefm, RewritesCommonComponent) {
  Gen gen(40);
  const MatrixSeries c = gen.series(4, 5, 3);
  const FMConversion conv = fm_to_mefm(c);
  for (std::size_t t = 0; t < c.length(); ++t) {
    EXPECT_LE((conv.effects.additive_frame(t) + conv.centered_common[t] - c[t]).norm(), 1e-12);
    EXPECT_LE((conv.centered_common[t] - oracle::double_center(c[t])).norm(), 1e-12);
  }
}

TEST(MatrixSeries, ValidatesFrames) {
  EXPECT_THROW(MatrixSeries(std::vector<Matrix>{Matrix::Zero(2, 2), Matrix::Zero(2, 3)}),
               DataError);
  Matrix bad = Matrix::Zero(2, 2);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(MatrixSeries(std::vector<Matrix>{bad}), DataError);
}

}  // namespace
}  // namespace mefm
