#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mefm/series.hpp"

namespace mefm {

enum class Innovation { normal, student_t3 };

enum class EffectLaw {
  /// mu_t ~ N(m_mu, s_mu^2); alpha_t = M_p v, v_i ~ N(m_alpha, s_alpha^2); same for beta.
  gaussian,
  /// v entries are u * Rademacher; optionally only the first u_local entries
  /// of v_alpha are non-zero.
  rademacher,
  /// alpha_t cycles through u_pattern * {(1,1,-2,0,..), (1,2,-3,0,..), (2,-5,3,0,..)};
  /// mu and beta follow the Rademacher law.
  local_pattern,
};

/// Every knob of the simulation data-generating process.
struct DGPConfig {
  std::string name = "custom";
  std::size_t t = 100;
  Eigen::Index p = 40;
  Eigen::Index q = 40;
  int kr = 1;
  int kc = 2;
  std::vector<double> zeta_r{0.0};  // column j of A_r is scaled by p^{-zeta_r[j]}
  std::vector<double> zeta_c{0.0, 0.0};
  std::vector<double> ar_f{0.7, 0.3, -0.4, 0.2, -0.1};
  std::vector<double> ar_e{-0.7, -0.3, -0.4, 0.2, 0.1};
  std::vector<double> ar_eps{0.8, 0.4, -0.4, 0.2, -0.1};
  Innovation innovation = Innovation::normal;
  int ker = 2;
  int kec = 2;
  double sparse_prob = 0.95;
  /// Multiplier on the idiosyncratic standard deviations (1 = as drawn).
  double noise_scale = 1.0;

  EffectLaw effect_law = EffectLaw::gaussian;
  double m_mu = 0.0, s_mu = 1.0;
  double m_alpha = 0.0, s_alpha = 1.0;
  double m_beta = 0.0, s_beta = 1.0;
  double u_mu = 0.0, u_alpha = 0.0, u_beta = 0.0;
  int u_local = 0;  // 0 keeps every entry
  double u_pattern = 0.0;

  std::uint64_t seed = 0;
};

/// Throws UsageError describing the first violated constraint.
void validate(const DGPConfig& config);

/// Named experimental settings: Ia..Ie, IIa..IIe, IIIa..IIIc, IVa..IVc, plus
/// Ic-AR1 (heavy-tailed AR(1) normality setup) and IVc-pattern (fixed local
/// row-effect pattern). Throws UsageError on unknown names.
[[nodiscard]] DGPConfig preset(std::string_view name);
[[nodiscard]] std::vector<std::string> preset_names();

/// Set (p, q) and T = round(t_factor * p * q).
void set_dimensions(DGPConfig& config, Eigen::Index p, Eigen::Index q, double t_factor);

/// Flat key=value text, one knob per line, lists comma-separated.
[[nodiscard]] std::string format_config(const DGPConfig& config);
/// Parse text produced by format_config. Unknown keys or malformed values
/// throw UsageError; omitted keys keep the values of `base`.
[[nodiscard]] DGPConfig parse_config(std::string_view text, DGPConfig base = {});

/// Deterministic child seed for stream `index` of `master` (splitmix64 mix).
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Spectral radius of the AR companion matrix; 0 for white noise.
[[nodiscard]] double ar_spectral_radius(const std::vector<double>& coeffs);

/// Variance of the stationary AR process driven by unit-variance innovations,
/// solved from the Yule-Walker equations. Throws UsageError if non-stationary.
[[nodiscard]] double ar_stationary_variance(const std::vector<double>& coeffs);

/// Burn-in steps discarded before recording: 200 + 10 * order.
[[nodiscard]] int ar_burn_in(std::size_t order);

/// n_series independent AR processes of length t scaled to unit stationary
/// variance, as a t x n_series matrix. Innovations are standard normal or
/// Student-t(3) rescaled to unit variance.
[[nodiscard]] Matrix gen_standardized_ar(const std::vector<double>& coeffs, Innovation innovation,
                                         std::size_t t, Eigen::Index n_series, std::uint64_t seed);

/// U B with U i.i.d. N(0,1) (n x k) and B = diag(n^{-zeta_j}); centered
/// applies M_n on the left.
[[nodiscard]] Matrix gen_loadings(Eigen::Index n, int k, const std::vector<double>& zeta,
                                  std::uint64_t seed, bool centered);

struct NoiseDraw {
  MatrixSeries e;
  Matrix sigma_eps;  // p x q standard deviations
  Matrix aer;        // p x ker
  Matrix aec;        // q x kec
};

/// E_t = A_er F_e,t A_ec' + Sigma_eps o eps_t.
[[nodiscard]] NoiseDraw gen_noise(const DGPConfig& config, std::uint64_t seed);

[[nodiscard]] MeanEffects gen_effects(const DGPConfig& config, std::uint64_t seed);

struct GroundTruth {
  MeanEffects effects;
  Matrix ar;  // p x kr
  Matrix ac;  // q x kc
  std::vector<Matrix> f;
  MatrixSeries common;
  MatrixSeries noise;
  Matrix sigma_eps;
  Matrix aer;
  Matrix aec;

  /// Q_r = A_r Z_r^{-1/2}, Z_r = diag(A_r'A_r); likewise Q_c.
  [[nodiscard]] Matrix qr() const;
  [[nodiscard]] Matrix qc() const;
  /// F_Z,t = Z_r^{1/2} F_t Z_c^{1/2}.
  [[nodiscard]] std::vector<Matrix> fz() const;
};

struct Dataset {
  MatrixSeries y;
  GroundTruth truth;
};

/// Y_t = mu_t 11' + alpha_t 1' + 1 beta_t' + A_r F_t A_c' + E_t, drawn from config.seed.
[[nodiscard]] Dataset gen_dataset(const DGPConfig& config);

}  // namespace mefm
