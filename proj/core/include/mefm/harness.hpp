#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mefm/dgp.hpp"
#include "mefm/estimation.hpp"
#include "mefm/fmtest.hpp"

namespace mefm {

/// Relative MSEs sum_t ||truth - estimate||^2 / sum_t ||truth||^2. A component
/// whose truth is identically zero is left empty (undefined).
struct RelativeMSE {
  std::optional<double> mu;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> common;
};

[[nodiscard]] RelativeMSE relative_mse(const MEFMFit& fit, const GroundTruth& truth);

/// Same ratios from raw estimated and true components.
[[nodiscard]] RelativeMSE relative_mse(const MeanEffects& est_effects, const MatrixSeries& est_common,
                                       const MeanEffects& true_effects,
                                       const MatrixSeries& true_common);

enum Task : unsigned {
  kTaskFit = 1u << 0,        // relative MSEs and loading space distances
  kTaskRanks = 1u << 1,      // rank selection frequencies
  kTaskTest = 1u << 2,       // FM-vs-MEFM rejection proportions
  kTaskNormality = 1u << 3,  // standardized effect statistics at one (t, i, j)
};

struct ReplicationOptions {
  unsigned tasks = kTaskFit;
  /// Fit with estimated ranks instead of the true ones.
  bool fit_estimated_ranks = false;
  /// Run the test with the true ranks instead of estimated ones.
  bool test_true_ranks = false;
  double theta = 0.95;
  double c_xi = kDefaultXiScale;
  /// Zero-based coordinates of the normality statistics.
  std::size_t normality_t = 9;
  Eigen::Index normality_i = 2;
  Eigen::Index normality_j = 2;
  /// Also record z_qc, the first entry of the loading z statistic for row 0
  /// of Q-hat_c with the HAC covariance at its default bandwidth.
  bool normality_loading = false;
  /// Worker cap; the MEFM_THREADS environment variable applies when empty.
  std::optional<unsigned> threads;
};

struct Aggregate {
  double mean = 0.0;
  double sd = 0.0;  // sample sd, 0 for a single value
  double median = 0.0;
  std::size_t count = 0;  // defined values used
};

struct ReplicationSummary {
  std::string setting;
  std::size_t reps = 0;  // successful replications
  std::size_t requested = 0;
  std::size_t failures = 0;
  std::vector<std::string> failure_reasons;  // "rep <r>: <message>"
  std::vector<std::size_t> rep_ids;           // zero-based index of each successful rep
  /// Per-rep values in replication order, one entry per successful rep;
  /// NaN marks an undefined value.
  std::map<std::string, std::vector<double>> metrics;
  std::map<std::string, Aggregate> aggregates;
  std::map<Ranks, double> rank_frequencies;
};

/// Workers to use: min(hardware threads, MEFM_THREADS, jobs), at least 1.
[[nodiscard]] unsigned worker_count(std::size_t jobs, std::optional<unsigned> cap = std::nullopt);

/// Replication r draws from derive_seed(master_seed, r). Failed reps are
/// counted and excluded. Throws UsageError when reps == 0.
[[nodiscard]] ReplicationSummary run_replications(const DGPConfig& setting, std::size_t reps,
                                                  std::uint64_t master_seed,
                                                  const ReplicationOptions& options = {});

/// Mean, sd and median over the non-NaN entries.
[[nodiscard]] Aggregate aggregate(const std::vector<double>& values);

struct PowerPoint {
  double value = 0.0;
  double reject_alpha = 0.0;
  double reject_beta = 0.0;
  double reject_alpha_sd = 0.0;
  double reject_beta_sd = 0.0;
  std::size_t reps = 0;
  std::size_t failures = 0;
};

/// Mean rejection proportions per grid value of `param`:
/// u_alpha, u_beta, or u_local_scale (u_pattern for the local_pattern law,
/// u_alpha otherwise). Every grid point reuses master_seed.
[[nodiscard]] std::vector<PowerPoint> power_curve(const DGPConfig& base, const std::string& param,
                                                  const std::vector<double>& grid, std::size_t reps,
                                                  double theta, std::uint64_t master_seed,
                                                  const ReplicationOptions& options = {});

}  // namespace mefm
