#include "mefm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "mefm/errors.hpp"
#include "mefm/inference.hpp"

namespace mefm {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::optional<double> ratio(double num, double den) {
  if (!(den > 0.0)) return std::nullopt;
  return num / den;
}

double or_nan(const std::optional<double>& v) { return v.value_or(kNaN); }

struct RepOutcome {
  bool ok = false;
  std::string error;
  std::vector<std::pair<std::string, double>> values;
  std::optional<Ranks> ranks;
};

RepOutcome run_one(const DGPConfig& setting, std::uint64_t seed,
                   const ReplicationOptions& options) {
  RepOutcome out;
  try {
    DGPConfig config = setting;
    config.seed = seed;
    const Dataset data = gen_dataset(config);
    const Ranks truth_ranks{config.kr, config.kc};
    auto put = [&out](const char* name, double v) { out.values.emplace_back(name, v); };

    std::optional<RankSelection> selection;
    if (options.tasks & kTaskRanks) {
      selection = select_ranks(detrend(data.y), options.c_xi);
      out.ranks = selection->ranks;
      put("kr_hat", selection->ranks.kr);
      put("kc_hat", selection->ranks.kc);
    }
    if (options.tasks & (kTaskFit | kTaskNormality)) {
      std::optional<Ranks> ranks = truth_ranks;
      if (options.fit_estimated_ranks) {
        ranks = selection ? std::optional<Ranks>(selection->ranks) : std::nullopt;
      }
      const MEFMFit fit = fit_mefm(data.y, ranks, options.c_xi);
      if (options.tasks & kTaskFit) {
        const RelativeMSE mse = relative_mse(fit, data.truth);
        put("mse_mu", or_nan(mse.mu));
        put("mse_alpha", or_nan(mse.alpha));
        put("mse_beta", or_nan(mse.beta));
        put("mse_C", or_nan(mse.common));
        const bool same_ranks = fit.ranks == truth_ranks;
        put("dist_qr", same_ranks ? linalg::space_distance(fit.qr, data.truth.qr()) : kNaN);
        put("dist_qc", same_ranks ? linalg::space_distance(fit.qc, data.truth.qc()) : kNaN);
      }
      if (options.tasks & kTaskNormality) {
        const EffectStats z = standardized_effect_stats(fit, options.normality_t, data.truth.effects);
        if (options.normality_i >= fit.rows() || options.normality_j >= fit.cols()) {
          throw UsageError("normality coordinates outside the frame");
        }
        put("z_mu", z.mu);
        put("z_alpha", z.alpha(options.normality_i));
        put("z_beta", z.beta(options.normality_j));
        if (options.normality_loading) {
          const auto [hr, hc] = rotation_h(fit, data.truth.qr(), data.truth.qc(), data.truth.fz());
          const HACCovariance hac = hac_loading(fit, Side::column, 0);
          const LoadingZ lz = loading_row_z(fit, Side::column, 0, hac, hc,
                                            data.truth.qc().row(0).transpose());
          put("z_qc", lz.z(0));
        }
      }
    }
    if (options.tasks & kTaskTest) {
      FMTestOptions test;
      test.theta = options.theta;
      test.c_xi = options.c_xi;
      if (options.test_true_ranks) test.ranks = truth_ranks;
      const TestResult r = run_fm_vs_mefm_test(data.y, test);
      put("reject_alpha", r.reject_alpha);
      put("reject_beta", r.reject_beta);
    }
    out.ok = true;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

}  // namespace

RelativeMSE relative_mse(const MeanEffects& est_effects, const MatrixSeries& est_common,
                         const MeanEffects& true_effects, const MatrixSeries& true_common) {
  const std::size_t t_len = true_effects.length();
  if (est_effects.length() != t_len || est_common.length() != t_len ||
      true_common.length() != t_len) {
    throw DataError("relative_mse: series lengths differ");
  }
  if (t_len > 0 && (est_common.rows() != true_common.rows() ||
                    est_common.cols() != true_common.cols())) {
    throw DataError("relative_mse: common component shapes differ");
  }
  double num[4] = {0, 0, 0, 0};
  double den[4] = {0, 0, 0, 0};
  for (std::size_t t = 0; t < t_len; ++t) {
    if (est_effects.alpha[t].size() != true_effects.alpha[t].size() ||
        est_effects.beta[t].size() != true_effects.beta[t].size()) {
      throw DataError("relative_mse: effect dimensions differ");
    }
    const double dm = true_effects.mu[t] - est_effects.mu[t];
    num[0] += dm * dm;
    den[0] += true_effects.mu[t] * true_effects.mu[t];
    num[1] += (true_effects.alpha[t] - est_effects.alpha[t]).squaredNorm();
    den[1] += true_effects.alpha[t].squaredNorm();
    num[2] += (true_effects.beta[t] - est_effects.beta[t]).squaredNorm();
    den[2] += true_effects.beta[t].squaredNorm();
    num[3] += (true_common[t] - est_common[t]).squaredNorm();
    den[3] += true_common[t].squaredNorm();
  }
  return {ratio(num[0], den[0]), ratio(num[1], den[1]), ratio(num[2], den[2]),
          ratio(num[3], den[3])};
}

RelativeMSE relative_mse(const MEFMFit& fit, const GroundTruth& truth) {
  return relative_mse(fit.effects, fit.common, truth.effects, truth.common);
}

Aggregate aggregate(const std::vector<double>& values) {
  std::vector<double> v;
  v.reserve(values.size());
  for (double x : values) {
    if (!std::isnan(x)) v.push_back(x);
  }
  Aggregate a;
  a.count = v.size();
  if (v.empty()) {
    a.mean = a.sd = a.median = kNaN;
    return a;
  }
  // Sorting first makes every statistic independent of replication order.
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  a.mean = sum / n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - a.mean) * (x - a.mean);
    a.sd = std::sqrt(ss / (n - 1.0));
  }
  const std::size_t mid = v.size() / 2;
  a.median = v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  return a;
}

unsigned worker_count(std::size_t jobs, std::optional<unsigned> cap) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MEFM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
  }
  if (cap) n = std::min(n, std::max(1u, *cap));
  if (jobs > 0) n = static_cast<unsigned>(std::min<std::size_t>(n, jobs));
  return std::max(1u, n);
}

ReplicationSummary run_replications(const DGPConfig& setting, std::size_t reps,
                                    std::uint64_t master_seed, const ReplicationOptions& options) {
  if (reps == 0) throw UsageError("run_replications: reps must be at least 1");
  if (options.tasks == 0) throw UsageError("run_replications: no task selected");
  validate(setting);

  std::vector<RepOutcome> outcomes(reps);
  std::atomic<std::size_t> next{0};
  std::exception_ptr usage_error;
  std::atomic<bool> abort{false};
  auto worker = [&]() {
    for (std::size_t r = next++; r < reps && !abort; r = next++) {
      try {
        outcomes[r] = run_one(setting, derive_seed(master_seed, r), options);
      } catch (...) {
        if (!abort.exchange(true)) usage_error = std::current_exception();
      }
    }
  };
  const unsigned n_workers = worker_count(reps, options.threads);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (usage_error) std::rethrow_exception(usage_error);

  ReplicationSummary s;
  s.setting = setting.name;
  s.requested = reps;
  std::map<Ranks, std::size_t> rank_counts;
  for (std::size_t r = 0; r < reps; ++r) {
    const RepOutcome& o = outcomes[r];
    if (!o.ok) {
      ++s.failures;
      s.failure_reasons.push_back("rep " + std::to_string(r) + ": " + o.error);
      continue;
    }
    ++s.reps;
    s.rep_ids.push_back(r);
    for (const auto& [name, value] : o.values) s.metrics[name].push_back(value);
    if (o.ranks) ++rank_counts[*o.ranks];
  }
  for (const auto& [name, values] : s.metrics) s.aggregates[name] = aggregate(values);
  std::size_t ranked = 0;
  for (const auto& [ranks, count] : rank_counts) ranked += count;
  for (const auto& [ranks, count] : rank_counts) {
    s.rank_frequencies[ranks] = static_cast<double>(count) / static_cast<double>(ranked);
  }
  return s;
}

std::vector<PowerPoint> power_curve(const DGPConfig& base, const std::string& param,
                                    const std::vector<double>& grid, std::size_t reps,
                                    double theta, std::uint64_t master_seed,
                                    const ReplicationOptions& options) {
  if (param != "u_alpha" && param != "u_beta" && param != "u_local_scale") {
    throw UsageError("power_curve: param must be u_alpha, u_beta or u_local_scale");
  }
  ReplicationOptions opts = options;
  opts.tasks = kTaskTest;
  opts.theta = theta;

  std::vector<PowerPoint> out;
  out.reserve(grid.size());
  for (double value : grid) {
    DGPConfig config = base;
    if (param == "u_alpha") {
      config.u_alpha = value;
    } else if (param == "u_beta") {
      config.u_beta = value;
    } else if (config.effect_law == EffectLaw::local_pattern) {
      config.u_pattern = value;
    } else {
      config.u_alpha = value;
    }
    const ReplicationSummary s = run_replications(config, reps, master_seed, opts);
    PowerPoint pt;
    pt.value = value;
    pt.reps = s.reps;
    pt.failures = s.failures;
    if (s.reps > 0) {
      const Aggregate a = s.aggregates.at("reject_alpha");
      const Aggregate b = s.aggregates.at("reject_beta");
      pt.reject_alpha = a.mean;
      pt.reject_beta = b.mean;
      pt.reject_alpha_sd = a.sd;
      pt.reject_beta_sd = b.sd;
    } else {
      pt.reject_alpha = pt.reject_beta = kNaN;
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace mefm
