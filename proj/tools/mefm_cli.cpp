#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mefm/dgp.hpp"
#include "mefm/errors.hpp"
#include "mefm/estimation.hpp"
#include "mefm/fmtest.hpp"
#include "mefm/harness.hpp"
#include "mefm/io.hpp"
#include "mefm/rank.hpp"

namespace fs = std::filesystem;
using namespace mefm;
using io::format_double;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kNumeric = 4 };

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw DataError("cannot create output directory '" + dir.string() + "'");
  }
}

std::string fmt_opt(double v) { return std::isnan(v) ? "NA" : format_double(v); }

unsigned parse_tasks(const std::string& spec) {
  unsigned tasks = 0;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    const std::string item =
        spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (item == "fit") {
      tasks |= kTaskFit;
    } else if (item == "ranks") {
      tasks |= kTaskRanks;
    } else if (item == "test") {
      tasks |= kTaskTest;
    } else if (item == "normality") {
      tasks |= kTaskNormality;
    } else {
      throw UsageError("unknown task '" + item + "' (expected fit, ranks, test, normality)");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return tasks;
}

unsigned default_tasks(const std::string& name) {
  if (name.starts_with("III")) return kTaskRanks;
  if (name.starts_with("IV")) return kTaskTest;
  if (name == "Ic-AR1") return kTaskNormality;
  return kTaskFit;
}

std::string metrics_csv(const ReplicationSummary& s) {
  std::vector<std::string> header{"rep"};
  for (const auto& [name, values] : s.metrics) header.push_back(name);
  io::CsvTable table(header);
  for (std::size_t k = 0; k < s.reps; ++k) {
    std::vector<std::string> row{std::to_string(s.rep_ids[k] + 1)};
    for (const auto& [name, values] : s.metrics) row.push_back(fmt_opt(values[k]));
    table.add_row(std::move(row));
  }
  return table.str();
}

std::string aggregate_csv(const ReplicationSummary& s) {
  io::CsvTable table({"setting", "metric", "mean", "sd", "median", "count", "reps", "failures"});
  for (const auto& [name, a] : s.aggregates) {
    table.add_row({s.setting, name, fmt_opt(a.mean), fmt_opt(a.sd), fmt_opt(a.median),
                   std::to_string(a.count), std::to_string(s.reps), std::to_string(s.failures)});
  }
  for (const auto& [ranks, freq] : s.rank_frequencies) {
    table.add_row({s.setting,
                   "freq(" + std::to_string(ranks.kr) + ";" + std::to_string(ranks.kc) + ")",
                   format_double(freq), "0", format_double(freq), std::to_string(s.reps),
                   std::to_string(s.reps), std::to_string(s.failures)});
  }
  return table.str();
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string setting;
  std::string config_file;
  std::size_t reps = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::optional<long> p, q, t;
  std::optional<double> tfactor;
  std::optional<double> u_alpha, u_beta, u_pattern;
  std::optional<int> u_local;
  std::string tasks;
  bool estimated_ranks = false;
  bool export_series = false;
};

int cmd_simulate(const SimulateArgs& a) {
  if (a.reps == 0) throw UsageError("--reps must be at least 1");
  DGPConfig config;
  if (!a.config_file.empty()) {
    config = parse_config(io::read_file(a.config_file));
  } else if (!a.setting.empty()) {
    config = preset(a.setting);
  } else {
    throw UsageError("one of --setting or --config is required");
  }
  if (a.p || a.q) {
    config.p = a.p.value_or(config.p);
    config.q = a.q.value_or(config.q);
  }
  if (a.tfactor) set_dimensions(config, config.p, config.q, *a.tfactor);
  if (a.t) {
    if (*a.t < 1) throw UsageError("--T must be positive");
    config.t = static_cast<std::size_t>(*a.t);
  }
  if (a.u_alpha) config.u_alpha = *a.u_alpha;
  if (a.u_beta) config.u_beta = *a.u_beta;
  if (a.u_local) config.u_local = *a.u_local;
  if (a.u_pattern) config.u_pattern = *a.u_pattern;
  validate(config);

  ReplicationOptions options;
  options.tasks = a.tasks.empty() ? default_tasks(config.name) : parse_tasks(a.tasks);
  options.fit_estimated_ranks = a.estimated_ranks;

  const fs::path out(a.out);
  ensure_dir(out);
  const ReplicationSummary s = run_replications(config, a.reps, a.seed, options);

  DGPConfig resolved = config;
  resolved.seed = a.seed;
  io::write_file_atomic(out / "config.txt", format_config(resolved));
  io::write_file_atomic(out / "metrics.csv", metrics_csv(s));
  io::write_file_atomic(out / "aggregate.csv", aggregate_csv(s));
  if (!s.failure_reasons.empty()) {
    std::string text;
    for (const auto& r : s.failure_reasons) text += r + '\n';
    io::write_file_atomic(out / "failures.txt", text);
  }
  if (a.export_series) {
    DGPConfig first = config;
    first.seed = derive_seed(a.seed, 0);
    io::save_series(out / "series.csv", gen_dataset(first).y);
  }
  std::cout << "setting " << config.name << ": " << s.reps << " reps, " << s.failures
            << " failures\n";
  for (const auto& [ranks, freq] : s.rank_frequencies) {
    std::cout << "freq(" << ranks.kr << "," << ranks.kc << ") = " << format_double(freq) << '\n';
  }
  return kOk;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
  std::string input;
  std::optional<int> kr, kc;
  bool auto_rank = false;
  double c_xi = kDefaultXiScale;
  std::string out;
};

int cmd_fit(const FitArgs& a) {
  if (a.auto_rank == (a.kr.has_value() || a.kc.has_value())) {
    throw UsageError("give either --kr and --kc, or --auto-rank");
  }
  if (!a.auto_rank && !(a.kr && a.kc)) throw UsageError("--kr and --kc must be given together");
  const MatrixSeries y = io::load_series(a.input);
  std::optional<Ranks> ranks;
  if (!a.auto_rank) ranks = Ranks{*a.kr, *a.kc};
  const MEFMFit fit = fit_mefm(y, ranks, a.c_xi);
  const RankSelection sel =
      fit.rank_selection ? *fit.rank_selection : select_ranks(detrend(y), a.c_xi);

  const fs::path out(a.out);
  ensure_dir(out);
  const std::size_t t_len = fit.length();

  io::CsvTable mu({"t", "mu"});
  Matrix alpha(static_cast<Eigen::Index>(t_len), fit.rows());
  Matrix beta(static_cast<Eigen::Index>(t_len), fit.cols());
  io::CsvTable resid({"t", "rms", "row_max", "col_max"});
  for (std::size_t t = 0; t < t_len; ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    mu.add_row({std::to_string(t + 1), format_double(fit.effects.mu[t])});
    alpha.row(ti) = fit.effects.alpha[t].transpose();
    beta.row(ti) = fit.effects.beta[t].transpose();
    const Matrix& e = fit.residual[t];
    const double pq = static_cast<double>(e.size());
    resid.add_row({std::to_string(t + 1), format_double(std::sqrt(e.squaredNorm() / pq)),
                   format_double(e.rowwise().squaredNorm().maxCoeff() / double(e.cols())),
                   format_double(e.colwise().squaredNorm().maxCoeff() / double(e.rows()))});
  }
  io::CsvTable eig({"side", "index", "eigenvalue", "ratio"});
  auto add_eigs = [&eig](const char* side, const std::vector<double>& v,
                         const std::vector<double>& r) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      eig.add_row({side, std::to_string(k + 1), format_double(v[k]),
                   k < r.size() ? format_double(r[k]) : "NA"});
    }
  };
  add_eigs("row", sel.eigenvalues_row, sel.ratios_row);
  add_eigs("col", sel.eigenvalues_col, sel.ratios_col);

  io::write_file_atomic(out / "mu.csv", mu.str());
  io::write_file_atomic(out / "alpha.csv", io::matrix_csv(alpha, "t"));
  io::write_file_atomic(out / "beta.csv", io::matrix_csv(beta, "t"));
  io::write_file_atomic(out / "loadings_r.csv", io::matrix_csv(fit.qr, "i"));
  io::write_file_atomic(out / "loadings_c.csv", io::matrix_csv(fit.qc, "j"));
  io::write_file_atomic(out / "eigvals.csv", eig.str());
  io::write_file_atomic(out / "residual_summary.csv", resid.str());

  std::cout << "ranks kr=" << fit.ranks.kr << " kc=" << fit.ranks.kc
            << (a.auto_rank ? " (estimated)" : "") << '\n';
  if (fit.status == FitStatus::degenerate) std::cout << "warning: degenerate loadings\n";
  if (sel.scale_warning) std::cout << "warning: " << sel.warning << '\n';
  return kOk;
}

// -------------------------------------------------------------------- test

struct TestArgs {
  std::string input;
  double theta = 0.95;
  std::optional<int> kr, kc;
  std::string out;
};

int cmd_test(const TestArgs& a) {
  if (a.kr.has_value() != a.kc.has_value()) throw UsageError("--kr and --kc go together");
  const MatrixSeries y = io::load_series(a.input);
  FMTestOptions options;
  options.theta = a.theta;
  if (a.kr) options.ranks = Ranks{*a.kr, *a.kc};
  const TestResult r = run_fm_vs_mefm_test(y, options);

  const fs::path out(a.out);
  ensure_dir(out);
  io::CsvTable stats({"t", "x_alpha", "y_alpha", "x_beta", "y_beta"});
  for (std::size_t t = 0; t < r.x_alpha.size(); ++t) {
    stats.add_row({std::to_string(t + 1), format_double(r.x_alpha[t]),
                   format_double(r.y_alpha[t]), format_double(r.x_beta[t]),
                   format_double(r.y_beta[t])});
  }
  io::CsvTable summary({"theta", "q_x_alpha", "q_x_beta", "reject_alpha", "reject_beta", "kr",
                        "kc", "lr", "lc"});
  summary.add_row({format_double(r.theta), format_double(r.q_x_alpha), format_double(r.q_x_beta),
                   format_double(r.reject_alpha), format_double(r.reject_beta),
                   std::to_string(r.ranks.kr), std::to_string(r.ranks.kc),
                   std::to_string(r.fm_ranks.kr), std::to_string(r.fm_ranks.kc)});
  io::write_file_atomic(out / "statistics.csv", stats.str());
  io::write_file_atomic(out / "summary.csv", summary.str());
  std::cout << "reject_alpha=" << format_double(r.reject_alpha)
            << " reject_beta=" << format_double(r.reject_beta) << '\n';
  return kOk;
}

// --------------------------------------------------------------- reproduce

struct ReproduceArgs {
  std::string target;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  std::string out;
};

std::string freq_of(const ReplicationSummary& s, int kr, int kc) {
  const auto it = s.rank_frequencies.find(Ranks{kr, kc});
  return format_double(it == s.rank_frequencies.end() ? 0.0 : it->second);
}

int reproduce_table1(const ReproduceArgs& a, const fs::path& out, std::string& notes) {
  // Reference (3,3) frequencies at 1000 reps, indexed [setting][dims][tfactor].
  const double reference[3][3][2] = {{{0.583, 0.659}, {0.833, 0.855}, {0.999, 0.995}},
                                     {{0.136, 0.17}, {0.289, 0.347}, {0.556, 0.637}},
                                     {{0.073, 0.096}, {0.209, 0.257}, {0.614, 0.646}}};
  const std::pair<long, long> dims[3] = {{10, 10}, {10, 20}, {20, 20}};
  const double factors[2] = {0.5, 1.0};
  const char* names[3] = {"IIIa", "IIIb", "IIIc"};
  io::CsvTable table({"setting", "p", "q", "T", "freq_2_3", "freq_3_2", "freq_3_3",
                      "freq_other", "reference_3_3", "delta_3_3", "reps", "failures"});
  ReplicationOptions options;
  options.tasks = kTaskRanks;
  for (int s = 0; s < 3; ++s) {
    for (int d = 0; d < 3; ++d) {
      for (int f = 0; f < 2; ++f) {
        DGPConfig c = preset(names[s]);
        set_dimensions(c, dims[d].first, dims[d].second, factors[f]);
        const ReplicationSummary r = run_replications(c, a.reps, a.seed, options);
        double other = 1.0;
        for (const auto& [ranks, freq] : r.rank_frequencies) {
          if (ranks == Ranks{2, 3} || ranks == Ranks{3, 2} || ranks == Ranks{3, 3}) other -= freq;
        }
        const auto it = r.rank_frequencies.find(Ranks{3, 3});
        const double f33 = it == r.rank_frequencies.end() ? 0.0 : it->second;
        const double ref = reference[s][d][f];
        table.add_row({names[s], std::to_string(c.p), std::to_string(c.q), std::to_string(c.t),
                       freq_of(r, 2, 3), freq_of(r, 3, 2), format_double(f33),
                       format_double(std::max(0.0, other)), format_double(ref),
                       format_double(f33 - ref), std::to_string(r.reps),
                       std::to_string(r.failures)});
      }
    }
  }
  io::write_file_atomic(out / "table1.csv", table.str());
  notes += "table1.csv: rank-pair frequencies for IIIa-IIIc over (p,q) in {(10,10),(10,20),"
           "(20,20)} and T in {0.5pq, pq}. reference_3_3 holds the reference 1000-rep "
           "frequency of (3,3); delta_3_3 = desk - reference.\n";
  return kOk;
}

int reproduce_table2(const ReproduceArgs& a, const fs::path& out, std::string& notes) {
  struct Column {
    const char* setting;
    const char* param;
    double value;
    double ref_alpha;
    double ref_beta;
  };
  const Column columns[] = {
      {"IVa", "u_alpha", 0.0, 0.05, 0.05},  {"IVa", "u_alpha", 0.1, 0.11, 0.11},
      {"IVa", "u_alpha", 0.5, 0.63, 0.52},  {"IVa", "u_alpha", 1.0, 0.96, 0.87},
      {"IVb", "u_beta", 0.1, 0.13, 0.13},   {"IVb", "u_beta", 0.5, 0.53, 0.62},
      {"IVb", "u_beta", 1.0, 0.86, 0.96},   {"IVc", "u_local", 2, 0.37, 0.14},
      {"IVc", "u_local", 5, 0.77, 0.28},    {"IVc", "u_local", 10, 0.85, 0.48},
  };
  io::CsvTable table({"setting", "param", "value", "reject_alpha_mean", "reject_alpha_sd",
                      "reject_beta_mean", "reject_beta_sd", "reference_alpha", "reference_beta",
                      "delta_alpha", "delta_beta", "reps", "failures"});
  ReplicationOptions options;
  options.tasks = kTaskTest;
  for (const Column& col : columns) {
    DGPConfig c = preset(col.setting);
    const std::string param = col.param;
    if (param == "u_alpha") {
      c.u_alpha = col.value;
    } else if (param == "u_beta") {
      c.u_beta = col.value;
    } else {
      c.u_local = static_cast<int>(col.value);
    }
    const ReplicationSummary r = run_replications(c, a.reps, a.seed, options);
    const Aggregate ra = r.aggregates.at("reject_alpha");
    const Aggregate rb = r.aggregates.at("reject_beta");
    table.add_row({col.setting, col.param, format_double(col.value), format_double(ra.mean),
                   format_double(ra.sd), format_double(rb.mean), format_double(rb.sd),
                   format_double(col.ref_alpha), format_double(col.ref_beta),
                   format_double(ra.mean - col.ref_alpha), format_double(rb.mean - col.ref_beta),
                   std::to_string(r.reps), std::to_string(r.failures)});
  }
  io::write_file_atomic(out / "table2.csv", table.str());
  notes += "table2.csv: mean and sd of reject_alpha/reject_beta for IVa (u_alpha), IVb "
           "(u_beta, u_alpha = 0.1) and IVc (u_local, u_alpha = 1) at (T,p,q)=(40,40,40), "
           "theta = 0.95. The reference columns are 400-rep reference means.\n";
  return kOk;
}

int reproduce_fig_power(const ReproduceArgs& a, const fs::path& out, std::string& notes) {
  io::CsvTable table({"curve", "value", "reject_alpha", "reject_beta", "reps", "failures"});
  DGPConfig global = preset("IVa");
  global.t = 60;
  global.p = 80;
  global.q = 80;
  const std::vector<double> grid_global{0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0};
  for (const PowerPoint& pt : power_curve(global, "u_alpha", grid_global, a.reps, 0.95, a.seed)) {
    table.add_row({"global", format_double(pt.value), format_double(pt.reject_alpha),
                   format_double(pt.reject_beta), std::to_string(pt.reps),
                   std::to_string(pt.failures)});
  }
  const DGPConfig local = preset("IVc-pattern");
  const std::vector<double> grid_local{0.0, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0};
  for (const PowerPoint& pt :
       power_curve(local, "u_local_scale", grid_local, a.reps, 0.95, a.seed)) {
    table.add_row({"local", format_double(pt.value), format_double(pt.reject_alpha),
                   format_double(pt.reject_beta), std::to_string(pt.reps),
                   std::to_string(pt.failures)});
  }
  io::write_file_atomic(out / "fig_power.csv", table.str());
  notes += "fig_power.csv: power curves at (T,p,q)=(60,80,80); 'global' varies u_alpha "
           "under IVa, 'local' varies the scale of the fixed three-entry alpha pattern. The "
           "reference curves start near 0.05 and approach 1.\n";
  return kOk;
}

int reproduce_fig_consistency(const ReproduceArgs& a, const fs::path& out, std::string& notes) {
  io::CsvTable table(
      {"setting", "rep", "mse_mu", "mse_alpha", "mse_beta", "mse_C", "dist_qr", "dist_qc"});
  ReplicationOptions options;
  options.tasks = kTaskFit;
  for (const char* name : {"Ia", "Ib", "Ic", "Id", "Ie", "IIa", "IIb", "IIc", "IId", "IIe"}) {
    const ReplicationSummary r = run_replications(preset(name), a.reps, a.seed, options);
    for (std::size_t k = 0; k < r.reps; ++k) {
      table.add_row({name, std::to_string(r.rep_ids[k] + 1), fmt_opt(r.metrics.at("mse_mu")[k]),
                     fmt_opt(r.metrics.at("mse_alpha")[k]), fmt_opt(r.metrics.at("mse_beta")[k]),
                     fmt_opt(r.metrics.at("mse_C")[k]), fmt_opt(r.metrics.at("dist_qr")[k]),
                     fmt_opt(r.metrics.at("dist_qc")[k])});
    }
  }
  io::write_file_atomic(out / "fig_consistency.csv", table.str());
  notes += "fig_consistency.csv: per-rep relative MSEs and loading space distances for "
           "Ia-Ie and IIa-IIe with the true ranks, one row per replication for boxplots.\n";
  return kOk;
}

int reproduce_fig_hist(const ReproduceArgs& a, const fs::path& out, std::string& notes) {
  io::CsvTable table({"panel", "rep", "value"});
  struct Panel {
    const char* metric;
    long t, p, q;
    bool loading;
  };
  const Panel panels[] = {{"z_mu", 80, 100, 100, false},
                          {"z_alpha", 60, 60, 300, true},
                          {"z_beta", 60, 300, 60, false}};
  for (const Panel& panel : panels) {
    DGPConfig c = preset("Ic-AR1");
    c.t = static_cast<std::size_t>(panel.t);
    c.p = panel.p;
    c.q = panel.q;
    ReplicationOptions options;
    options.tasks = kTaskNormality;
    options.normality_loading = panel.loading;
    const ReplicationSummary r = run_replications(c, a.reps, a.seed, options);
    for (const char* metric : {panel.metric, panel.loading ? "z_qc" : nullptr}) {
      if (metric == nullptr) continue;
      const auto& values = r.metrics.at(metric);
      for (std::size_t k = 0; k < r.reps; ++k) {
        table.add_row({metric, std::to_string(r.rep_ids[k] + 1), fmt_opt(values[k])});
      }
    }
  }
  io::write_file_atomic(out / "fig_hist.csv", table.str());
  notes += "fig_hist.csv: standardized statistics at t = 10 under AR(1) coefficient -0.2 with "
           "t3 innovations: z_mu at (80,100,100), z_alpha (third row effect) and z_qc (first "
           "entry of row 1 of the column loadings) at (60,60,300), z_beta at (60,300,60). The "
           "reference histograms use 400 reps and should match N(0,1).\n";
  return kOk;
}

int cmd_reproduce(const ReproduceArgs& a) {
  if (a.reps == 0) throw UsageError("--reps must be at least 1");
  const fs::path out(a.out);
  ensure_dir(out);
  std::string notes = "Reproduction at " + std::to_string(a.reps) + " replications, seed " +
                      std::to_string(a.seed) + ".\nReference values use 400 to 1000 "
                      "replications; desk-scale deltas reflect Monte Carlo error of order "
                      "1/sqrt(reps).\n\n";
  int code = kOk;
  if (a.target == "table1") {
    code = reproduce_table1(a, out, notes);
  } else if (a.target == "table2") {
    code = reproduce_table2(a, out, notes);
  } else if (a.target == "fig_power") {
    code = reproduce_fig_power(a, out, notes);
  } else if (a.target == "fig_consistency") {
    code = reproduce_fig_consistency(a, out, notes);
  } else if (a.target == "fig_hist") {
    code = reproduce_fig_hist(a, out, notes);
  } else {
    throw UsageError("unknown target '" + a.target + "'");
  }
  io::write_file_atomic(out / ("NOTES_" + a.target + ".md"), notes);
  std::cout << "wrote " << (out / (a.target + ".csv")).string() << '\n';
  return code;
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Main effects matrix factor model: simulation, fitting and testing", "mefm"};
  app.require_subcommand(0, 1);
  bool dump_config = false;
  std::string dump_setting;
  app.add_flag("--dump-config", dump_config, "Print every DGP knob with its default and exit");
  app.add_option("--dump-setting", dump_setting, "With --dump-config, start from a named setting");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run Monte Carlo replications of a setting");
  auto* sim_setting = simulate->add_option("--setting", sim.setting, "Named setting");
  simulate->add_option("--config", sim.config_file, "key=value config file")
      ->excludes(sim_setting);
  simulate->add_option("--reps", sim.reps, "Replications")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "Master seed (64-bit unsigned)");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--p", sim.p, "Row dimension");
  simulate->add_option("--q", sim.q, "Column dimension");
  simulate->add_option("--T", sim.t, "Series length");
  simulate->add_option("--tfactor", sim.tfactor, "Set T = tfactor * p * q");
  simulate->add_option("--u-alpha", sim.u_alpha, "Row effect signal size");
  simulate->add_option("--u-beta", sim.u_beta, "Column effect signal size");
  simulate->add_option("--u-local", sim.u_local, "Non-zero row effect entries");
  simulate->add_option("--u-pattern", sim.u_pattern, "Scale of the local row effect pattern");
  simulate->add_option("--tasks", sim.tasks, "Comma list of fit,ranks,test,normality");
  simulate->add_flag("--estimated-ranks", sim.estimated_ranks, "Fit with estimated ranks");
  simulate->add_flag("--export", sim.export_series, "Also write series.csv for replication 1");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the model to a long-format series CSV");
  fit_cmd->add_option("--input", fit.input, "Series CSV (t,i,j,value)")->required();
  fit_cmd->add_option("--kr", fit.kr, "Row core rank");
  fit_cmd->add_option("--kc", fit.kc, "Column core rank");
  fit_cmd->add_flag("--auto-rank", fit.auto_rank, "Estimate the core ranks");
  fit_cmd->add_option("--c-xi", fit.c_xi, "Rank ratio perturbation multiplier");
  fit_cmd->add_option("--out", fit.out, "Output directory")->required();

  TestArgs test;
  auto* test_cmd = app.add_subcommand("test", "Test whether a plain factor model suffices");
  test_cmd->add_option("--input", test.input, "Series CSV (t,i,j,value)")->required();
  test_cmd->add_option("--theta", test.theta, "Quantile level");
  test_cmd->add_option("--kr", test.kr, "Row core rank (estimated when omitted)");
  test_cmd->add_option("--kc", test.kc, "Column core rank (estimated when omitted)");
  test_cmd->add_option("--out", test.out, "Output directory")->required();

  ReproduceArgs rep;
  auto* rep_cmd = app.add_subcommand("reproduce", "Regenerate a simulation table or figure");
  rep_cmd->add_option("--target", rep.target, "table1|table2|fig_power|fig_consistency|fig_hist")
      ->required();
  rep_cmd->add_option("--reps", rep.reps, "Replications (>= 1)");
  rep_cmd->add_option("--seed", rep.seed, "Master seed");
  rep_cmd->add_option("--out", rep.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << one_line(e.what()) << '\n';
    return kUsage;
  }

  try {
    if (dump_config) {
      std::cout << format_config(dump_setting.empty() ? DGPConfig{} : preset(dump_setting));
      return kOk;
    }
    if (simulate->parsed()) return cmd_simulate(sim);
    if (fit_cmd->parsed()) return cmd_fit(fit);
    if (test_cmd->parsed()) return cmd_test(test);
    if (rep_cmd->parsed()) return cmd_reproduce(rep);
    std::cerr << "error: no command given (simulate, fit, test, reproduce, --dump-config)\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: data: " << one_line(e.what()) << '\n';
    return kData;
  } catch (const NumericError& e) {
    std::cerr << "error: numeric: " << one_line(e.what()) << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: data: " << one_line(e.what()) << '\n';
    return kData;
  }
}
