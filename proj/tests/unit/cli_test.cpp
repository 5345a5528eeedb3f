#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mefm/dgp.hpp"
#include "mefm/estimation.hpp"
#include "mefm/io.hpp"

namespace mefm {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mefm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) {
    const std::string cmd = std::string(MEFM_CLI_PATH) + " " + args + " >" +
                            (dir_ / "stdout.txt").string() + " 2>" +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string file(const fs::path& p) const { return io::read_file(dir_ / p); }
  std::string path(const fs::path& p) const { return (dir_ / p).string(); }

  fs::path dir_;
};

TEST_F(Cli, SimulateIsReproducible) {
  const std::string common = "simulate --setting IIa --reps 3 --seed 42 --p 8 --q 8 --T 20 ";
  ASSERT_EQ(run(common + "--out " + path("a")), 0) << file("stderr.txt");
  ASSERT_EQ(run(common + "--out " + path("b")), 0);
  for (const char* f : {"metrics.csv", "aggregate.csv", "config.txt"}) {
    EXPECT_EQ(file(fs::path("a") / f), file(fs::path("b") / f)) << f;
  }
  ASSERT_EQ(run("simulate --setting IIa --reps 3 --seed 43 --p 8 --q 8 --T 20 --out " + path("c")),
            0);
  EXPECT_NE(file("a/metrics.csv"), file("c/metrics.csv"));
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("simulate --setting Ia --reps 0 --out " + path("x")), 2);
  EXPECT_EQ(run("simulate --setting nope --reps 1 --out " + path("x")), 2);
  EXPECT_EQ(run("reproduce --target table1 --reps 0 --out " + path("x")), 2);
  EXPECT_EQ(run("reproduce --target table9 --reps 1 --out " + path("x")), 2);
  EXPECT_EQ(run(""), 2);
  const std::string err = file("stderr.txt");
  EXPECT_EQ(err.rfind("error: ", 0), 0u);
  EXPECT_EQ(err.find('\n'), err.size() - 1);
}

TEST_F(Cli, MissingCellIsDataError) {
  io::write_file_atomic(dir_ / "bad.csv", "t,i,j,value\n1,1,1,0\n1,1,2,0\n1,2,1,0\n");
  EXPECT_EQ(run("fit --input " + path("bad.csv") + " --kr 1 --kc 1 --out " + path("o")), 3);
  EXPECT_NE(file("stderr.txt").find("(t,i,j)=(1,2,2)"), std::string::npos);
  EXPECT_EQ(run("fit --input " + path("none.csv") + " --kr 1 --kc 1 --out " + path("o")), 3);
}

TEST_F(Cli, ConstantInputGivesConstantMean) {
  std::ostringstream csv;
  io::write_series_csv(csv, MatrixSeries(std::vector<Matrix>(5, Matrix::Constant(4, 3, 2.5))));
  io::write_file_atomic(dir_ / "const.csv", csv.str());
  ASSERT_EQ(run("fit --input " + path("const.csv") + " --kr 1 --kc 1 --out " + path("o")), 0)
      << file("stderr.txt");
  EXPECT_EQ(file("o/mu.csv"), "t,mu\n1,2.5\n2,2.5\n3,2.5\n4,2.5\n5,2.5\n");
  std::istringstream alpha(file("o/alpha.csv"));
  std::string line;
  std::getline(alpha, line);
  while (std::getline(alpha, line)) {
    EXPECT_EQ(line.substr(line.find(',')), ",0,0,0,0");
  }
}

TEST_F(Cli, ExportedSeriesRefitsIdentically) {
  ASSERT_EQ(run("simulate --setting Ia --reps 1 --seed 7 --p 10 --q 12 --T 30 --export --out " +
                path("sim")),
            0)
      << file("stderr.txt");
  ASSERT_EQ(run("fit --input " + path("sim/series.csv") + " --kr 1 --kc 2 --out " + path("fit")),
            0)
      << file("stderr.txt");
  const MatrixSeries y = io::load_series(dir_ / "sim" / "series.csv");
  const MEFMFit fit = fit_mefm(y, Ranks{1, 2});
  std::string expect = "t,mu\n";
  for (std::size_t t = 0; t < fit.length(); ++t) {
    expect += std::to_string(t + 1) + "," + io::format_double(fit.effects.mu[t]) + "\n";
  }
  EXPECT_EQ(file("fit/mu.csv"), expect);
  EXPECT_EQ(file("fit/loadings_c.csv"), io::matrix_csv(fit.qc, "j"));

  DGPConfig c = preset("Ia");
  c.p = 10;
  c.q = 12;
  c.t = 30;
  c.seed = derive_seed(7, 0);
  const MatrixSeries direct = gen_dataset(c).y;
  for (std::size_t t = 0; t < direct.length(); ++t) EXPECT_EQ(direct[t], y[t]);
}

TEST_F(Cli, AutoRankAndTest) {
  DGPConfig c = preset("IVa");
  c.p = 12;
  c.q = 12;
  c.t = 21;
  c.seed = 3;
  std::ostringstream csv;
  io::write_series_csv(csv, gen_dataset(c).y);
  io::write_file_atomic(dir_ / "y.csv", csv.str());
  ASSERT_EQ(run("fit --input " + path("y.csv") + " --auto-rank --out " + path("f")), 0);
  EXPECT_NE(file("stdout.txt").find("(estimated)"), std::string::npos);
  EXPECT_EQ(run("fit --input " + path("y.csv") + " --auto-rank --kr 1 --kc 1 --out " + path("f")),
            2);
  ASSERT_EQ(run("test --input " + path("y.csv") + " --theta 0.5 --kr 1 --kc 1 --out " + path("t")),
            0);
  EXPECT_EQ(file("t/summary.csv").rfind("theta,q_x_alpha", 0), 0u);
  EXPECT_EQ(run("test --input " + path("y.csv") + " --theta 1.5 --out " + path("t")), 2);
}

TEST_F(Cli, DumpConfigRoundTrips) {
  ASSERT_EQ(run("--dump-config --dump-setting IVb"), 0);
  const DGPConfig parsed = parse_config(file("stdout.txt"));
  EXPECT_EQ(format_config(parsed), format_config(preset("IVb")));
  io::write_file_atomic(dir_ / "cfg.txt", file("stdout.txt"));
  EXPECT_EQ(run("simulate --config " + path("cfg.txt") + " --p 8 --q 8 --T 10 --reps 1 --out " +
                path("s")),
            0)
      << file("stderr.txt");
}

}  // namespace
}  // namespace mefm
