#include <benchmark/benchmark.h>

#include "mefm/dgp.hpp"
#include "mefm/estimation.hpp"
#include "mefm/fmtest.hpp"
#include "mefm/inference.hpp"
#include "mefm/rank.hpp"

namespace {

using namespace mefm;

Dataset make_data(Eigen::Index dim) {
  DGPConfig c = preset("Ia");
  c.p = dim;
  c.q = dim;
  c.seed = 1;
  return gen_dataset(c);
}

void BM_GenDataset(benchmark::State& state) {
  DGPConfig c = preset("Ia");
  c.p = state.range(0);
  c.q = state.range(0);
  for (auto _ : state) {
    ++c.seed;
    benchmark::DoNotOptimize(gen_dataset(c));
  }
}
BENCHMARK(BM_GenDataset)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_FitKnownRanks(benchmark::State& state) {
  const Dataset d = make_data(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_mefm(d.y, Ranks{1, 2}));
}
BENCHMARK(BM_FitKnownRanks)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_SelectRanks(benchmark::State& state) {
  const MatrixSeries l = detrend(make_data(state.range(0)).y);
  for (auto _ : state) benchmark::DoNotOptimize(select_ranks(l));
}
BENCHMARK(BM_SelectRanks)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_HacLoading(benchmark::State& state) {
  const MEFMFit fit = fit_mefm(make_data(state.range(0)).y, Ranks{1, 2});
  for (auto _ : state) benchmark::DoNotOptimize(hac_loading(fit, Side::column, 0));
}
BENCHMARK(BM_HacLoading)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_FmTest(benchmark::State& state) {
  const Dataset d = make_data(state.range(0));
  FMTestOptions o;
  o.ranks = Ranks{1, 2};
  for (auto _ : state) benchmark::DoNotOptimize(run_fm_vs_mefm_test(d.y, o));
}
BENCHMARK(BM_FmTest)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
