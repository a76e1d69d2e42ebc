#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "epkit/filter.hpp"
#include "epkit/preprocess.hpp"
#include "epkit/stats.hpp"
#include "epkit/synth.hpp"
#include "epkit/timefreq.hpp"

namespace {

constexpr double kFs = 19200.0;

std::vector<double> noisy(std::size_t n, std::uint64_t seed) {
  epkit::Rng rng(seed);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = 50.0 * std::sin(2 * std::numbers::pi * 50.0 * static_cast<double>(i) / kFs) + rng.normal(0.0, 20.0);
  return x;
}

void BM_BandPassFiltfilt(benchmark::State& state) {
  const auto x = noisy(static_cast<std::size_t>(state.range(0)), 1);
  const auto f = epkit::design_butterworth(epkit::FilterSpec::band_pass(1.0, 1000.0, 2), kFs);
  for (auto _ : state) benchmark::DoNotOptimize(f.filtfilt(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BandPassFiltfilt)->Arg(19200)->Arg(192000);

void BM_LineTemplate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const epkit::SignalBuffer buffer({noisy(n, 2)}, kFs, {"ch1"});
  for (auto _ : state) benchmark::DoNotOptimize(epkit::estimate_line_template(buffer, "ch1"));
}
BENCHMARK(BM_LineTemplate)->Arg(192000);

void BM_Stft(benchmark::State& state) {
  epkit::EpochSet set;
  set.grid = epkit::EpochGrid::make(set.window, kFs);
  for (std::uint64_t k = 0; k < 30; ++k) set.epochs.push_back(noisy(set.grid.length, 10 + k));
  for (auto _ : state) benchmark::DoNotOptimize(epkit::stft_power_db(set));
}
BENCHMARK(BM_Stft);

void BM_RankSum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = noisy(n, 4);
  const auto b = noisy(n, 5);
  for (auto _ : state) benchmark::DoNotOptimize(epkit::rank_sum(a, b, epkit::Alternative::two_sided));
}
BENCHMARK(BM_RankSum)->Arg(9)->Arg(20)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
