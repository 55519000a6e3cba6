// Serial reference vs OpenMP Monte Carlo kernels on the same workloads.

#include <benchmark/benchmark.h>

#include "myerson_lab/distributions.hpp"
#include "myerson_lab/empirical_auction.hpp"
#include "myerson_lab/monte_carlo.hpp"
#include "myerson_lab/myerson.hpp"

namespace ml = myerson_lab;

namespace {

const ml::ProductDistribution& bidders() {
  static const auto d = ml::ProductDistribution::iid(ml::parse_distribution("exponential"), 3);
  return d;
}

const ml::EmpiricalMyersonAuction& learned() {
  static const auto a = [] {
    ml::Stream rng(7);
    return ml::learn(ml::SampleMatrix::draw(bidders(), 1000, rng), 0.05);
  }();
  return a;
}

void BM_MyersonSerial(benchmark::State& state) {
  const auto rule = ml::myerson_auction(bidders());
  const ml::RunOptions opts{1, static_cast<std::size_t>(state.range(0)), 1};
  for (auto _ : state) benchmark::DoNotOptimize(ml::estimate_revenue_and_welfare_serial(rule, bidders(), opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MyersonParallel(benchmark::State& state) {
  const auto rule = ml::myerson_auction(bidders());
  const ml::RunOptions opts{1, static_cast<std::size_t>(state.range(0)), static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(ml::estimate_revenue_and_welfare(rule, bidders(), opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EmpiricalSerial(benchmark::State& state) {
  const ml::RunOptions opts{1, static_cast<std::size_t>(state.range(0)), 1};
  for (auto _ : state) benchmark::DoNotOptimize(ml::estimate_revenue_and_welfare_serial(learned(), bidders(), opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EmpiricalParallel(benchmark::State& state) {
  const ml::RunOptions opts{1, static_cast<std::size_t>(state.range(0)), static_cast<int>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(ml::estimate_revenue_and_welfare(learned(), bidders(), opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_MyersonSerial)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MyersonParallel)->Args({1 << 16, 1})->Args({1 << 16, 2})->Args({1 << 16, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmpiricalSerial)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EmpiricalParallel)->Args({1 << 16, 1})->Args({1 << 16, 2})->Args({1 << 16, 4})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
