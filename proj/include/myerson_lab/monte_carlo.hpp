#pragma once

// Seeded Monte Carlo kernels. Trial t always draws from trial_stream(seed, t)
// and per-trial results are folded into the accumulators in trial order, so
// the OpenMP kernels return bit-identical results to the serial reference
// kernels for every thread count.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

#include <omp.h>

#include "myerson_lab/distributions.hpp"
#include "myerson_lab/myerson.hpp"
#include "myerson_lab/random.hpp"

namespace myerson_lab {

/// Welford running mean and variance.
class Accumulator {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;

  static Estimate from(const Accumulator& a) { return {a.mean(), a.std_error(), a.count()}; }
};

struct RunOptions {
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  int threads = 0;  // 0: OpenMP default
};

inline int resolve_threads(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

/// Trials per parallel block; each block is filled in parallel and reduced in
/// order before the next starts.
inline constexpr std::size_t kTrialBlock = 1 << 14;

/// Serial reference: fn(t) -> std::array<double, N> for t = 0..trials-1.
template <std::size_t N, class TrialFn>
std::array<Accumulator, N> run_trials_serial(std::size_t trials, TrialFn&& fn) {
  std::array<Accumulator, N> acc;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::array<double, N> r = fn(t);
    for (std::size_t c = 0; c < N; ++c) acc[c].add(r[c]);
  }
  return acc;
}

/// OpenMP kernel with the same contract as run_trials_serial. fn must be safe
/// to call concurrently.
template <std::size_t N, class TrialFn>
std::array<Accumulator, N> run_trials(std::size_t trials, int threads, TrialFn&& fn) {
  std::array<Accumulator, N> acc;
  const int nt = resolve_threads(threads);
  std::vector<std::array<double, N>> block(std::min(trials, kTrialBlock));
  for (std::size_t start = 0; start < trials; start += kTrialBlock) {
    const std::size_t len = std::min(kTrialBlock, trials - start);
    std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(nt)
    for (std::size_t i = 0; i < len; ++i) {
      try {
        block[i] = fn(start + i);
      } catch (...) {
#pragma omp critical(myerson_lab_trial_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    for (std::size_t i = 0; i < len; ++i) {
      for (std::size_t c = 0; c < N; ++c) acc[c].add(block[i][c]);
    }
  }
  return acc;
}

/// Revenue and virtual welfare of one rule on shared per-trial draws. The
/// welfare estimate carries a zero-mean control variate on the upper tail of
/// unbounded bidders, which keeps its variance finite for small alpha.
struct PairedEstimate {
  Estimate revenue;
  Estimate virtual_welfare;
  /// Mean and standard error of (revenue - virtual welfare) per trial.
  Estimate difference;
};

/// Mean realized payment over `trials` bid profiles drawn from `dists`.
Estimate estimate_revenue(const AuctionRule& rule, const ProductDistribution& dists,
                          const RunOptions& opts);

/// Mean of the winner's virtual value under `dists` (0 when unsold), on the
/// same draws as estimate_revenue with equal options.
Estimate estimate_virtual_welfare(const AuctionRule& rule, const ProductDistribution& dists,
                                  const RunOptions& opts);

PairedEstimate estimate_revenue_and_welfare(const AuctionRule& rule, const ProductDistribution& dists,
                                            const RunOptions& opts);

/// Serial reference for estimate_revenue_and_welfare.
PairedEstimate estimate_revenue_and_welfare_serial(const AuctionRule& rule,
                                                   const ProductDistribution& dists,
                                                   const RunOptions& opts);

/// Two rules evaluated on common random numbers.
struct RevenueComparison {
  Estimate first;
  Estimate second;
  Estimate difference;  // first - second per trial
  /// first.mean / second.mean with a delta-method standard error.
  double ratio = 0.0;
  double ratio_std_error = 0.0;
};

RevenueComparison compare_revenue(const AuctionRule& first, const AuctionRule& second,
                                  const ProductDistribution& dists, const RunOptions& opts);

}  // namespace myerson_lab
