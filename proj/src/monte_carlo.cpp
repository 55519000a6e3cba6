#include "myerson_lab/monte_carlo.hpp"

#include <limits>
#include <utility>

#include "myerson_lab/errors.hpp"

namespace myerson_lab {

namespace {

void check_shape(const AuctionRule& rule, const ProductDistribution& dists, const RunOptions& opts) {
  if (rule.bidder_count() != dists.size()) {
    throw ParameterError("auction rule and distributions disagree on the number of bidders");
  }
  if (opts.trials < 1) throw ParameterError("trials must be at least 1");
}

// Upper-tail cut for the welfare control variate.
constexpr double kTailQuantile = 0.01;

// Per-bidder cut t and P(V >= t), or t = inf for bidders left alone.
// Only untruncated base laws with alpha > 0 get one: they are unbounded
// (infinite variance below alpha = 1/2) yet have a finite mean, so
// E[phi(V) 1{V >= t}] = t P(V >= t) holds.
std::vector<std::pair<double, double>> tail_cuts(const ProductDistribution& dists) {
  std::vector<std::pair<double, double>> cuts(dists.size(), {std::numeric_limits<double>::infinity(), 0.0});
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const auto* base = dynamic_cast<const StronglyRegularBase*>(&dists[i]);
    if (base && base->alpha() > 0.0) {
      const double t = base->quantile_to_value(kTailQuantile);
      cuts[i] = {t, base->value_to_quantile(t)};
    }
  }
  return cuts;
}

// (payment, winner's virtual value, difference) for one trial. The welfare
// term subtracts the zero-mean tail control sum_i phi_i(v_i) 1{v_i >= t_i} -
// t_i P(V_i >= t_i); a huge bid almost always wins, so the heavy tail cancels.
auto revenue_welfare_trial(const AuctionRule& rule, const ProductDistribution& dists, std::uint64_t seed) {
  return [&rule, &dists, seed, cuts = tail_cuts(dists)](std::size_t t) -> std::array<double, 3> {
    Stream rng = trial_stream(seed, t);
    thread_local std::vector<double> bids;
    bids.resize(dists.size());
    dists.sample(rng, bids);
    const AuctionOutcome o = rule.run(bids);
    double vw = o.winner ? dists[*o.winner].virtual_value(bids[*o.winner]) : 0.0;
    for (std::size_t i = 0; i < bids.size(); ++i) {
      const auto [cut, tail] = cuts[i];
      if (tail == 0.0) continue;
      if (bids[i] >= cut) vw -= dists[i].virtual_value(bids[i]);
      vw += cut * tail;
    }
    return {o.payment, vw, o.payment - vw};
  };
}

PairedEstimate to_paired(const std::array<Accumulator, 3>& acc) {
  return {Estimate::from(acc[0]), Estimate::from(acc[1]), Estimate::from(acc[2])};
}

}  // namespace

PairedEstimate estimate_revenue_and_welfare(const AuctionRule& rule, const ProductDistribution& dists,
                                            const RunOptions& opts) {
  check_shape(rule, dists, opts);
  return to_paired(run_trials<3>(opts.trials, opts.threads, revenue_welfare_trial(rule, dists, opts.seed)));
}

PairedEstimate estimate_revenue_and_welfare_serial(const AuctionRule& rule,
                                                   const ProductDistribution& dists,
                                                   const RunOptions& opts) {
  check_shape(rule, dists, opts);
  return to_paired(run_trials_serial<3>(opts.trials, revenue_welfare_trial(rule, dists, opts.seed)));
}

Estimate estimate_revenue(const AuctionRule& rule, const ProductDistribution& dists,
                          const RunOptions& opts) {
  return estimate_revenue_and_welfare(rule, dists, opts).revenue;
}

Estimate estimate_virtual_welfare(const AuctionRule& rule, const ProductDistribution& dists,
                                  const RunOptions& opts) {
  return estimate_revenue_and_welfare(rule, dists, opts).virtual_welfare;
}

RevenueComparison compare_revenue(const AuctionRule& first, const AuctionRule& second,
                                  const ProductDistribution& dists, const RunOptions& opts) {
  check_shape(first, dists, opts);
  check_shape(second, dists, opts);
  const auto acc = run_trials<3>(opts.trials, opts.threads, [&](std::size_t t) -> std::array<double, 3> {
    Stream rng = trial_stream(opts.seed, t);
    thread_local std::vector<double> bids;
    bids.resize(dists.size());
    dists.sample(rng, bids);
    const double a = first.run(bids).payment;
    const double b = second.run(bids).payment;
    return {a, b, a - b};
  });
  RevenueComparison out{Estimate::from(acc[0]), Estimate::from(acc[1]), Estimate::from(acc[2])};
  if (acc[1].mean() > 0.0) {
    const double r = acc[0].mean() / acc[1].mean();
    const double cov = 0.5 * (acc[0].variance() + acc[1].variance() - acc[2].variance());
    const double resid_var = std::max(0.0, acc[0].variance() + r * r * acc[1].variance() - 2.0 * r * cov);
    out.ratio = r;
    out.ratio_std_error =
        std::sqrt(resid_var / static_cast<double>(acc[0].count())) / acc[1].mean();
  }
  return out;
}

}  // namespace myerson_lab
