#include "myerson_lab/lower_bound.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "myerson_lab/empirical_auction.hpp"
#include "myerson_lab/errors.hpp"
#include "myerson_lab/text.hpp"

namespace myerson_lab {

namespace {

constexpr double kE3 = std::numbers::e * std::numbers::e * std::numbers::e;

}  // namespace

void check_lower_bound_params(std::size_t k, double alpha, double delta) {
  if (k < 2) throw ParameterError("lower-bound instances need k >= 2 bidders");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0, 1], got " + format_real(alpha));
  if (!(delta > 0.0 && delta <= 1.0)) throw ParameterError("delta must lie in (0, 1], got " + format_real(delta));
}

AdversarialInstance make_instance(std::size_t k, double alpha, double delta, std::vector<BidderType> types,
                                  std::span<const double> b_quantiles) {
  check_lower_bound_params(k, alpha, delta);
  if (types.size() != k || b_quantiles.size() != k) {
    throw ParameterError("instance needs one type and one quantile per bidder");
  }
  const double lo = delta / (2.0 * static_cast<double>(k));
  const double hi = delta / static_cast<double>(k);
  std::vector<double> qs(k);
  std::vector<double> H(k);
  std::vector<DistributionPtr> dists;
  dists.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    qs[i] = types[i] == BidderType::A ? lo : b_quantiles[i];
    if (!(qs[i] >= lo && qs[i] <= hi)) {
      throw ParameterError("type-B truncation quantile " + format_real(qs[i]) + " outside [delta/2k, delta/k]");
    }
    auto d = std::make_shared<const TruncatedDistribution>(TruncatedDistribution::at_quantile(alpha, qs[i]));
    H[i] = d->truncation_value();
    dists.push_back(std::move(d));
  }
  return AdversarialInstance{k, alpha, delta, std::move(types), std::move(qs), std::move(H),
                             ProductDistribution(std::move(dists))};
}

AdversarialInstance sample_instance(std::size_t k, double alpha, double delta, Stream& rng,
                                    std::optional<BidderType> forced) {
  check_lower_bound_params(k, alpha, delta);
  const double lo = delta / (2.0 * static_cast<double>(k));
  const double hi = delta / static_cast<double>(k);
  std::vector<BidderType> types(k);
  std::vector<double> qs(k, lo);
  for (std::size_t i = 0; i < k; ++i) {
    types[i] = forced ? *forced : (rng.coin() ? BidderType::B : BidderType::A);
    if (types[i] == BidderType::B) qs[i] = rng.uniform(lo, hi);
  }
  return make_instance(k, alpha, delta, std::move(types), qs);
}

EventERecord detect_event_E(const AdversarialInstance& instance, std::span<const double> quantiles, std::size_t m) {
  const std::size_t k = instance.k;
  if (quantiles.size() != (m + 1) * k) {
    throw MalformedInput("quantile matrix has " + std::to_string(quantiles.size()) + " entries, expected (m+1)*k = " +
                         std::to_string((m + 1) * k));
  }
  for (double q : quantiles) {
    if (!(q > 0.0 && q < 1.0)) throw MalformedInput("quantile draws must lie in (0, 1), got " + format_real(q));
  }
  const double lo = instance.low_cut();
  const double hi = instance.high_cut();
  const auto input = quantiles.subspan(m * k, k);

  EventERecord rec;
  std::size_t low_count = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (input[i] <= hi) {
      if (low_count == 0) rec.j = i;
      if (low_count == 1) rec.ell = i;
      ++low_count;
    }
  }
  rec.p1 = low_count == 2;
  if (!rec.p1) return rec;

  rec.p2 = input[rec.j] > lo && input[rec.ell] > lo;
  rec.p3 = true;
  for (std::size_t r = 0; r < m && rec.p3; ++r) {
    rec.p3 = quantiles[r * k + rec.j] > hi && quantiles[r * k + rec.ell] > hi;
  }
  rec.p4 = instance.types[rec.j] != instance.types[rec.ell];
  if (rec.p4) {
    const std::size_t b = instance.types[rec.j] == BidderType::B ? rec.j : rec.ell;
    rec.p5 = instance.distributions[b].quantile_to_value(input[b]) == instance.H[b];
  }
  return rec;
}

// ---------------------------------------------------------------------------

namespace {

struct GuessDraw {
  bool accepted = false;
  bool error = false;
};

// One raw draw of the three stages, evaluated lazily in the order input
// quantiles, types, type-B truncation, sample rounds. Only bidders j and ell
// matter once P1 fixes them, so the other bidders' draws are skipped.
GuessDraw guess_draw(std::size_t k, double alpha, double delta, std::size_t m, GuessRule rule, Stream rng) {
  const double lo = delta / (2.0 * static_cast<double>(k));
  const double hi = delta / static_cast<double>(k);
  double q_in[2] = {0.0, 0.0};
  std::size_t low_count = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double q = rng.uniform();
    if (q <= hi) {
      if (low_count < 2) q_in[low_count] = q;
      ++low_count;
    }
  }
  if (low_count != 2) return {};
  if (!(q_in[0] > lo && q_in[1] > lo)) return {};
  const bool j_is_b = rng.coin();
  const bool ell_is_b = rng.coin();
  if (j_is_b == ell_is_b) return {};
  const int b = j_is_b ? 0 : 1;
  const int a = 1 - b;
  const TruncatedDistribution dist_b = TruncatedDistribution::at_quantile(alpha, rng.uniform(lo, hi));
  const double bid_b = dist_b.quantile_to_value(q_in[b]);
  if (bid_b != dist_b.truncation_value()) return {};
  for (std::size_t r = 0; r < 2 * m; ++r) {
    if (rng.uniform() <= hi) return {};
  }
  const double bid_a = TruncatedDistribution::at_quantile(alpha, lo).quantile_to_value(q_in[a]);

  int choice = 0;
  switch (rule) {
    case GuessRule::LowerValuation: {
      const double bid0 = a == 0 ? bid_a : bid_b;
      const double bid1 = a == 1 ? bid_a : bid_b;
      choice = bid1 < bid0 ? 1 : 0;
      break;
    }
    case GuessRule::Uniform:
      choice = rng.coin() ? 1 : 0;
      break;
    case GuessRule::OracleTypeB:
      choice = b;
      break;
  }
  return {true, choice == a};
}

}  // namespace

GuessErrorResult bayes_guess_error(std::size_t k, double alpha, double delta, std::size_t m, std::size_t trials,
                                   std::uint64_t seed, GuessRule rule, std::size_t budget, int threads) {
  check_lower_bound_params(k, alpha, delta);
  if (trials < 1) throw ParameterError("trials must be at least 1");
  const int nt = resolve_threads(threads);
  Accumulator acc;
  std::vector<GuessDraw> block(std::min(budget, kTrialBlock));
  std::size_t draws = 0;
  while (acc.count() < trials) {
    if (draws >= budget) {
      throw BudgetExceeded("event E: only " + std::to_string(acc.count()) + " of " + std::to_string(trials) +
                               " conditioned trials after " + std::to_string(draws) + " raw draws",
                           acc.count(), draws);
    }
    const std::size_t start = draws;
    const std::size_t len = std::min(kTrialBlock, budget - start);
#pragma omp parallel for num_threads(nt) schedule(static)
    for (std::size_t i = 0; i < len; ++i) {
      block[i] = guess_draw(k, alpha, delta, m, rule, trial_stream(seed, start + i));
    }
    for (std::size_t i = 0; i < len && acc.count() < trials; ++i) {
      ++draws;
      if (block[i].accepted) acc.add(block[i].error ? 1.0 : 0.0);
    }
  }
  return {acc.mean(), acc.std_error(), acc.count(), draws};
}

Estimate event_frequency(std::size_t k, double alpha, double delta, std::size_t m, std::size_t trials,
                         std::uint64_t seed, int threads) {
  check_lower_bound_params(k, alpha, delta);
  if (trials < 1) throw ParameterError("trials must be at least 1");
  const auto acc = run_trials<1>(trials, threads, [&](std::size_t t) -> std::array<double, 1> {
    Stream rng = trial_stream(seed, t);
    const auto inst = sample_instance(k, alpha, delta, rng);
    thread_local std::vector<double> qs;
    qs.resize((m + 1) * k);
    for (auto& q : qs) q = rng.uniform();
    return {detect_event_E(inst, qs, m).holds() ? 1.0 : 0.0};
  });
  return Estimate::from(acc[0]);
}

double event_probability_bound(double delta) { return delta * delta / (32.0 * kE3); }

// ---------------------------------------------------------------------------

double epsilon_bound(double alpha, double delta, std::size_t k) {
  check_lower_bound_params(k, alpha, delta);
  const double kd = static_cast<double>(k);
  if (alpha == 1.0) {
    return (1.0 - std::numbers::ln2) /
           (96.0 * kE3 * std::min(1.0, kd / std::numbers::e) * std::log(std::max(std::numbers::e, kd))) *
           delta * delta;
  }
  if (alpha == 0.0) return delta / (96.0 * kE3);
  const double c = (1.0 - alpha * std::pow(2.0, 1.0 - alpha)) / (96.0 * kE3);
  const double qa = std::pow(alpha, 1.0 / (1.0 - alpha));
  if (1.0 / kd <= qa) return c * std::pow(delta, 1.0 + alpha);
  if (delta / (2.0 * kd) < qa) return c * std::pow(delta, 1.0 + alpha) / std::pow(kd * qa, alpha);
  return c * std::pow(2.0, alpha) * delta;
}

double type_a_monopoly_quantile(double alpha, double delta, std::size_t k) {
  check_lower_bound_params(k, alpha, delta);
  const double lo = delta / (2.0 * static_cast<double>(k));
  if (alpha == 0.0) return lo;
  if (alpha == 1.0) return 1.0 / std::numbers::e;
  return std::max(lo, std::pow(alpha, 1.0 / (1.0 - alpha)));
}

double optimal_revenue_upper_bound(double alpha, double delta, std::size_t k) {
  const double qa = type_a_monopoly_quantile(alpha, delta, k);
  const double kd = static_cast<double>(k);
  const double x = std::max(1.0 / qa, kd);
  const double v_star = alpha == 1.0 ? std::log(x) : (std::pow(x, 1.0 - alpha) - 1.0) / (1.0 - alpha);
  return std::min(kd * qa, 1.0) * v_star;
}

double optimal_revenue_upper_bound(const AdversarialInstance& instance) {
  return optimal_revenue_upper_bound(instance.alpha, instance.delta, instance.k);
}

double virtual_value_gap_bound(double alpha, double delta, std::size_t k) {
  check_lower_bound_params(k, alpha, delta);
  if (alpha == 1.0) return 1.0 - std::numbers::ln2;
  return std::pow(static_cast<double>(k) / delta, 1.0 - alpha) * (1.0 - alpha * std::pow(2.0, 1.0 - alpha)) /
         (1.0 - alpha);
}

// ---------------------------------------------------------------------------

namespace {

AuctionOutcome instance_myerson(const AdversarialInstance& inst, std::span<const double> bids) {
  return run_virtual_value_auction(bids, [&inst](std::size_t i, double v) {
    return inst.distributions[i].virtual_value(v);
  });
}

double virtual_welfare(const AdversarialInstance& inst, std::span<const double> bids, const AuctionOutcome& o) {
  return o.winner ? inst.distributions[*o.winner].virtual_value(bids[*o.winner]) : 0.0;
}

}  // namespace

AuctionStrategy instance_myerson_strategy() {
  return [](const StrategyContext& ctx) { return instance_myerson(ctx.instance, ctx.bids); };
}

AuctionStrategy genie_guess_strategy() {
  return [](const StrategyContext& ctx) {
    if (!ctx.event.holds()) return instance_myerson(ctx.instance, ctx.bids);
    AuctionOutcome out;
    out.winner = ctx.bids[ctx.event.ell] < ctx.bids[ctx.event.j] ? ctx.event.ell : ctx.event.j;
    out.payment = ctx.bids[*out.winner];
    return out;
  };
}

AuctionStrategy empirical_strategy(double xi_hat) {
  return [xi_hat](const StrategyContext& ctx) {
    const std::size_t k = ctx.instance.k;
    std::vector<std::vector<double>> rows(k, std::vector<double>(ctx.m));
    for (std::size_t r = 0; r < ctx.m; ++r) {
      for (std::size_t i = 0; i < k; ++i) rows[i][r] = ctx.samples[r * k + i];
    }
    return learn(SampleMatrix(std::move(rows)), xi_hat).run(ctx.bids);
  };
}

RevenueGapReport revenue_gap_experiment(std::size_t k, double alpha, double delta, std::size_t m,
                                        std::size_t trials, std::uint64_t seed, const AuctionStrategy& strategy,
                                        int threads) {
  check_lower_bound_params(k, alpha, delta);
  if (trials < 1) throw ParameterError("trials must be at least 1");
  const auto acc = run_trials<2>(trials, threads, [&](std::size_t t) -> std::array<double, 2> {
    Stream rng = trial_stream(seed, t);
    const auto inst = sample_instance(k, alpha, delta, rng);
    std::vector<double> qs((m + 1) * k);
    for (auto& q : qs) q = rng.uniform();
    std::vector<double> values(qs.size());
    for (std::size_t n = 0; n < qs.size(); ++n) values[n] = inst.distributions[n % k].quantile_to_value(qs[n]);
    const auto event = detect_event_E(inst, qs, m);
    const std::span<const double> all(values);
    const auto bids = all.subspan(m * k, k);
    const StrategyContext ctx{inst, all.subspan(0, m * k), m, bids, event};
    const double opt = virtual_welfare(inst, bids, instance_myerson(inst, bids));
    const double got = virtual_welfare(inst, bids, strategy(ctx));
    return {opt - got, event.holds() ? 1.0 : 0.0};
  });
  RevenueGapReport rep;
  rep.gap = Estimate::from(acc[0]);
  rep.event_rate = Estimate::from(acc[1]);
  rep.r_star = optimal_revenue_upper_bound(alpha, delta, k);
  rep.ratio = rep.gap.mean / rep.r_star;
  rep.ratio_std_error = rep.gap.std_error / rep.r_star;
  return rep;
}

}  // namespace myerson_lab
