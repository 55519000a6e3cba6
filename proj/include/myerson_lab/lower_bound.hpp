#pragma once

// Adversarial truncated instances and the checkable ingredients of the
// sample-complexity lower bound.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "myerson_lab/distributions.hpp"
#include "myerson_lab/monte_carlo.hpp"
#include "myerson_lab/myerson.hpp"
#include "myerson_lab/random.hpp"

namespace myerson_lab {

enum class BidderType { A, B };

struct AdversarialInstance {
  std::size_t k = 0;
  double alpha = 0.0;
  double delta = 0.0;
  std::vector<BidderType> types;
  /// Base quantile at which each bidder is truncated: delta / 2k for type A,
  /// uniform on [delta / 2k, delta / k] for type B.
  std::vector<double> truncation_quantiles;
  std::vector<double> H;
  ProductDistribution distributions;

  double low_cut() const { return delta / (2.0 * static_cast<double>(k)); }
  double high_cut() const { return delta / static_cast<double>(k); }
};

/// Validates k >= 2, 0 < delta <= 1, alpha in [0, 1]; throws ParameterError.
void check_lower_bound_params(std::size_t k, double alpha, double delta);

/// Builds the instance from explicit types and type-B truncation quantiles
/// (entries for type-A bidders are ignored).
AdversarialInstance make_instance(std::size_t k, double alpha, double delta, std::vector<BidderType> types,
                                  std::span<const double> b_quantiles);

/// Fair coin per bidder for its type; uniform draw for each type-B quantile.
/// `forced` fixes every type instead of flipping coins.
AdversarialInstance sample_instance(std::size_t k, double alpha, double delta, Stream& rng,
                                    std::optional<BidderType> forced = std::nullopt);

struct EventERecord {
  bool p1 = false;
  bool p2 = false;
  bool p3 = false;
  bool p4 = false;
  bool p5 = false;
  std::size_t j = 0;
  std::size_t ell = 0;

  bool holds() const { return p1 && p2 && p3 && p4 && p5; }
  friend bool operator==(const EventERecord&, const EventERecord&) = default;
};

/// `quantiles` holds (m + 1) rows of k uniform draws, row-major; rows 0..m-1
/// are the sample rounds and row m is the input. When P1 fails the other
/// flags are left false.
EventERecord detect_event_E(const AdversarialInstance& instance, std::span<const double> quantiles, std::size_t m);

enum class GuessRule { LowerValuation, Uniform, OracleTypeB };

inline constexpr std::size_t kDefaultDrawBudget = 100'000'000;

struct GuessErrorResult {
  double error_rate = 0.0;
  double std_error = 0.0;
  std::size_t accepted = 0;
  std::size_t raw_draws = 0;
};

/// Rejection-samples the full three-stage construction until `trials` draws
/// satisfy event E, then lets `rule` choose between the two candidate bidders
/// and reports how often the type-A bidder was chosen. Throws BudgetExceeded
/// after `budget` raw draws.
GuessErrorResult bayes_guess_error(std::size_t k, double alpha, double delta, std::size_t m,
                                   std::size_t trials, std::uint64_t seed,
                                   GuessRule rule = GuessRule::LowerValuation,
                                   std::size_t budget = kDefaultDrawBudget, int threads = 0);

/// Frequency of event E over `trials` independent draws of all three stages.
Estimate event_frequency(std::size_t k, double alpha, double delta, std::size_t m, std::size_t trials,
                         std::uint64_t seed, int threads = 0);

/// delta^2 / (32 e^3).
double event_probability_bound(double delta);

double epsilon_bound(double alpha, double delta, std::size_t k);

/// Monopoly quantile of a single type-A bidder.
double type_a_monopoly_quantile(double alpha, double delta, std::size_t k);

double optimal_revenue_upper_bound(double alpha, double delta, std::size_t k);
double optimal_revenue_upper_bound(const AdversarialInstance& instance);

/// Lower bound on phi_B - phi_A under event E.
double virtual_value_gap_bound(double alpha, double delta, std::size_t k);

struct StrategyContext {
  const AdversarialInstance& instance;
  /// m x k sample valuations, row-major by round.
  std::span<const double> samples;
  std::size_t m;
  std::span<const double> bids;
  const EventERecord& event;
};

using AuctionStrategy = std::function<AuctionOutcome(const StrategyContext&)>;

/// Myerson's auction for the true instance.
AuctionStrategy instance_myerson_strategy();
/// Under event E gives the item to whichever of j, ell bid less; Myerson
/// elsewhere.
AuctionStrategy genie_guess_strategy();
/// Learns an empirical Myerson auction from the samples with the given
/// discard fraction.
AuctionStrategy empirical_strategy(double xi_hat);

struct RevenueGapReport {
  Estimate gap;  // optimal minus strategy virtual welfare
  Estimate event_rate;
  double r_star = 0.0;
  double ratio = 0.0;  // gap / R*
  double ratio_std_error = 0.0;
};

RevenueGapReport revenue_gap_experiment(std::size_t k, double alpha, double delta, std::size_t m,
                                        std::size_t trials, std::uint64_t seed,
                                        const AuctionStrategy& strategy = genie_guess_strategy(),
                                        int threads = 0);

}  // namespace myerson_lab
