#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "myerson_lab/distributions.hpp"
#include "myerson_lab/ironing.hpp"

namespace myerson_lab {

/// R(q) = q * v(q): posted-price revenue at sale probability q.
class RevenueCurve {
 public:
  explicit RevenueCurve(DistributionPtr dist);

  /// Quantiles below kQuantileFloor are evaluated at the floor, which stands in
  /// for the q -> 0 limit (finite and nonzero for alpha = 0).
  double operator()(double q) const;

  /// n >= 2 points on a uniform quantile grid over [0, 1], with the q = 0
  /// anchor placed at kQuantileFloor.
  std::vector<CurvePoint> sample(std::size_t n) const;

  IronedCurve ironed(std::size_t n) const;

 private:
  DistributionPtr dist_;
};

using BidProfile = std::vector<double>;

struct AuctionOutcome {
  std::optional<std::size_t> winner;
  double payment = 0.0;
  /// Per-bidder ranking scores; virtual bids for virtual-value rules.
  std::vector<double> virtual_bids;
};

/// A truthful single-item auction on a fixed number of bidders.
class AuctionRule {
 public:
  virtual ~AuctionRule() = default;
  virtual std::size_t bidder_count() const = 0;
  /// Throws MalformedInput on a negative bid or wrong profile length.
  virtual AuctionOutcome run(std::span<const double> bids) const = 0;
};

/// Nondecreasing map from a bidder's bid to its (ironed) virtual value.
using VirtualValueFn = std::function<double(double)>;

/// Myerson's allocation and payment on arbitrary monotone virtual values:
/// the highest nonnegative virtual bid wins, ties go to the lowest index, and
/// the winner pays the smallest bid that still reaches
/// max(0, best competing virtual bid), located by bisection to 1e-9 on
/// [0, winning bid].
AuctionOutcome run_virtual_value_auction(std::span<const VirtualValueFn> phis,
                                         std::span<const double> bids);

/// Same rule with virtual values supplied as phi(i, v) for bidder i.
template <class Phi>
AuctionOutcome run_virtual_value_auction(std::span<const double> bids, Phi&& phi);

/// The rule above over a fixed set of virtual valuations.
class VirtualValueAuction : public AuctionRule {
 public:
  explicit VirtualValueAuction(std::vector<VirtualValueFn> phis);

  std::size_t bidder_count() const override { return phis_.size(); }
  AuctionOutcome run(std::span<const double> bids) const override;
  std::span<const VirtualValueFn> virtual_values() const { return phis_; }

 private:
  std::vector<VirtualValueFn> phis_;
};

/// Myerson's optimal auction for known distributions, using each bidder's
/// closed-form virtual value.
VirtualValueAuction myerson_auction(const ProductDistribution& dists);

/// Myerson's auction where each bidder's virtual value is the slope of its
/// ironed revenue curve, sampled on a grid of `grid_points` quantiles.
VirtualValueAuction ironed_myerson_auction(const ProductDistribution& dists,
                                           std::size_t grid_points);

/// One-shot Myerson auction with lowest-index tie breaking.
AuctionOutcome run_myerson(const ProductDistribution& dists, std::span<const double> bids);

class AlwaysReject : public AuctionRule {
 public:
  explicit AlwaysReject(std::size_t k) : k_(k) {}
  std::size_t bidder_count() const override { return k_; }
  AuctionOutcome run(std::span<const double> bids) const override;

 private:
  std::size_t k_;
};

/// Offers the item at `price`; the lowest-index bidder at or above it buys.
class PostedPrice : public AuctionRule {
 public:
  PostedPrice(std::size_t k, double price);
  std::size_t bidder_count() const override { return k_; }
  AuctionOutcome run(std::span<const double> bids) const override;

 private:
  std::size_t k_;
  double price_;
};

/// Second-price auction with per-bidder "eager" reserves: bidders below
/// their reserve are removed, the highest remaining bid wins (lowest index on
/// ties) and pays max(own reserve, highest other remaining bid).
class SecondPrice : public AuctionRule {
 public:
  explicit SecondPrice(std::vector<double> reserves);
  static SecondPrice without_reserves(std::size_t k);
  /// Reserves at each bidder's monopoly price.
  static SecondPrice with_monopoly_reserves(const ProductDistribution& dists);

  std::size_t bidder_count() const override { return reserves_.size(); }
  AuctionOutcome run(std::span<const double> bids) const override;
  std::span<const double> reserves() const { return reserves_; }

 private:
  std::vector<double> reserves_;
};

/// Checks that no bid is negative; throws MalformedInput.
void validate_bids(std::span<const double> bids);
/// Also checks the profile length.
void validate_bids(std::span<const double> bids, std::size_t k);

template <class Phi>
AuctionOutcome run_virtual_value_auction(std::span<const double> bids, Phi&& phi) {
  validate_bids(bids);
  AuctionOutcome out;
  out.virtual_bids.resize(bids.size());
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < bids.size(); ++i) {
    const double vb = phi(i, bids[i]);
    out.virtual_bids[i] = vb;
    if (vb >= 0.0 && (!best || vb > out.virtual_bids[*best])) best = i;
  }
  if (!best) return out;
  const std::size_t w = *best;
  out.winner = w;

  double threshold = 0.0;
  for (std::size_t j = 0; j < bids.size(); ++j) {
    if (j != w && out.virtual_bids[j] > threshold) threshold = out.virtual_bids[j];
  }
  double lo = 0.0;
  double hi = bids[w];
  if (phi(w, lo) >= threshold) return out;  // wins even bidding zero
  for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(w, mid) >= threshold) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  out.payment = hi;
  return out;
}

}  // namespace myerson_lab
