#include "myerson_lab/myerson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "myerson_lab/errors.hpp"
#include "myerson_lab/text.hpp"

namespace myerson_lab {

RevenueCurve::RevenueCurve(DistributionPtr dist) : dist_(std::move(dist)) {
  if (!dist_) throw ParameterError("revenue curve needs a distribution");
}

double RevenueCurve::operator()(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile must lie in [0, 1], got " + format_real(q));
  q = std::max(q, kQuantileFloor);
  return q * dist_->quantile_to_value(q);
}

std::vector<CurvePoint> RevenueCurve::sample(std::size_t n) const {
  if (n < 2) throw ParameterError("revenue curve grid needs at least two points");
  std::vector<CurvePoint> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = i == 0 ? kQuantileFloor
                            : (i + 1 == n ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1));
    points.push_back({q, (*this)(q)});
  }
  return points;
}

IronedCurve RevenueCurve::ironed(std::size_t n) const {
  const auto points = sample(n);
  return iron(points);
}

// ---------------------------------------------------------------------------

void validate_bids(std::span<const double> bids, std::size_t k) {
  if (bids.size() != k) {
    throw MalformedInput("expected " + std::to_string(k) + " bids, got " + std::to_string(bids.size()));
  }
  validate_bids(bids);
}

void validate_bids(std::span<const double> bids) {
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (!(bids[i] >= 0.0)) {
      throw MalformedInput("bid " + std::to_string(i) + " is negative: " + format_real(bids[i]));
    }
  }
}

AuctionOutcome run_virtual_value_auction(std::span<const VirtualValueFn> phis,
                                         std::span<const double> bids) {
  validate_bids(bids, phis.size());
  return run_virtual_value_auction(bids, [phis](std::size_t i, double v) { return phis[i](v); });
}

VirtualValueAuction::VirtualValueAuction(std::vector<VirtualValueFn> phis) : phis_(std::move(phis)) {
  if (phis_.empty()) throw ParameterError("auction needs at least one bidder");
}

AuctionOutcome VirtualValueAuction::run(std::span<const double> bids) const {
  return run_virtual_value_auction(phis_, bids);
}

VirtualValueAuction myerson_auction(const ProductDistribution& dists) {
  std::vector<VirtualValueFn> phis;
  phis.reserve(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) {
    phis.emplace_back([d = dists.component(i)](double v) { return d->virtual_value(v); });
  }
  return VirtualValueAuction(std::move(phis));
}

VirtualValueAuction ironed_myerson_auction(const ProductDistribution& dists, std::size_t grid_points) {
  std::vector<VirtualValueFn> phis;
  phis.reserve(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const auto& d = dists.component(i);
    auto curve = std::make_shared<const IronedCurve>(RevenueCurve(d).ironed(grid_points));
    phis.emplace_back([d, curve](double v) {
      // An atom occupies the quantile range [0, P(V >= v)]; its slope is read
      // at the low end.
      const double q = d->cdf(v) >= 1.0 ? kQuantileFloor : d->value_to_quantile(v);
      return ironed_virtual_value(*curve, std::clamp(q, kQuantileFloor, 1.0));
    });
  }
  return VirtualValueAuction(std::move(phis));
}

AuctionOutcome run_myerson(const ProductDistribution& dists, std::span<const double> bids) {
  return myerson_auction(dists).run(bids);
}

// ---------------------------------------------------------------------------

AuctionOutcome AlwaysReject::run(std::span<const double> bids) const {
  validate_bids(bids, k_);
  AuctionOutcome out;
  out.virtual_bids.assign(k_, -1.0);
  return out;
}

PostedPrice::PostedPrice(std::size_t k, double price) : k_(k), price_(price) {
  if (k == 0) throw ParameterError("auction needs at least one bidder");
  if (!(price >= 0.0)) throw ParameterError("posted price must be nonnegative");
}

AuctionOutcome PostedPrice::run(std::span<const double> bids) const {
  validate_bids(bids, k_);
  AuctionOutcome out;
  out.virtual_bids.resize(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    out.virtual_bids[i] = bids[i] - price_;
    if (!out.winner && bids[i] >= price_) {
      out.winner = i;
      out.payment = price_;
    }
  }
  return out;
}

SecondPrice::SecondPrice(std::vector<double> reserves) : reserves_(std::move(reserves)) {
  if (reserves_.empty()) throw ParameterError("auction needs at least one bidder");
}

SecondPrice SecondPrice::without_reserves(std::size_t k) {
  return SecondPrice(std::vector<double>(k, 0.0));
}

SecondPrice SecondPrice::with_monopoly_reserves(const ProductDistribution& dists) {
  std::vector<double> reserves(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) {
    try {
      reserves[i] = monopoly_price(dists[i]);
    } catch (const NoReserveError&) {
      // Nonpositive virtual value everywhere: never sell to this bidder.
      reserves[i] = std::numeric_limits<double>::infinity();
    }
  }
  return SecondPrice(std::move(reserves));
}

AuctionOutcome SecondPrice::run(std::span<const double> bids) const {
  validate_bids(bids, reserves_.size());
  AuctionOutcome out;
  out.virtual_bids.resize(bids.size());
  for (std::size_t i = 0; i < bids.size(); ++i) {
    out.virtual_bids[i] = bids[i] - reserves_[i];
    if (bids[i] >= reserves_[i] && (!out.winner || bids[i] > bids[*out.winner])) out.winner = i;
  }
  if (!out.winner) return out;
  double price = reserves_[*out.winner];
  for (std::size_t j = 0; j < bids.size(); ++j) {
    if (j != *out.winner && bids[j] >= reserves_[j]) price = std::max(price, bids[j]);
  }
  out.payment = price;
  return out;
}

}  // namespace myerson_lab
