#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "myerson_lab/distributions.hpp"
#include "myerson_lab/ironing.hpp"
#include "myerson_lab/myerson.hpp"
#include "myerson_lab/random.hpp"

namespace myerson_lab {

/// k x m valuation samples, one row per bidder, each row sorted nonincreasing.
class SampleMatrix {
 public:
  /// Sorts every row; throws MalformedInput on ragged rows or negative values.
  explicit SampleMatrix(std::vector<std::vector<double>> rows);

  static SampleMatrix draw(const ProductDistribution& dists, std::size_t m, Stream& rng);

  std::size_t bidders() const { return rows_.size(); }
  std::size_t samples_per_bidder() const { return rows_.empty() ? 0 : rows_.front().size(); }
  std::span<const double> row(std::size_t i) const { return rows_[i]; }

  /// Plain-text form: header `k=<int> m=<int>`, then one row per line.
  void write(std::ostream& out) const;
  static SampleMatrix read(std::istream& in);

 private:
  std::vector<std::vector<double>> rows_;
};

/// floor(xi_hat * m), guarded against representation error in xi_hat.
std::size_t threshold_rank(double xi_hat, std::size_t m);

/// Discard fraction used when none is configured: max(epsilon / k, 2 / m).
double default_xi_hat(double epsilon, std::size_t k, std::size_t m);

/// One bidder's empirical revenue points. Sample j (1-based, descending) sits
/// at empirical quantile t_j = (2j - 1) / (2m); the floor(xi_hat m) - 1
/// largest samples are dropped and the anchors (0, 0) and (1, 0) added.
struct EmpiricalCurve {
  double xi_hat = 0.0;
  std::size_t m = 0;
  std::size_t rank = 0;                 // floor(xi_hat m), 1-based rank of the threshold sample
  std::vector<double> retained_values;  // v_rank >= ... >= v_m
  std::vector<CurvePoint> points;       // anchors included
  double threshold_value = 0.0;         // v_rank, the largest retained sample

  double first_quantile() const { return points[1].quantile; }
};

/// `row` must be sorted nonincreasing. Throws ParameterError if m < 2 or
/// floor(xi_hat m) falls outside [1, m].
EmpiricalCurve build_empirical_curve(std::span<const double> row, double xi_hat);

/// Learned state of one bidder: ironed empirical revenue curve, threshold
/// value and empirical reserve.
class EmpiricalBidder {
 public:
  /// `vertex_values` holds the sample value behind each interior hull vertex
  /// (so vertex R equals quantile times value), in hull order.
  EmpiricalBidder(IronedCurve hull, std::vector<double> vertex_values, double threshold, double reserve);

  /// Irons the curve's points; with iron = false the raw polyline is kept
  /// (diagnostic only, the resulting virtual values are not monotone).
  static EmpiricalBidder from_curve(const EmpiricalCurve& curve, bool iron = true);

  /// Bid above the threshold: the bid itself. At or below: slope of the hull
  /// on the empirical-quantile interval sandwiching the bid, taking the larger
  /// slope when the bid equals a sample.
  double virtual_value(double v) const;

  const IronedCurve& hull() const { return hull_; }
  double threshold() const { return threshold_; }
  double reserve() const { return reserve_; }
  std::span<const double> vertex_values() const { return vertex_values_; }

  friend bool operator==(const EmpiricalBidder& a, const EmpiricalBidder& b);

 private:
  double compute_reserve() const;

  IronedCurve hull_;
  std::vector<double> vertex_values_;  // sample values at interior vertices
  double threshold_;
  double reserve_;
};

/// Myerson's auction run on per-bidder empirical ironed virtual values.
class EmpiricalMyersonAuction : public AuctionRule {
 public:
  explicit EmpiricalMyersonAuction(std::vector<EmpiricalBidder> bidders);

  std::size_t bidder_count() const override { return bidders_.size(); }
  AuctionOutcome run(std::span<const double> bids) const override;

  const EmpiricalBidder& bidder(std::size_t i) const { return bidders_[i]; }

  /// One line per bidder:
  /// `bidder <i> hull q:R,... slopes s,... values v,... threshold <t> reserve <r>`,
  /// 17 significant digits. Lines starting with '#' are comments.
  void write(std::ostream& out) const;
  static EmpiricalMyersonAuction read(std::istream& in);

 private:
  std::vector<EmpiricalBidder> bidders_;
};

struct LearnOptions {
  bool iron = true;
};

/// Builds and irons every bidder's empirical curve. Pure in (samples, xi_hat).
EmpiricalMyersonAuction learn(const SampleMatrix& samples, double xi_hat, LearnOptions opts = {});

double empirical_virtual_value(const EmpiricalMyersonAuction& auction, std::size_t bidder, double v);

AuctionOutcome run_empirical_auction(const EmpiricalMyersonAuction& auction, std::span<const double> bids);

/// Fraction of `trials` sample draws in which some retained order statistic
/// v_j (j >= floor(xi_hat m)) has true quantile outside
/// [t_j / (1 + gamma)^2, t_j (1 + gamma)^2]. Requires gamma xi_hat m >= 1.
double verify_quantile_sandwich(const ValuationDistribution& dist, std::size_t m, double gamma,
                                double xi_hat, std::size_t trials, std::uint64_t seed,
                                int threads = 0);

/// Smallest m meeting the sample-size condition for the quantile sandwich,
/// m >= 6 (1 + gamma) / (gamma^2 xi_hat) max(ln 3 / gamma, ln(3 / delta)).
double quantile_sandwich_sample_bound(double gamma, double xi_hat, double delta);

}  // namespace myerson_lab
