#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "myerson_lab/random.hpp"

namespace myerson_lab {

/// Quantile floor used wherever quantile-space code would otherwise touch
/// values near q -> 0.
inline constexpr double kQuantileFloor = 1e-12;

struct Support {
  double lo = 0.0;
  double hi = 0.0;  // +inf for unbounded supports
  bool hi_inclusive = false;

  bool contains(double v) const { return v >= lo && (v < hi || (hi_inclusive && v == hi)); }
};

/// One bidder's valuation law. Quantiles are upper-tail probabilities:
/// value_to_quantile(v) = P(V >= v) = 1 - cdf(v) at continuity points.
///
/// Implementations are immutable and may be shared across threads.
class ValuationDistribution {
 public:
  virtual ~ValuationDistribution() = default;

  virtual Support support() const = 0;
  virtual double cdf(double v) const = 0;
  /// Density of the absolutely continuous part.
  virtual double density(double v) const = 0;
  /// Requires 0 < q <= 1.
  virtual double quantile_to_value(double q) const = 0;
  virtual double value_to_quantile(double v) const;
  /// Defaults to v - (1 - F(v)) / f(v).
  virtual double virtual_value(double v) const;
  virtual std::string describe() const = 0;

  /// Inverse-transform draw for a fixed uniform u in (0, 1].
  double sample_at(double u) const { return quantile_to_value(u); }
  double sample(Stream& rng) const { return sample_at(rng.uniform()); }
};

using DistributionPtr = std::shared_ptr<const ValuationDistribution>;

/// v - (1 - F(v)) / f(v), evaluated from cdf and density alone. Throws
/// SingularityError when the density vanishes.
double hazard_virtual_value(const ValuationDistribution& dist, double v);

/// The family F^alpha with virtual value alpha*v - 1, alpha in [0, 1]. alpha = 1
/// is the unit exponential, alpha = 0 the equal-revenue-shifted law
/// F(v) = v / (1 + v).
class StronglyRegularBase final : public ValuationDistribution {
 public:
  explicit StronglyRegularBase(double alpha);

  double alpha() const { return alpha_; }

  Support support() const override;
  double cdf(double v) const override;
  double density(double v) const override;
  double quantile_to_value(double q) const override;
  double value_to_quantile(double v) const override;
  double virtual_value(double v) const override;
  std::string describe() const override;

 private:
  double alpha_;
};

/// F^alpha on [0, H) with the remaining mass 1 - F^alpha(H) as an atom at H.
/// The atom's virtual value is H itself.
class TruncatedDistribution final : public ValuationDistribution {
 public:
  TruncatedDistribution(double alpha, double truncation_value);

  /// Truncation placed at the value whose base quantile is q.
  static TruncatedDistribution at_quantile(double alpha, double q);

  double alpha() const { return base_.alpha(); }
  double truncation_value() const { return truncation_; }
  /// Upper-tail probability of the atom, 1 - F^alpha(H).
  double atom_quantile() const { return atom_quantile_; }
  const StronglyRegularBase& base() const { return base_; }

  Support support() const override;
  double cdf(double v) const override;
  double density(double v) const override;
  double quantile_to_value(double q) const override;
  double value_to_quantile(double v) const override;
  double virtual_value(double v) const override;
  std::string describe() const override;

 private:
  StronglyRegularBase base_;
  double truncation_;
  double atom_quantile_;
};

/// Uniform on [lo, hi]. Uses the generic virtual value formula.
class UniformDistribution final : public ValuationDistribution {
 public:
  UniformDistribution(double lo, double hi);

  Support support() const override;
  double cdf(double v) const override;
  double density(double v) const override;
  double quantile_to_value(double q) const override;
  std::string describe() const override;

 private:
  double lo_;
  double hi_;
};

/// Independent bidders F_1 x ... x F_k.
class ProductDistribution {
 public:
  explicit ProductDistribution(std::vector<DistributionPtr> components);

  /// k i.i.d. copies of one law.
  static ProductDistribution iid(DistributionPtr dist, std::size_t k);

  std::size_t size() const { return components_.size(); }
  const ValuationDistribution& operator[](std::size_t i) const { return *components_[i]; }
  const DistributionPtr& component(std::size_t i) const { return components_[i]; }

  /// One coordinate per bidder, drawn in bidder order from the same stream.
  void sample(Stream& rng, std::span<double> out) const;
  std::vector<double> sample(Stream& rng) const;

 private:
  std::vector<DistributionPtr> components_;
};

/// Largest quantile q with virtual_value(quantile_to_value(q)) >= 0, found by
/// bisection on [kQuantileFloor, 1] to 1e-12. Throws NoReserveError when the
/// virtual value is negative even at the floor.
double monopoly_quantile(const ValuationDistribution& dist);

/// Value at the monopoly quantile (the bidder-specific reserve price).
double monopoly_price(const ValuationDistribution& dist);

struct RegularityCheck {
  bool holds = true;
  std::size_t skipped = 0;  // pairs with x >= y or outside the support

  explicit operator bool() const { return holds; }
};

/// Checks phi(y) - phi(x) >= alpha (y - x) - 1e-9 (1 + |phi(y)|) on each (x, y).
RegularityCheck verify_strong_regularity(const ValuationDistribution& dist, double alpha,
                                         std::span<const std::pair<double, double>> grid);

/// Parses `base(alpha=<a>)`, `truncated(alpha=<a>, H=<h>)`,
/// `truncated_q(alpha=<a>, q=<q>)` or `exponential`. Throws MalformedInput.
DistributionPtr parse_distribution(std::string_view spec);

/// Splits a ';'-separated list of distribution specs.
std::vector<DistributionPtr> parse_distribution_list(std::string_view specs);

}  // namespace myerson_lab
