#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace myerson_lab {

struct CurvePoint {
  double quantile = 0.0;
  double value = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Piecewise-linear concave function of quantile. Segment s spans
/// [breakpoints[s], breakpoints[s + 1]] and its slope is the (ironed)
/// virtual value for quantiles in that range.
class IronedCurve {
 public:
  IronedCurve() = default;
  /// Takes vertices as-is; the caller guarantees ascending quantiles.
  explicit IronedCurve(std::vector<CurvePoint> vertices);

  std::span<const CurvePoint> vertices() const { return vertices_; }
  std::span<const double> slopes() const { return slopes_; }
  std::size_t segment_count() const { return slopes_.size(); }

  /// Linear interpolation, extended linearly outside the breakpoint range.
  double value_at(double q) const;

  /// Index of the segment whose half-open range [q_s, q_{s+1}) contains q;
  /// quantiles at or past the last breakpoint map to the last segment.
  std::size_t segment_index(double q) const;

  /// True if every slope is no larger than the one before it.
  bool is_concave() const;

 private:
  std::vector<CurvePoint> vertices_;
  std::vector<double> slopes_;
};

/// Least concave upper bound of a point set with strictly increasing
/// quantiles. Collinear interior points are dropped, so every vertex of the
/// result is an input point and none is redundant. Throws MalformedInput for
/// fewer than two points or non-increasing quantiles.
IronedCurve iron(std::span<const CurvePoint> points);

/// The polyline through the points with no hull taken. Same validation as
/// iron().
IronedCurve polyline(std::span<const CurvePoint> points);

/// Slope of the segment containing q, taking the right-hand segment at
/// interior breakpoints. Throws DomainError unless 0 < q <= 1.
double ironed_virtual_value(const IronedCurve& curve, double q);

}  // namespace myerson_lab
