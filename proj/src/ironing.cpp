#include "myerson_lab/ironing.hpp"

#include <algorithm>
#include <string>

#include "myerson_lab/errors.hpp"
#include "myerson_lab/text.hpp"

namespace myerson_lab {

IronedCurve::IronedCurve(std::vector<CurvePoint> vertices) : vertices_(std::move(vertices)) {
  slopes_.reserve(vertices_.size() > 0 ? vertices_.size() - 1 : 0);
  for (std::size_t s = 0; s + 1 < vertices_.size(); ++s) {
    const auto& a = vertices_[s];
    const auto& b = vertices_[s + 1];
    slopes_.push_back((b.value - a.value) / (b.quantile - a.quantile));
  }
}

std::size_t IronedCurve::segment_index(double q) const {
  // First breakpoint strictly greater than q, minus one, clamped to a segment.
  const auto it = std::upper_bound(vertices_.begin(), vertices_.end(), q,
                                   [](double x, const CurvePoint& p) { return x < p.quantile; });
  const auto after = static_cast<std::size_t>(it - vertices_.begin());
  if (after == 0) return 0;
  return std::min(after - 1, slopes_.size() - 1);
}

double IronedCurve::value_at(double q) const {
  const std::size_t s = segment_index(q);
  return vertices_[s].value + slopes_[s] * (q - vertices_[s].quantile);
}

bool IronedCurve::is_concave() const {
  for (std::size_t s = 1; s < slopes_.size(); ++s) {
    if (slopes_[s] > slopes_[s - 1]) return false;
  }
  return true;
}

namespace {

void validate(std::span<const CurvePoint> points) {
  if (points.size() < 2) throw MalformedInput("ironing needs at least two points");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].quantile > points[i - 1].quantile)) {
      throw MalformedInput("quantiles must be strictly increasing (point " + std::to_string(i) +
                           " at q=" + format_real(points[i].quantile) + ")");
    }
  }
}

// Positive when o, a, b turn left, i.e. a lies strictly below the chord o-b.
double cross(const CurvePoint& o, const CurvePoint& a, const CurvePoint& b) {
  return (a.quantile - o.quantile) * (b.value - o.value) -
         (a.value - o.value) * (b.quantile - o.quantile);
}

}  // namespace

IronedCurve iron(std::span<const CurvePoint> points) {
  validate(points);
  std::vector<CurvePoint> hull;
  hull.reserve(points.size());
  for (const auto& p : points) {
    // Drop the last vertex while it sits on or below the chord to p.
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) >= 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }
  return IronedCurve(std::move(hull));
}

IronedCurve polyline(std::span<const CurvePoint> points) {
  validate(points);
  return IronedCurve(std::vector<CurvePoint>(points.begin(), points.end()));
}

double ironed_virtual_value(const IronedCurve& curve, double q) {
  if (!(q > 0.0 && q <= 1.0)) {
    throw DomainError("quantile must lie in (0, 1], got " + format_real(q));
  }
  return curve.slopes()[curve.segment_index(q)];
}

}  // namespace myerson_lab
