#pragma once

// Independent reference computations used by the tests.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "myerson_lab/ironing.hpp"

namespace oracle {

using myerson_lab::CurvePoint;

/// Least concave upper bound by exhaustion: a point survives iff it lies
/// strictly above every chord between a point on its left and one on its
/// right. Exact for dyadic coordinates.
inline std::vector<CurvePoint> brute_force_hull(std::span<const CurvePoint> pts) {
  const std::size_t n = pts.size();
  std::vector<CurvePoint> hull;
  for (std::size_t i = 0; i < n; ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < i && keep; ++j) {
      for (std::size_t k = i + 1; k < n && keep; ++k) {
        const double lhs = (pts[i].value - pts[j].value) * (pts[k].quantile - pts[j].quantile);
        const double rhs = (pts[k].value - pts[j].value) * (pts[i].quantile - pts[j].quantile);
        if (lhs <= rhs) keep = false;
      }
    }
    if (keep) hull.push_back(pts[i]);
  }
  return hull;
}

inline std::vector<double> slopes_of(std::span<const CurvePoint> v) {
  std::vector<double> s;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    s.push_back((v[i + 1].value - v[i].value) / (v[i + 1].quantile - v[i].quantile));
  }
  return s;
}

/// Smallest bid on a uniform grid over [0, hi] at which `wins` holds, assuming
/// wins is monotone in the bid.
inline double grid_scan_threshold(const std::function<bool(double)>& wins, double hi, std::size_t steps) {
  for (std::size_t s = 0; s <= steps; ++s) {
    const double b = hi * static_cast<double>(s) / static_cast<double>(steps);
    if (wins(b)) return b;
  }
  return std::numeric_limits<double>::infinity();
}

/// Empirical ironed virtual value by the literal sandwich rule. `row` is
/// sorted descending, `hull` is the ironed curve over the retained points.
inline double sandwich_virtual_value(std::span<const double> row, std::size_t rank,
                                     const myerson_lab::IronedCurve& hull, double v) {
  const double m = static_cast<double>(row.size());
  const double threshold = row[rank - 1];
  if (v >= threshold) return v;
  auto t = [&](std::size_t j) { return (2.0 * static_cast<double>(j) - 1.0) / (2.0 * m); };
  // Hull slope on the quantile interval (a, b): evaluated at the midpoint.
  auto slope_on = [&](double a, double b) { return hull.slopes()[hull.segment_index(0.5 * (a + b))]; };
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t j = rank; j <= row.size(); ++j) {
    const double vj = row[j - 1];
    const double vnext = j < row.size() ? row[j] : 0.0;
    const double a = t(j);
    const double b = j < row.size() ? t(j + 1) : 1.0;
    // v sits strictly inside (vnext, vj), or equals vj (tie: largest slope).
    if ((v < vj && v > vnext) || v == vj || (j == row.size() && v <= vnext)) {
      best = std::max(best, slope_on(a, b));
      found = true;
    }
    if (v == vj && j > rank) {
      best = std::max(best, slope_on(t(j - 1), a));
      found = true;
    }
  }
  return found ? best : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace oracle
