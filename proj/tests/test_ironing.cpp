#include <algorithm>
#include <vector>

#include "doctest.h"
#include "myerson_lab/errors.hpp"
#include "myerson_lab/ironing.hpp"
#include "myerson_lab/random.hpp"
#include "oracles.hpp"

using namespace myerson_lab;

namespace {

// Random point set on a 1/64 lattice with anchors at q = 0 and q = 1.
std::vector<CurvePoint> lattice_points(Stream& rng, std::size_t n) {
  std::vector<int> qs{0, 64};
  while (qs.size() < n) {
    const int q = 1 + static_cast<int>(rng() % 63);
    if (std::find(qs.begin(), qs.end(), q) == qs.end()) qs.push_back(q);
  }
  std::sort(qs.begin(), qs.end());
  std::vector<CurvePoint> pts;
  for (int q : qs) pts.push_back({q / 64.0, static_cast<double>(rng() % 65) / 64.0});
  return pts;
}

}  // namespace

TEST_SUITE("ironing") {
  TEST_CASE("two points form one segment") {
    const std::vector<CurvePoint> pts{{0, 0}, {1, 0}};
    const auto h = iron(pts);
    CHECK(h.segment_count() == 1);
    CHECK(h.slopes()[0] == 0.0);
    CHECK(ironed_virtual_value(h, 0.5) == 0.0);
  }

  TEST_CASE("worked five-point example") {
    const std::vector<CurvePoint> pts{{0, 0}, {0.25, 0.5}, {0.5, 0.6}, {0.75, 0.9}, {1, 0}};
    const auto h = iron(pts);
    const std::vector<CurvePoint> expect{{0, 0}, {0.25, 0.5}, {0.75, 0.9}, {1, 0}};
    CHECK(std::ranges::equal(h.vertices(), expect));
    REQUIRE(h.segment_count() == 3);
    CHECK(h.slopes()[0] == doctest::Approx(2.0));
    CHECK(h.slopes()[1] == doctest::Approx(0.8));
    CHECK(h.slopes()[2] == doctest::Approx(-3.6));
    CHECK(h.value_at(0.5) > 0.6);
    CHECK(ironed_virtual_value(h, 0.25) == doctest::Approx(0.8));
    CHECK(ironed_virtual_value(h, 0.6) == doctest::Approx(0.8));
    CHECK(ironed_virtual_value(h, 1.0) == doctest::Approx(-3.6));
    CHECK_THROWS_AS(ironed_virtual_value(h, 0.0), DomainError);
    CHECK_THROWS_AS(ironed_virtual_value(h, 1.5), DomainError);
  }

  TEST_CASE("concave input is its own hull") {
    const std::vector<CurvePoint> pts{{0, 0}, {0.25, 0.75}, {0.5, 1.0}, {0.75, 0.875}, {1, 0.5}};
    CHECK(std::ranges::equal(iron(pts).vertices(), pts));
  }

  TEST_CASE("collinear interior points are dropped") {
    const std::vector<CurvePoint> pts{{0, 0}, {0.25, 0.25}, {0.5, 0.5}, {1, 0}};
    const auto h = iron(pts);
    CHECK(h.vertices().size() == 3);
    CHECK(h.vertices()[1] == CurvePoint{0.5, 0.5});
  }

  TEST_CASE("malformed inputs") {
    const std::vector<CurvePoint> one{{0, 0}};
    const std::vector<CurvePoint> dup{{0, 0}, {0.5, 1}, {0.5, 2}, {1, 0}};
    const std::vector<CurvePoint> unsorted{{0, 0}, {0.7, 1}, {0.3, 2}, {1, 0}};
    CHECK_THROWS_AS(iron(one), MalformedInput);
    CHECK_THROWS_AS(iron(dup), MalformedInput);
    CHECK_THROWS_AS(iron(unsorted), MalformedInput);
  }

  TEST_CASE("matches the brute-force hull on random lattice sets") {
    Stream rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
      const auto pts = lattice_points(rng, 2 + rng() % 11);
      const auto h = iron(pts);
      const auto expect = oracle::brute_force_hull(pts);
      REQUIRE(std::ranges::equal(h.vertices(), expect));
      REQUIRE(std::ranges::equal(h.slopes(), oracle::slopes_of(expect)));
    }
  }

  TEST_CASE("hull properties on random real-valued sets") {
    Stream rng(7);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<CurvePoint> pts{{0.0, 0.0}};
      const std::size_t n = 3 + rng() % 30;
      for (std::size_t i = 1; i + 1 < n; ++i) pts.push_back({static_cast<double>(i) / (n - 1), rng.uniform(0.0, 3.0)});
      pts.push_back({1.0, 0.0});
      const auto h = iron(pts);
      CHECK(h.is_concave());
      for (const auto& p : pts) CHECK(h.value_at(p.quantile) >= p.value - 1e-12);
      for (const auto& v : h.vertices()) CHECK(std::ranges::find(pts, v) != pts.end());
    }
  }
}
