#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "myerson_lab/distributions.hpp"
#include "myerson_lab/errors.hpp"
#include "myerson_lab/random.hpp"

using namespace myerson_lab;

namespace {

// Kolmogorov-Smirnov statistic of `xs` against `cdf`.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace

TEST_SUITE("distributions") {
  TEST_CASE("quantile_to_value closed forms") {
    CHECK(StronglyRegularBase(0.0).quantile_to_value(1.0) == 0.0);
    CHECK(StronglyRegularBase(0.0).quantile_to_value(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(StronglyRegularBase(1.0).quantile_to_value(1.0 / std::numbers::e) == doctest::Approx(1.0).epsilon(1e-15));
    // alpha = 0.5: 2 ((1/q)^0.5 - 1); q = 0.25 gives 2.
    CHECK(StronglyRegularBase(0.5).quantile_to_value(0.25) == doctest::Approx(2.0).epsilon(1e-15));
  }

  TEST_CASE("quantile_to_value rejects quantiles outside (0, 1]") {
    const StronglyRegularBase d(0.5);
    CHECK_THROWS_AS(d.quantile_to_value(0.0), DomainError);
    CHECK_THROWS_AS(d.quantile_to_value(-0.1), DomainError);
    CHECK_THROWS_AS(d.quantile_to_value(1.5), DomainError);
    CHECK_THROWS_AS(StronglyRegularBase(1.5), ParameterError);
  }

  TEST_CASE("virtual values") {
    CHECK(StronglyRegularBase(0.0).virtual_value(5.0) == -1.0);
    CHECK(StronglyRegularBase(1.0).virtual_value(1.0) == 0.0);
    const TruncatedDistribution t(0.5, 3.0);
    CHECK(t.virtual_value(3.0) == 3.0);
    CHECK(t.virtual_value(2.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(t.virtual_value(3.5), DomainError);
  }

  TEST_CASE("hazard formula agrees with the closed form") {
    for (double a : {0.0, 0.3, 0.7, 1.0}) {
      const StronglyRegularBase d(a);
      for (double v : {0.0, 0.5, 2.0, 7.0}) {
        CHECK(hazard_virtual_value(d, v) == doctest::Approx(a * v - 1.0).epsilon(1e-9));
      }
    }
    const UniformDistribution u(0.0, 1.0);
    CHECK(u.virtual_value(0.75) == doctest::Approx(0.5));
    CHECK_THROWS_AS(hazard_virtual_value(u, 1.5), SingularityError);
  }

  TEST_CASE("monopoly quantiles") {
    CHECK(monopoly_quantile(StronglyRegularBase(1.0)) == doctest::Approx(0.36787944117144233).epsilon(1e-10));
    CHECK(monopoly_quantile(StronglyRegularBase(0.25)) == doctest::Approx(0.15749013123685915).epsilon(1e-10));
    CHECK(monopoly_quantile(StronglyRegularBase(0.5)) == doctest::Approx(0.25).epsilon(1e-10));
    for (double a : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      CHECK(std::abs(monopoly_quantile(StronglyRegularBase(a)) - std::pow(a, 1.0 / (1.0 - a))) <= 1e-9);
    }
    CHECK(monopoly_price(StronglyRegularBase(1.0)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(monopoly_quantile(StronglyRegularBase(0.0)), NoReserveError);
  }

  TEST_CASE("truncation keeps the monopoly quantile at or above the base one") {
    Stream rng(3);
    for (int i = 0; i < 200; ++i) {
      const double a = rng.uniform(0.05, 0.95);
      const double qa = std::pow(a, 1.0 / (1.0 - a));
      const auto t = TruncatedDistribution::at_quantile(a, rng.uniform(1e-6, qa));
      CHECK(monopoly_quantile(t) >= qa - 1e-9);
    }
  }

  TEST_CASE("strong regularity checks") {
    Stream rng(11);
    for (double a : {0.0, 0.25, 0.5, 1.0}) {
      std::vector<std::pair<double, double>> grid;
      for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(0.0, 50.0);
        grid.emplace_back(x, x + rng.uniform(1e-6, 50.0));
      }
      CHECK(verify_strong_regularity(StronglyRegularBase(a), a, grid).holds);
    }
    const std::vector<std::pair<double, double>> pair01{{0.0, 1.0}};
    CHECK_FALSE(verify_strong_regularity(StronglyRegularBase(0.0), 0.5, pair01).holds);

    const TruncatedDistribution t(0.5, 3.0);
    std::vector<std::pair<double, double>> below;
    for (int i = 0; i < 100; ++i) {
      const double x = rng.uniform(0.0, 2.9);
      below.emplace_back(x, rng.uniform(x, 3.0));
    }
    CHECK(verify_strong_regularity(t, 0.5, below).holds);

    const std::vector<std::pair<double, double>> outside{{1.0, 4.0}, {2.0, 1.0}};
    const auto r = verify_strong_regularity(t, 0.5, outside);
    CHECK(r.holds);
    CHECK(r.skipped == 2);
  }

  TEST_CASE("fixed-uniform sampling") {
    CHECK(StronglyRegularBase(0.3).sample_at(1.0) == 0.0);
    CHECK(TruncatedDistribution(0.3, 2.0).sample_at(1.0) == 0.0);
    CHECK(StronglyRegularBase(1.0).sample_at(1.0 / std::numbers::e) == doctest::Approx(1.0));
    CHECK(TruncatedDistribution(0.0, 2.0).sample_at(0.1) == 2.0);
  }

  TEST_CASE("round trip and monotonicity of the quantile map") {
    for (double a : {0.0, 0.2, 0.5, 0.8, 1.0}) {
      const StronglyRegularBase d(a);
      double prev = std::numeric_limits<double>::infinity();
      for (double lq = -6.0; lq <= 0.0; lq += 0.01) {
        const double q = std::pow(10.0, lq);
        const double v = d.quantile_to_value(q);
        CHECK(std::abs(d.value_to_quantile(v) - q) <= 1e-9);
        CHECK(v < prev);
        prev = v;
      }
    }
  }

  TEST_CASE("sampling matches the cdf (Kolmogorov-Smirnov)") {
    const std::size_t n = 20000;
    // 1% critical value ~ 1.63 / sqrt(n).
    const double crit = 1.63 / std::sqrt(static_cast<double>(n));
    for (double a : {0.0, 0.5, 1.0}) {
      const StronglyRegularBase d(a);
      Stream rng(derive_seed(99, static_cast<std::uint64_t>(a * 10)));
      std::vector<double> xs(n);
      for (auto& x : xs) x = d.sample(rng);
      CHECK(ks_statistic(xs, [&](double v) { return d.cdf(v); }) < crit);
    }
  }

  TEST_CASE("truncation atom frequency") {
    const auto t = TruncatedDistribution::at_quantile(0.5, 0.2);
    Stream rng(5);
    const std::size_t n = 100000;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += t.sample(rng) == t.truncation_value();
    const double p = t.atom_quantile();
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    CHECK(p == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(std::abs(static_cast<double>(hits) / static_cast<double>(n) - p) <= 4.0 * se);
    CHECK(t.value_to_quantile(t.truncation_value()) == p);
    CHECK(t.cdf(t.truncation_value()) == 1.0);
  }

  TEST_CASE("product sampling draws coordinates in bidder order") {
    const auto p = ProductDistribution::iid(std::make_shared<StronglyRegularBase>(1.0), 3);
    Stream a(42);
    Stream b(42);
    const auto xs = p.sample(a);
    REQUIRE(xs.size() == 3);
    for (double x : xs) CHECK(x == p[0].sample(b));
    CHECK_THROWS_AS(ProductDistribution({}), ParameterError);
  }

  TEST_CASE("distribution grammar") {
    CHECK(parse_distribution("exponential")->describe() == parse_distribution("base(alpha=1)")->describe());
    const auto t = parse_distribution("truncated(alpha=0.5, H=3)");
    CHECK(t->virtual_value(3.0) == 3.0);
    const auto tq = parse_distribution(" truncated_q(alpha=0, q=0.125) ");
    CHECK(tq->support().hi == doctest::Approx(7.0));
    CHECK(parse_distribution_list("exponential; base(alpha=0.25)").size() == 2);
    CHECK_THROWS_AS(parse_distribution("gamma(alpha=1)"), MalformedInput);
    CHECK_THROWS_AS(parse_distribution("base(alpha=2)"), MalformedInput);
    CHECK_THROWS_AS(parse_distribution("base(beta=1)"), MalformedInput);
    CHECK_THROWS_AS(parse_distribution("truncated(alpha=0.5)"), MalformedInput);
    CHECK_THROWS_AS(parse_distribution("base(alpha=x)"), MalformedInput);
  }
}
