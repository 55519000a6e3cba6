#include <cstring>
#include <set>

#include "doctest.h"
#include "myerson_lab/distributions.hpp"
#include "myerson_lab/empirical_auction.hpp"
#include "myerson_lab/errors.hpp"
#include "myerson_lab/monte_carlo.hpp"
#include "myerson_lab/myerson.hpp"
#include "myerson_lab/random.hpp"

using namespace myerson_lab;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_bits(const Estimate& a, const Estimate& b) {
  return same_bits(a.mean, b.mean) && same_bits(a.std_error, b.std_error) && a.trials == b.trials;
}

}  // namespace

TEST_SUITE("monte_carlo") {
  TEST_CASE("streams") {
    Stream a(1), b(1), c(2);
    CHECK(a() == b());
    CHECK(a() != c());
    for (int i = 0; i < 100000; ++i) {
      const double u = a.uniform();
      REQUIRE(u > 0.0);
      REQUIRE(u < 1.0);
    }
    std::set<std::uint64_t> seeds;
    for (std::uint64_t t = 0; t < 1000; ++t) seeds.insert(derive_seed(42, t));
    CHECK(seeds.size() == 1000);
    CHECK(derive_seed(42, 1, 2) != derive_seed(42, 2, 1));
  }

  TEST_CASE("accumulator") {
    Accumulator acc;
    for (double x : {1.0, 2.0, 3.0, 4.0}) acc.add(x);
    CHECK(acc.mean() == 2.5);
    CHECK(acc.variance() == doctest::Approx(5.0 / 3.0));
    CHECK(acc.std_error() == doctest::Approx(std::sqrt(5.0 / 12.0)));
  }

  TEST_CASE("parallel kernels reproduce the serial reference bit for bit") {
    const ProductDistribution d(parse_distribution_list("base(alpha=0.5);exponential;base(alpha=0.25)"));
    const auto rule = myerson_auction(d);
    // Spans several parallel blocks, the last one partial.
    const std::size_t n = 3 * kTrialBlock + 123;
    const auto serial = estimate_revenue_and_welfare_serial(rule, d, {31, n, 1});
    for (int threads : {1, 2, 3, 8}) {
      const auto par = estimate_revenue_and_welfare(rule, d, {31, n, threads});
      CHECK(same_bits(serial.revenue, par.revenue));
      CHECK(same_bits(serial.virtual_welfare, par.virtual_welfare));
      CHECK(same_bits(serial.difference, par.difference));
    }
  }

  TEST_CASE("empirical auctions are deterministic across thread counts") {
    const auto d = ProductDistribution::iid(parse_distribution("exponential"), 2);
    Stream rng(3);
    const auto learned = learn(SampleMatrix::draw(d, 200, rng), 0.05);
    const auto a = estimate_revenue(learned, d, {8, 40000, 1});
    const auto b = estimate_revenue(learned, d, {8, 40000, 4});
    CHECK(same_bits(a, b));
  }

  TEST_CASE("exceptions inside trials propagate") {
    CHECK_THROWS_AS(run_trials<1>(100, 2,
                                  [](std::size_t t) -> std::array<double, 1> {
                                    if (t == 57) throw DomainError("boom");
                                    return {0.0};
                                  }),
                    DomainError);
  }

  TEST_CASE("shape checks") {
    const auto d = ProductDistribution::iid(parse_distribution("exponential"), 2);
    CHECK_THROWS_AS(estimate_revenue(AlwaysReject(3), d, {1, 10, 1}), ParameterError);
    CHECK_THROWS_AS(estimate_revenue(AlwaysReject(2), d, {1, 0, 1}), ParameterError);
  }

  TEST_CASE("ratio standard error from common random numbers") {
    const auto d = ProductDistribution::iid(parse_distribution("exponential"), 2);
    const auto opt = myerson_auction(d);
    const auto cmp = compare_revenue(opt, opt, d, {2, 10000, 0});
    CHECK(cmp.ratio == 1.0);
    CHECK(cmp.ratio_std_error == doctest::Approx(0.0).epsilon(1e-9));
  }
}
