#include "myerson_lab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "myerson_lab/distributions.hpp"
#include "myerson_lab/empirical_auction.hpp"
#include "myerson_lab/errors.hpp"
#include "myerson_lab/lower_bound.hpp"
#include "myerson_lab/monte_carlo.hpp"
#include "myerson_lab/myerson.hpp"
#include "myerson_lab/random.hpp"
#include "myerson_lab/text.hpp"

#ifndef MYERSON_LAB_VERSION
#define MYERSON_LAB_VERSION "dev"
#endif

namespace myerson_lab {

const char* code_version() { return MYERSON_LAB_VERSION; }

namespace {

ProductDistribution build_product(const std::string& specs, std::size_t k) {
  auto parts = parse_distribution_list(specs);
  if (parts.size() == 1) return ProductDistribution::iid(parts.front(), k);
  if (parts.size() != k) {
    throw ParameterError("got " + std::to_string(parts.size()) + " distribution specs for k=" + std::to_string(k));
  }
  return ProductDistribution(std::move(parts));
}

std::string join_grid(const std::vector<std::size_t>& grid) {
  std::string s;
  for (std::size_t i = 0; i < grid.size(); ++i) s += (i ? "," : "") + std::to_string(grid[i]);
  return s;
}

}  // namespace

std::map<std::string, std::string> ExperimentConfig::to_map() const {
  return {
      {"scenario", scenario},
      {"distributions", distributions},
      {"k", std::to_string(k)},
      {"m_grid", join_grid(m_grid)},
      {"trials", std::to_string(trials)},
      {"replications", std::to_string(replications)},
      {"epsilon", format_real(epsilon)},
      {"xi_hat", format_real(xi_hat)},
      {"seed", std::to_string(seed)},
  };
}

std::uint64_t ExperimentConfig::hash() const {
  std::string bytes;
  for (const auto& [key, value] : to_map()) bytes += key + "=" + value + "\n";
  return fnv1a(bytes);
}

void ExperimentConfig::validate() const {
  if (m_grid.empty()) throw ParameterError("m_grid must not be empty");
  for (std::size_t i = 1; i < m_grid.size(); ++i) {
    if (m_grid[i] <= m_grid[i - 1]) throw ParameterError("m_grid must be strictly ascending");
  }
  if (m_grid.front() < 2) throw ParameterError("every m in m_grid must be at least 2");
  if (trials < 1) throw ParameterError("trials must be at least 1");
  if (replications < 1) throw ParameterError("replications must be at least 1");
  if (k < 1) throw ParameterError("k must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  if (!(xi_hat >= 0.0 && xi_hat <= 1.0)) throw ParameterError("xi_hat must lie in [0, 1]");
  build_product(distributions, k);
}

ExperimentReport convergence_sweep(const ExperimentConfig& config) {
  config.validate();
  const ProductDistribution dists = build_product(config.distributions, config.k);
  const VirtualValueAuction optimal = myerson_auction(dists);

  ExperimentReport report;
  report.config = config;
  for (std::size_t m : config.m_grid) {
    const double xi = config.xi_hat > 0.0 ? config.xi_hat : default_xi_hat(config.epsilon, config.k, m);
    Accumulator across;
    for (std::size_t rep = 0; rep < config.replications; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const std::uint64_t cell_seed = derive_seed(config.seed, m, rep);
      Stream sample_rng(derive_seed(cell_seed, 0));
      const auto learned = learn(SampleMatrix::draw(dists, m, sample_rng), xi);
      const auto cmp = compare_revenue(learned, optimal, dists,
                                       RunOptions{derive_seed(cell_seed, 1), config.trials, config.threads});
      const auto t1 = std::chrono::steady_clock::now();
      CellRecord cell;
      cell.m = m;
      cell.replication = rep;
      cell.ratio = cmp.ratio;
      cell.std_error = cmp.ratio_std_error;
      cell.seed = cell_seed;
      cell.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      cell.xi_hat = xi;
      report.cells.push_back(cell);
      across.add(cmp.ratio);
    }
    report.summary.push_back({m, across.mean(), across.std_error()});
  }
  return report;
}

void ExperimentReport::write_csv(std::ostream& out) const {
  out << "m,replication,ratio,stderr,seed,runtime_ms\n";
  for (const auto& c : cells) {
    out << c.m << ',' << c.replication << ',' << format_real(c.ratio) << ',' << format_real(c.std_error) << ','
        << c.seed << ',';
    if (config.record_runtime) out << std::fixed << std::setprecision(3) << c.runtime_ms << std::defaultfloat;
    out << '\n';
  }
}

void ExperimentReport::write_timings(std::ostream& out) const {
  out << "m,replication,runtime_ms\n";
  for (const auto& c : cells) {
    out << c.m << ',' << c.replication << ',' << std::fixed << std::setprecision(3) << c.runtime_ms
        << std::defaultfloat << '\n';
  }
}

void ExperimentReport::write_summary_json(std::ostream& out) const {
  nlohmann::ordered_json j;
  j["code_version"] = code_version();
  j["seed"] = config.seed;
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << config.hash();
  j["config_hash"] = hash.str();
  j["config"] = config.to_map();
  auto& per_m = j["per_m"] = nlohmann::ordered_json::array();
  for (const auto& s : summary) {
    per_m.push_back({{"m", s.m}, {"mean_ratio", s.mean_ratio}, {"std_error", s.std_error}});
  }
  out << j.dump(2) << '\n';
}

std::filesystem::path make_run_directory(const std::filesystem::path& root, std::uint64_t seed) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &utc);
  const std::string base = std::string(stamp) + "_seed" + std::to_string(seed);
  std::filesystem::create_directories(root);
  std::filesystem::path dir = root / base;
  for (int n = 2; std::filesystem::exists(dir); ++n) dir = root / (base + "_" + std::to_string(n));
  std::filesystem::create_directory(dir);
  return dir;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("results.csv");
    report.write_csv(f);
  }
  {
    auto f = open("timings.csv");
    report.write_timings(f);
  }
  auto f = open("summary.json");
  report.write_summary_json(f);
}

// ---------------------------------------------------------------------------

namespace {

std::size_t scaled(double scale, std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(scale * static_cast<double>(n))));
}

CheckResult check_monopoly_quantiles() {
  CheckResult r{"monopoly_quantile_identities", false, 0.0, 0.0, 1e-9, ""};
  for (double a : {0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
    const double expect = a == 1.0 ? 1.0 / std::numbers::e : std::pow(a, 1.0 / (1.0 - a));
    r.measured = std::max(r.measured, std::abs(monopoly_quantile(StronglyRegularBase(a)) - expect));
  }
  r.passed = r.measured <= r.tolerance;
  r.detail = "max |q_mono - closed form| over alpha in {0.1,0.25,0.5,0.75,0.9,1}";
  return r;
}

CheckResult revenue_welfare_check(std::string name, const AuctionRule& rule, const ProductDistribution& dists,
                                  const RunOptions& opts) {
  const auto est = estimate_revenue_and_welfare(rule, dists, opts);
  CheckResult r{std::move(name), false, est.difference.mean, 0.0, 3.0 * est.difference.std_error, ""};
  r.passed = std::abs(r.measured) <= r.tolerance;
  r.detail = "revenue " + format_real(est.revenue.mean) + " vs virtual welfare " + format_real(est.virtual_welfare.mean);
  return r;
}

}  // namespace

std::vector<CheckResult> lemma_suite(const LemmaSuiteOptions& o) {
  std::vector<CheckResult> out;
  auto seed = [&](std::uint64_t tag) { return derive_seed(o.seed, tag); };

  out.push_back(check_monopoly_quantiles());

  // Revenue equals virtual welfare for every truthful rule.
  {
    const std::size_t n = scaled(o.scale, 200'000);
    const auto expo = parse_distribution("exponential");
    const auto one = ProductDistribution::iid(expo, 1);
    const auto two = ProductDistribution::iid(expo, 2);
    const ProductDistribution mixed(parse_distribution_list("base(alpha=0.25);base(alpha=0.5);base(alpha=1)"));
    out.push_back(revenue_welfare_check("revenue_eq_virtual_welfare/myerson_1exp", myerson_auction(one), one,
                                        {seed(10), n, o.threads}));
    out.push_back(revenue_welfare_check("revenue_eq_virtual_welfare/myerson_2exp", myerson_auction(two), two,
                                        {seed(11), n, o.threads}));
    out.push_back(revenue_welfare_check("revenue_eq_virtual_welfare/myerson_mixed", myerson_auction(mixed), mixed,
                                        {seed(12), n, o.threads}));
    Stream rng(seed(13));
    const auto samples = SampleMatrix::draw(two, 12, rng);
    const auto learned = learn(samples, 2.0 / 12.0, LearnOptions{!o.disable_ironing});
    out.push_back(revenue_welfare_check("revenue_eq_virtual_welfare/empirical_m12", learned, two,
                                        {seed(14), scaled(o.scale, 1'000'000), o.threads}));
  }

  // Order statistics stay inside the widened empirical quantile band.
  {
    const double gamma = 0.5;
    const std::size_t m = 1230;
    const double xi = 123.0 / 1230.0;
    const double delta = 0.1;
    const std::size_t n = scaled(o.scale, 1000);
    const double rate =
        verify_quantile_sandwich(StronglyRegularBase(1.0), m, gamma, xi, n, seed(20), o.threads);
    CheckResult r{"quantile_sandwich", false, rate, delta, 0.0, ""};
    r.tolerance = 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(n));
    r.passed = rate <= delta + r.tolerance;
    r.detail = "violation rate, m=1230 (bound " + format_real(std::ceil(quantile_sandwich_sample_bound(gamma, xi, delta))) +
               "), gamma=0.5, xi_hat=0.1";
    out.push_back(r);
  }

  // Conditioned on E, the lower-valuation guess errs a third of the time.
  {
    const std::size_t n = scaled(o.scale, 100'000);
    CheckResult r{"guess_error_one_third", false, 0.0, 1.0 / 3.0, 0.01, ""};
    try {
      const auto g = bayes_guess_error(2, 0.0, 0.5, 1, n, seed(30),
                                       o.uniform_guess ? GuessRule::Uniform : GuessRule::LowerValuation,
                                       kDefaultDrawBudget, o.threads);
      r.measured = g.error_rate;
      r.passed = std::abs(g.error_rate - r.target) <= r.tolerance;
      r.detail = std::to_string(g.accepted) + " conditioned trials from " + std::to_string(g.raw_draws) + " draws";
    } catch (const BudgetExceeded& e) {
      r.detail = e.what();
    }
    out.push_back(r);
  }

  // Event E is at least as likely as the closed-form bound.
  {
    const std::size_t n = scaled(o.scale, 1'000'000);
    const auto f = event_frequency(5, 0.0, 0.5, 10, n, seed(40), o.threads);
    CheckResult r{"event_E_frequency", false, f.mean, event_probability_bound(0.5), 3.0 * f.std_error, ""};
    r.passed = f.mean >= r.target - r.tolerance;
    r.detail = "k=5, delta=0.5, m=10";
    out.push_back(r);
  }

  // Instance-aware Myerson never beats R*.
  {
    const std::size_t n = scaled(o.scale, 100'000);
    CheckResult r{"r_star_dominance", true, -1e300, 0.0, 0.0, ""};
    std::size_t idx = 0;
    for (std::size_t k : {2u, 5u}) {
      for (double a : {0.0, 0.5, 1.0}) {
        for (int rep = 0; rep < 2; ++rep, ++idx) {
          Stream rng(seed(50 + idx));
          const auto inst = sample_instance(k, a, 0.5, rng);
          const auto rev = estimate_revenue(myerson_auction(inst.distributions), inst.distributions,
                                            {seed(100 + idx), n, o.threads});
          const double r_star = optimal_revenue_upper_bound(inst);
          const double slack = rev.mean - (r_star + 3.0 * rev.std_error);
          if (slack > r.measured) {
            r.measured = slack;
            r.detail = "worst: k=" + std::to_string(k) + " alpha=" + format_real(a) + " revenue " +
                       format_real(rev.mean) + " vs R* " + format_real(r_star);
          }
          r.passed = r.passed && slack <= 0.0;
        }
      }
    }
    out.push_back(r);
  }
  return out;
}

void print_checks(std::ostream& out, const std::vector<CheckResult>& checks) {
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << format_real(c.measured)
        << " target=" << format_real(c.target) << " tol=" << format_real(c.tolerance);
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << '\n';
  }
}

}  // namespace myerson_lab
