#include "myerson_lab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "myerson_lab/distributions.hpp"
#include "myerson_lab/empirical_auction.hpp"
#include "myerson_lab/errors.hpp"
#include "myerson_lab/experiments.hpp"
#include "myerson_lab/lower_bound.hpp"
#include "myerson_lab/monte_carlo.hpp"
#include "myerson_lab/myerson.hpp"
#include "myerson_lab/text.hpp"

namespace myerson_lab {

namespace {

namespace fs = std::filesystem;

// Config errors that map to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Settings {
 public:
  Settings(std::map<std::string, std::string> defaults) : values_(std::move(defaults)) {}

  void set(const std::string& key, const std::string& value, const std::string& origin) {
    if (!values_.contains(key)) throw ConfigError("unknown config key '" + key + "' (" + origin + ")");
    values_[key] = value;
  }

  const std::string& str(const std::string& key) const { return values_.at(key); }
  double real(const std::string& key) const { return parse_real(str(key), key); }

  std::size_t count(const std::string& key) const {
    const double x = real(key);
    if (!(x >= 0.0) || x != std::floor(x) || x > 9.0e18) {
      throw ConfigError("'" + key + "' must be a nonnegative integer, got '" + str(key) + "'");
    }
    return static_cast<std::size_t>(x);
  }

  bool flag(const std::string& key) const {
    const auto& v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("'" + key + "' must be true or false, got '" + v + "'");
  }

  std::vector<std::size_t> counts(const std::string& key) const {
    std::vector<std::size_t> out;
    for (auto part : split(str(key), ',')) {
      const double x = parse_real(trim(part), key);
      if (!(x >= 0.0) || x != std::floor(x)) throw ConfigError("'" + key + "' entries must be integers");
      out.push_back(static_cast<std::size_t>(x));
    }
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

void load_config_file(Settings& s, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string uncommented = line.substr(0, line.find('#'));
    const auto body = trim(uncommented);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    s.set(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))),
          path + ":" + std::to_string(line_no));
  }
}

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct Context {
  Settings settings;
  std::uint64_t seed;
  int threads;
  std::string out_dir;
  std::string command;

  std::uint64_t config_hash() const {
    std::string bytes = command + "\nseed=" + std::to_string(seed) + "\n";
    for (const auto& [k, v] : settings.values()) bytes += k + "=" + v + "\n";
    return fnv1a(bytes);
  }

  std::string stamp() const {
    std::ostringstream s;
    s << "# " << command << " seed=" << seed << " config_hash=" << std::hex << std::setw(16) << std::setfill('0')
      << config_hash();
    return s.str();
  }
};

int resolve_env_threads() {
  const char* env = std::getenv("MYERSON_LAB_THREADS");
  if (!env || !*env) return 0;
  const auto n = parse_int(env, "MYERSON_LAB_THREADS");
  if (n < 0) throw ConfigError("MYERSON_LAB_THREADS must be nonnegative");
  return static_cast<int>(n);
}

std::uint64_t random_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

ProductDistribution product_from(const std::string& specs, std::size_t k) {
  auto parts = parse_distribution_list(specs);
  if (parts.empty()) throw ConfigError("no distribution given");
  if (k == 0) k = parts.size();
  if (parts.size() == 1) return ProductDistribution::iid(parts.front(), k);
  if (parts.size() != k) throw ConfigError(std::to_string(parts.size()) + " distributions for k=" + std::to_string(k));
  return ProductDistribution(std::move(parts));
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  return f;
}

void print_estimate(std::ostream& out, const char* label, const Estimate& e) {
  out << label << ' ' << format_real(e.mean) << " +- " << format_real(e.std_error) << '\n';
}

// ---------------------------------------------------------------------------

int cmd_myerson_eval(const Context& c, std::ostream& out) {
  const auto dists = product_from(c.settings.str("dists"), c.settings.count("k"));
  const std::size_t grid = c.settings.count("grid");
  const auto rule = grid == 0 ? myerson_auction(dists) : ironed_myerson_auction(dists, grid);
  const auto est = estimate_revenue_and_welfare(rule, dists, {c.seed, c.settings.count("trials"), c.threads});
  out << c.stamp() << '\n';
  print_estimate(out, "revenue", est.revenue);
  print_estimate(out, "virtual_welfare", est.virtual_welfare);
  out << "trials " << est.revenue.trials << '\n';
  return kExitOk;
}

int cmd_learn(const Context& c, std::ostream& out) {
  const auto& path = c.settings.str("samples");
  if (path.empty()) throw ConfigError("learn needs samples=<path>");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sample file '" + path + "'");
  const auto samples = SampleMatrix::read(in);
  double xi = c.settings.real("xi_hat");
  if (xi == 0.0) xi = default_xi_hat(c.settings.real("epsilon"), samples.bidders(), samples.samples_per_bidder());
  const auto auction = learn(samples, xi, LearnOptions{c.settings.flag("iron")});

  std::string target = c.settings.str("auction");
  if (target.empty() && !c.out_dir.empty()) {
    fs::create_directories(c.out_dir);
    target = (fs::path(c.out_dir) / "auction.txt").string();
  }
  auto emit = [&](std::ostream& o) {
    o << c.stamp() << '\n' << "# xi_hat=" << format_real(xi) << " k=" << samples.bidders()
      << " m=" << samples.samples_per_bidder() << '\n';
    auction.write(o);
  };
  if (target.empty()) {
    emit(out);
  } else {
    auto f = open_output(target);
    emit(f);
    out << c.stamp() << '\n' << "wrote " << target << '\n';
  }
  return kExitOk;
}

int cmd_empirical_eval(const Context& c, std::ostream& out) {
  const auto& path = c.settings.str("auction");
  if (path.empty()) throw ConfigError("empirical-eval needs auction=<path>");
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open auction file '" + path + "'");
  const auto auction = EmpiricalMyersonAuction::read(in);
  out << c.stamp() << '\n';

  const auto& bids_path = c.settings.str("bids");
  if (!bids_path.empty()) {
    std::ifstream bf(bids_path);
    if (!bf) throw ConfigError("cannot open bid file '" + bids_path + "'");
    std::string line;
    while (std::getline(bf, line)) {
      const auto body = trim(line);
      if (body.empty() || body.front() == '#') continue;
      std::istringstream ls{std::string(body)};
      std::vector<double> bids;
      std::string tok;
      while (ls >> tok) bids.push_back(parse_real(tok, "bid"));
      const auto o = auction.run(bids);
      out << "winner " << (o.winner ? std::to_string(*o.winner) : std::string("none")) << " payment "
          << format_real(o.payment) << '\n';
    }
    return kExitOk;
  }
  const auto& specs = c.settings.str("dists");
  if (specs.empty()) throw ConfigError("empirical-eval needs bids=<path> or dists=<specs>");
  const auto dists = product_from(specs, auction.bidder_count());
  const auto est = estimate_revenue_and_welfare(auction, dists, {c.seed, c.settings.count("trials"), c.threads});
  print_estimate(out, "revenue", est.revenue);
  print_estimate(out, "virtual_welfare", est.virtual_welfare);
  out << "trials " << est.revenue.trials << '\n';
  return kExitOk;
}

int cmd_sweep(const Context& c, std::ostream& out) {
  ExperimentConfig cfg;
  cfg.scenario = c.settings.str("scenario");
  cfg.distributions = c.settings.str("dists");
  cfg.k = c.settings.count("k");
  cfg.m_grid = c.settings.counts("m_grid");
  cfg.trials = c.settings.count("trials");
  cfg.replications = c.settings.count("replications");
  cfg.epsilon = c.settings.real("epsilon");
  cfg.xi_hat = c.settings.real("xi_hat");
  cfg.record_runtime = c.settings.flag("record_runtime");
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  const auto report = convergence_sweep(cfg);

  out << c.stamp() << '\n';
  out << "m,mean_ratio,stderr\n";
  for (const auto& s : report.summary) {
    out << s.m << ',' << format_real(s.mean_ratio) << ',' << format_real(s.std_error) << '\n';
  }
  if (!c.out_dir.empty()) {
    const auto dir = make_run_directory(c.out_dir, c.seed);
    write_report(report, dir);
    out << "wrote " << dir.string() << '\n';
  }
  return kExitOk;
}

int cmd_lower_bound(const Context& c, std::ostream& out) {
  const std::size_t k = c.settings.count("k");
  const double alpha = c.settings.real("alpha");
  const double delta = c.settings.real("delta");
  const std::size_t m = c.settings.count("m");
  const std::size_t trials = c.settings.count("trials");
  check_lower_bound_params(k, alpha, delta);

  std::vector<CheckResult> checks;
  std::ostringstream csv;
  csv << "quantity,k,alpha,delta,m,trials,value,stderr,seed\n";
  auto row = [&](const std::string& name, std::size_t n, double value, double se, std::uint64_t seed) {
    csv << name << ',' << k << ',' << format_real(alpha) << ',' << format_real(delta) << ',' << m << ',' << n << ','
        << format_real(value) << ',' << format_real(se) << ',' << seed << '\n';
  };

  const double eps = epsilon_bound(alpha, delta, k);
  const double r_star = optimal_revenue_upper_bound(alpha, delta, k);
  row("epsilon_bound", 0, eps, 0.0, c.seed);
  row("r_star", 0, r_star, 0.0, c.seed);

  const std::uint64_t s_event = derive_seed(c.seed, 1);
  const auto freq = event_frequency(k, alpha, delta, m, trials, s_event, c.threads);
  row("event_E_frequency", trials, freq.mean, freq.std_error, s_event);
  CheckResult ev{"event_E_frequency", false, freq.mean, event_probability_bound(delta), 3.0 * freq.std_error, ""};
  ev.passed = freq.mean >= ev.target - ev.tolerance;
  checks.push_back(ev);

  const std::uint64_t s_guess = derive_seed(c.seed, 2);
  const std::size_t guess_trials = c.settings.count("guess_trials");
  CheckResult gc{"guess_error_one_third", false, 0.0, 1.0 / 3.0, 0.01, ""};
  try {
    const auto g = bayes_guess_error(k, alpha, delta, m, guess_trials, s_guess, GuessRule::LowerValuation,
                                     c.settings.count("budget"), c.threads);
    row("guess_error", g.accepted, g.error_rate, g.std_error, s_guess);
    gc.measured = g.error_rate;
    gc.passed = std::abs(g.error_rate - gc.target) <= gc.tolerance;
    gc.detail = std::to_string(g.raw_draws) + " raw draws";
  } catch (const BudgetExceeded& e) {
    row("guess_error", e.accepted(), std::nan(""), std::nan(""), s_guess);
    gc.detail = e.what();
  }
  checks.push_back(gc);

  const std::uint64_t s_gap = derive_seed(c.seed, 3);
  const auto gap = revenue_gap_experiment(k, alpha, delta, m, trials, s_gap, genie_guess_strategy(), c.threads);
  row("revenue_gap_over_r_star", trials, gap.ratio, gap.ratio_std_error, s_gap);

  CheckResult rc{"r_star_dominance", true, -1e300, r_star, 0.0, ""};
  const std::size_t instances = c.settings.count("instances");
  for (std::size_t i = 0; i < instances; ++i) {
    Stream rng(derive_seed(c.seed, 4, i));
    const auto inst = sample_instance(k, alpha, delta, rng);
    const std::uint64_t s = derive_seed(c.seed, 5, i);
    const auto rev = estimate_revenue(myerson_auction(inst.distributions), inst.distributions,
                                      {s, c.settings.count("instance_trials"), c.threads});
    row("instance_revenue", rev.trials, rev.mean, rev.std_error, s);
    const double slack = rev.mean - (r_star + 3.0 * rev.std_error);
    rc.measured = std::max(rc.measured, slack);
    rc.passed = rc.passed && slack <= 0.0;
  }
  if (instances > 0) checks.push_back(rc);

  out << c.stamp() << '\n';
  out << "epsilon_bound " << format_real(eps) << "\nr_star " << format_real(r_star) << '\n';
  out << "revenue_gap_over_r_star " << format_real(gap.ratio) << " +- " << format_real(gap.ratio_std_error) << '\n';
  print_checks(out, checks);
  if (!c.out_dir.empty()) {
    const auto dir = make_run_directory(c.out_dir, c.seed);
    auto f = open_output(dir / "lower_bound.csv");
    f << csv.str();
    out << "wrote " << dir.string() << '\n';
  }
  const bool ok = std::ranges::all_of(checks, [](const CheckResult& r) { return r.passed; });
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_verify(const Context& c, std::ostream& out) {
  LemmaSuiteOptions opts;
  opts.seed = c.seed;
  opts.threads = c.threads;
  opts.scale = c.settings.real("scale");
  if (!(opts.scale > 0.0)) throw ConfigError("scale must be positive");
  opts.disable_ironing = c.settings.flag("disable_ironing");
  opts.uniform_guess = c.settings.flag("uniform_guess");
  const auto checks = lemma_suite(opts);
  out << c.stamp() << '\n';
  print_checks(out, checks);
  const bool ok = std::ranges::all_of(checks, [](const CheckResult& r) { return r.passed; });
  return ok ? kExitOk : kExitVerificationFailed;
}

struct Command {
  const char* name;
  const char* help;
  std::map<std::string, std::string> defaults;
  int (*run)(const Context&, std::ostream&);
};

std::vector<Command> commands() {
  return {
      {"myerson-eval", "Monte Carlo revenue of Myerson's auction for known distributions",
       {{"dists", "exponential"}, {"k", "0"}, {"trials", "1000000"}, {"grid", "0"}}, cmd_myerson_eval},
      {"learn", "Learn an empirical Myerson auction from a sample file",
       {{"samples", ""}, {"xi_hat", "0"}, {"epsilon", "0.05"}, {"iron", "true"}, {"auction", ""}}, cmd_learn},
      {"empirical-eval", "Evaluate a learned auction on a bid file or on fresh draws",
       {{"auction", ""}, {"bids", ""}, {"dists", ""}, {"trials", "100000"}}, cmd_empirical_eval},
      {"sweep", "Empirical Myerson convergence sweep",
       {{"scenario", "convergence"},
        {"dists", "exponential"},
        {"k", "2"},
        {"m_grid", "100,1000,10000"},
        {"trials", "100000"},
        {"replications", "20"},
        {"epsilon", "0.05"},
        {"xi_hat", "0"},
        {"record_runtime", "false"}},
       cmd_sweep},
      {"lower-bound", "Adversarial construction battery",
       {{"k", "2"},
        {"alpha", "0"},
        {"delta", "0.5"},
        {"m", "1"},
        {"trials", "1000000"},
        {"guess_trials", "100000"},
        {"budget", "100000000"},
        {"instances", "10"},
        {"instance_trials", "100000"}},
       cmd_lower_bound},
      {"verify", "Run the verification battery",
       {{"scale", "1"}, {"disable_ironing", "false"}, {"uniform_guess", "false"}}, cmd_verify},
  };
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Revenue-optimal auctions from samples"};
  app.require_subcommand(1);
  Common common;
  const auto cmds = commands();
  std::vector<CLI::App*> subs;
  for (const auto& cmd : cmds) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", common.config_path, "key = value config file");
    sub->add_option("--set", common.sets, "override one key (repeatable)")->allow_extra_args(false);
    sub->add_option("--out", common.out_dir, "output directory");
    sub->add_option("--seed", common.seed, "base seed (random when absent)");
    sub->add_option("--threads", common.threads, "worker threads (default $MYERSON_LAB_THREADS)");
    std::string keys;
    for (const auto& [key, value] : cmd.defaults) keys += "\n  " + key + " = " + (value.empty() ? "\"\"" : value);
    sub->footer("Config keys:" + keys);
    subs.push_back(sub);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      const auto chosen = app.get_subcommands();
      out << (chosen.empty() ? app.help() : chosen.front()->help());
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  const std::size_t which = static_cast<std::size_t>(
      std::ranges::find_if(subs, [](const CLI::App* s) { return s->parsed(); }) - subs.begin());
  const Command& cmd = cmds[which];
  try {
    Settings settings(cmd.defaults);
    if (!common.config_path.empty()) load_config_file(settings, common.config_path);
    for (const auto& kv : common.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      settings.set(std::string(trim(std::string_view(kv).substr(0, eq))),
                   std::string(trim(std::string_view(kv).substr(eq + 1))), "--set");
    }
    const int threads = common.threads ? *common.threads : resolve_env_threads();
    if (threads < 0) throw ConfigError("--threads must be nonnegative");
    Context ctx{std::move(settings), common.seed ? *common.seed : random_seed(), threads, common.out_dir, cmd.name};
    if (!common.seed) err << "seed " << ctx.seed << '\n';
    return cmd.run(ctx, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const MalformedInput& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace myerson_lab
