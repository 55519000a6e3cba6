#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace myerson_lab {

/// Version tag written into every report.
const char* code_version();

struct ExperimentConfig {
  std::string scenario = "convergence";
  std::string distributions = "exponential";  // ';'-separated specs, or one spec repeated k times
  std::size_t k = 2;
  std::vector<std::size_t> m_grid = {100, 1000, 10000};
  std::size_t trials = 100'000;
  std::size_t replications = 20;
  double epsilon = 0.05;
  double xi_hat = 0.0;  // 0: default_xi_hat(epsilon, k, m)
  std::uint64_t seed = 0;
  int threads = 0;
  /// Fill the CSV runtime column. Off by default so reruns are byte-identical;
  /// timings then go to a separate file.
  bool record_runtime = false;

  /// key=value pairs in a fixed order, used for the echo and the config hash.
  std::map<std::string, std::string> to_map() const;
  std::uint64_t hash() const;
  /// Throws ParameterError on an empty or non-ascending grid, zero trials or
  /// replications, or a bidder count that does not match the specs.
  void validate() const;
};

struct CellRecord {
  std::size_t m = 0;
  std::size_t replication = 0;
  double ratio = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  double runtime_ms = 0.0;
  double xi_hat = 0.0;
};

struct GridSummary {
  std::size_t m = 0;
  double mean_ratio = 0.0;
  double std_error = 0.0;  // across replications
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CellRecord> cells;
  std::vector<GridSummary> summary;

  void write_csv(std::ostream& out) const;
  void write_timings(std::ostream& out) const;
  void write_summary_json(std::ostream& out) const;
};

/// For every m and replication: draw m samples per bidder, learn the
/// empirical Myerson auction and compare its revenue with Myerson's on shared
/// input draws. Cell seeds are derive_seed(seed, m, replication).
ExperimentReport convergence_sweep(const ExperimentConfig& config);

/// Creates `<root>/<UTC timestamp>_seed<seed>` (suffixed if it already exists).
std::filesystem::path make_run_directory(const std::filesystem::path& root, std::uint64_t seed);

/// Writes results.csv, timings.csv and summary.json into `dir`.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir);

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct LemmaSuiteOptions {
  std::uint64_t seed = 12345;
  int threads = 0;
  /// Multiplies every trial count; values below 1 give a quick smoke run.
  double scale = 1.0;
  bool disable_ironing = false;
  bool uniform_guess = false;
};

/// Runs the verification battery; failures are reported, not thrown.
std::vector<CheckResult> lemma_suite(const LemmaSuiteOptions& options = {});

void print_checks(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace myerson_lab
