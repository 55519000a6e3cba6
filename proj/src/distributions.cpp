#include "myerson_lab/distributions.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "myerson_lab/errors.hpp"
#include "myerson_lab/text.hpp"

namespace myerson_lab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_quantile(double q) {
  if (!(q > 0.0 && q <= 1.0)) {
    throw DomainError("quantile must lie in (0, 1], got " + format_real(q));
  }
}

}  // namespace

double ValuationDistribution::value_to_quantile(double v) const { return 1.0 - cdf(v); }

double ValuationDistribution::virtual_value(double v) const {
  return hazard_virtual_value(*this, v);
}

double hazard_virtual_value(const ValuationDistribution& dist, double v) {
  const double f = dist.density(v);
  if (!(f > 0.0)) {
    throw SingularityError("density vanishes at v = " + format_real(v));
  }
  return v - dist.value_to_quantile(v) / f;
}

// ---------------------------------------------------------------------------

StronglyRegularBase::StronglyRegularBase(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ParameterError("alpha must lie in [0, 1], got " + format_real(alpha));
  }
}

Support StronglyRegularBase::support() const { return {0.0, kInf, false}; }

double StronglyRegularBase::value_to_quantile(double v) const {
  if (v <= 0.0) return 1.0;
  if (alpha_ == 1.0) return std::exp(-v);
  const double lambda = 1.0 - alpha_;
  return std::exp(-std::log1p(lambda * v) / lambda);
}

double StronglyRegularBase::cdf(double v) const {
  if (v <= 0.0) return 0.0;
  if (alpha_ == 1.0) return -std::expm1(-v);
  const double lambda = 1.0 - alpha_;
  return -std::expm1(-std::log1p(lambda * v) / lambda);
}

double StronglyRegularBase::density(double v) const {
  if (v < 0.0) return 0.0;
  if (alpha_ == 1.0) return std::exp(-v);
  const double lambda = 1.0 - alpha_;
  return std::exp(-std::log1p(lambda * v) * (2.0 - alpha_) / lambda);
}

double StronglyRegularBase::quantile_to_value(double q) const {
  require_quantile(q);
  if (alpha_ == 1.0) return -std::log(q);
  const double lambda = 1.0 - alpha_;
  // ((1/q)^lambda - 1) / lambda
  return std::expm1(-lambda * std::log(q)) / lambda;
}

double StronglyRegularBase::virtual_value(double v) const { return alpha_ * v - 1.0; }

std::string StronglyRegularBase::describe() const {
  return "base(alpha=" + format_real(alpha_) + ")";
}

// ---------------------------------------------------------------------------

TruncatedDistribution::TruncatedDistribution(double alpha, double truncation_value)
    : base_(alpha), truncation_(truncation_value) {
  if (!(truncation_value > 0.0) || !std::isfinite(truncation_value)) {
    throw ParameterError("truncation value H must be positive and finite, got " +
                         format_real(truncation_value));
  }
  atom_quantile_ = base_.value_to_quantile(truncation_);
}

TruncatedDistribution TruncatedDistribution::at_quantile(double alpha, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw ParameterError("truncation quantile must lie in (0, 1), got " + format_real(q));
  }
  return TruncatedDistribution(alpha, StronglyRegularBase(alpha).quantile_to_value(q));
}

Support TruncatedDistribution::support() const { return {0.0, truncation_, true}; }

double TruncatedDistribution::cdf(double v) const {
  return v < truncation_ ? base_.cdf(v) : 1.0;
}

double TruncatedDistribution::density(double v) const {
  return v < truncation_ ? base_.density(v) : 0.0;
}

double TruncatedDistribution::value_to_quantile(double v) const {
  if (v < truncation_) return base_.value_to_quantile(v);
  if (v == truncation_) return atom_quantile_;
  return 0.0;
}

double TruncatedDistribution::quantile_to_value(double q) const {
  require_quantile(q);
  if (q <= atom_quantile_) return truncation_;
  return std::min(base_.quantile_to_value(q), truncation_);
}

double TruncatedDistribution::virtual_value(double v) const {
  if (v < truncation_) return base_.virtual_value(v);
  if (v == truncation_) return truncation_;
  throw DomainError("value " + format_real(v) + " exceeds the truncation point " +
                    format_real(truncation_));
}

std::string TruncatedDistribution::describe() const {
  return "truncated(alpha=" + format_real(alpha()) + ", H=" + format_real(truncation_) + ")";
}

// ---------------------------------------------------------------------------

UniformDistribution::UniformDistribution(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo >= 0.0 && hi > lo)) {
    throw ParameterError("uniform support must satisfy 0 <= lo < hi");
  }
}

Support UniformDistribution::support() const { return {lo_, hi_, true}; }

double UniformDistribution::cdf(double v) const {
  if (v <= lo_) return 0.0;
  if (v >= hi_) return 1.0;
  return (v - lo_) / (hi_ - lo_);
}

double UniformDistribution::density(double v) const {
  return (v >= lo_ && v <= hi_) ? 1.0 / (hi_ - lo_) : 0.0;
}

double UniformDistribution::quantile_to_value(double q) const {
  require_quantile(q);
  return hi_ - q * (hi_ - lo_);
}

std::string UniformDistribution::describe() const {
  return "uniform(lo=" + format_real(lo_) + ", hi=" + format_real(hi_) + ")";
}

// ---------------------------------------------------------------------------

ProductDistribution::ProductDistribution(std::vector<DistributionPtr> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ParameterError("product distribution needs k >= 1 bidders");
  for (const auto& c : components_) {
    if (!c) throw ParameterError("null component distribution");
  }
}

ProductDistribution ProductDistribution::iid(DistributionPtr dist, std::size_t k) {
  return ProductDistribution(std::vector<DistributionPtr>(k, std::move(dist)));
}

void ProductDistribution::sample(Stream& rng, std::span<double> out) const {
  for (std::size_t i = 0; i < components_.size(); ++i) out[i] = components_[i]->sample(rng);
}

std::vector<double> ProductDistribution::sample(Stream& rng) const {
  std::vector<double> out(components_.size());
  sample(rng, out);
  return out;
}

// ---------------------------------------------------------------------------

double monopoly_quantile(const ValuationDistribution& dist) {
  auto phi_at = [&](double q) { return dist.virtual_value(dist.quantile_to_value(q)); };
  if (phi_at(1.0) >= 0.0) return 1.0;
  if (phi_at(kQuantileFloor) < 0.0) {
    throw NoReserveError("virtual value is negative on the whole quantile range of " +
                         dist.describe());
  }
  double lo = kQuantileFloor;  // phi >= 0
  double hi = 1.0;             // phi < 0
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi_at(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double monopoly_price(const ValuationDistribution& dist) {
  return dist.quantile_to_value(monopoly_quantile(dist));
}

RegularityCheck verify_strong_regularity(const ValuationDistribution& dist, double alpha,
                                         std::span<const std::pair<double, double>> grid) {
  RegularityCheck check;
  const Support s = dist.support();
  for (const auto& [x, y] : grid) {
    if (!(y > x) || !s.contains(x) || !s.contains(y)) {
      ++check.skipped;
      continue;
    }
    const double phi_y = dist.virtual_value(y);
    const double phi_x = dist.virtual_value(x);
    if (phi_y - phi_x < alpha * (y - x) - 1e-9 * (1.0 + std::abs(phi_y))) {
      check.holds = false;
    }
  }
  return check;
}

// ---------------------------------------------------------------------------

namespace {

struct ParsedSpec {
  std::string name;
  std::map<std::string, double, std::less<>> args;
};

ParsedSpec parse_spec_syntax(std::string_view spec) {
  spec = trim(spec);
  ParsedSpec out;
  const auto open = spec.find('(');
  if (open == std::string_view::npos) {
    out.name = std::string(spec);
  } else {
    if (spec.back() != ')') {
      throw MalformedInput("distribution spec missing ')': '" + std::string(spec) + "'");
    }
    out.name = std::string(trim(spec.substr(0, open)));
    const auto body = spec.substr(open + 1, spec.size() - open - 2);
    if (!trim(body).empty()) {
      for (auto part : split(body, ',')) {
        const auto eq = part.find('=');
        if (eq == std::string_view::npos) {
          throw MalformedInput("expected key=value in '" + std::string(spec) + "'");
        }
        auto key = std::string(trim(part.substr(0, eq)));
        if (out.args.contains(key)) {
          throw MalformedInput("duplicate argument '" + key + "' in '" + std::string(spec) + "'");
        }
        out.args.emplace(key, parse_real(part.substr(eq + 1), key));
      }
    }
  }
  if (out.name.empty()) throw MalformedInput("empty distribution spec");
  return out;
}

void expect_args(const ParsedSpec& p, std::initializer_list<std::string_view> keys) {
  for (const auto& [key, _] : p.args) {
    bool known = false;
    for (auto k : keys) known = known || key == k;
    if (!known) throw MalformedInput("unknown argument '" + key + "' for " + p.name);
  }
  for (auto k : keys) {
    if (!p.args.contains(k)) {
      throw MalformedInput(p.name + " requires argument '" + std::string(k) + "'");
    }
  }
}

}  // namespace

DistributionPtr parse_distribution(std::string_view spec) {
  const ParsedSpec p = parse_spec_syntax(spec);
  try {
    if (p.name == "exponential") {
      expect_args(p, {});
      return std::make_shared<StronglyRegularBase>(1.0);
    }
    if (p.name == "base") {
      expect_args(p, {"alpha"});
      return std::make_shared<StronglyRegularBase>(p.args.find("alpha")->second);
    }
    if (p.name == "truncated") {
      expect_args(p, {"alpha", "H"});
      return std::make_shared<TruncatedDistribution>(p.args.find("alpha")->second,
                                                     p.args.find("H")->second);
    }
    if (p.name == "truncated_q") {
      expect_args(p, {"alpha", "q"});
      return std::make_shared<TruncatedDistribution>(
          TruncatedDistribution::at_quantile(p.args.find("alpha")->second, p.args.find("q")->second));
    }
  } catch (const ParameterError& e) {
    throw MalformedInput(std::string(e.what()) + " in '" + std::string(trim(spec)) + "'");
  }
  throw MalformedInput("unknown distribution '" + p.name + "'");
}

std::vector<DistributionPtr> parse_distribution_list(std::string_view specs) {
  std::vector<DistributionPtr> out;
  for (auto part : split(specs, ';')) {
    if (!trim(part).empty()) out.push_back(parse_distribution(part));
  }
  if (out.empty()) throw MalformedInput("no distributions given");
  return out;
}

}  // namespace myerson_lab
