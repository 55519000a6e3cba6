#include "myerson_lab/empirical_auction.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "myerson_lab/errors.hpp"
#include "myerson_lab/monte_carlo.hpp"
#include "myerson_lab/text.hpp"

namespace myerson_lab {

SampleMatrix::SampleMatrix(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw MalformedInput("sample matrix needs at least one bidder");
  const std::size_t m = rows_.front().size();
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    auto& row = rows_[i];
    if (row.size() != m) {
      throw MalformedInput("bidder " + std::to_string(i) + " has " + std::to_string(row.size()) +
                           " samples, expected " + std::to_string(m));
    }
    for (double v : row) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw MalformedInput("sample values must be finite and nonnegative, got " + format_real(v));
      }
    }
    std::sort(row.begin(), row.end(), std::greater<>());
  }
}

SampleMatrix SampleMatrix::draw(const ProductDistribution& dists, std::size_t m, Stream& rng) {
  std::vector<std::vector<double>> rows(dists.size(), std::vector<double>(m));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < dists.size(); ++i) rows[i][j] = dists[i].sample(rng);
  }
  return SampleMatrix(std::move(rows));
}

void SampleMatrix::write(std::ostream& out) const {
  out << "k=" << bidders() << " m=" << samples_per_bidder() << '\n';
  for (const auto& row : rows_) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << format_real(row[j]);
    out << '\n';
  }
}

SampleMatrix SampleMatrix::read(std::istream& in) {
  std::string line;
  while (std::getline(in, line) && trim(line).empty()) {
  }
  std::istringstream header(line);
  std::string k_tok;
  std::string m_tok;
  if (!(header >> k_tok >> m_tok) || !k_tok.starts_with("k=") || !m_tok.starts_with("m=")) {
    throw MalformedInput("sample file must start with a 'k=<int> m=<int>' header");
  }
  const auto k = parse_int(std::string_view(k_tok).substr(2), "k");
  const auto m = parse_int(std::string_view(m_tok).substr(2), "m");
  if (k < 1 || m < 1) throw MalformedInput("sample file header needs k >= 1 and m >= 1");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) row.push_back(parse_real(tok, "sample value"));
    if (row.size() != static_cast<std::size_t>(m)) {
      throw MalformedInput("sample row " + std::to_string(rows.size()) + " has " +
                           std::to_string(row.size()) + " values, header says m=" + std::to_string(m));
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != static_cast<std::size_t>(k)) {
    throw MalformedInput("sample file has " + std::to_string(rows.size()) + " rows, header says k=" +
                         std::to_string(k));
  }
  return SampleMatrix(std::move(rows));
}

// ---------------------------------------------------------------------------

std::size_t threshold_rank(double xi_hat, std::size_t m) {
  const double x = xi_hat * static_cast<double>(m);
  return static_cast<std::size_t>(std::floor(x + 1e-9 * std::max(1.0, x)));
}

double default_xi_hat(double epsilon, std::size_t k, std::size_t m) {
  return std::max(epsilon / static_cast<double>(k), 2.0 / static_cast<double>(m));
}

EmpiricalCurve build_empirical_curve(std::span<const double> row, double xi_hat) {
  const std::size_t m = row.size();
  if (m < 2) throw ParameterError("empirical curve needs m >= 2 samples");
  if (!(xi_hat > 0.0 && xi_hat <= 1.0)) {
    throw ParameterError("xi_hat must lie in (0, 1], got " + format_real(xi_hat));
  }
  const std::size_t rank = threshold_rank(xi_hat, m);
  if (rank < 1 || rank > m) {
    throw ParameterError("floor(xi_hat * m) = " + std::to_string(rank) + " must lie in [1, m]");
  }
  EmpiricalCurve curve;
  curve.xi_hat = xi_hat;
  curve.m = m;
  curve.rank = rank;
  curve.retained_values.assign(row.begin() + static_cast<std::ptrdiff_t>(rank - 1), row.end());
  curve.threshold_value = row[rank - 1];
  curve.points.reserve(curve.retained_values.size() + 2);
  curve.points.push_back({0.0, 0.0});
  const double two_m = 2.0 * static_cast<double>(m);
  for (std::size_t j = rank; j <= m; ++j) {
    const double t = static_cast<double>(2 * j - 1) / two_m;
    curve.points.push_back({t, t * row[j - 1]});
  }
  curve.points.push_back({1.0, 0.0});
  return curve;
}

// ---------------------------------------------------------------------------

EmpiricalBidder::EmpiricalBidder(IronedCurve hull, std::vector<double> vertex_values, double threshold,
                                 double reserve)
    : hull_(std::move(hull)), vertex_values_(std::move(vertex_values)), threshold_(threshold), reserve_(reserve) {
  const auto v = hull_.vertices();
  if (v.size() < 2) throw MalformedInput("empirical hull needs at least two vertices");
  if (vertex_values_.size() != v.size() - 2) {
    throw MalformedInput("need one sample value per interior hull vertex");
  }
  // Values are kept as given rather than recomputed as R / q, which can be
  // an ulp off and would put a bid equal to a sample on the wrong segment.
  for (std::size_t k = 0; k < vertex_values_.size(); ++k) {
    if (v[k + 1].value != v[k + 1].quantile * vertex_values_[k]) {
      throw MalformedInput("hull vertex " + std::to_string(k + 1) + " is not quantile * value");
    }
    if (k > 0 && vertex_values_[k] > vertex_values_[k - 1]) {
      throw MalformedInput("vertex values must be nonincreasing");
    }
  }
}

EmpiricalBidder EmpiricalBidder::from_curve(const EmpiricalCurve& curve, bool iron) {
  IronedCurve hull = iron ? myerson_lab::iron(curve.points) : polyline(curve.points);
  // Hull vertices are a subsequence of the curve points; point p > 0 carries
  // retained sample p - 1.
  std::vector<double> values;
  const auto verts = hull.vertices();
  std::size_t p = 1;
  for (std::size_t k = 1; k + 1 < verts.size(); ++k) {
    while (curve.points[p].quantile != verts[k].quantile) ++p;
    values.push_back(curve.retained_values[p - 1]);
  }
  EmpiricalBidder b(std::move(hull), std::move(values), curve.threshold_value, 0.0);
  b.reserve_ = b.compute_reserve();
  return b;
}

double EmpiricalBidder::virtual_value(double v) const {
  if (v >= threshold_) return v;
  // Interior vertex values decrease along the hull, so the sandwiching
  // interval lies on segment K, K = #{vertex values > v}.
  const auto it = std::lower_bound(vertex_values_.begin(), vertex_values_.end(), v, std::greater<>());
  const auto k = static_cast<std::size_t>(it - vertex_values_.begin());
  return hull_.slopes()[k];
}

double EmpiricalBidder::compute_reserve() const {
  // phi equals slope K on [w_{K+1}, w_K), with w past the last interior vertex
  // taken as 0; the reserve is the lowest bid with a nonnegative value.
  double reserve = threshold_;
  const auto slopes = hull_.slopes();
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    if (slopes[k] >= 0.0) {
      const double lower = k < vertex_values_.size() ? vertex_values_[k] : 0.0;
      reserve = std::min(reserve, lower);
    }
  }
  return reserve;
}

bool operator==(const EmpiricalBidder& a, const EmpiricalBidder& b) {
  return std::ranges::equal(a.hull_.vertices(), b.hull_.vertices()) && a.threshold_ == b.threshold_ &&
         a.reserve_ == b.reserve_;
}

// ---------------------------------------------------------------------------

EmpiricalMyersonAuction::EmpiricalMyersonAuction(std::vector<EmpiricalBidder> bidders)
    : bidders_(std::move(bidders)) {
  if (bidders_.empty()) throw ParameterError("auction needs at least one bidder");
}

AuctionOutcome EmpiricalMyersonAuction::run(std::span<const double> bids) const {
  validate_bids(bids, bidders_.size());
  return run_virtual_value_auction(bids, [this](std::size_t i, double v) { return bidders_[i].virtual_value(v); });
}

void EmpiricalMyersonAuction::write(std::ostream& out) const {
  for (std::size_t i = 0; i < bidders_.size(); ++i) {
    const auto& b = bidders_[i];
    out << "bidder " << i << " hull ";
    const auto verts = b.hull().vertices();
    for (std::size_t s = 0; s < verts.size(); ++s) {
      out << (s ? "," : "") << format_real(verts[s].quantile) << ':' << format_real(verts[s].value);
    }
    out << " slopes ";
    const auto slopes = b.hull().slopes();
    for (std::size_t s = 0; s < slopes.size(); ++s) out << (s ? "," : "") << format_real(slopes[s]);
    out << " values ";
    const auto values = b.vertex_values();
    if (values.empty()) out << '-';
    for (std::size_t s = 0; s < values.size(); ++s) out << (s ? "," : "") << format_real(values[s]);
    out << " threshold " << format_real(b.threshold()) << " reserve " << format_real(b.reserve()) << '\n';
  }
}

EmpiricalMyersonAuction EmpiricalMyersonAuction::read(std::istream& in) {
  std::vector<EmpiricalBidder> bidders;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto fail = [&](const std::string& why) {
      return MalformedInput("auction file line " + std::to_string(line_no) + ": " + why);
    };
    std::istringstream ls{std::string(body)};
    std::string kw_bidder, index, kw_hull, hull_tok, kw_slopes, slopes_tok, kw_values, values_tok, kw_thr, thr_tok,
        kw_res, res_tok;
    if (!(ls >> kw_bidder >> index >> kw_hull >> hull_tok >> kw_slopes >> slopes_tok >> kw_values >> values_tok >>
          kw_thr >> thr_tok >> kw_res >> res_tok) ||
        kw_bidder != "bidder" || kw_hull != "hull" || kw_slopes != "slopes" || kw_values != "values" ||
        kw_thr != "threshold" || kw_res != "reserve") {
      throw fail("expected 'bidder <i> hull q:R,... slopes s,... values v,... threshold <t> reserve <r>'");
    }
    std::string extra;
    if (ls >> extra) throw fail("trailing text '" + extra + "'");
    if (parse_int(index, "bidder index") != static_cast<std::int64_t>(bidders.size())) {
      throw fail("bidder indices must run 0, 1, ... in order");
    }
    std::vector<CurvePoint> verts;
    for (auto pair : split(hull_tok, ',')) {
      const auto colon = pair.find(':');
      if (colon == std::string_view::npos) throw fail("hull entry without ':'");
      verts.push_back({parse_real(pair.substr(0, colon), "hull quantile"),
                       parse_real(pair.substr(colon + 1), "hull value")});
    }
    std::vector<double> slopes;
    for (auto s : split(slopes_tok, ',')) slopes.push_back(parse_real(s, "slope"));
    IronedCurve hull = polyline(verts);
    if (!std::ranges::equal(hull.slopes(), slopes)) throw fail("slopes do not match the hull breakpoints");
    std::vector<double> values;
    if (values_tok != "-") {
      for (auto v : split(values_tok, ',')) values.push_back(parse_real(v, "vertex value"));
    }
    bidders.emplace_back(std::move(hull), std::move(values), parse_real(thr_tok, "threshold"), parse_real(res_tok, "reserve"));
  }
  if (bidders.empty()) throw MalformedInput("auction file has no bidder lines");
  return EmpiricalMyersonAuction(std::move(bidders));
}

EmpiricalMyersonAuction learn(const SampleMatrix& samples, double xi_hat, LearnOptions opts) {
  std::vector<EmpiricalBidder> bidders;
  bidders.reserve(samples.bidders());
  for (std::size_t i = 0; i < samples.bidders(); ++i) {
    bidders.push_back(EmpiricalBidder::from_curve(build_empirical_curve(samples.row(i), xi_hat), opts.iron));
  }
  return EmpiricalMyersonAuction(std::move(bidders));
}

double empirical_virtual_value(const EmpiricalMyersonAuction& auction, std::size_t bidder, double v) {
  if (bidder >= auction.bidder_count()) throw ParameterError("bidder index out of range");
  if (!(v >= 0.0)) throw MalformedInput("bid must be nonnegative");
  return auction.bidder(bidder).virtual_value(v);
}

AuctionOutcome run_empirical_auction(const EmpiricalMyersonAuction& auction, std::span<const double> bids) {
  return auction.run(bids);
}

// ---------------------------------------------------------------------------

double quantile_sandwich_sample_bound(double gamma, double xi_hat, double delta) {
  return 6.0 * (1.0 + gamma) / (gamma * gamma * xi_hat) *
         std::max(std::log(3.0) / gamma, std::log(3.0 / delta));
}

double verify_quantile_sandwich(const ValuationDistribution& dist, std::size_t m, double gamma,
                                double xi_hat, std::size_t trials, std::uint64_t seed, int threads) {
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  if (trials < 1) throw ParameterError("trials must be at least 1");
  if (gamma * xi_hat * static_cast<double>(m) < 1.0) {
    throw ParameterError("quantile sandwich requires gamma * xi_hat * m >= 1");
  }
  const std::size_t rank = threshold_rank(xi_hat, m);
  if (rank < 1 || rank > m) throw ParameterError("floor(xi_hat * m) must lie in [1, m]");
  const double widen = (1.0 + gamma) * (1.0 + gamma);
  const double two_m = 2.0 * static_cast<double>(m);

  const auto acc = run_trials<1>(trials, threads, [&](std::size_t t) -> std::array<double, 1> {
    Stream rng = trial_stream(seed, t);
    thread_local std::vector<double> values;
    values.resize(m);
    for (auto& v : values) v = dist.sample(rng);
    std::sort(values.begin(), values.end(), std::greater<>());
    for (std::size_t j = rank; j <= m; ++j) {
      const double t_j = static_cast<double>(2 * j - 1) / two_m;
      const double q = dist.value_to_quantile(values[j - 1]);
      if (q < t_j / widen || q > t_j * widen) return {1.0};
    }
    return {0.0};
  });
  return acc[0].mean();
}

}  // namespace myerson_lab
