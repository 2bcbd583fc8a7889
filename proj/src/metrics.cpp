#include "ellroll/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "ellroll/csv.hpp"
#include "ellroll/errors.hpp"

namespace ellroll {

double ise(std::span<const double> errors, double dt) {
  if (!(dt > 0.0)) throw ConfigError("ise: dt must be positive");
  double sum = 0.0;
  for (double e : errors) sum += e * e;
  return sum * dt;
}

double itse(std::span<const double> errors, double dt) {
  if (!(dt > 0.0)) throw ConfigError("itse: dt must be positive");
  double sum = 0.0;
  for (std::size_t n = 0; n < errors.size(); ++n) sum += static_cast<double>(n) * dt * errors[n] * errors[n];
  return sum * dt;
}

std::optional<double> settling_time(std::span<const double> thetas, double theta_ref, double band, double dt) {
  if (!(band > 0.0)) throw ConfigError("settling_time: band must be positive");
  std::size_t n = thetas.size();
  while (n > 0 && std::abs(thetas[n - 1] - theta_ref) <= band) --n;
  if (n == thetas.size()) return std::nullopt;
  return static_cast<double>(n) * dt;
}

double error_band(std::span<const double> thetas, double theta_ref, double tail_fraction) {
  if (thetas.empty()) throw ConfigError("error_band: empty trajectory");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ConfigError("error_band: tail fraction must be in (0, 1]");
  const auto tail = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(thetas.size()) - 1e-9)));
  double worst = 0.0;
  for (std::size_t i = thetas.size() - tail; i < thetas.size(); ++i)
    worst = std::max(worst, std::abs(thetas[i] - theta_ref));
  return worst;
}

std::vector<double> tracking_errors(std::span<const double> thetas, double theta_ref) {
  std::vector<double> e;
  e.reserve(thetas.size());
  for (double th : thetas) e.push_back(th - theta_ref);
  return e;
}

MetricReport evaluate_metrics(std::span<const double> thetas, double theta_ref, double dt,
                              const MetricSettings& settings) {
  const auto e = tracking_errors(thetas, theta_ref);
  MetricReport r;
  r.ise = ise(e, dt);
  r.itse = itse(e, dt);
  r.settling_time = settling_time(thetas, theta_ref, settings.settle_band, dt);
  r.error_band = error_band(thetas, theta_ref, settings.tail_fraction);
  r.samples = thetas.size();
  r.dt = dt;
  return r;
}

void write_metric_rows(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << kMetricHeader << '\n';
  for (const auto& r : rows) {
    out << csv::join({r.run_id, r.method, r.task, csv::num(r.mass_g), csv::num(r.semi_major_mm),
                      csv::num(r.semi_minor_mm), csv::num(r.report.ise), csv::num(r.report.itse),
                      r.report.settling_time ? csv::num(*r.report.settling_time) : std::string(),
                      csv::num(r.report.error_band)})
        << '\n';
  }
}

std::vector<MetricRow> read_metric_rows(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMetricHeader) throw ConfigError("metrics CSV: unexpected header '" + line + "'");
  std::vector<MetricRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 10) throw ConfigError("metrics CSV: expected 10 fields in '" + line + "'");
    MetricRow r;
    r.run_id = f[0];
    r.method = f[1];
    r.task = f[2];
    r.mass_g = csv::parse_double(f[3]);
    r.semi_major_mm = csv::parse_double(f[4]);
    r.semi_minor_mm = csv::parse_double(f[5]);
    r.report.ise = csv::parse_double(f[6]);
    r.report.itse = csv::parse_double(f[7]);
    if (!f[8].empty()) r.report.settling_time = csv::parse_double(f[8]);
    r.report.error_band = csv::parse_double(f[9]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<double> moving_average(std::span<const double> values, std::size_t window) {
  if (window == 0) throw ConfigError("moving_average: window must be positive");
  std::vector<double> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t first = i + 1 >= window ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = first; k <= i; ++k) sum += values[k];
    out.push_back(sum / static_cast<double>(i + 1 - first));
  }
  return out;
}

}  // namespace ellroll
