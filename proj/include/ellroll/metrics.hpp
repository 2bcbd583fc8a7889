#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ellroll {

// Rectangle rule: sum_n e(n)^2 dt.
[[nodiscard]] double ise(std::span<const double> errors, double dt);

// sum_n (n dt) e(n)^2 dt.
[[nodiscard]] double itse(std::span<const double> errors, double dt);

// Smallest t* = n dt such that |theta(k) - theta_ref| <= band for every
// k >= n. nullopt if the final sample is outside the band.
[[nodiscard]] std::optional<double> settling_time(std::span<const double> thetas, double theta_ref, double band,
                                                  double dt);

// max |theta - theta_ref| over the last tail_fraction of the samples (at
// least one sample).
[[nodiscard]] double error_band(std::span<const double> thetas, double theta_ref, double tail_fraction = 0.2);

[[nodiscard]] std::vector<double> tracking_errors(std::span<const double> thetas, double theta_ref);

struct MetricSettings {
  double settle_band = 0.031;  // rad
  double tail_fraction = 0.2;
};

struct MetricReport {
  double ise = 0.0;
  double itse = 0.0;
  std::optional<double> settling_time;
  double error_band = 0.0;
  std::size_t samples = 0;
  double dt = 0.0;
};

[[nodiscard]] MetricReport evaluate_metrics(std::span<const double> thetas, double theta_ref, double dt,
                                            const MetricSettings& settings = {});

// One row of `run_id,method,task,m,a,b,ise,itse,settling_time,error_band`.
// m is in grams and a, b in millimetres, matching the config file.
struct MetricRow {
  std::string run_id;
  std::string method;  // "rl" or "su"
  std::string task;    // task key
  double mass_g = 0.0;
  double semi_major_mm = 0.0;
  double semi_minor_mm = 0.0;
  MetricReport report;
};

inline constexpr const char* kMetricHeader = "run_id,method,task,m,a,b,ise,itse,settling_time,error_band";

void write_metric_rows(std::ostream& out, const std::vector<MetricRow>& rows);
[[nodiscard]] std::vector<MetricRow> read_metric_rows(std::istream& in);

// Trailing moving average; entry i averages samples max(0, i-window+1)..i.
[[nodiscard]] std::vector<double> moving_average(std::span<const double> values, std::size_t window);

}  // namespace ellroll
