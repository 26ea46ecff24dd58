#pragma once

#include "volseg/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace volseg {

// Closing prices with optional ISO-8601 date labels. Prices are strictly
// positive; labels, when present, align with prices and are strictly
// increasing as strings.
struct PriceSeries {
  Vector prices;
  std::vector<std::string> labels;
};

// Log returns r[t] = ln(p[t+1] / p[t]). Labels, when present, align with
// values and carry the date of the later price.
struct ReturnSeries {
  Vector values;
  std::vector<std::string> labels;

  Index size() const { return values.size(); }
};

struct SummaryStats {
  double mean = 0.0;
  double std_dev = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ljung_box_p = 0.0;
  double ljung_box_sq_p = 0.0;
};

struct LjungBoxResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Parses `date,close` CSV (case-insensitive header, '.' decimals, rows
// pre-sorted by date). Throws MalformedHeader / BadRow / EmptySeries.
PriceSeries parse_price_csv(std::istream& in);
PriceSeries parse_price_csv_file(const std::string& path);

ReturnSeries log_returns(const PriceSeries& prices);

double sample_mean(const Eigen::Ref<const Vector>& x);
// Divisor n - 1.
double sample_std_dev(const Eigen::Ref<const Vector>& x);
double sample_variance(const Eigen::Ref<const Vector>& x);
// Standardized third central moment; throws ConstantSeries when undefined.
double skewness(const Eigen::Ref<const Vector>& x);
// Standardized fourth central moment minus 3; throws ConstantSeries.
double excess_kurtosis(const Eigen::Ref<const Vector>& x);

// Q = n(n+2) sum_{k=1..lags} rho_k^2 / (n-k) against chi-square(lags).
LjungBoxResult ljung_box(const Eigen::Ref<const Vector>& x, int lags);

SummaryStats summary_stats(const ReturnSeries& r, int lags = 20);

}  // namespace volseg
