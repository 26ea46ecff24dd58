#include "volseg/series.hpp"

#include "volseg/special_functions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace volseg {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

PriceSeries parse_price_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    raise(ErrorCode::MalformedHeader, "empty input");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::stringstream header(line);
    std::string date_col, close_col, extra;
    if (!std::getline(header, date_col, ',') ||
        !std::getline(header, close_col, ',')) {
      raise(ErrorCode::MalformedHeader, "expected header 'date,close', got '" + line + "'");
    }
    if (lower(trim(date_col)) != "date" || lower(trim(close_col)) != "close" ||
        std::getline(header, extra, ',')) {
      raise(ErrorCode::MalformedHeader, "expected header 'date,close', got '" + line + "'");
    }
  }

  std::vector<double> prices;
  std::vector<std::string> labels;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      raise(ErrorCode::BadRow, "line " + std::to_string(line_no) + ": missing comma");
    }
    std::string date = trim(line.substr(0, comma));
    std::string close_text = trim(line.substr(comma + 1));
    if (close_text.find(',') != std::string::npos) {
      raise(ErrorCode::BadRow, "line " + std::to_string(line_no) + ": too many columns");
    }
    double close = 0.0;
    std::size_t consumed = 0;
    try {
      close = std::stod(close_text, &consumed);
    } catch (const std::exception&) {
      raise(ErrorCode::BadRow,
            "line " + std::to_string(line_no) + ": unparseable price '" + close_text + "'");
    }
    if (consumed != close_text.size()) {
      raise(ErrorCode::BadRow,
            "line " + std::to_string(line_no) + ": unparseable price '" + close_text + "'");
    }
    if (!(close > 0.0) || !std::isfinite(close)) {
      raise(ErrorCode::BadRow, "line " + std::to_string(line_no) + ": non-positive price");
    }
    if (!labels.empty() && !(labels.back() < date)) {
      raise(ErrorCode::BadRow,
            "line " + std::to_string(line_no) + ": dates not strictly increasing ('" +
                labels.back() + "' then '" + date + "')");
    }
    labels.push_back(date);
    prices.push_back(close);
  }
  if (prices.size() < 2) {
    raise(ErrorCode::EmptySeries,
          "need at least 2 rows to form a return, got " + std::to_string(prices.size()));
  }
  PriceSeries out;
  out.prices = Eigen::Map<const Vector>(prices.data(), static_cast<Index>(prices.size()));
  out.labels = std::move(labels);
  return out;
}

PriceSeries parse_price_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    raise(ErrorCode::IoError, "cannot open '" + path + "'");
  }
  return parse_price_csv(in);
}

ReturnSeries log_returns(const PriceSeries& prices) {
  Index n = prices.prices.size();
  if (n < 2) {
    raise(ErrorCode::EmptySeries, "need at least 2 prices");
  }
  ReturnSeries out;
  out.values.resize(n - 1);
  // ln of the ratio rather than the difference of logs: scaling every price
  // by a power of two then cancels exactly.
  for (Index t = 0; t + 1 < n; ++t) {
    out.values[t] = std::log(prices.prices[t + 1] / prices.prices[t]);
  }
  if (!out.values.allFinite()) {
    raise(ErrorCode::BadRow, "non-finite return produced from prices");
  }
  if (!prices.labels.empty()) {
    out.labels.assign(prices.labels.begin() + 1, prices.labels.end());
  }
  return out;
}

namespace {

// Constancy must be detected on the values themselves: the mean of n copies
// of c need not round back to c, so a moment-based test leaves dust.
bool is_constant(const Eigen::Ref<const Vector>& x) {
  return x.minCoeff() == x.maxCoeff();
}

}  // namespace

double sample_mean(const Eigen::Ref<const Vector>& x) {
  if (x.size() == 0) raise(ErrorCode::EmptySeries, "mean of empty series");
  return x.mean();
}

double sample_variance(const Eigen::Ref<const Vector>& x) {
  if (x.size() < 2) raise(ErrorCode::SeriesTooShort, "variance needs >= 2 values");
  if (is_constant(x)) return 0.0;
  double mean = x.mean();
  return (x.array() - mean).square().sum() / static_cast<double>(x.size() - 1);
}

double sample_std_dev(const Eigen::Ref<const Vector>& x) {
  return std::sqrt(sample_variance(x));
}

namespace {

// Central moments with divisor n, as used for the standardized moments.
struct Moments {
  double m2, m3, m4;
};

Moments central_moments(const Eigen::Ref<const Vector>& x) {
  double mean = x.mean();
  auto d = (x.array() - mean).eval();
  double n = static_cast<double>(x.size());
  return {d.square().sum() / n, d.cube().sum() / n, d.square().square().sum() / n};
}

}  // namespace

double skewness(const Eigen::Ref<const Vector>& x) {
  if (x.size() < 2) raise(ErrorCode::SeriesTooShort, "skewness needs >= 2 values");
  if (is_constant(x)) raise(ErrorCode::ConstantSeries, "skewness undefined for constant series");
  Moments m = central_moments(x);
  return m.m3 / std::pow(m.m2, 1.5);
}

double excess_kurtosis(const Eigen::Ref<const Vector>& x) {
  if (x.size() < 2) raise(ErrorCode::SeriesTooShort, "kurtosis needs >= 2 values");
  if (is_constant(x)) raise(ErrorCode::ConstantSeries, "kurtosis undefined for constant series");
  Moments m = central_moments(x);
  return m.m4 / (m.m2 * m.m2) - 3.0;
}

LjungBoxResult ljung_box(const Eigen::Ref<const Vector>& x, int lags) {
  Index n = x.size();
  if (lags < 1) raise(ErrorCode::InvalidParams, "lags must be >= 1");
  if (n <= lags) {
    raise(ErrorCode::SeriesTooShort,
          "need more than " + std::to_string(lags) + " observations, got " + std::to_string(n));
  }
  if (is_constant(x)) {
    raise(ErrorCode::ConstantSeries, "autocorrelation undefined for constant series");
  }
  double mean = x.mean();
  auto d = (x.array() - mean).eval();
  double denom = d.square().sum();

  double q = 0.0;
  for (int k = 1; k <= lags; ++k) {
    double num = (d.tail(n - k) * d.head(n - k)).sum();
    double rho = num / denom;
    q += rho * rho / static_cast<double>(n - k);
  }
  q *= static_cast<double>(n) * static_cast<double>(n + 2);
  return {q, chi_square_upper_tail(q, static_cast<double>(lags))};
}

SummaryStats summary_stats(const ReturnSeries& r, int lags) {
  const Vector& x = r.values;
  if (x.size() < lags + 1) {
    raise(ErrorCode::SeriesTooShort,
          "need at least lags + 1 = " + std::to_string(lags + 1) + " returns");
  }
  SummaryStats s;
  s.mean = sample_mean(x);
  s.std_dev = sample_std_dev(x);
  s.skewness = skewness(x);
  s.excess_kurtosis = excess_kurtosis(x);
  s.ljung_box_p = ljung_box(x, lags).p_value;
  s.ljung_box_sq_p = ljung_box(x.array().square().matrix(), lags).p_value;
  return s;
}

}  // namespace volseg
