#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "volseg/series.hpp"
#include "volseg/special_functions.hpp"

#include "support/helpers.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <functional>
#include <sstream>

using namespace volseg;

namespace {

PriceSeries parse(const std::string& text) {
  std::istringstream in(text);
  return parse_price_csv(in);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("parse_price_csv accepts well-formed input") {
  PriceSeries p = parse("date,close\n2020-01-01,100\n2020-01-02,110");
  REQUIRE(p.prices.size() == 2);
  CHECK(p.prices[0] == 100.0);
  CHECK(p.prices[1] == 110.0);
  CHECK(p.labels == std::vector<std::string>{"2020-01-01", "2020-01-02"});
}

TEST_CASE("parse_price_csv tolerates header case and CRLF") {
  PriceSeries p = parse("Date,Close\r\n2020-01-01,1.5\r\n2020-01-02,2.5\r\n");
  REQUIRE(p.prices.size() == 2);
  CHECK(p.prices[1] == 2.5);
}

TEST_CASE("parse_price_csv rejects bad input") {
  CHECK(code_of([] { parse("time,close\n2020-01-01,100"); }) == ErrorCode::MalformedHeader);
  CHECK(code_of([] { parse(""); }) == ErrorCode::MalformedHeader);
  CHECK(code_of([] { parse("date,close\n2020-01-01,-5\n2020-01-02,5"); }) == ErrorCode::BadRow);
  CHECK(code_of([] { parse("date,close\n2020-01-01,abc\n2020-01-02,5"); }) == ErrorCode::BadRow);
  CHECK(code_of([] { parse("date,close\n2020-01-01,100"); }) == ErrorCode::EmptySeries);
  // unsorted dates are a BadRow-class failure
  CHECK(code_of([] { parse("date,close\n2020-01-02,100\n2020-01-01,110"); }) == ErrorCode::BadRow);
  CHECK(code_of([] { parse("date,close\n2020-01-01,100,5\n2020-01-02,110"); }) == ErrorCode::BadRow);
}

TEST_CASE("parse_price_csv_file reports missing files") {
  CHECK(code_of([] { parse_price_csv_file("/nonexistent/prices.csv"); }) == ErrorCode::IoError);
}

TEST_CASE("log_returns matches the defining formula") {
  PriceSeries p;
  p.prices = Vector(2);
  p.prices << 1.0, std::exp(1.0);
  ReturnSeries r = log_returns(p);
  REQUIRE(r.size() == 1);
  CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-15));

  PriceSeries flat;
  flat.prices = Vector::Constant(3, 7.25);
  ReturnSeries rf = log_returns(flat);
  CHECK(rf.values[0] == 0.0);
  CHECK(rf.values[1] == 0.0);

  PriceSeries pair;
  pair.prices = Vector(2);
  pair.prices << 100.0, 110.0;
  CHECK(log_returns(pair).values[0] == doctest::Approx(0.0953102).epsilon(1e-6));
}

TEST_CASE("log_returns aligns labels to the later day") {
  PriceSeries p = parse("date,close\n2020-01-01,100\n2020-01-02,110\n2020-01-03,105");
  ReturnSeries r = log_returns(p);
  CHECK(r.labels == std::vector<std::string>{"2020-01-02", "2020-01-03"});
}

TEST_CASE("log_returns needs two prices") {
  PriceSeries p;
  p.prices = Vector::Constant(1, 10.0);
  CHECK(code_of([&] { log_returns(p); }) == ErrorCode::EmptySeries);
}

TEST_CASE("scaling prices leaves returns unchanged") {
  Rng rng(17);
  PriceSeries p;
  p.prices = Vector(50);
  double level = 100.0;
  for (Index i = 0; i < 50; ++i) {
    level *= std::exp(0.01 * rng.standard_normal());
    p.prices[i] = level;
  }
  ReturnSeries base = log_returns(p);
  for (double c : {2.0, 4.0, 0.5}) {  // power-of-two scalings cancel exactly
    PriceSeries scaled;
    scaled.prices = c * p.prices;
    ReturnSeries r = log_returns(scaled);
    CHECK(helpers::same_bits(r.values, base.values));
  }
  PriceSeries scaled;
  scaled.prices = 3.0 * p.prices;
  ReturnSeries r = log_returns(scaled);
  CHECK((r.values - base.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("symmetric data has zero mean and skewness") {
  // the alternating series has constant squares, so the full summary would
  // reject its squared-value autocorrelation test; probe the moments directly
  Vector alternating(100);
  for (Index i = 0; i < 100; ++i) alternating[i] = (i % 2 == 0) ? -1.0 : 1.0;
  CHECK(sample_mean(alternating) == 0.0);
  CHECK(std::abs(skewness(alternating)) < 1e-12);

  // any exactly sign-symmetric sample has zero skewness
  Vector half = helpers::gaussian_series(60, 5);
  ReturnSeries sym;
  sym.values = Vector(120);
  sym.values.head(60) = half;
  sym.values.tail(60) = -half;
  CHECK(std::abs(summary_stats(sym, 20).skewness) < 1e-12);
}

TEST_CASE("summary_stats rejects degenerate input") {
  ReturnSeries tiny;
  tiny.values = Vector::Constant(5, 0.3);
  CHECK(code_of([&] { summary_stats(tiny, 20); }) == ErrorCode::SeriesTooShort);

  ReturnSeries flat;
  flat.values = Vector::Constant(50, 0.3);
  CHECK(code_of([&] { summary_stats(flat, 20); }) == ErrorCode::ConstantSeries);
  CHECK(code_of([&] { skewness(flat.values); }) == ErrorCode::ConstantSeries);
  CHECK(code_of([&] { excess_kurtosis(flat.values); }) == ErrorCode::ConstantSeries);
}

TEST_CASE("gaussian draws have near-zero excess kurtosis") {
  ReturnSeries r;
  r.values = helpers::gaussian_series(100000, 42);
  SummaryStats s = summary_stats(r, 20);
  CHECK(std::abs(s.excess_kurtosis) < 0.1);
  CHECK(std::abs(s.mean) < 0.02);
  CHECK(s.std_dev == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("ljung_box is exactly zero without autocorrelation") {
  Vector x(8);
  x << 1, 0, -1, 0, 1, 0, -1, 0;  // lag-1 products all vanish
  LjungBoxResult res = ljung_box(x, 1);
  CHECK(res.statistic == 0.0);
  CHECK(res.p_value == 1.0);
}

TEST_CASE("ljung_box flags near-perfect autocorrelation") {
  Rng rng(7);
  Vector x(500);
  x[0] = 1.0;
  for (Index i = 1; i < 500; ++i) x[i] = x[i - 1] + 1e-9 * rng.standard_normal();
  LjungBoxResult res = ljung_box(x, 1);
  CHECK(res.p_value < 1e-10);
}

TEST_CASE("ljung_box rejection rate is calibrated under the null") {
  const int reps = 1000;
  int rejections = 0;
  for (int i = 0; i < reps; ++i) {
    Vector x = helpers::gaussian_series(10000, derive_seed(99, i));
    if (ljung_box(x, 20).p_value < 0.05) ++rejections;
  }
  double rate = static_cast<double>(rejections) / reps;
  CHECK(rate > 0.03);
  CHECK(rate < 0.07);
}

TEST_CASE("ljung_box errors") {
  Vector flat = Vector::Constant(30, 1.0);
  CHECK(code_of([&] { ljung_box(flat, 5); }) == ErrorCode::ConstantSeries);
  Vector tiny = helpers::gaussian_series(5, 1);
  CHECK(code_of([&] { ljung_box(tiny, 5); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("ljung_box statistic is scale invariant") {
  Vector x = helpers::gaussian_series(300, 3);
  LjungBoxResult base = ljung_box(x, 10);
  CHECK(ljung_box(2.0 * x, 10).statistic == base.statistic);
  CHECK(std::abs(ljung_box(3.0 * x, 10).statistic - base.statistic) <
        1e-12 * std::max(1.0, base.statistic));
}

TEST_CASE("chi-square tail matches closed forms") {
  for (double x : {0.5, 2.0, 10.0, 30.0}) {
    CHECK(chi_square_upper_tail(x, 2.0) == doctest::Approx(std::exp(-0.5 * x)).epsilon(1e-12));
    CHECK(chi_square_upper_tail(x, 1.0) ==
          doctest::Approx(std::erfc(std::sqrt(0.5 * x))).epsilon(1e-12));
    CHECK(chi_square_upper_tail(x, 20.0) ==
          doctest::Approx(oracles::chi_square_upper_tail_even_dof(x, 20)).epsilon(1e-12));
  }
  CHECK(chi_square_upper_tail(0.0, 5.0) == 1.0);
  // monotone decreasing in the statistic, so p-values order the evidence
  double prev = 1.0;
  for (double x = 0.5; x < 60.0; x += 0.5) {
    double p = chi_square_upper_tail(x, 20.0);
    CHECK(p < prev);
    prev = p;
  }
}
