#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "gaitshap/signal.hpp"
#include "gaitshap/trace.hpp"

using namespace gaitshap;

namespace {

AccelTrace const_trace(double c, int n, double fs = 100.0) {
  AccelTrace t;
  t.sample_rate_hz = fs;
  t.samples.assign(n, {c, c, c});
  return t;
}

// Steady-state single-pass gain of the designed filter at frequency f_hz,
// measured on interior samples of a long forward-filtered sinusoid.
double measured_gain(double f_hz, double fs, double cutoff, int order) {
  const auto c = butterworth_design(cutoff, fs, order);
  const int n = static_cast<int>(fs * 12);
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin(2.0 * std::numbers::pi * f_hz * i / fs);
  const auto y = iir_filter(c, x);
  double peak = 0.0;
  for (int i = n / 2; i < n; ++i) peak = std::max(peak, std::abs(y[i]));
  return peak;
}

double analytic_gain(double f_hz, double cutoff, int order) {
  return 1.0 / std::sqrt(1.0 + std::pow(f_hz / cutoff, 2.0 * order));
}

}  // namespace

TEST_SUITE("signal") {

TEST_CASE("butterworth dc passthrough on constant signal") {
  const auto out = butterworth_lowpass(const_trace(3.25, 400));
  CHECK(out.is_filtered);
  REQUIRE(out.length() == 400);
  for (const auto& s : out.samples)
    for (int a = 0; a < 3; ++a) CHECK(s[a] == doctest::Approx(3.25).epsilon(1e-9));
}

TEST_CASE("single-pass gain at 10 Hz cutoff is 1/sqrt(2)") {
  // measured at a sample rate where the bilinear design tracks the analog
  // magnitude formula closely across the band of interest
  const double fs = 2000.0;
  const double g = measured_gain(10.0, fs, 10.0, 2);
  CHECK(g == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.01));
}

TEST_CASE("single-pass gain at 30 Hz matches 1/sqrt(1+3^4)") {
  const double fs = 2000.0;
  const double g = measured_gain(30.0, fs, 10.0, 2);
  CHECK(g == doctest::Approx(1.0 / std::sqrt(1.0 + 81.0)).epsilon(0.01));
}

TEST_CASE("measured gains match analytic response within 1% across band") {
  const double fs = 2000.0;
  for (double f : {2.0, 5.0, 10.0, 20.0, 30.0}) {
    const double g = measured_gain(f, fs, 10.0, 2);
    const double a = analytic_gain(f, 10.0, 2);
    CHECK(std::abs(g - a) / a < 0.01);
  }
}

TEST_CASE("filter linearity") {
  const auto c = butterworth_design(10.0, 100.0, 2);
  std::vector<double> x(300), y(300);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : x) v = u(rng);
  for (auto& v : y) v = u(rng);
  const double a = 2.5, b = -0.75;
  std::vector<double> mix(300);
  for (int i = 0; i < 300; ++i) mix[i] = a * x[i] + b * y[i];

  const auto fx = filtfilt(c, x, 2), fy = filtfilt(c, y, 2), fmix = filtfilt(c, mix, 2);
  for (int i = 0; i < 300; ++i) {
    const double expect = a * fx[i] + b * fy[i];
    CHECK(std::abs(fmix[i] - expect) <= 1e-9 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("forward-backward filtering has zero phase shift") {
  const double fs = 100.0;
  const int n = 1000;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i)
    x[i] = std::sin(2.0 * std::numbers::pi * 2.0 * i / fs) +
           0.5 * std::sin(2.0 * std::numbers::pi * 5.0 * i / fs);
  const auto c = butterworth_design(10.0, fs, 2);
  const auto y = filtfilt(c, x, 2);

  // cross-correlation peak over lags [-10, 10] must sit at lag 0
  double best = -1e300;
  int best_lag = -99;
  for (int lag = -10; lag <= 10; ++lag) {
    double s = 0.0;
    for (int i = 100; i < n - 100; ++i) s += x[i] * y[i + lag];
    if (s > best) {
      best = s;
      best_lag = lag;
    }
  }
  CHECK(best_lag == 0);
}

TEST_CASE("cutoff bounds and trace length errors") {
  CHECK_THROWS_AS(butterworth_lowpass(const_trace(0.0, 100), 50.0, 2), CutoffOutOfRange);
  CHECK_THROWS_AS(butterworth_lowpass(const_trace(0.0, 100), 0.0, 2), CutoffOutOfRange);
  CHECK_THROWS_AS(butterworth_lowpass(const_trace(0.0, 6), 10.0, 2), TraceTooShort);
}

TEST_CASE("normalize [0,5,10] to [-1,0,1]") {
  AccelTrace t = const_trace(0.0, 3);
  t.set_axis(0, {0.0, 5.0, 10.0});
  t.set_axis(1, {4.0, 4.0, 4.0});
  t.set_axis(2, {-2.0, 0.0, 6.0});
  const auto out = normalize_amplitude(t);
  CHECK(out.is_normalized);
  CHECK(out.axis(0) == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(out.axis(1) == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(out.axis(2)[0] == doctest::Approx(-1.0));
  CHECK(out.axis(2)[1] == doctest::Approx(-0.5));
  CHECK(out.axis(2)[2] == doctest::Approx(1.0));
}

TEST_CASE("normalize is idempotent for non-degenerate axes") {
  AccelTrace t = const_trace(0.0, 5);
  t.set_axis(0, {1.0, 7.0, -3.0, 2.0, 0.5});
  t.set_axis(1, {0.0, 1.0, 0.0, 1.0, 0.5});
  t.set_axis(2, {-9.0, 3.0, 2.0, 2.0, 1.0});
  const auto once = normalize_amplitude(t);
  const auto twice = normalize_amplitude(once);
  CHECK(once.samples == twice.samples);
}

TEST_CASE("resample identity and endpoints") {
  std::vector<double> x(128);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : x) v = u(rng);
  CHECK(resample_linear(x, 128) == x);

  std::vector<double> ramp(100);
  for (int i = 0; i < 100; ++i) ramp[i] = i;
  const auto r = resample_linear(ramp, 128);
  REQUIRE(r.size() == 128);
  CHECK(r.front() == 0.0);
  CHECK(r.back() == 99.0);
  CHECK(r[64] == doctest::Approx(99.0 * 64.0 / 127.0).epsilon(1e-12));
}

TEST_CASE("resample rejects too-short inputs") {
  CHECK_THROWS_AS(resample_linear({1.0}, 10), SequenceTooShort);
  CHECK_THROWS_AS(resample_linear({1.0, 2.0}, 1), SequenceTooShort);
}

}  // TEST_SUITE

TEST_SUITE("trace") {

TEST_CASE("csv identity parse") {
  const char* path = "test_trace_basic.csv";
  {
    std::ofstream f(path);
    f << "v,ap,ml\n0,0,0\n1,1,1\n2,2,2\n";
  }
  const auto t = parse_trace_csv(path, AxisMap{});
  REQUIRE(t.length() == 3);
  CHECK_FALSE(t.is_filtered);
  CHECK_FALSE(t.is_normalized);
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a) CHECK(t.samples[i][a] == static_cast<double>(i));
  std::remove(path);
}

TEST_CASE("text cell raises NonNumericCell with row index") {
  const char* path = "test_trace_bad.csv";
  {
    std::ofstream f(path);
    f << "v,ap,ml\n0,0,0\n1,x,1\n";
  }
  CHECK_THROWS_AS(parse_trace_csv(path, AxisMap{}), NonNumericCell);
  try {
    parse_trace_csv(path, AxisMap{});
  } catch (const NonNumericCell& e) {
    CHECK(e.row == 2);
  }
  std::remove(path);
}

TEST_CASE("axis map routes vendor columns, extras ignored") {
  const char* path = "test_trace_map.csv";
  {
    std::ofstream f(path);
    f << "t,ax,ay,az\n0.00,1,4,7\n0.01,2,5,8\n0.02,3,6,9\n";
  }
  const auto t = parse_trace_csv(path, AxisMap{"ax", "ay", "az"});
  REQUIRE(t.length() == 3);
  CHECK(t.axis(0) == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(t.axis(1) == std::vector<double>{4.0, 5.0, 6.0});
  CHECK(t.axis(2) == std::vector<double>{7.0, 8.0, 9.0});
  std::remove(path);
}

TEST_CASE("missing column and empty file errors") {
  const char* path = "test_trace_err.csv";
  {
    std::ofstream f(path);
    f << "v,ap\n1,2\n";
  }
  CHECK_THROWS_AS(parse_trace_csv(path, AxisMap{}), MissingColumn);
  {
    std::ofstream f(path);
  }
  CHECK_THROWS_AS(parse_trace_csv(path, AxisMap{}), EmptyFile);
  std::remove(path);
}

TEST_CASE("export round trip") {
  AccelTrace t;
  t.subject_id = "S01";
  t.group = Group::OlderAdult;
  t.samples = {{0.1, -0.2, 0.3}, {1.0 / 3.0, 0.5, -0.7}};
  const char* path = "test_trace_rt.csv";
  write_trace_csv(t, path);
  const auto back = read_exported_trace_csv(path);
  CHECK(back.subject_id == "S01");
  CHECK(back.group == Group::OlderAdult);
  CHECK(back.samples == t.samples);
  std::remove(path);
}

}  // TEST_SUITE
