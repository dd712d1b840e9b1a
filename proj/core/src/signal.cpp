/*
 * Copyright 2026 The gaitshap Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 */
#include "gaitshap/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

namespace gaitshap {

namespace {

// Expands prod_k (x - r_k) into real coefficients, highest power first.
std::vector<double> poly_from_roots(const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> coeff{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(coeff.size() + 1, 0.0);
    for (size_t i = 0; i < coeff.size(); ++i) {
      next[i] += coeff[i];
      next[i + 1] -= coeff[i] * r;
    }
    coeff = std::move(next);
  }
  std::vector<double> out(coeff.size());
  for (size_t i = 0; i < coeff.size(); ++i) out[i] = coeff[i].real();
  return out;
}

}  // namespace

IirCoeffs butterworth_design(double cutoff_hz, double sample_rate_hz, int order) {
  if (order < 1) throw SignalError("filter order must be >= 1");
  if (!(cutoff_hz > 0.0 && cutoff_hz < sample_rate_hz / 2.0))
    throw CutoffOutOfRange("cutoff must lie in (0, fs/2)");

  const double warped = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);

  // Analog prototype poles on the unit circle, scaled to the warped cutoff,
  // then bilinear-mapped. All zeros land at z = -1.
  std::vector<std::complex<double>> zpoles, zzeros;
  for (int k = 1; k <= order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order - 1.0) / (2.0 * order);
    const std::complex<double> p = warped * std::polar(1.0, theta);
    zpoles.push_back((1.0 + p) / (1.0 - p));
    zzeros.push_back(-1.0);
  }

  IirCoeffs c;
  c.b = poly_from_roots(zzeros);
  c.a = poly_from_roots(zpoles);

  const double b_sum = std::accumulate(c.b.begin(), c.b.end(), 0.0);
  const double a_sum = std::accumulate(c.a.begin(), c.a.end(), 0.0);
  const double gain = a_sum / b_sum;  // unit DC gain
  for (auto& bi : c.b) bi *= gain;
  return c;
}

std::vector<double> iir_filter(const IirCoeffs& c, const std::vector<double>& x) {
  const int n = static_cast<int>(c.a.size()) - 1;

  // Steady-state (step-matched) initial conditions, scaled by the first
  // sample: a constant input yields a constant output from sample 0.
  const double b_sum = std::accumulate(c.b.begin(), c.b.end(), 0.0);
  const double a_sum = std::accumulate(c.a.begin(), c.a.end(), 0.0);
  const double dc = b_sum / a_sum;
  std::vector<double> z(n + 1, 0.0);
  for (int i = n; i >= 1; --i) z[i] = (c.b[i] - c.a[i] * dc) + (i < n ? z[i + 1] : 0.0);
  const double x0 = x.empty() ? 0.0 : x.front();
  for (auto& zi : z) zi *= x0;

  // direct form II transposed
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double yi = c.b[0] * x[i] + z[1];
    for (int j = 1; j <= n; ++j)
      z[j] = c.b[j] * x[i] + (j < n ? z[j + 1] : 0.0) - c.a[j] * yi;
    y[i] = yi;
  }
  return y;
}

std::vector<double> filtfilt(const IirCoeffs& c, const std::vector<double>& x, int order) {
  const int pad = 3 * order;
  if (static_cast<int>(x.size()) < pad + 1)
    throw TraceTooShort("signal too short for zero-phase filtering");

  // odd reflection about the end samples
  std::vector<double> ext;
  ext.reserve(x.size() + 2 * pad);
  for (int i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  const int L = static_cast<int>(x.size());
  for (int i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[L - 1 - i]);

  auto fwd = iir_filter(c, ext);
  std::reverse(fwd.begin(), fwd.end());
  auto back = iir_filter(c, fwd);
  std::reverse(back.begin(), back.end());

  return std::vector<double>(back.begin() + pad, back.begin() + pad + L);
}

AccelTrace butterworth_lowpass(const AccelTrace& trace, double cutoff_hz, int order) {
  if (!(cutoff_hz > 0.0 && cutoff_hz < trace.sample_rate_hz / 2.0))
    throw CutoffOutOfRange("cutoff must lie in (0, fs/2)");
  if (static_cast<int>(trace.length()) < 3 * order + 1)
    throw TraceTooShort("trace shorter than 3*order+1 samples");

  const auto coeffs = butterworth_design(cutoff_hz, trace.sample_rate_hz, order);
  AccelTrace out = trace;
  for (int a = 0; a < 3; ++a) out.set_axis(a, filtfilt(coeffs, trace.axis(a), order));
  out.is_filtered = true;
  return out;
}

AccelTrace normalize_amplitude(const AccelTrace& trace) {
  if (trace.samples.empty()) throw SignalError("cannot normalize empty trace");
  AccelTrace out = trace;
  for (int a = 0; a < 3; ++a) {
    auto x = trace.axis(a);
    const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
    if (*mx == *mn) {
      std::fill(x.begin(), x.end(), 0.0);
    } else {
      const double lo = *mn, span = *mx - *mn;
      for (auto& xi : x) xi = 2.0 * (xi - lo) / span - 1.0;
    }
    out.set_axis(a, x);
  }
  out.is_normalized = true;
  return out;
}

std::vector<double> resample_linear(const std::vector<double>& sequence, int target_len) {
  if (sequence.size() < 2 || target_len < 2)
    throw SequenceTooShort("resample needs >= 2 input and output samples");
  const int L = static_cast<int>(sequence.size());
  std::vector<double> out(target_len);
  for (int i = 0; i < target_len; ++i) {
    const double pos = static_cast<double>(i) * (L - 1) / (target_len - 1);
    const int lo = std::min(static_cast<int>(pos), L - 2);
    const double frac = pos - lo;
    out[i] = sequence[lo] * (1.0 - frac) + sequence[lo + 1] * frac;
  }
  out.front() = sequence.front();
  out.back() = sequence.back();
  return out;
}

}  // namespace gaitshap
