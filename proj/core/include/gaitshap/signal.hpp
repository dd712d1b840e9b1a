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
#pragma once

#include <stdexcept>
#include <vector>

#include "gaitshap/trace.hpp"

namespace gaitshap {

struct SignalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CutoffOutOfRange : SignalError {
  using SignalError::SignalError;
};
struct TraceTooShort : SignalError {
  using SignalError::SignalError;
};
struct SequenceTooShort : SignalError {
  using SignalError::SignalError;
};

/// Transfer-function coefficients b/a of a digital Butterworth low-pass,
/// designed by bilinear transform with prewarping. a[0] == 1.
struct IirCoeffs {
  std::vector<double> b;
  std::vector<double> a;
};

IirCoeffs butterworth_design(double cutoff_hz, double sample_rate_hz, int order);

/// Single forward IIR pass with step-response-matched initial state, so a
/// constant input passes through without a startup transient.
std::vector<double> iir_filter(const IirCoeffs& c, const std::vector<double>& x);

/// Zero-phase forward-backward filtering with odd-reflective edge padding of
/// 3*order samples on both ends.
std::vector<double> filtfilt(const IirCoeffs& c, const std::vector<double>& x, int order);

AccelTrace butterworth_lowpass(const AccelTrace& trace, double cutoff_hz = 10.0, int order = 2);

/// Per-axis min-max scaling onto [-1, 1]; a constant axis maps to all zeros.
AccelTrace normalize_amplitude(const AccelTrace& trace);

/// Linear interpolation of a sequence onto target_len points spanning [0, L-1].
std::vector<double> resample_linear(const std::vector<double>& sequence, int target_len);

}  // namespace gaitshap
