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
#include <string>
#include <utility>
#include <vector>

#include "gaitshap/segmentation.hpp"
#include "gaitshap/trace.hpp"

namespace gaitshap {

struct InvalidParams : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parameters of the synthetic two-group gait generator. The waveform is a
/// stride-frequency fundamental plus a step-frequency harmonic plus a
/// Gaussian-windowed impact transient at every heel contact. The older-adult
/// group carries an extra transient shortly after each left contact, scaled
/// by group_contrast, so the discriminative time window is known exactly.
struct GaitGenParams {
  double stride_period_s = 1.1;
  int n_strides = 90;
  double group_contrast = 0.5;
  double ml_sway_amp = 0.3;
  double noise_std = 0.05;
  double sample_rate_hz = 100.0;
  unsigned long long seed = 1;
};

/// Fractional position/extent of the injected group difference inside one
/// normalized stride: [0, 1/8) of the stride, i.e. samples [0,16) of 128.
constexpr double kContrastCenterFrac = 0.0625;
constexpr double kContrastSigmaFrac = 0.02;

/// Start/end sample of the injected discriminative window in a normalized
/// stride of seg_len samples.
std::pair<int, int> injected_window(int seg_len = 128);

struct SubjectRecord {
  AccelTrace trace;
  std::vector<GaitEvent> events;  // ground-truth contact indices + sides
};

SubjectRecord generate_subject_trace(Group group, const GaitGenParams& params);

std::vector<SubjectRecord> generate_cohort(int n_adult, int n_older, const GaitGenParams& base,
                                           double jitter, unsigned long long seed);

}  // namespace gaitshap
