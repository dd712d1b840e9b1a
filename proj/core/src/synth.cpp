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
#include "gaitshap/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace gaitshap {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

// Impact transient shapes, expressed in samples relative to the contact.
struct Bump {
  double center;  // offset from contact, samples
  double sigma;   // samples
  double amp_v;
  double amp_ap;
};

double bump_value(const Bump& b, double dt) {
  const double z = (dt - b.center) / b.sigma;
  if (std::abs(z) > 4.0) return 0.0;  // truncated support keeps strides exactly periodic
  return std::exp(-0.5 * z * z);
}

}  // namespace

std::pair<int, int> injected_window(int seg_len) {
  // contrast bump support is center +- 4 sigma
  const int lo = 0;
  const int hi = static_cast<int>(std::ceil((kContrastCenterFrac + 4.0 * kContrastSigmaFrac) *
                                            seg_len));
  return {lo, hi};
}

SubjectRecord generate_subject_trace(Group group, const GaitGenParams& p) {
  if (!(p.stride_period_s > 0.0) || p.n_strides < 1 || p.noise_std < 0.0 ||
      !(p.sample_rate_hz > 0.0))
    throw InvalidParams("invalid generator parameters");

  const int period = static_cast<int>(std::lround(p.stride_period_s * p.sample_rate_hz));
  if (period < 8) throw InvalidParams("stride period too short for the sample rate");
  const int half = period / 2;
  const int offset = half;                       // lead-in before the first contact
  const int n_left = p.n_strides + 1;            // strides = left contacts - 1
  const int length = offset + p.n_strides * period + half;

  SubjectRecord rec;
  rec.trace.subject_id = "synthetic";
  rec.trace.group = group;
  rec.trace.sample_rate_hz = p.sample_rate_hz;
  rec.trace.samples.assign(length, {0.0, 0.0, 0.0});

  for (int k = 0; k < n_left; ++k) {
    const int li = offset + k * period;
    if (li < length) rec.events.push_back({li, Side::Left});
    const int ri = li + half;
    if (k < n_left - 1 && ri < length) rec.events.push_back({ri, Side::Right});
  }

  const Bump impact{0.0, 0.03 * period, 1.0, 0.8};
  const Bump contrast{kContrastCenterFrac * period, kContrastSigmaFrac * period, 0.8, 0.6};
  const bool contrasted = (group == Group::OlderAdult) && p.group_contrast > 0.0;

  for (int i = 0; i < length; ++i) {
    // phase index folded modulo the period so noiseless strides are
    // bit-identical to each other
    const int rel = i - offset;
    const int phase = ((rel % period) + period) % period;
    const double ph = static_cast<double>(phase) / period;

    double v = 0.25 * std::sin(kTau * ph) + 0.20 * std::sin(2.0 * kTau * ph);
    double ap = 0.20 * std::sin(kTau * ph + 0.7) + 0.15 * std::sin(2.0 * kTau * ph + 0.3);
    const double ml = p.ml_sway_amp * std::cos(kTau * ph);

    // impact transients at the left contact (phase 0) and right contact
    // (phase period/2); evaluated on folded phase, including wrap-around
    for (const double c : {0.0, static_cast<double>(half), static_cast<double>(period)}) {
      const double w = bump_value(impact, phase - c);
      v += impact.amp_v * w;
      ap += impact.amp_ap * w;
    }
    if (contrasted) {
      for (const double c : {0.0, static_cast<double>(period)}) {
        const double w = bump_value(contrast, phase - c);
        v += p.group_contrast * contrast.amp_v * w;
        ap += p.group_contrast * contrast.amp_ap * w;
      }
    }

    rec.trace.samples[i] = {v, ap, ml};
  }

  if (p.noise_std > 0.0) {
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> noise(0.0, p.noise_std);
    for (auto& s : rec.trace.samples)
      for (int a = 0; a < 3; ++a) s[a] += noise(rng);
  }
  return rec;
}

std::vector<SubjectRecord> generate_cohort(int n_adult, int n_older, const GaitGenParams& base,
                                           double jitter, unsigned long long seed) {
  if (n_adult < 0 || n_older < 0) throw InvalidParams("negative cohort counts");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  std::vector<SubjectRecord> cohort;
  cohort.reserve(n_adult + n_older);
  int index = 0;
  auto make_subject = [&](Group g, int ordinal) {
    GaitGenParams p = base;
    if (jitter > 0.0) {
      p.stride_period_s *= 1.0 + jitter * unit(rng);
      p.ml_sway_amp *= 1.0 + jitter * unit(rng);
      p.seed = base.seed + 1 + static_cast<unsigned long long>(index);
    }
    ++index;
    SubjectRecord rec = generate_subject_trace(g, p);
    const char prefix = (g == Group::Adult) ? 'A' : 'O';
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%c%03d", prefix, ordinal);
    rec.trace.subject_id = buf;
    return rec;
  };

  for (int i = 0; i < n_adult; ++i) cohort.push_back(make_subject(Group::Adult, i + 1));
  for (int i = 0; i < n_older; ++i) cohort.push_back(make_subject(Group::OlderAdult, i + 1));
  return cohort;
}

}  // namespace gaitshap
