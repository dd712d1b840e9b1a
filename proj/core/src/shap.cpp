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
#include "gaitshap/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace gaitshap::shap {

FeaturePartition partition_features(int time, int axes, Granularity granularity,
                                    int window_len) {
  if (time < 1 || axes < 1) throw ShapeMismatch("invalid segment shape");
  FeaturePartition p;
  p.time = time;
  p.axes = axes;
  p.granularity = granularity;

  switch (granularity) {
    case Granularity::PerCellPerAxis:
      for (int a = 0; a < axes; ++a)
        for (int t = 0; t < time; ++t) {
          p.groups.push_back({t * axes + a});
          p.info.push_back({a, t, t + 1});
        }
      break;
    case Granularity::WindowPerAxis: {
      if (window_len < 1) throw InvalidWindow("window length must be >= 1");
      p.window_len = window_len;
      const int n_windows = (time + window_len - 1) / window_len;
      for (int a = 0; a < axes; ++a)
        for (int w = 0; w < n_windows; ++w) {
          const int t0 = w * window_len;
          const int t1 = std::min(time, t0 + window_len);
          std::vector<int> cells;
          for (int t = t0; t < t1; ++t) cells.push_back(t * axes + a);
          p.groups.push_back(std::move(cells));
          p.info.push_back({a, t0, t1});
        }
      break;
    }
    case Granularity::WholeAxis:
      for (int a = 0; a < axes; ++a) {
        std::vector<int> cells;
        for (int t = 0; t < time; ++t) cells.push_back(t * axes + a);
        p.groups.push_back(std::move(cells));
        p.info.push_back({a, 0, time});
      }
      break;
  }
  return p;
}

Matrix mask_with_coalition(const Matrix& segment, const Coalition& coalition,
                           const FeaturePartition& partition, const Matrix& baseline) {
  if (!segment.same_shape(baseline)) throw ShapeMismatch("segment/baseline shape mismatch");
  if (segment.rows != partition.time || segment.cols != partition.axes)
    throw ShapeMismatch("segment/partition shape mismatch");
  if (static_cast<int>(coalition.size()) != partition.size())
    throw ShapeMismatch("coalition length mismatch");

  Matrix out = baseline;
  for (int g = 0; g < partition.size(); ++g) {
    if (!coalition[g]) continue;
    for (int cell : partition.groups[g]) out.v[cell] = segment.v[cell];
  }
  return out;
}

namespace {

// Model values for all 2^N coalitions, indexed by bitmask.
std::vector<double> coalition_table(const ModelFn& f, const Matrix& segment,
                                    const FeaturePartition& p, const Matrix& baseline) {
  const int N = p.size();
  if (N > kMaxExactFeatures) throw TooManyFeatures("exact enumeration limited to 15 features");
  std::vector<double> values(1u << N);
  Coalition mask(N, 0);
  for (std::uint32_t bits = 0; bits < values.size(); ++bits) {
    for (int g = 0; g < N; ++g) mask[g] = (bits >> g) & 1u;
    values[bits] = f(mask_with_coalition(segment, mask, p, baseline));
  }
  return values;
}

std::vector<double> shapley_from_table(const std::vector<double>& values, int N) {
  std::vector<double> fact(N + 1, 1.0);
  for (int i = 1; i <= N; ++i) fact[i] = fact[i - 1] * i;

  std::vector<double> phi(N, 0.0);
  for (std::uint32_t bits = 0; bits < values.size(); ++bits) {
    const int s = std::popcount(bits);
    if (s == 0) continue;
    const double weight = fact[s - 1] * fact[N - s] / fact[N];
    for (int g = 0; g < N; ++g) {
      if (!((bits >> g) & 1u)) continue;
      phi[g] += weight * (values[bits] - values[bits & ~(1u << g)]);
    }
  }
  return phi;
}

}  // namespace

ShapAttribution exact_shapley(const ModelFn& model_fn, const Matrix& segment,
                              const FeaturePartition& partition, const Matrix& baseline) {
  const int N = partition.size();
  const auto values = coalition_table(model_fn, segment, partition, baseline);

  ShapAttribution attr;
  attr.estimator = Estimator::Exact;
  attr.phi0 = values[0];
  attr.phi = shapley_from_table(values, N);

  const double fx = values.back();  // all-ones coalition
  attr.efficiency_gap = fx - attr.phi0 - std::accumulate(attr.phi.begin(), attr.phi.end(), 0.0);
  return attr;
}

ShapAttribution permutation_shapley(const ModelFn& model_fn, const Matrix& segment,
                                    const FeaturePartition& partition, const Matrix& baseline,
                                    int n_perm, unsigned long long seed) {
  const int N = partition.size();
  if (n_perm < 1) throw EmptyInput("need at least one permutation");

  ShapAttribution attr;
  attr.estimator = Estimator::Permutation;
  attr.n_perm = n_perm;
  attr.seed = seed;
  attr.phi.assign(N, 0.0);

  Coalition mask(N, 0);
  attr.phi0 = model_fn(mask_with_coalition(segment, mask, partition, baseline));

  std::vector<int> order(N);
  for (int perm = 0; perm < n_perm; ++perm) {
    // per-permutation stream so results are independent of scheduling
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<unsigned long long>(perm));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::fill(mask.begin(), mask.end(), 0);
    double prev = attr.phi0;
    for (int g : order) {
      mask[g] = 1;
      const double cur = model_fn(mask_with_coalition(segment, mask, partition, baseline));
      attr.phi[g] += cur - prev;
      prev = cur;
    }
  }
  for (auto& p : attr.phi) p /= n_perm;

  std::fill(mask.begin(), mask.end(), 1);
  const double fx = model_fn(mask_with_coalition(segment, mask, partition, baseline));
  attr.efficiency_gap = fx - attr.phi0 - std::accumulate(attr.phi.begin(), attr.phi.end(), 0.0);
  return attr;
}

Matrix mean_abs_aggregate(const std::vector<ShapAttribution>& attributions,
                          const FeaturePartition& partition) {
  if (attributions.empty()) throw EmptyInput("no attributions to aggregate");
  const int N = partition.size();
  std::vector<double> mean_abs(N, 0.0);
  for (const auto& a : attributions) {
    if (static_cast<int>(a.phi.size()) != N) throw ShapeMismatch("attribution size mismatch");
    for (int g = 0; g < N; ++g) mean_abs[g] += std::abs(a.phi[g]);
  }
  for (auto& m : mean_abs) m /= attributions.size();

  Matrix out(partition.time, partition.axes);
  for (int g = 0; g < N; ++g)
    for (int cell : partition.groups[g]) out.v[cell] = mean_abs[g];
  return out;
}

PropertyReport check_shapley_properties(const ModelFn& model_fn, const Matrix& segment,
                                        const FeaturePartition& partition,
                                        const Matrix& baseline,
                                        const ShapAttribution& attribution,
                                        const ModelFn* game1, const ModelFn* game2) {
  const int N = partition.size();
  const auto values = coalition_table(model_fn, segment, partition, baseline);

  PropertyReport report;
  const double fx = values.back();
  report.efficiency_residual = std::abs(
      fx - attribution.phi0 -
      std::accumulate(attribution.phi.begin(), attribution.phi.end(), 0.0));
  report.efficiency_ok = report.efficiency_residual <= 1e-6;

  // dummy groups: presence never changes the value, in any coalition
  constexpr double kDetectTol = 1e-12;
  for (int g = 0; g < N; ++g) {
    bool dummy = true;
    for (std::uint32_t bits = 0; bits < values.size() && dummy; ++bits) {
      if ((bits >> g) & 1u) continue;
      if (std::abs(values[bits | (1u << g)] - values[bits]) > kDetectTol) dummy = false;
    }
    if (dummy) {
      report.dummy_groups.push_back(g);
      report.max_dummy_phi = std::max(report.max_dummy_phi, std::abs(attribution.phi[g]));
    }
  }
  report.dummy_ok = report.max_dummy_phi <= 1e-9;

  // symmetric pairs: identical marginal contribution in every coalition
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      bool symmetric = true;
      for (std::uint32_t bits = 0; bits < values.size() && symmetric; ++bits) {
        if (((bits >> i) & 1u) || ((bits >> j) & 1u)) continue;
        if (std::abs(values[bits | (1u << i)] - values[bits | (1u << j)]) > kDetectTol)
          symmetric = false;
      }
      if (symmetric) {
        report.symmetric_pairs.emplace_back(i, j);
        report.max_symmetry_gap = std::max(
            report.max_symmetry_gap, std::abs(attribution.phi[i] - attribution.phi[j]));
      }
    }
  report.symmetry_ok = report.max_symmetry_gap <= 1e-9;

  if (game1 && game2) {
    const auto a1 = exact_shapley(*game1, segment, partition, baseline);
    const auto a2 = exact_shapley(*game2, segment, partition, baseline);
    for (int g = 0; g < N; ++g)
      report.additivity_residual =
          std::max(report.additivity_residual,
                   std::abs(attribution.phi[g] - a1.phi[g] - a2.phi[g]));
    report.additivity_ok = report.additivity_residual <= 1e-9;
  }
  return report;
}

void write_attribution_csv(const std::vector<std::pair<std::string, ShapAttribution>>& rows,
                           const FeaturePartition& partition, const std::string& path) {
  std::ofstream out(path);
  out.precision(17);
  out << "segment_id,group_index,axis,time_start,time_end,phi\n";
  for (const auto& [id, attr] : rows)
    for (int g = 0; g < partition.size(); ++g) {
      const auto& gi = partition.info[g];
      out << id << ',' << g << ',' << gi.axis << ',' << gi.time_start << ',' << gi.time_end
          << ',' << attr.phi[g] << '\n';
    }
}

void write_heatmap_csv(const Matrix& aggregate, const std::string& path) {
  std::ofstream out(path);
  out.precision(17);
  out << "v,ap,ml\n";
  for (int t = 0; t < aggregate.rows; ++t) {
    for (int a = 0; a < aggregate.cols; ++a) out << (a ? "," : "") << aggregate.at(t, a);
    out << '\n';
  }
}

Matrix read_heatmap_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ShapError("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyInput("empty heatmap csv");
  Matrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (size_t t = 0; t < rows.size(); ++t)
    for (size_t a = 0; a < rows[t].size(); ++a) m.at(static_cast<int>(t), static_cast<int>(a)) = rows[t][a];
  return m;
}

}  // namespace gaitshap::shap
