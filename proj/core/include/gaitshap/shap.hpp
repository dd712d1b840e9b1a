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

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitshap/matrix.hpp"

namespace gaitshap::shap {

struct ShapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidWindow : ShapError {
  using ShapError::ShapError;
};
struct TooManyFeatures : ShapError {
  using ShapError::ShapError;
};
struct ShapeMismatch : ShapError {
  using ShapError::ShapError;
};
struct EmptyInput : ShapError {
  using ShapError::ShapError;
};

enum class Granularity { PerCellPerAxis, WindowPerAxis, WholeAxis };

/// Disjoint cover of the (time x axes) cells by feature groups. Groups are
/// ordered axis-major: for WindowPerAxis, group = axis * n_windows + window.
struct FeaturePartition {
  int time = 0;
  int axes = 0;
  Granularity granularity = Granularity::WholeAxis;
  int window_len = 0;

  struct GroupInfo {
    int axis = 0;
    int time_start = 0;
    int time_end = 0;  // exclusive
  };
  std::vector<std::vector<int>> groups;  // flat cell index = t * axes + axis
  std::vector<GroupInfo> info;

  int size() const { return static_cast<int>(groups.size()); }
};

FeaturePartition partition_features(int time, int axes, Granularity granularity,
                                    int window_len = 0);

/// Deterministic scalar model over one segment (e.g. the probability of one
/// output class). Must be safe to call concurrently on frozen parameters.
using ModelFn = std::function<double(const Matrix&)>;

/// Present/absent mask over feature groups.
using Coalition = std::vector<std::uint8_t>;

/// Present groups keep the segment's cells, absent groups take the baseline's.
Matrix mask_with_coalition(const Matrix& segment, const Coalition& coalition,
                           const FeaturePartition& partition, const Matrix& baseline);

enum class Estimator { Exact, Permutation };

struct ShapAttribution {
  std::vector<double> phi;
  double phi0 = 0.0;  // value of the empty coalition
  int output_class = 1;
  Estimator estimator = Estimator::Exact;
  int n_perm = 0;
  unsigned long long seed = 0;
  double efficiency_gap = 0.0;  // f(x) - phi0 - sum(phi)
};

constexpr int kMaxExactFeatures = 15;

/// Full enumeration of all 2^N coalitions (N <= 15).
ShapAttribution exact_shapley(const ModelFn& model_fn, const Matrix& segment,
                              const FeaturePartition& partition, const Matrix& baseline);

/// Monte Carlo estimate over seeded random permutations; unbiased for the
/// exact values. The per-permutation randomness is derived from (seed, index)
/// so results do not depend on evaluation order.
ShapAttribution permutation_shapley(const ModelFn& model_fn, const Matrix& segment,
                                    const FeaturePartition& partition, const Matrix& baseline,
                                    int n_perm, unsigned long long seed);

/// Per-group mean |phi| across attributions, broadcast to member cells.
Matrix mean_abs_aggregate(const std::vector<ShapAttribution>& attributions,
                          const FeaturePartition& partition);

struct PropertyReport {
  bool efficiency_ok = false;
  bool dummy_ok = false;
  bool symmetry_ok = false;
  bool additivity_ok = false;
  double efficiency_residual = 0.0;
  double max_dummy_phi = 0.0;
  double max_symmetry_gap = 0.0;
  double additivity_residual = 0.0;
  std::vector<int> dummy_groups;
  std::vector<std::pair<int, int>> symmetric_pairs;

  bool all_ok(bool with_additivity) const {
    return efficiency_ok && dummy_ok && symmetry_ok && (!with_additivity || additivity_ok);
  }
};

/// Executable form of the four Shapley axioms. Dummies and symmetric pairs
/// are detected by enumerating every coalition. Additivity is checked when
/// the two component games f = f1 + f2 are supplied.
PropertyReport check_shapley_properties(const ModelFn& model_fn, const Matrix& segment,
                                        const FeaturePartition& partition,
                                        const Matrix& baseline,
                                        const ShapAttribution& attribution,
                                        const ModelFn* game1 = nullptr,
                                        const ModelFn* game2 = nullptr);

/// Columns: segment_id, group_index, axis, time_start, time_end, phi.
void write_attribution_csv(const std::vector<std::pair<std::string, ShapAttribution>>& rows,
                           const FeaturePartition& partition, const std::string& path);

void write_heatmap_csv(const Matrix& aggregate, const std::string& path);
Matrix read_heatmap_csv(const std::string& path);

}  // namespace gaitshap::shap
