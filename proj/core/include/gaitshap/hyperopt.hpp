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

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitshap/nn.hpp"

namespace gaitshap::hyperopt {

struct OutOfBounds : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularKernel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Hyperparameter box for one model family. Kernel-size dimensions exist
/// only for convolutional spaces.
struct SearchSpace {
  nn::CoreKind kind = nn::CoreKind::Conv1D;
  int stack_min = 1, stack_max = 3;
  int units_min = 2, units_max = 768;
  int kernel_min = 1, kernel_max = 15;
  double dropout_min = 0.1, dropout_max = 0.9;
  int dense_min = 2, dense_max = 768;
  double lr_min = 1e-5, lr_max = 1e-2;

  int dims() const;
};

/// One concrete assignment. Dropout fields < 0 mean "no dropout layer".
struct HyperConfig {
  int stack_count = 1;
  std::array<int, 3> units{8, 8, 8};
  std::array<int, 3> kernel{3, 3, 3};
  std::array<double, 3> dropout{-1.0, -1.0, -1.0};
  int dense_units = 16;
  double head_dropout = -1.0;
  double learning_rate = 1e-3;
};

struct Trial {
  int index = 0;
  HyperConfig config;
  double objective = 0.0;
  double duration_s = 0.0;
};

/// Min-max scaling of every dimension onto the unit cube; learning rate in
/// log domain, "none" dropout as a separate binary coordinate.
std::vector<double> encode_config(const HyperConfig& config, const SearchSpace& space);
HyperConfig decode_config(const std::vector<double>& x, const SearchSpace& space);

struct GpKernelParams {
  double sigma2 = 1.0;  // signal variance of the squared-exponential kernel
  double length = 0.3;
  double noise = 1e-6;
};

struct GpPosterior {
  double mean = 0.0;
  double stddev = 0.0;
};

GpPosterior gp_posterior(const std::vector<std::vector<double>>& points,
                         const std::vector<double>& values, const std::vector<double>& query,
                         const GpKernelParams& kp);

/// Expected improvement under the maximization convention.
double expected_improvement(double mean, double stddev, double best_so_far);

struct BoResult {
  HyperConfig best;
  double best_objective = 0.0;
  std::vector<Trial> log;
};

using Objective = std::function<double(const HyperConfig&)>;

BoResult bayes_optimize(const Objective& objective, const SearchSpace& space, int n_trials = 15,
                        int n_init = 5, unsigned long long seed = 0);

/// Same-budget uniform-sampling baseline.
BoResult random_search(const Objective& objective, const SearchSpace& space, int n_trials,
                       unsigned long long seed);

nn::ModelSpec spec_from_config(const HyperConfig& config, const SearchSpace& space,
                               int input_len);

void write_trials_jsonl(const std::vector<Trial>& log, const std::string& path);
std::vector<Trial> read_trials_jsonl(const std::string& path);

}  // namespace gaitshap::hyperopt
