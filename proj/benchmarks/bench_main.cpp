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
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "gaitshap/hyperopt.hpp"
#include "gaitshap/nn.hpp"
#include "gaitshap/shap.hpp"
#include "gaitshap/signal.hpp"

using namespace gaitshap;

namespace {

std::vector<double> random_sequence(int n, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

void BM_Filtfilt(benchmark::State& state) {
  const auto coeffs = butterworth_design(10.0, 100.0, 2);
  const auto x = random_sequence(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(filtfilt(coeffs, x, 2));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Filtfilt)->Arg(1024)->Arg(16384);

void BM_ConvForward(benchmark::State& state) {
  nn::ModelSpec spec;
  spec.input_len = 128;
  spec.stacks = {{nn::CoreKind::Conv1D, static_cast<int>(state.range(0)), 9,
                  nn::Activation::ReLU, true, 2, 0.0}};
  spec.dense_units = 16;
  nn::Model model(spec, 1);
  nn::Tensor3 x(32, 128, 3);
  const auto vals = random_sequence(static_cast<int>(x.v.size()), 2);
  x.v = vals;
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(x, false));
}
BENCHMARK(BM_ConvForward)->Arg(8)->Arg(88);

void BM_GruForwardBackward(benchmark::State& state) {
  nn::ModelSpec spec;
  spec.input_len = 128;
  spec.stacks = {{nn::CoreKind::Gru, static_cast<int>(state.range(0)), 0,
                  nn::Activation::Tanh, false, 2, 0.0}};
  spec.dense_units = 16;
  nn::Model model(spec, 1);
  nn::Tensor3 x(8, 128, 3);
  const auto vals = random_sequence(static_cast<int>(x.v.size()), 3);
  x.v = vals;
  const std::vector<int> labels = {0, 1, 0, 1, 0, 1, 0, 1};
  for (auto _ : state) {
    model.zero_grads();
    benchmark::DoNotOptimize(model.forward_loss(x, labels, true));
    model.backward();
  }
}
BENCHMARK(BM_GruForwardBackward)->Arg(16)->Arg(64);

void BM_ExactShapley(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto p = shap::partition_features(n, 1, shap::Granularity::PerCellPerAxis);
  Matrix seg(n, 1), base(n, 1, 0.0);
  const auto vals = random_sequence(n, 4);
  seg.v = vals;
  shap::ModelFn game = [](const Matrix& x) {
    double s = 0.0;
    for (size_t i = 0; i < x.v.size(); ++i) {
      s += std::tanh(x.v[i]);
      if (i + 1 < x.v.size()) s += 0.3 * x.v[i] * x.v[i + 1];
    }
    return s;
  };
  for (auto _ : state) benchmark::DoNotOptimize(shap::exact_shapley(game, seg, p, base));
}
BENCHMARK(BM_ExactShapley)->Arg(8)->Arg(12);

void BM_PermutationShapley(benchmark::State& state) {
  const auto p = shap::partition_features(128, 3, shap::Granularity::WindowPerAxis, 16);
  Matrix seg(128, 3), base(128, 3, 0.0);
  const auto vals = random_sequence(static_cast<int>(seg.v.size()), 5);
  seg.v = vals;
  shap::ModelFn game = [](const Matrix& x) {
    double s = 0.0;
    for (double v : x.v) s += std::tanh(v);
    return s;
  };
  for (auto _ : state)
    benchmark::DoNotOptimize(
        shap::permutation_shapley(game, seg, p, base, static_cast<int>(state.range(0)), 7));
}
BENCHMARK(BM_PermutationShapley)->Arg(8)->Arg(64);

void BM_GpPosterior(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), d = 12;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(d));
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) {
    for (auto& v : pts[i]) v = u(rng);
    vals[i] = u(rng);
  }
  std::vector<double> q(d);
  for (auto& v : q) v = u(rng);
  const hyperopt::GpKernelParams kp;
  for (auto _ : state)
    benchmark::DoNotOptimize(hyperopt::gp_posterior(pts, vals, q, kp));
}
BENCHMARK(BM_GpPosterior)->Arg(15)->Arg(60);

}  // namespace

BENCHMARK_MAIN();
