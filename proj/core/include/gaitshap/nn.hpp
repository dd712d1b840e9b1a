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

#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitshap/matrix.hpp"
#include "gaitshap/segmentation.hpp"

namespace gaitshap::nn {

struct ShapeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyDataset : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// batch x time x channels tensor, row-major.
struct Tensor3 {
  int b = 0, t = 0, c = 0;
  std::vector<double> v;

  Tensor3() = default;
  Tensor3(int b_, int t_, int c_, double fill = 0.0)
      : b(b_), t(t_), c(c_), v(static_cast<size_t>(b_) * t_ * c_, fill) {}

  double& at(int i, int j, int k) { return v[(static_cast<size_t>(i) * t + j) * c + k]; }
  double at(int i, int j, int k) const { return v[(static_cast<size_t>(i) * t + j) * c + k]; }
};

enum class CoreKind { Conv1D, Gru };
enum class Activation { Identity, ReLU, Tanh };

struct StackSpec {
  CoreKind core = CoreKind::Conv1D;
  int units = 8;        // filters (conv) or hidden units (GRU)
  int kernel_size = 3;  // conv only
  Activation activation = Activation::ReLU;
  bool batch_norm = true;
  int pool = 2;
  double dropout = 0.0;  // 0 means no dropout layer
};

struct ModelSpec {
  int input_len = 128;
  int input_channels = 3;
  std::vector<StackSpec> stacks;
  int dense_units = 16;
  double head_dropout = 0.0;
  int output_units = 2;
  double learning_rate = 1e-3;
};

/// The paper-reported optimal architectures.
ModelSpec paper_cnn_spec();
ModelSpec paper_gru_spec();

struct Param {
  std::string name;
  std::vector<int> shape;
  std::vector<double> w;
  std::vector<double> g;

  size_t size() const { return w.size(); }
};

class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor3 forward(const Tensor3& x, bool training, std::mt19937_64& rng) = 0;
  virtual Tensor3 backward(const Tensor3& gy) = 0;
  virtual std::vector<Param*> params() { return {}; }
};

std::unique_ptr<Layer> make_conv1d(int in_channels, int filters, int kernel_size, Activation act);
std::unique_ptr<Layer> make_gru(int in_channels, int units);
std::unique_ptr<Layer> make_batch_norm(int channels, double momentum = 0.9, double eps = 1e-5);
std::unique_ptr<Layer> make_max_pool(int pool);
std::unique_ptr<Layer> make_dropout(double rate);
std::unique_ptr<Layer> make_dense(int in_features, int out_features, Activation act);
std::unique_ptr<Layer> make_flatten();

/// Numerically stable softmax + mean cross-entropy over a batch of logits.
/// probs receives one row per sample.
double softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels, Matrix* probs);

class Model {
 public:
  Model(const ModelSpec& spec, unsigned long long init_seed);

  /// Softmax probabilities, one row per sample.
  Matrix forward(const Tensor3& x, bool training = false);

  /// Forward in training mode, returns mean cross-entropy; keeps caches for
  /// backward().
  double forward_loss(const Tensor3& x, const std::vector<int>& labels, bool training = true);

  /// Reverse pass of the last forward_loss; fills every Param::g.
  void backward();

  std::vector<Param*> params();
  void zero_grads();
  const ModelSpec& spec() const { return spec_; }

  std::vector<std::vector<double>> snapshot_weights() const;
  void restore_weights(const std::vector<std::vector<double>>& snap);

  /// Dropout mask stream; reseeded by train_model per run.
  void reseed_dropout(unsigned long long seed) { rng_.seed(seed); }

 private:
  ModelSpec spec_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::mt19937_64 rng_;
  Matrix probs_;
  std::vector<int> labels_;
};

struct AdamState {
  std::vector<std::vector<double>> m, v;
  long step = 0;
};

void adam_step(std::vector<Param*>& params, AdamState& state, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

struct TrainConfig {
  int max_epochs = 150;
  int patience = 20;
  int batch_size = 32;
  unsigned long long seed = 0;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  std::vector<EpochStats> history;
  int best_epoch = -1;
  double best_val_accuracy = 0.0;
};

int label_of(Group g);
Tensor3 batch_from_segments(const std::vector<StrideSegment>& segments, size_t first, size_t count);

/// Mini-batch Adam with early stopping on validation accuracy; the model is
/// left holding the best-epoch weights.
TrainResult train_model(Model& model, const std::vector<StrideSegment>& train_set,
                        const std::vector<StrideSegment>& val_set, const TrainConfig& config);

/// Inference probabilities for each segment (positive class = column 1).
Matrix predict(Model& model, const std::vector<StrideSegment>& segments, int batch_size = 64);

/// Central-difference check of analytic gradients on a random subsample of
/// coordinates. Returns the max relative error.
double finite_diff_gradcheck(Model& model, const Tensor3& x, const std::vector<int>& labels,
                             int n_coords = 200, double h = 1e-4, unsigned long long seed = 7);

}  // namespace gaitshap::nn
