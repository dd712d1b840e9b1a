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
#include "gaitshap/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gaitshap::nn {

namespace {

double activate(Activation a, double x) {
  switch (a) {
    case Activation::ReLU:
      return x > 0.0 ? x : 0.0;
    case Activation::Tanh:
      return std::tanh(x);
    default:
      return x;
  }
}

double activate_grad(Activation a, double pre, double post) {
  switch (a) {
    case Activation::ReLU:
      return pre > 0.0 ? 1.0 : 0.0;
    case Activation::Tanh:
      return 1.0 - post * post;
    default:
      return 1.0;
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void glorot_init(Param& p, int fan_in, int fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (auto& w : p.w) w = dist(rng);
}

// ---------------------------------------------------------------- Conv1D

class Conv1DLayer final : public Layer {
 public:
  Conv1DLayer(int in_channels, int filters, int kernel_size, Activation act)
      : in_c_(in_channels), filters_(filters), k_(kernel_size), act_(act) {
    weight_.name = "conv.weight";
    weight_.shape = {filters, kernel_size, in_channels};
    weight_.w.assign(static_cast<size_t>(filters) * kernel_size * in_channels, 0.0);
    weight_.g = weight_.w;
    bias_.name = "conv.bias";
    bias_.shape = {filters};
    bias_.w.assign(filters, 0.0);
    bias_.g = bias_.w;
  }

  void init(std::mt19937_64& rng) { glorot_init(weight_, in_c_ * k_, filters_, rng); }

  Tensor3 forward(const Tensor3& x, bool, std::mt19937_64&) override {
    if (x.c != in_c_) throw ShapeMismatch("conv1d channel mismatch");
    x_ = x;
    const int left = (k_ - 1) / 2;  // zero same-padding, stride 1
    pre_ = Tensor3(x.b, x.t, filters_);
    Tensor3 y(x.b, x.t, filters_);
    for (int i = 0; i < x.b; ++i)
      for (int t = 0; t < x.t; ++t)
        for (int f = 0; f < filters_; ++f) {
          double acc = bias_.w[f];
          const double* w = &weight_.w[static_cast<size_t>(f) * k_ * in_c_];
          for (int dk = 0; dk < k_; ++dk) {
            const int s = t + dk - left;
            if (s < 0 || s >= x.t) continue;
            for (int c = 0; c < in_c_; ++c) acc += x.at(i, s, c) * w[dk * in_c_ + c];
          }
          pre_.at(i, t, f) = acc;
          y.at(i, t, f) = activate(act_, acc);
        }
    return y;
  }

  Tensor3 backward(const Tensor3& gy) override {
    const int left = (k_ - 1) / 2;
    Tensor3 gx(x_.b, x_.t, in_c_);
    for (int i = 0; i < x_.b; ++i)
      for (int t = 0; t < x_.t; ++t)
        for (int f = 0; f < filters_; ++f) {
          const double pre = pre_.at(i, t, f);
          const double gpre = gy.at(i, t, f) * activate_grad(act_, pre, activate(act_, pre));
          if (gpre == 0.0) continue;
          bias_.g[f] += gpre;
          double* gw = &weight_.g[static_cast<size_t>(f) * k_ * in_c_];
          const double* w = &weight_.w[static_cast<size_t>(f) * k_ * in_c_];
          for (int dk = 0; dk < k_; ++dk) {
            const int s = t + dk - left;
            if (s < 0 || s >= x_.t) continue;
            for (int c = 0; c < in_c_; ++c) {
              gw[dk * in_c_ + c] += gpre * x_.at(i, s, c);
              gx.at(i, s, c) += gpre * w[dk * in_c_ + c];
            }
          }
        }
    return gx;
  }

  std::vector<Param*> params() override { return {&weight_, &bias_}; }

 private:
  int in_c_, filters_, k_;
  Activation act_;
  Param weight_, bias_;
  Tensor3 x_, pre_;
};

// ------------------------------------------------------------------- GRU

class GruLayer final : public Layer {
 public:
  GruLayer(int in_channels, int units) : in_c_(in_channels), units_(units) {
    auto make = [&](Param& p, const std::string& name, int r, int c) {
      p.name = name;
      p.shape = {r, c};
      p.w.assign(static_cast<size_t>(r) * c, 0.0);
      p.g = p.w;
    };
    make(wz_, "gru.wz", in_c_, units);
    make(wr_, "gru.wr", in_c_, units);
    make(wh_, "gru.wh", in_c_, units);
    make(uz_, "gru.uz", units, units);
    make(ur_, "gru.ur", units, units);
    make(uh_, "gru.uh", units, units);
    make(bz_, "gru.bz", 1, units);
    make(br_, "gru.br", 1, units);
    make(bh_, "gru.bh", 1, units);
  }

  void init(std::mt19937_64& rng) {
    for (Param* p : {&wz_, &wr_, &wh_}) glorot_init(*p, in_c_, units_, rng);
    for (Param* p : {&uz_, &ur_, &uh_}) glorot_init(*p, units_, units_, rng);
  }

  Tensor3 forward(const Tensor3& x, bool, std::mt19937_64&) override {
    if (x.c != in_c_) throw ShapeMismatch("gru channel mismatch");
    x_ = x;
    const int B = x.b, T = x.t, U = units_;
    z_ = Tensor3(B, T, U);
    r_ = Tensor3(B, T, U);
    n_ = Tensor3(B, T, U);
    h_ = Tensor3(B, T, U);

    std::vector<double> hz(U), hr(U), hh(U);
    for (int i = 0; i < B; ++i) {
      std::vector<double> hprev(U, 0.0);  // h0 = 0
      for (int t = 0; t < T; ++t) {
        // gate pre-activations: x W + h U + b
        std::fill(hz.begin(), hz.end(), 0.0);
        std::fill(hr.begin(), hr.end(), 0.0);
        std::fill(hh.begin(), hh.end(), 0.0);
        for (int c = 0; c < in_c_; ++c) {
          const double xv = x.at(i, t, c);
          if (xv == 0.0) continue;
          const size_t row = static_cast<size_t>(c) * U;
          for (int u = 0; u < U; ++u) {
            hz[u] += xv * wz_.w[row + u];
            hr[u] += xv * wr_.w[row + u];
          }
        }
        for (int p = 0; p < U; ++p) {
          const double hv = hprev[p];
          if (hv == 0.0) continue;
          const size_t row = static_cast<size_t>(p) * U;
          for (int u = 0; u < U; ++u) {
            hz[u] += hv * uz_.w[row + u];
            hr[u] += hv * ur_.w[row + u];
          }
        }
        for (int u = 0; u < U; ++u) {
          z_.at(i, t, u) = sigmoid(hz[u] + bz_.w[u]);
          r_.at(i, t, u) = sigmoid(hr[u] + br_.w[u]);
        }
        // candidate: tanh(x Wh + (r o hprev) Uh + bh)
        for (int c = 0; c < in_c_; ++c) {
          const double xv = x.at(i, t, c);
          if (xv == 0.0) continue;
          const size_t row = static_cast<size_t>(c) * U;
          for (int u = 0; u < U; ++u) hh[u] += xv * wh_.w[row + u];
        }
        for (int p = 0; p < U; ++p) {
          const double rh = r_.at(i, t, p) * hprev[p];
          if (rh == 0.0) continue;
          const size_t row = static_cast<size_t>(p) * U;
          for (int u = 0; u < U; ++u) hh[u] += rh * uh_.w[row + u];
        }
        for (int u = 0; u < U; ++u) {
          const double n = std::tanh(hh[u] + bh_.w[u]);
          n_.at(i, t, u) = n;
          const double z = z_.at(i, t, u);
          const double h = (1.0 - z) * hprev[u] + z * n;
          h_.at(i, t, u) = h;
          hprev[u] = h;
        }
      }
    }
    return h_;  // return_sequences
  }

  Tensor3 backward(const Tensor3& gy) override {
    const int B = x_.b, T = x_.t, U = units_;
    Tensor3 gx(B, T, in_c_);
    std::vector<double> dh(U), dz_pre(U), dr_pre(U), dn_pre(U), drh(U);
    for (int i = 0; i < B; ++i) {
      std::fill(dh.begin(), dh.end(), 0.0);
      for (int t = T - 1; t >= 0; --t) {
        std::vector<double> hprev(U, 0.0);
        if (t > 0)
          for (int u = 0; u < U; ++u) hprev[u] = h_.at(i, t - 1, u);

        for (int u = 0; u < U; ++u) dh[u] += gy.at(i, t, u);

        std::vector<double> dhprev(U, 0.0);
        for (int u = 0; u < U; ++u) {
          const double z = z_.at(i, t, u), n = n_.at(i, t, u);
          const double dn = dh[u] * z * (1.0 - n * n);
          dz_pre[u] = dh[u] * (n - hprev[u]) * z * (1.0 - z);
          dn_pre[u] = dn;
          dhprev[u] = dh[u] * (1.0 - z);
        }
        // through candidate's (r o hprev) Uh term
        std::fill(drh.begin(), drh.end(), 0.0);
        for (int p = 0; p < U; ++p) {
          const size_t row = static_cast<size_t>(p) * U;
          double acc = 0.0;
          for (int u = 0; u < U; ++u) acc += dn_pre[u] * uh_.w[row + u];
          drh[p] = acc;
        }
        for (int u = 0; u < U; ++u) {
          const double r = r_.at(i, t, u);
          dr_pre[u] = drh[u] * hprev[u] * r * (1.0 - r);
          dhprev[u] += drh[u] * r;
        }

        // parameter gradients
        for (int c = 0; c < in_c_; ++c) {
          const double xv = x_.at(i, t, c);
          if (xv != 0.0) {
            const size_t row = static_cast<size_t>(c) * U;
            for (int u = 0; u < U; ++u) {
              wz_.g[row + u] += xv * dz_pre[u];
              wr_.g[row + u] += xv * dr_pre[u];
              wh_.g[row + u] += xv * dn_pre[u];
            }
          }
        }
        for (int p = 0; p < U; ++p) {
          const double hv = hprev[p];
          const double rh = r_.at(i, t, p) * hprev[p];
          const size_t row = static_cast<size_t>(p) * U;
          if (hv != 0.0)
            for (int u = 0; u < U; ++u) {
              uz_.g[row + u] += hv * dz_pre[u];
              ur_.g[row + u] += hv * dr_pre[u];
            }
          if (rh != 0.0)
            for (int u = 0; u < U; ++u) uh_.g[row + u] += rh * dn_pre[u];
        }
        for (int u = 0; u < U; ++u) {
          bz_.g[u] += dz_pre[u];
          br_.g[u] += dr_pre[u];
          bh_.g[u] += dn_pre[u];
        }

        // input gradient
        for (int c = 0; c < in_c_; ++c) {
          const size_t row = static_cast<size_t>(c) * U;
          double acc = 0.0;
          for (int u = 0; u < U; ++u)
            acc += dz_pre[u] * wz_.w[row + u] + dr_pre[u] * wr_.w[row + u] +
                   dn_pre[u] * wh_.w[row + u];
          gx.at(i, t, c) = acc;
        }

        // carry to previous step through the gate pre-activations
        for (int p = 0; p < U; ++p) {
          const size_t row = static_cast<size_t>(p) * U;
          double acc = dhprev[p];
          for (int u = 0; u < U; ++u)
            acc += dz_pre[u] * uz_.w[row + u] + dr_pre[u] * ur_.w[row + u];
          dh[p] = acc;
        }
      }
    }
    return gx;
  }

  std::vector<Param*> params() override {
    return {&wz_, &wr_, &wh_, &uz_, &ur_, &uh_, &bz_, &br_, &bh_};
  }

 private:
  int in_c_, units_;
  Param wz_, wr_, wh_, uz_, ur_, uh_, bz_, br_, bh_;
  Tensor3 x_, z_, r_, n_, h_;
};

// ------------------------------------------------------------ BatchNorm

class BatchNormLayer final : public Layer {
 public:
  BatchNormLayer(int channels, double momentum, double eps)
      : c_(channels), momentum_(momentum), eps_(eps) {
    gamma_.name = "bn.gamma";
    gamma_.shape = {channels};
    gamma_.w.assign(channels, 1.0);
    gamma_.g.assign(channels, 0.0);
    beta_.name = "bn.beta";
    beta_.shape = {channels};
    beta_.w.assign(channels, 0.0);
    beta_.g = beta_.w;
    running_mean_.name = "bn.running_mean";
    running_mean_.shape = {channels};
    running_mean_.w.assign(channels, 0.0);
    running_mean_.g = running_mean_.w;
    running_var_.name = "bn.running_var";
    running_var_.shape = {channels};
    running_var_.w.assign(channels, 1.0);
    running_var_.g.assign(channels, 0.0);
  }

  Tensor3 forward(const Tensor3& x, bool training, std::mt19937_64&) override {
    if (x.c != c_) throw ShapeMismatch("batch norm channel mismatch");
    const long m = static_cast<long>(x.b) * x.t;
    if (m == 0) throw ShapeMismatch("batch norm on empty batch");
    x_ = x;
    training_ = training;
    Tensor3 y(x.b, x.t, x.c);
    mean_.assign(c_, 0.0);
    var_.assign(c_, 0.0);
    if (training) {
      for (int i = 0; i < x.b; ++i)
        for (int t = 0; t < x.t; ++t)
          for (int c = 0; c < c_; ++c) mean_[c] += x.at(i, t, c);
      for (auto& v : mean_) v /= m;
      for (int i = 0; i < x.b; ++i)
        for (int t = 0; t < x.t; ++t)
          for (int c = 0; c < c_; ++c) {
            const double d = x.at(i, t, c) - mean_[c];
            var_[c] += d * d;
          }
      for (auto& v : var_) v /= m;
      for (int c = 0; c < c_; ++c) {
        running_mean_.w[c] = momentum_ * running_mean_.w[c] + (1.0 - momentum_) * mean_[c];
        running_var_.w[c] = momentum_ * running_var_.w[c] + (1.0 - momentum_) * var_[c];
      }
    } else {
      mean_ = running_mean_.w;
      var_ = running_var_.w;
    }
    xhat_ = Tensor3(x.b, x.t, x.c);
    for (int i = 0; i < x.b; ++i)
      for (int t = 0; t < x.t; ++t)
        for (int c = 0; c < c_; ++c) {
          const double xh = (x.at(i, t, c) - mean_[c]) / std::sqrt(var_[c] + eps_);
          xhat_.at(i, t, c) = xh;
          y.at(i, t, c) = gamma_.w[c] * xh + beta_.w[c];
        }
    return y;
  }

  Tensor3 backward(const Tensor3& gy) override {
    const long m = static_cast<long>(gy.b) * gy.t;
    Tensor3 gx(gy.b, gy.t, gy.c);
    std::vector<double> sum_gy(c_, 0.0), sum_gy_xhat(c_, 0.0);
    for (int i = 0; i < gy.b; ++i)
      for (int t = 0; t < gy.t; ++t)
        for (int c = 0; c < c_; ++c) {
          sum_gy[c] += gy.at(i, t, c);
          sum_gy_xhat[c] += gy.at(i, t, c) * xhat_.at(i, t, c);
        }
    for (int c = 0; c < c_; ++c) {
      gamma_.g[c] += sum_gy_xhat[c];
      beta_.g[c] += sum_gy[c];
    }
    for (int i = 0; i < gy.b; ++i)
      for (int t = 0; t < gy.t; ++t)
        for (int c = 0; c < c_; ++c) {
          const double inv_std = 1.0 / std::sqrt(var_[c] + eps_);
          if (training_) {
            gx.at(i, t, c) = gamma_.w[c] * inv_std *
                             (gy.at(i, t, c) - sum_gy[c] / m -
                              xhat_.at(i, t, c) * sum_gy_xhat[c] / m);
          } else {
            gx.at(i, t, c) = gamma_.w[c] * inv_std * gy.at(i, t, c);
          }
        }
    return gx;
  }

  std::vector<Param*> params() override {
    return {&gamma_, &beta_, &running_mean_, &running_var_};
  }

 private:
  int c_;
  double momentum_, eps_;
  bool training_ = false;
  Param gamma_, beta_, running_mean_, running_var_;
  Tensor3 x_, xhat_;
  std::vector<double> mean_, var_;
};

// -------------------------------------------------------------- MaxPool

class MaxPoolLayer final : public Layer {
 public:
  explicit MaxPoolLayer(int pool) : pool_(pool) {}

  Tensor3 forward(const Tensor3& x, bool, std::mt19937_64&) override {
    const int out_t = x.t / pool_;  // trailing remainder dropped
    in_shape_ = {x.b, x.t, x.c};
    argmax_.assign(static_cast<size_t>(x.b) * out_t * x.c, 0);
    Tensor3 y(x.b, out_t, x.c);
    for (int i = 0; i < x.b; ++i)
      for (int t = 0; t < out_t; ++t)
        for (int c = 0; c < x.c; ++c) {
          int best = t * pool_;
          double bv = x.at(i, best, c);
          for (int d = 1; d < pool_; ++d) {
            const double v = x.at(i, t * pool_ + d, c);
            if (v > bv) {
              bv = v;
              best = t * pool_ + d;
            }
          }
          y.at(i, t, c) = bv;
          argmax_[(static_cast<size_t>(i) * out_t + t) * x.c + c] = best;
        }
    return y;
  }

  Tensor3 backward(const Tensor3& gy) override {
    Tensor3 gx(in_shape_[0], in_shape_[1], in_shape_[2]);
    for (int i = 0; i < gy.b; ++i)
      for (int t = 0; t < gy.t; ++t)
        for (int c = 0; c < gy.c; ++c)
          gx.at(i, argmax_[(static_cast<size_t>(i) * gy.t + t) * gy.c + c], c) +=
              gy.at(i, t, c);
    return gx;
  }

 private:
  int pool_;
  std::array<int, 3> in_shape_{};
  std::vector<int> argmax_;
};

// -------------------------------------------------------------- Dropout

class DropoutLayer final : public Layer {
 public:
  explicit DropoutLayer(double rate) : rate_(rate) {}

  Tensor3 forward(const Tensor3& x, bool training, std::mt19937_64& rng) override {
    if (!training || rate_ <= 0.0) {
      active_ = false;
      return x;
    }
    active_ = true;
    const double keep = 1.0 - rate_;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    mask_.assign(x.v.size(), 0.0);
    Tensor3 y = x;
    for (size_t i = 0; i < x.v.size(); ++i) {
      // inverted dropout
      mask_[i] = (unit(rng) < keep) ? 1.0 / keep : 0.0;
      y.v[i] = x.v[i] * mask_[i];
    }
    return y;
  }

  Tensor3 backward(const Tensor3& gy) override {
    if (!active_) return gy;
    Tensor3 gx = gy;
    for (size_t i = 0; i < gx.v.size(); ++i) gx.v[i] *= mask_[i];
    return gx;
  }

 private:
  double rate_;
  bool active_ = false;
  std::vector<double> mask_;
};

// ---------------------------------------------------------------- Dense

class DenseLayer final : public Layer {
 public:
  DenseLayer(int in_features, int out_features, Activation act)
      : in_(in_features), out_(out_features), act_(act) {
    weight_.name = "dense.weight";
    weight_.shape = {in_features, out_features};
    weight_.w.assign(static_cast<size_t>(in_features) * out_features, 0.0);
    weight_.g = weight_.w;
    bias_.name = "dense.bias";
    bias_.shape = {out_features};
    bias_.w.assign(out_features, 0.0);
    bias_.g = bias_.w;
  }

  void init(std::mt19937_64& rng) { glorot_init(weight_, in_, out_, rng); }

  Tensor3 forward(const Tensor3& x, bool, std::mt19937_64&) override {
    if (x.c != in_) throw ShapeMismatch("dense feature mismatch");
    x_ = x;
    pre_ = Tensor3(x.b, x.t, out_);
    Tensor3 y(x.b, x.t, out_);
    for (int i = 0; i < x.b; ++i)
      for (int t = 0; t < x.t; ++t) {
        for (int u = 0; u < out_; ++u) pre_.at(i, t, u) = bias_.w[u];
        for (int c = 0; c < in_; ++c) {
          const double xv = x.at(i, t, c);
          if (xv == 0.0) continue;
          const size_t row = static_cast<size_t>(c) * out_;
          for (int u = 0; u < out_; ++u) pre_.at(i, t, u) += xv * weight_.w[row + u];
        }
        for (int u = 0; u < out_; ++u) y.at(i, t, u) = activate(act_, pre_.at(i, t, u));
      }
    return y;
  }

  Tensor3 backward(const Tensor3& gy) override {
    Tensor3 gx(x_.b, x_.t, in_);
    for (int i = 0; i < x_.b; ++i)
      for (int t = 0; t < x_.t; ++t) {
        std::vector<double> gpre(out_);
        for (int u = 0; u < out_; ++u) {
          const double pre = pre_.at(i, t, u);
          gpre[u] = gy.at(i, t, u) * activate_grad(act_, pre, activate(act_, pre));
          bias_.g[u] += gpre[u];
        }
        for (int c = 0; c < in_; ++c) {
          const double xv = x_.at(i, t, c);
          const size_t row = static_cast<size_t>(c) * out_;
          double acc = 0.0;
          for (int u = 0; u < out_; ++u) {
            weight_.g[row + u] += gpre[u] * xv;
            acc += gpre[u] * weight_.w[row + u];
          }
          gx.at(i, t, c) = acc;
        }
      }
    return gx;
  }

  std::vector<Param*> params() override { return {&weight_, &bias_}; }

 private:
  int in_, out_;
  Activation act_;
  Param weight_, bias_;
  Tensor3 x_, pre_;
};

// -------------------------------------------------------------- Flatten

class FlattenLayer final : public Layer {
 public:
  Tensor3 forward(const Tensor3& x, bool, std::mt19937_64&) override {
    in_shape_ = {x.b, x.t, x.c};
    Tensor3 y;
    y.b = x.b;
    y.t = 1;
    y.c = x.t * x.c;
    y.v = x.v;
    return y;
  }

  Tensor3 backward(const Tensor3& gy) override {
    Tensor3 gx;
    gx.b = in_shape_[0];
    gx.t = in_shape_[1];
    gx.c = in_shape_[2];
    gx.v = gy.v;
    return gx;
  }

 private:
  std::array<int, 3> in_shape_{};
};

}  // namespace

std::unique_ptr<Layer> make_conv1d(int in_channels, int filters, int kernel_size,
                                   Activation act) {
  return std::make_unique<Conv1DLayer>(in_channels, filters, kernel_size, act);
}
std::unique_ptr<Layer> make_gru(int in_channels, int units) {
  return std::make_unique<GruLayer>(in_channels, units);
}
std::unique_ptr<Layer> make_batch_norm(int channels, double momentum, double eps) {
  return std::make_unique<BatchNormLayer>(channels, momentum, eps);
}
std::unique_ptr<Layer> make_max_pool(int pool) { return std::make_unique<MaxPoolLayer>(pool); }
std::unique_ptr<Layer> make_dropout(double rate) { return std::make_unique<DropoutLayer>(rate); }
std::unique_ptr<Layer> make_dense(int in_features, int out_features, Activation act) {
  return std::make_unique<DenseLayer>(in_features, out_features, act);
}
std::unique_ptr<Layer> make_flatten() { return std::make_unique<FlattenLayer>(); }

double softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                             Matrix* probs) {
  if (static_cast<int>(labels.size()) != logits.rows)
    throw ShapeMismatch("labels/logits length mismatch");
  Matrix p(logits.rows, logits.cols);
  double loss = 0.0;
  for (int i = 0; i < logits.rows; ++i) {
    double mx = logits.at(i, 0);
    for (int j = 1; j < logits.cols; ++j) mx = std::max(mx, logits.at(i, j));
    double z = 0.0;
    for (int j = 0; j < logits.cols; ++j) z += std::exp(logits.at(i, j) - mx);
    for (int j = 0; j < logits.cols; ++j) p.at(i, j) = std::exp(logits.at(i, j) - mx) / z;
    loss -= std::log(p.at(i, labels[i]));
  }
  if (probs) *probs = p;
  return loss / logits.rows;
}

// ---------------------------------------------------------------- Model

ModelSpec paper_cnn_spec() {
  ModelSpec spec;
  spec.input_len = 128;
  spec.stacks = {
      {CoreKind::Conv1D, 88, 13, Activation::ReLU, true, 2, 0.3},
      {CoreKind::Conv1D, 336, 5, Activation::ReLU, true, 2, 0.6},
      {CoreKind::Conv1D, 2, 1, Activation::ReLU, true, 2, 0.0},
  };
  spec.dense_units = 74;
  spec.head_dropout = 0.5;
  spec.learning_rate = 0.0015;
  return spec;
}

ModelSpec paper_gru_spec() {
  ModelSpec spec;
  spec.input_len = 1024;
  spec.stacks = {
      {CoreKind::Gru, 666, 0, Activation::Tanh, true, 2, 0.5},
      {CoreKind::Gru, 438, 0, Activation::Tanh, true, 2, 0.7},
      {CoreKind::Gru, 2, 0, Activation::Tanh, true, 2, 0.0},
  };
  spec.dense_units = 676;
  spec.head_dropout = 0.1;
  spec.learning_rate = 0.0003;
  return spec;
}

Model::Model(const ModelSpec& spec, unsigned long long init_seed) : spec_(spec), rng_(init_seed) {
  std::mt19937_64 init_rng(init_seed);
  int channels = spec.input_channels;
  int time = spec.input_len;
  for (const auto& st : spec.stacks) {
    if (st.core == CoreKind::Conv1D) {
      auto conv = std::make_unique<Conv1DLayer>(channels, st.units, st.kernel_size, st.activation);
      conv->init(init_rng);
      layers_.push_back(std::move(conv));
    } else {
      auto gru = std::make_unique<GruLayer>(channels, st.units);
      gru->init(init_rng);
      layers_.push_back(std::move(gru));
    }
    channels = st.units;
    if (st.batch_norm) layers_.push_back(make_batch_norm(channels));
    if (st.pool > 1) {
      layers_.push_back(make_max_pool(st.pool));
      time /= st.pool;
    }
    if (st.dropout > 0.0) layers_.push_back(make_dropout(st.dropout));
  }
  {
    auto dense = std::make_unique<DenseLayer>(channels, spec.dense_units, Activation::ReLU);
    dense->init(init_rng);
    layers_.push_back(std::move(dense));
  }
  layers_.push_back(make_flatten());
  if (spec.head_dropout > 0.0) layers_.push_back(make_dropout(spec.head_dropout));
  {
    auto out = std::make_unique<DenseLayer>(time * spec.dense_units, spec.output_units,
                                            Activation::Identity);
    out->init(init_rng);
    layers_.push_back(std::move(out));
  }
}

Matrix Model::forward(const Tensor3& x, bool training) {
  Tensor3 cur = x;
  for (auto& layer : layers_) cur = layer->forward(cur, training, rng_);
  if (cur.t != 1 || cur.c != spec_.output_units) throw ShapeMismatch("unexpected output shape");
  Matrix logits(cur.b, spec_.output_units);
  logits.v = cur.v;
  std::vector<int> dummy(cur.b, 0);
  Matrix probs;
  softmax_cross_entropy(logits, dummy, &probs);
  return probs;
}

double Model::forward_loss(const Tensor3& x, const std::vector<int>& labels, bool training) {
  Tensor3 cur = x;
  for (auto& layer : layers_) cur = layer->forward(cur, training, rng_);
  Matrix logits(cur.b, spec_.output_units);
  logits.v = cur.v;
  labels_ = labels;
  return softmax_cross_entropy(logits, labels, &probs_);
}

void Model::backward() {
  const int B = probs_.rows;
  Tensor3 g(B, 1, spec_.output_units);
  for (int i = 0; i < B; ++i)
    for (int j = 0; j < spec_.output_units; ++j)
      g.at(i, 0, j) = (probs_.at(i, j) - (labels_[i] == j ? 1.0 : 0.0)) / B;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
}

std::vector<Param*> Model::params() {
  std::vector<Param*> out;
  for (auto& layer : layers_)
    for (Param* p : layer->params()) out.push_back(p);
  return out;
}

void Model::zero_grads() {
  for (Param* p : params()) std::fill(p->g.begin(), p->g.end(), 0.0);
}

std::vector<std::vector<double>> Model::snapshot_weights() const {
  std::vector<std::vector<double>> snap;
  for (auto& layer : const_cast<Model*>(this)->layers_)
    for (Param* p : layer->params()) snap.push_back(p->w);
  return snap;
}

void Model::restore_weights(const std::vector<std::vector<double>>& snap) {
  size_t i = 0;
  for (auto& layer : layers_)
    for (Param* p : layer->params()) p->w = snap.at(i++);
}

// ----------------------------------------------------------------- Adam

void adam_step(std::vector<Param*>& params, AdamState& state, double lr, double beta1,
               double beta2, double eps) {
  if (state.m.empty()) {
    for (Param* p : params) {
      state.m.emplace_back(p->size(), 0.0);
      state.v.emplace_back(p->size(), 0.0);
    }
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(beta1, state.step);
  const double bc2 = 1.0 - std::pow(beta2, state.step);
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Param* p = params[pi];
    if (p->name.find("running") != std::string::npos) continue;  // BN stats are not trained
    for (size_t i = 0; i < p->size(); ++i) {
      const double g = p->g[i];
      state.m[pi][i] = beta1 * state.m[pi][i] + (1.0 - beta1) * g;
      state.v[pi][i] = beta2 * state.v[pi][i] + (1.0 - beta2) * g * g;
      const double mhat = state.m[pi][i] / bc1;
      const double vhat = state.v[pi][i] / bc2;
      p->w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

// ------------------------------------------------------------- Training

int label_of(Group g) { return g == Group::OlderAdult ? 1 : 0; }

Tensor3 batch_from_segments(const std::vector<StrideSegment>& segments, size_t first,
                            size_t count) {
  const int T = segments[first].data.rows;
  Tensor3 x(static_cast<int>(count), T, 3);
  for (size_t i = 0; i < count; ++i) {
    const auto& d = segments[first + i].data;
    if (d.rows != T || d.cols != 3) throw ShapeMismatch("inconsistent segment shape in batch");
    for (int t = 0; t < T; ++t)
      for (int a = 0; a < 3; ++a) x.at(static_cast<int>(i), t, a) = d.at(t, a);
  }
  return x;
}

Matrix predict(Model& model, const std::vector<StrideSegment>& segments, int batch_size) {
  Matrix probs(static_cast<int>(segments.size()), model.spec().output_units);
  for (size_t first = 0; first < segments.size(); first += batch_size) {
    const size_t count = std::min<size_t>(batch_size, segments.size() - first);
    const Matrix p = model.forward(batch_from_segments(segments, first, count), false);
    for (size_t i = 0; i < count; ++i)
      for (int j = 0; j < p.cols; ++j)
        probs.at(static_cast<int>(first + i), j) = p.at(static_cast<int>(i), j);
  }
  return probs;
}

TrainResult train_model(Model& model, const std::vector<StrideSegment>& train_set,
                        const std::vector<StrideSegment>& val_set, const TrainConfig& config) {
  if (train_set.empty() || val_set.empty()) throw EmptyDataset("empty train or validation set");

  model.reseed_dropout(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::mt19937_64 shuffle_rng(config.seed);

  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  auto val_accuracy = [&]() {
    const Matrix p = predict(model, val_set);
    int correct = 0;
    for (size_t i = 0; i < val_set.size(); ++i) {
      const int pred = p.at(static_cast<int>(i), 1) > p.at(static_cast<int>(i), 0) ? 1 : 0;
      if (pred == label_of(val_set[i].group)) ++correct;
    }
    return static_cast<double>(correct) / val_set.size();
  };

  auto params = model.params();
  AdamState adam;
  TrainResult result;
  std::vector<std::vector<double>> best_weights = model.snapshot_weights();
  int stale = 0;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    int n_batches = 0;
    for (size_t first = 0; first < order.size(); first += config.batch_size) {
      const size_t count = std::min<size_t>(config.batch_size, order.size() - first);
      std::vector<StrideSegment> batch;  // gather shuffled batch
      batch.reserve(count);
      std::vector<int> labels;
      for (size_t i = 0; i < count; ++i) {
        batch.push_back(train_set[order[first + i]]);
        labels.push_back(label_of(batch.back().group));
      }
      model.zero_grads();
      loss_sum += model.forward_loss(batch_from_segments(batch, 0, count), labels, true);
      model.backward();
      adam_step(params, adam, model.spec().learning_rate);
      ++n_batches;
    }

    EpochStats stats;
    stats.train_loss = loss_sum / n_batches;
    stats.val_accuracy = val_accuracy();
    result.history.push_back(stats);

    if (stats.val_accuracy > result.best_val_accuracy) {
      result.best_val_accuracy = stats.val_accuracy;
      result.best_epoch = epoch;
      best_weights = model.snapshot_weights();
      stale = 0;
    } else {
      if (++stale >= config.patience) break;
    }
  }

  model.restore_weights(best_weights);
  return result;
}

// ------------------------------------------------------------ Gradcheck

double finite_diff_gradcheck(Model& model, const Tensor3& x, const std::vector<int>& labels,
                             int n_coords, double h, unsigned long long seed) {
  auto params = model.params();

  model.zero_grads();
  model.forward_loss(x, labels, true);
  model.backward();

  std::vector<std::pair<size_t, size_t>> coords;  // (param index, weight index)
  for (size_t pi = 0; pi < params.size(); ++pi) {
    if (params[pi]->name.find("running") != std::string::npos) continue;
    for (size_t i = 0; i < params[pi]->size(); ++i) coords.emplace_back(pi, i);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(coords.begin(), coords.end(), rng);
  if (static_cast<int>(coords.size()) > n_coords) coords.resize(n_coords);

  double max_rel = 0.0;
  for (const auto& [pi, i] : coords) {
    const double analytic = params[pi]->g[i];
    const double w0 = params[pi]->w[i];
    params[pi]->w[i] = w0 + h;
    const double lp = model.forward_loss(x, labels, true);
    params[pi]->w[i] = w0 - h;
    const double lm = model.forward_loss(x, labels, true);
    params[pi]->w[i] = w0;
    const double numeric = (lp - lm) / (2.0 * h);
    // floor keeps near-zero coordinates (dead ReLU paths) from amplifying
    // central-difference roundoff into spurious relative error
    const double rel = std::abs(analytic - numeric) /
                       std::max({std::abs(analytic), std::abs(numeric), 1e-3});
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace gaitshap::nn
