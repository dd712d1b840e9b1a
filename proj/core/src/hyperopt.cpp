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
#include "gaitshap/hyperopt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "json.hpp"

using nlohmann::json;

namespace gaitshap::hyperopt {

namespace {

bool is_conv(const SearchSpace& s) { return s.kind == nn::CoreKind::Conv1D; }

double scale01(double v, double lo, double hi) { return (v - lo) / (hi - lo); }

double check01(double x) {
  if (x < -1e-9 || x > 1.0 + 1e-9) throw OutOfBounds("encoded coordinate outside [0,1]");
  return std::clamp(x, 0.0, 1.0);
}

int decode_int(double x, int lo, int hi) {
  return lo + static_cast<int>(std::lround(check01(x) * (hi - lo)));
}

}  // namespace

int SearchSpace::dims() const {
  // stack count + 3 units + (3 kernels) + 3*(none flag + rate) + dense
  // + head none flag + head rate + learning rate
  return 1 + 3 + (is_conv(*this) ? 3 : 0) + 6 + 1 + 2 + 1;
}

std::vector<double> encode_config(const HyperConfig& c, const SearchSpace& s) {
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  if (!in(c.stack_count, s.stack_min, s.stack_max) ||
      !in(c.dense_units, s.dense_min, s.dense_max) ||
      !in(c.learning_rate, s.lr_min * (1 - 1e-12), s.lr_max * (1 + 1e-12)))
    throw OutOfBounds("config outside search space");

  std::vector<double> x;
  x.push_back(scale01(c.stack_count, s.stack_min, s.stack_max));
  for (int i = 0; i < 3; ++i) {
    if (!in(c.units[i], s.units_min, s.units_max)) throw OutOfBounds("units outside bounds");
    x.push_back(scale01(c.units[i], s.units_min, s.units_max));
  }
  if (is_conv(s))
    for (int i = 0; i < 3; ++i) {
      if (!in(c.kernel[i], s.kernel_min, s.kernel_max))
        throw OutOfBounds("kernel size outside bounds");
      x.push_back(scale01(c.kernel[i], s.kernel_min, s.kernel_max));
    }
  for (int i = 0; i < 3; ++i) {
    const bool present = c.dropout[i] >= 0.0;
    x.push_back(present ? 1.0 : 0.0);
    x.push_back(present ? scale01(c.dropout[i], s.dropout_min, s.dropout_max) : 0.5);
  }
  x.push_back(scale01(c.dense_units, s.dense_min, s.dense_max));
  const bool head = c.head_dropout >= 0.0;
  x.push_back(head ? 1.0 : 0.0);
  x.push_back(head ? scale01(c.head_dropout, s.dropout_min, s.dropout_max) : 0.5);
  x.push_back(scale01(std::log(c.learning_rate), std::log(s.lr_min), std::log(s.lr_max)));
  return x;
}

HyperConfig decode_config(const std::vector<double>& x, const SearchSpace& s) {
  if (static_cast<int>(x.size()) != s.dims()) throw OutOfBounds("wrong encoded dimension");
  HyperConfig c;
  size_t i = 0;
  c.stack_count = decode_int(x[i++], s.stack_min, s.stack_max);
  for (int k = 0; k < 3; ++k) c.units[k] = decode_int(x[i++], s.units_min, s.units_max);
  if (is_conv(s))
    for (int k = 0; k < 3; ++k) c.kernel[k] = decode_int(x[i++], s.kernel_min, s.kernel_max);
  for (int k = 0; k < 3; ++k) {
    const bool present = check01(x[i++]) > 0.5;
    const double rate = s.dropout_min + check01(x[i++]) * (s.dropout_max - s.dropout_min);
    c.dropout[k] = present ? rate : -1.0;
  }
  c.dense_units = decode_int(x[i++], s.dense_min, s.dense_max);
  const bool head = check01(x[i++]) > 0.5;
  const double head_rate = s.dropout_min + check01(x[i++]) * (s.dropout_max - s.dropout_min);
  c.head_dropout = head ? head_rate : -1.0;
  c.learning_rate =
      std::exp(std::log(s.lr_min) + check01(x[i++]) * (std::log(s.lr_max) - std::log(s.lr_min)));
  return c;
}

// -------------------------------------------------------------------- GP

namespace {

double sqexp(const std::vector<double>& a, const std::vector<double>& b,
             const GpKernelParams& kp) {
  double d2 = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return kp.sigma2 * std::exp(-d2 / (2.0 * kp.length * kp.length));
}

// In-place Cholesky of a symmetric positive definite matrix (row-major).
void cholesky(std::vector<double>& K, int n) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = K[i * n + j];
      for (int k = 0; k < j; ++k) sum -= K[i * n + k] * K[j * n + k];
      if (i == j) {
        if (sum <= 0.0) throw SingularKernel("kernel matrix not positive definite");
        K[i * n + i] = std::sqrt(sum);
      } else {
        K[i * n + j] = sum / K[j * n + j];
      }
    }
    for (int j = i + 1; j < n; ++j) K[i * n + j] = 0.0;
  }
}

std::vector<double> chol_solve(const std::vector<double>& L, int n, std::vector<double> b) {
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < i; ++k) b[i] -= L[i * n + k] * b[k];
    b[i] /= L[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    for (int k = i + 1; k < n; ++k) b[i] -= L[k * n + i] * b[k];
    b[i] /= L[i * n + i];
  }
  return b;
}

struct GpFit {
  GpKernelParams kp;
  std::vector<double> L;      // cholesky factor
  std::vector<double> alpha;  // K^-1 (y - mean)
  double prior_mean = 0.0;
  int n = 0;
};

GpFit fit_gp(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
             const GpKernelParams& kp) {
  GpFit fit;
  fit.kp = kp;
  fit.n = static_cast<int>(X.size());
  fit.prior_mean = 0.0;
  for (double v : y) fit.prior_mean += v;
  fit.prior_mean /= fit.n;

  fit.L.assign(static_cast<size_t>(fit.n) * fit.n, 0.0);
  for (int i = 0; i < fit.n; ++i)
    for (int j = 0; j < fit.n; ++j) fit.L[i * fit.n + j] = sqexp(X[i], X[j], kp);
  for (int i = 0; i < fit.n; ++i) fit.L[i * fit.n + i] += kp.noise + 1e-8;  // jitter
  cholesky(fit.L, fit.n);

  std::vector<double> centered(y);
  for (auto& v : centered) v -= fit.prior_mean;
  fit.alpha = chol_solve(fit.L, fit.n, centered);
  return fit;
}

GpPosterior gp_query(const GpFit& fit, const std::vector<std::vector<double>>& X,
                     const std::vector<double>& q) {
  std::vector<double> k(fit.n);
  for (int i = 0; i < fit.n; ++i) k[i] = sqexp(X[i], q, fit.kp);

  GpPosterior post;
  post.mean = fit.prior_mean;
  for (int i = 0; i < fit.n; ++i) post.mean += k[i] * fit.alpha[i];

  // solve L v = k for the predictive variance
  std::vector<double> v(k);
  for (int i = 0; i < fit.n; ++i) {
    for (int j = 0; j < i; ++j) v[i] -= fit.L[i * fit.n + j] * v[j];
    v[i] /= fit.L[i * fit.n + i];
  }
  double var = fit.kp.sigma2;
  for (int i = 0; i < fit.n; ++i) var -= v[i] * v[i];
  post.stddev = std::sqrt(std::max(var, 0.0));
  return post;
}

double log_marginal(const GpFit& fit, const std::vector<double>& y) {
  double quad = 0.0;
  std::vector<double> centered(y);
  for (auto& v : centered) v -= fit.prior_mean;
  for (int i = 0; i < fit.n; ++i) quad += centered[i] * fit.alpha[i];
  double logdet = 0.0;
  for (int i = 0; i < fit.n; ++i) logdet += std::log(fit.L[i * fit.n + i]);
  return -0.5 * quad - logdet - 0.5 * fit.n * std::log(2.0 * std::numbers::pi);
}

// Marginal-likelihood grid fit of (length, sigma2, noise).
GpFit fit_gp_ml(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
  double var = 0.0, mean = 0.0;
  for (double v : y) mean += v;
  mean /= y.size();
  for (double v : y) var += (v - mean) * (v - mean);
  var = std::max(var / y.size(), 1e-6);

  GpFit best;
  double best_ml = -std::numeric_limits<double>::infinity();
  for (double length : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
    for (double sig_scale : {0.5, 1.0, 2.0}) {
      for (double noise : {1e-6, 1e-4, 1e-2}) {
        GpKernelParams kp{var * sig_scale, length, noise};
        try {
          GpFit fit = fit_gp(X, y, kp);
          const double ml = log_marginal(fit, y);
          if (ml > best_ml) {
            best_ml = ml;
            best = std::move(fit);
          }
        } catch (const SingularKernel&) {
        }
      }
    }
  }
  if (best.n == 0) throw SingularKernel("no kernel hyperparameters produced a valid fit");
  return best;
}

double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}
double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Halton low-discrepancy sequence with a per-seed Cranley-Patterson shift.
double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * (index % base);
    index /= base;
  }
  return r;
}

constexpr int kHaltonBases[] = {2,  3,  5,  7,  11, 13, 17, 19, 23,
                               29, 31, 37, 41, 43, 47, 53, 59, 61};

}  // namespace

GpPosterior gp_posterior(const std::vector<std::vector<double>>& points,
                         const std::vector<double>& values, const std::vector<double>& query,
                         const GpKernelParams& kp) {
  if (points.empty() || points.size() != values.size())
    throw OutOfBounds("gp needs at least one observation");
  return gp_query(fit_gp(points, values, kp), points, query);
}

double expected_improvement(double mean, double stddev, double best_so_far) {
  const double gain = mean - best_so_far;
  if (stddev <= 0.0) return std::max(gain, 0.0);
  const double z = gain / stddev;
  return gain * norm_cdf(z) + stddev * norm_pdf(z);
}

BoResult bayes_optimize(const Objective& objective, const SearchSpace& space, int n_trials,
                        int n_init, unsigned long long seed) {
  const int D = space.dims();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> shift(D);
  for (auto& s : shift) s = unit(rng);

  auto run_trial = [&](const std::vector<double>& x, int index, BoResult& result) {
    Trial trial;
    trial.index = index;
    trial.config = decode_config(x, space);
    try {
      trial.objective = objective(trial.config);
    } catch (const std::exception&) {
      trial.objective = -std::numeric_limits<double>::infinity();
    }
    result.log.push_back(trial);
    return trial;
  };

  BoResult result;
  std::vector<std::vector<double>> X;
  std::vector<double> y;

  for (int i = 0; i < std::min(n_init, n_trials); ++i) {
    std::vector<double> x(D);
    for (int d = 0; d < D; ++d) {
      double v = halton(i + 1, kHaltonBases[d]) + shift[d];
      x[d] = v - std::floor(v);
    }
    const Trial t = run_trial(x, i, result);
    if (std::isfinite(t.objective)) {
      X.push_back(x);
      y.push_back(t.objective);
    }
  }

  for (int i = n_init; i < n_trials; ++i) {
    std::vector<double> chosen(D);
    if (X.size() < 2) {
      for (auto& v : chosen) v = unit(rng);
    } else {
      const GpFit fit = fit_gp_ml(X, y);
      const double best = *std::max_element(y.begin(), y.end());
      double best_ei = -1.0;
      std::vector<double> cand(D);
      for (int c = 0; c < 1024; ++c) {
        for (auto& v : cand) v = unit(rng);
        const GpPosterior post = gp_query(fit, X, cand);
        const double ei = expected_improvement(post.mean, post.stddev, best);
        if (ei > best_ei) {
          best_ei = ei;
          chosen = cand;
        }
      }
    }
    const Trial t = run_trial(chosen, i, result);
    if (std::isfinite(t.objective)) {
      X.push_back(chosen);
      y.push_back(t.objective);
    }
  }

  const auto best_it =
      std::max_element(result.log.begin(), result.log.end(),
                       [](const Trial& a, const Trial& b) { return a.objective < b.objective; });
  result.best = best_it->config;
  result.best_objective = best_it->objective;
  return result;
}

BoResult random_search(const Objective& objective, const SearchSpace& space, int n_trials,
                       unsigned long long seed) {
  const int D = space.dims();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BoResult result;
  for (int i = 0; i < n_trials; ++i) {
    std::vector<double> x(D);
    for (auto& v : x) v = unit(rng);
    Trial trial;
    trial.index = i;
    trial.config = decode_config(x, space);
    try {
      trial.objective = objective(trial.config);
    } catch (const std::exception&) {
      trial.objective = -std::numeric_limits<double>::infinity();
    }
    result.log.push_back(trial);
  }
  const auto best_it =
      std::max_element(result.log.begin(), result.log.end(),
                       [](const Trial& a, const Trial& b) { return a.objective < b.objective; });
  result.best = best_it->config;
  result.best_objective = best_it->objective;
  return result;
}

nn::ModelSpec spec_from_config(const HyperConfig& c, const SearchSpace& space, int input_len) {
  nn::ModelSpec spec;
  spec.input_len = input_len;
  for (int i = 0; i < c.stack_count; ++i) {
    nn::StackSpec st;
    st.core = space.kind;
    st.units = c.units[i];
    st.kernel_size = c.kernel[i];
    st.activation = is_conv(space) ? nn::Activation::ReLU : nn::Activation::Tanh;
    st.batch_norm = true;
    st.pool = 2;
    st.dropout = c.dropout[i] >= 0.0 ? c.dropout[i] : 0.0;
    spec.stacks.push_back(st);
  }
  spec.dense_units = c.dense_units;
  spec.head_dropout = c.head_dropout >= 0.0 ? c.head_dropout : 0.0;
  spec.learning_rate = c.learning_rate;
  return spec;
}

// --------------------------------------------------------------- logging

namespace {

json config_to_json(const HyperConfig& c) {
  return {{"stack_count", c.stack_count}, {"units", c.units},
          {"kernel", c.kernel},           {"dropout", c.dropout},
          {"dense_units", c.dense_units}, {"head_dropout", c.head_dropout},
          {"learning_rate", c.learning_rate}};
}

HyperConfig config_from_json(const json& j) {
  HyperConfig c;
  c.stack_count = j.at("stack_count").get<int>();
  c.units = j.at("units").get<std::array<int, 3>>();
  c.kernel = j.at("kernel").get<std::array<int, 3>>();
  c.dropout = j.at("dropout").get<std::array<double, 3>>();
  c.dense_units = j.at("dense_units").get<int>();
  c.head_dropout = j.at("head_dropout").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  return c;
}

}  // namespace

void write_trials_jsonl(const std::vector<Trial>& log, const std::string& path) {
  std::ofstream out(path);
  for (const auto& t : log) {
    json j = {{"trial_index", t.index},
              {"config", config_to_json(t.config)},
              {"objective", std::isfinite(t.objective) ? json(t.objective) : json("-inf")},
              {"duration_s", t.duration_s}};
    out << j.dump() << '\n';
  }
}

std::vector<Trial> read_trials_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trial log " + path);
  std::vector<Trial> log;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    Trial t;
    t.index = j.at("trial_index").get<int>();
    t.config = config_from_json(j.at("config"));
    t.objective = j.at("objective").is_string()
                      ? -std::numeric_limits<double>::infinity()
                      : j.at("objective").get<double>();
    t.duration_s = j.at("duration_s").get<double>();
    log.push_back(t);
  }
  return log;
}

}  // namespace gaitshap::hyperopt
