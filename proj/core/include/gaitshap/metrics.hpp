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

namespace gaitshap::metrics {

struct MetricsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LengthMismatch : MetricsError {
  using MetricsError::MetricsError;
};
struct EmptyInput : MetricsError {
  using MetricsError::MetricsError;
};
struct OneClassOnly : MetricsError {
  using MetricsError::MetricsError;
};

/// Positive class = older adult (label 1).
struct ConfusionMatrix {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  long total() const { return tp + fp + tn + fn; }
};

struct ClassificationMetrics {
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
};

struct RocPoint {
  double fpr = 0.0, tpr = 0.0;
};

struct EvalReport {
  ConfusionMatrix confusion;
  ClassificationMetrics metrics;
  std::vector<RocPoint> roc;
  double auc = 0.0;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& predicted,
                                 const std::vector<int>& truths);

/// Zero-denominator cases yield 0 rather than an error.
ClassificationMetrics classification_metrics(const ConfusionMatrix& cm);

/// Threshold sweep over distinct scores descending, ties grouped; endpoints
/// (0,0) and (1,1) included.
std::vector<RocPoint> roc_points(const std::vector<double>& scores,
                                 const std::vector<int>& truths);

double auc_trapezoid(const std::vector<RocPoint>& roc);

EvalReport evaluate(const std::vector<double>& scores, const std::vector<int>& truths,
                    double threshold = 0.5);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
void write_roc_csv(const std::vector<RocPoint>& roc, const std::string& path);

}  // namespace gaitshap::metrics
