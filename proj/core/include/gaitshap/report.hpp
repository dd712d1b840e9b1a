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

#include <string>
#include <vector>

#include "gaitshap/hyperopt.hpp"
#include "gaitshap/matrix.hpp"
#include "gaitshap/metrics.hpp"

namespace gaitshap::report {

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Three stacked panels (V, AP, ML). The mean acceleration curve is drawn as
/// a polyline whose per-sample stroke color ramps linearly from white to deep
/// red over [0, max mean-|SHAP|]; a vertical reference line marks the left
/// heel contact at time 0, and a color legend is included.
std::string render_heatmap(const Matrix& aggregate, const Matrix& mean_curves,
                           const std::vector<int>& anchors);

/// "81.4% 82.7% 76.3% 79.3% 0.89" style row: percentages to one decimal,
/// AUC to two.
std::string format_metrics_row(const metrics::ClassificationMetrics& m, double auc);

/// Writes <path>.json and <path>.txt.
void write_report(const metrics::EvalReport& eval, const std::vector<hyperopt::Trial>& trials,
                  const std::string& path);

/// FNV-1a 64-bit content hash, hex-encoded. Used in run manifests.
std::string file_hash(const std::string& path);

/// Machine-readable record of one CLI run: command, configuration JSON,
/// seeds, and input-file hashes. Sufficient to reproduce the run.
void write_run_manifest(const std::string& path, const std::string& command,
                        const std::string& config_json,
                        const std::vector<std::string>& input_paths);

}  // namespace gaitshap::report
