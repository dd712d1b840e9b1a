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
#include "gaitshap/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

using nlohmann::json;

namespace gaitshap::report {

namespace {

constexpr double kPanelW = 640.0;
constexpr double kPanelH = 140.0;
constexpr double kMarginX = 60.0;
constexpr double kMarginY = 30.0;
constexpr double kPanelGap = 20.0;

// white -> deep red
std::string ramp_color(double frac) {
  frac = std::clamp(frac, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255.0 + frac * (178.0 - 255.0)));
  const int g = static_cast<int>(std::lround(255.0 + frac * (24.0 - 255.0)));
  const int b = static_cast<int>(std::lround(255.0 + frac * (43.0 - 255.0)));
  std::ostringstream ss;
  ss << "rgb(" << r << ',' << g << ',' << b << ')';
  return ss.str();
}

}  // namespace

std::string render_heatmap(const Matrix& aggregate, const Matrix& mean_curves,
                           const std::vector<int>& anchors) {
  if (!aggregate.same_shape(mean_curves) || aggregate.cols != 3)
    throw IoFailure("aggregate and mean curves must share a time x 3 shape");

  const int T = aggregate.rows;
  double max_shap = 0.0;
  for (double v : aggregate.v) max_shap = std::max(max_shap, v);

  const char* panel_names[3] = {"V", "AP", "ML"};
  const double width = kMarginX * 2 + kPanelW;
  const double height = kMarginY + 3 * (kPanelH + kPanelGap) + 60.0;

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (int a = 0; a < 3; ++a) {
    // per-axis amplitude scaling onto the panel
    double lo = mean_curves.at(0, a), hi = lo;
    for (int t = 0; t < T; ++t) {
      lo = std::min(lo, mean_curves.at(t, a));
      hi = std::max(hi, mean_curves.at(t, a));
    }
    if (hi == lo) hi = lo + 1.0;

    const double top = kMarginY + a * (kPanelH + kPanelGap);
    auto px = [&](int t) { return kMarginX + kPanelW * t / std::max(1, T - 1); };
    auto py = [&](double v) { return top + kPanelH * (1.0 - (v - lo) / (hi - lo)); };

    svg << "<g class=\"panel\" data-axis=\"" << panel_names[a] << "\">\n"
        << "<rect x=\"" << kMarginX << "\" y=\"" << top << "\" width=\"" << kPanelW
        << "\" height=\"" << kPanelH << "\" fill=\"none\" stroke=\"#888\"/>\n"
        << "<text x=\"" << kMarginX - 40.0 << "\" y=\"" << top + kPanelH / 2 << "\">"
        << panel_names[a] << "</text>\n";

    // polyline as per-sample segments, stroke colored by mean-|SHAP|
    for (int t = 0; t + 1 < T; ++t) {
      const double frac = max_shap > 0.0 ? aggregate.at(t, a) / max_shap : 0.0;
      svg << "<line x1=\"" << px(t) << "\" y1=\"" << py(mean_curves.at(t, a)) << "\" x2=\""
          << px(t + 1) << "\" y2=\"" << py(mean_curves.at(t + 1, a)) << "\" stroke=\""
          << ramp_color(frac) << "\" stroke-width=\"2\" data-t=\"" << t << "\"/>\n";
    }

    // heel-contact reference line(s)
    for (int anchor : anchors) {
      if (anchor < 0 || anchor >= T) continue;
      svg << "<line x1=\"" << px(anchor) << "\" y1=\"" << top << "\" x2=\"" << px(anchor)
          << "\" y2=\"" << top + kPanelH << "\" stroke=\"#444\" stroke-dasharray=\"4 3\"/>\n";
    }
    svg << "</g>\n";
  }

  // reference label and color legend
  const double legend_y = kMarginY + 3 * (kPanelH + kPanelGap) + 10.0;
  svg << "<text x=\"" << kMarginX << "\" y=\"" << legend_y - 14.0
      << "\">left heel contact (dashed reference)</text>\n"
      << "<g class=\"legend\">\n";
  const int steps = 32;
  for (int i = 0; i < steps; ++i) {
    svg << "<rect x=\"" << kMarginX + i * 4.0 << "\" y=\"" << legend_y
        << "\" width=\"4\" height=\"12\" fill=\"" << ramp_color(static_cast<double>(i) / (steps - 1))
        << "\"/>\n";
  }
  svg << "<text x=\"" << kMarginX << "\" y=\"" << legend_y + 26.0 << "\">0</text>\n"
      << "<text x=\"" << kMarginX + steps * 4.0 + 6.0 << "\" y=\"" << legend_y + 12.0 << "\">"
      << max_shap << " (max mean-|SHAP|)</text>\n</g>\n</svg>\n";
  return svg.str();
}

std::string format_metrics_row(const metrics::ClassificationMetrics& m, double auc) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%.1f%% %.1f%% %.1f%% %.1f%% %.2f", m.accuracy * 100.0,
                m.precision * 100.0, m.recall * 100.0, m.f1 * 100.0, auc);
  return buf;
}

void write_report(const metrics::EvalReport& eval, const std::vector<hyperopt::Trial>& trials,
                  const std::string& path) {
  {
    std::ofstream out(path + ".json");
    if (!out) throw IoFailure("cannot write " + path + ".json");
    out << metrics::report_to_json(eval) << '\n';
  }
  std::ofstream out(path + ".txt");
  if (!out) throw IoFailure("cannot write " + path + ".txt");
  out << "Accuracy Precision Recall F1-score AUC\n";
  out << format_metrics_row(eval.metrics, eval.auc) << '\n';
  if (!trials.empty()) {
    out << "\nTrials (index, objective):\n";
    for (const auto& t : trials) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%3d  %.6f\n", t.index, t.objective);
      out << buf;
    }
  }
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot hash " + path);
  std::uint64_t h = 14695981039346656037ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!in) break;
  }
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void write_run_manifest(const std::string& path, const std::string& command,
                        const std::string& config_json,
                        const std::vector<std::string>& input_paths) {
  json inputs = json::object();
  for (const auto& p : input_paths) inputs[p] = file_hash(p);
  const json j = {{"command", command},
                  {"config", json::parse(config_json)},
                  {"inputs", inputs}};
  std::ofstream out(path);
  if (!out) throw IoFailure("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace gaitshap::report
