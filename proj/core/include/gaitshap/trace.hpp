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
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaitshap {

enum class Group { Adult, OlderAdult, Unknown };

std::string group_name(Group g);
Group group_from_name(const std::string& s);

/// Tri-axial acceleration recording. Axis order is (V, AP, ML):
/// vertical, anteroposterior, mediolateral.
struct AccelTrace {
  std::string subject_id;
  Group group = Group::Unknown;
  double sample_rate_hz = 100.0;
  std::vector<std::array<double, 3>> samples;
  bool is_filtered = false;
  bool is_normalized = false;

  size_t length() const { return samples.size(); }
  std::vector<double> axis(int a) const;
  void set_axis(int a, const std::vector<double>& values);
};

struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyFile : TraceError {
  using TraceError::TraceError;
};
struct MissingColumn : TraceError {
  using TraceError::TraceError;
};
struct NonNumericCell : TraceError {
  int row;
  explicit NonNumericCell(int r)
      : TraceError("non-numeric cell in data row " + std::to_string(r)), row(r) {}
};

/// Maps the three axes onto CSV column names, e.g. {v:"ax", ap:"ay", ml:"az"}.
struct AxisMap {
  std::string v = "v";
  std::string ap = "ap";
  std::string ml = "ml";
};

AccelTrace parse_trace_csv(const std::string& path, const AxisMap& axis_map,
                           double sample_rate_hz = 100.0);

/// Writes `subject_id,group,v,ap,ml` rows, one per sample.
void write_trace_csv(const AccelTrace& trace, const std::string& path);

/// Reads the export format back (inverse of write_trace_csv).
AccelTrace read_exported_trace_csv(const std::string& path, double sample_rate_hz = 100.0);

}  // namespace gaitshap
