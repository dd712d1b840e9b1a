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
#include "gaitshap/trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace gaitshap {

std::string group_name(Group g) {
  switch (g) {
    case Group::Adult:
      return "adult";
    case Group::OlderAdult:
      return "older_adult";
    default:
      return "unknown";
  }
}

Group group_from_name(const std::string& s) {
  if (s == "adult") return Group::Adult;
  if (s == "older_adult") return Group::OlderAdult;
  return Group::Unknown;
}

std::vector<double> AccelTrace::axis(int a) const {
  std::vector<double> out(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) out[i] = samples[i][a];
  return out;
}

void AccelTrace::set_axis(int a, const std::vector<double>& values) {
  for (size_t i = 0; i < samples.size(); ++i) samples[i][a] = values[i];
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace / CR
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& s, int row) {
  double value;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw NonNumericCell(row);
  return value;
}

}  // namespace

AccelTrace parse_trace_csv(const std::string& path, const AxisMap& axis_map,
                           double sample_rate_hz) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw EmptyFile("empty file: " + path);
  const auto header = split_csv_line(line);

  auto column_of = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw MissingColumn("missing column '" + name + "' in " + path);
    return static_cast<int>(it - header.begin());
  };
  const int col[3] = {column_of(axis_map.v), column_of(axis_map.ap), column_of(axis_map.ml)};

  AccelTrace trace;
  trace.sample_rate_hz = sample_rate_hz;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw TraceError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                       " cells, header has " + std::to_string(header.size()));
    std::array<double, 3> s{};
    for (int a = 0; a < 3; ++a) s[a] = parse_cell(cells[col[a]], row);
    trace.samples.push_back(s);
  }
  if (trace.samples.empty()) throw EmptyFile("no data rows in " + path);
  return trace;
}

void write_trace_csv(const AccelTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw TraceError("cannot write " + path);
  out << "subject_id,group,v,ap,ml\n";
  out.precision(17);
  for (const auto& s : trace.samples)
    out << trace.subject_id << ',' << group_name(trace.group) << ',' << s[0] << ',' << s[1] << ','
        << s[2] << '\n';
}

AccelTrace read_exported_trace_csv(const std::string& path, double sample_rate_hz) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw EmptyFile("empty file: " + path);

  AccelTrace trace;
  trace.sample_rate_hz = sample_rate_hz;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != 5) throw TraceError("bad exported row " + std::to_string(row));
    trace.subject_id = cells[0];
    trace.group = group_from_name(cells[1]);
    std::array<double, 3> s{};
    for (int a = 0; a < 3; ++a) s[a] = parse_cell(cells[2 + a], row);
    trace.samples.push_back(s);
  }
  if (trace.samples.empty()) throw EmptyFile("no data rows in " + path);
  return trace;
}

}  // namespace gaitshap
