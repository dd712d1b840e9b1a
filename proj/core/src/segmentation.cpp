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
#include "gaitshap/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "gaitshap/signal.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gaitshap {

namespace {

struct Peak {
  int index;
  double height;
  double prominence;
};

// Topographic prominence: drop to the highest of the two valley minima
// between this peak and the nearest higher terrain on each side.
double peak_prominence(const std::vector<double>& x, int idx) {
  const double h = x[idx];
  double left_min = h, right_min = h;
  for (int i = idx - 1; i >= 0; --i) {
    if (x[i] > h) break;
    left_min = std::min(left_min, x[i]);
  }
  for (int i = idx + 1; i < static_cast<int>(x.size()); ++i) {
    if (x[i] > h) break;
    right_min = std::min(right_min, x[i]);
  }
  return h - std::max(left_min, right_min);
}

}  // namespace

std::vector<GaitEvent> detect_heel_contacts(const AccelTrace& trace, double min_step_interval_s,
                                            double prominence_frac) {
  const int n = static_cast<int>(trace.length());
  std::vector<double> sum(n);
  std::vector<double> ml(n);
  for (int i = 0; i < n; ++i) {
    sum[i] = trace.samples[i][0] + trace.samples[i][1];
    ml[i] = trace.samples[i][2];
  }

  const auto [mn, mx] = std::minmax_element(sum.begin(), sum.end());
  const double span = *mx - *mn;
  std::vector<Peak> peaks;
  if (span > 0.0) {
    const double min_prom = prominence_frac * span;
    for (int i = 1; i + 1 < n; ++i) {
      if (!(sum[i] > sum[i - 1] && sum[i] >= sum[i + 1])) continue;
      const double prom = peak_prominence(sum, i);
      if (prom >= min_prom) peaks.push_back({i, sum[i], prom});
    }
  }

  // minimum-interval suppression, keeping the larger peak
  const int min_gap = static_cast<int>(std::lround(min_step_interval_s * trace.sample_rate_hz));
  std::vector<Peak> kept;
  {
    std::vector<Peak> by_height = peaks;
    std::stable_sort(by_height.begin(), by_height.end(),
                     [](const Peak& a, const Peak& b) { return a.height > b.height; });
    std::vector<bool> suppressed(n, false);
    for (const auto& p : by_height) {
      if (suppressed[p.index]) continue;
      kept.push_back(p);
      for (int i = std::max(0, p.index - min_gap + 1);
           i < std::min(n, p.index + min_gap); ++i)
        suppressed[i] = true;
    }
    std::sort(kept.begin(), kept.end(), [](const Peak& a, const Peak& b) { return a.index < b.index; });
  }

  if (kept.size() < 3) throw NoEventsDetected("fewer than 3 heel-contact candidates");

  // side labeling: windowed ML mean (+-0.1 s) vs whole-trace ML median
  std::vector<double> ml_sorted = ml;
  std::nth_element(ml_sorted.begin(), ml_sorted.begin() + n / 2, ml_sorted.end());
  const double ml_median = ml_sorted[n / 2];
  const int w = static_cast<int>(std::lround(0.1 * trace.sample_rate_hz));

  struct Labeled {
    Peak peak;
    Side side;
  };
  std::vector<Labeled> labeled;
  for (const auto& p : kept) {
    double acc = 0.0;
    int cnt = 0;
    for (int i = std::max(0, p.index - w); i <= std::min(n - 1, p.index + w); ++i) {
      acc += ml[i];
      ++cnt;
    }
    labeled.push_back({p, (acc / cnt > ml_median) ? Side::Left : Side::Right});
  }

  // alternation repair: of two same-side neighbors drop the lower prominence
  std::vector<Labeled> alternating;
  for (const auto& ev : labeled) {
    if (!alternating.empty() && alternating.back().side == ev.side) {
      if (ev.peak.prominence > alternating.back().peak.prominence) alternating.back() = ev;
    } else {
      alternating.push_back(ev);
    }
  }

  if (alternating.size() < 3) throw NoEventsDetected("fewer than 3 alternating contacts");

  std::vector<GaitEvent> events;
  events.reserve(alternating.size());
  for (const auto& ev : alternating) events.push_back({ev.peak.index, ev.side});
  return events;
}

std::vector<RawStride> extract_strides(const AccelTrace& trace,
                                       const std::vector<GaitEvent>& events) {
  std::vector<RawStride> strides;
  // scan for consecutive (Left, Right, Left) triples
  for (size_t i = 0; i + 2 < events.size(); ++i) {
    if (events[i].side != Side::Left || events[i + 1].side != Side::Right ||
        events[i + 2].side != Side::Left)
      continue;
    const int lo = events[i].sample_index;
    const int hi = events[i + 2].sample_index;  // exclusive
    if (hi > static_cast<int>(trace.length())) break;
    RawStride s;
    s.start_index = lo;
    s.right_anchor = events[i + 1].sample_index - lo;
    s.data = Matrix(hi - lo, 3);
    for (int t = lo; t < hi; ++t)
      for (int a = 0; a < 3; ++a) s.data.at(t - lo, a) = trace.samples[t][a];
    strides.push_back(std::move(s));
  }
  if (strides.empty()) throw InsufficientEvents("need at least two left contacts with an interior right contact");
  return strides;
}

namespace {

// Resample one raw stride onto kStrideLen samples per axis; the right-contact
// anchor is mapped onto the same normalized time base.
StrideSegment normalize_stride(const RawStride& s, const std::string& subject_id, Group group) {
  StrideSegment seg;
  seg.subject_id = subject_id;
  seg.group = group;
  seg.stride_count = 1;
  seg.data = Matrix(kStrideLen, 3);
  const int L = s.data.rows;
  for (int a = 0; a < 3; ++a) {
    std::vector<double> axis(L);
    for (int t = 0; t < L; ++t) axis[t] = s.data.at(t, a);
    const auto r = resample_linear(axis, kStrideLen);
    for (int t = 0; t < kStrideLen; ++t) seg.data.at(t, a) = r[t];
  }
  const int right = static_cast<int>(std::lround(
      static_cast<double>(s.right_anchor) * (kStrideLen - 1) / (L - 1)));
  seg.anchor_indices = {0, right};
  return seg;
}

}  // namespace

std::vector<StrideSegment> build_cnn_segments(const std::vector<RawStride>& strides,
                                              const std::string& subject_id, Group group) {
  std::vector<StrideSegment> out;
  const size_t limit = std::min<size_t>(strides.size(), kCnnSegmentsPerSubject);
  out.reserve(limit);
  for (size_t i = 0; i < limit; ++i)
    out.push_back(normalize_stride(strides[i], subject_id, group));
  return out;
}

std::vector<StrideSegment> build_gru_segments(const std::vector<RawStride>& strides,
                                              const std::string& subject_id, Group group) {
  std::vector<StrideSegment> out;
  const size_t n_blocks =
      std::min<size_t>(strides.size() / kStridesPerBlock, kGruSegmentsPerSubject);
  for (size_t b = 0; b < n_blocks; ++b) {
    StrideSegment block;
    block.subject_id = subject_id;
    block.group = group;
    block.stride_count = kStridesPerBlock;
    block.data = Matrix(kStrideLen * kStridesPerBlock, 3);
    for (int k = 0; k < kStridesPerBlock; ++k) {
      const auto seg = normalize_stride(strides[b * kStridesPerBlock + k], subject_id, group);
      for (int t = 0; t < kStrideLen; ++t)
        for (int a = 0; a < 3; ++a) block.data.at(k * kStrideLen + t, a) = seg.data.at(t, a);
      block.anchor_indices.push_back(k * kStrideLen);
      block.anchor_indices.push_back(k * kStrideLen + seg.anchor_indices[1]);
    }
    out.push_back(std::move(block));
  }
  return out;
}

bool validate_subject(size_t stride_count) {
  return stride_count / kStridesPerBlock >= kGruSegmentsPerSubject;
}

DatasetSplit split_subjects(const std::vector<SubjectLabel>& subjects,
                            const std::array<int, 3>& ratio, unsigned long long seed) {
  for (int r : ratio)
    if (r <= 0) throw SegmentationError("ratio components must be positive");

  DatasetSplit split;
  split.seed = seed;
  std::mt19937_64 rng(seed);
  const double total_ratio = ratio[0] + ratio[1] + ratio[2];

  // groups processed in a fixed order so the split is deterministic
  for (Group g : {Group::Adult, Group::OlderAdult, Group::Unknown}) {
    std::vector<std::string> ids;
    for (const auto& s : subjects)
      if (s.group == g) ids.push_back(s.id);
    if (ids.empty()) continue;
    if (ids.size() < 3) throw TooFewSubjects("need >= 3 subjects per group for a 3-way split");

    std::shuffle(ids.begin(), ids.end(), rng);

    // largest-remainder apportionment with a floor of 1 per set
    const int n = static_cast<int>(ids.size());
    std::array<int, 3> count;
    std::array<double, 3> frac;
    int assigned = 0;
    for (int i = 0; i < 3; ++i) {
      const double exact = n * ratio[i] / total_ratio;
      count[i] = std::max(1, static_cast<int>(exact));
      frac[i] = exact - static_cast<int>(exact);
      assigned += count[i];
    }
    while (assigned < n) {
      const int i = static_cast<int>(std::max_element(frac.begin(), frac.end()) - frac.begin());
      ++count[i];
      frac[i] = -1.0;
      ++assigned;
    }
    while (assigned > n) {
      // floors may overshoot for tiny groups; shrink the largest set
      const int i = static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
      if (count[i] <= 1) throw TooFewSubjects("cannot honor one subject per set");
      --count[i];
      --assigned;
    }

    auto it = ids.begin();
    split.train.insert(split.train.end(), it, it + count[0]);
    it += count[0];
    split.validation.insert(split.validation.end(), it, it + count[1]);
    it += count[1];
    split.test.insert(split.test.end(), it, it + count[2]);
  }
  return split;
}

// --- segment directory I/O ---

void write_segments(const std::string& dir, const std::vector<StrideSegment>& segments) {
  fs::create_directories(dir);
  json manifest = json::array();
  int idx = 0;
  for (const auto& seg : segments) {
    char name[32];
    std::snprintf(name, sizeof(name), "segment_%05d.csv", idx);
    std::ofstream out(fs::path(dir) / name);
    out.precision(17);
    out << "v,ap,ml\n";
    for (int t = 0; t < seg.data.rows; ++t)
      out << seg.data.at(t, 0) << ',' << seg.data.at(t, 1) << ',' << seg.data.at(t, 2) << '\n';
    manifest.push_back({{"subject_id", seg.subject_id},
                        {"group", group_name(seg.group)},
                        {"stride_count", seg.stride_count},
                        {"file", name},
                        {"anchors", seg.anchor_indices}});
    ++idx;
  }
  std::ofstream mout(fs::path(dir) / "manifest.json");
  mout << manifest.dump(2) << '\n';
}

std::vector<StrideSegment> read_segments(const std::string& dir) {
  std::ifstream min(fs::path(dir) / "manifest.json");
  if (!min) throw SegmentationError("missing manifest.json in " + dir);
  json manifest;
  min >> manifest;

  std::vector<StrideSegment> out;
  for (const auto& entry : manifest) {
    StrideSegment seg;
    seg.subject_id = entry.at("subject_id").get<std::string>();
    seg.group = group_from_name(entry.at("group").get<std::string>());
    seg.stride_count = entry.at("stride_count").get<int>();
    seg.anchor_indices = entry.at("anchors").get<std::vector<int>>();

    std::ifstream in(fs::path(dir) / entry.at("file").get<std::string>());
    if (!in) throw SegmentationError("missing segment file in " + dir);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::array<double, 3>> rows;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::array<double, 3> r{};
      if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &r[0], &r[1], &r[2]) != 3)
        throw SegmentationError("bad segment row in " + dir);
      rows.push_back(r);
    }
    seg.data = Matrix(static_cast<int>(rows.size()), 3);
    for (size_t t = 0; t < rows.size(); ++t)
      for (int a = 0; a < 3; ++a) seg.data.at(static_cast<int>(t), a) = rows[t][a];
    out.push_back(std::move(seg));
  }
  return out;
}

void write_split_json(const DatasetSplit& split, const std::string& path) {
  json j = {{"seed", split.seed},
            {"train", split.train},
            {"validation", split.validation},
            {"test", split.test}};
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

DatasetSplit read_split_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SegmentationError("cannot open split file " + path);
  json j;
  in >> j;
  DatasetSplit split;
  split.seed = j.at("seed").get<unsigned long long>();
  split.train = j.at("train").get<std::vector<std::string>>();
  split.validation = j.at("validation").get<std::vector<std::string>>();
  split.test = j.at("test").get<std::vector<std::string>>();
  return split;
}

}  // namespace gaitshap
