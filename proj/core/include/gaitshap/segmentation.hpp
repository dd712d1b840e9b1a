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
#include <stdexcept>
#include <string>
#include <vector>

#include "gaitshap/matrix.hpp"
#include "gaitshap/trace.hpp"

namespace gaitshap {

enum class Side { Left, Right };

struct GaitEvent {
  int sample_index = 0;
  Side side = Side::Left;
};

/// One stride cut from a trace, before length normalization.
/// Spans [left contact, next left contact); right_anchor is the interior
/// right-contact offset relative to the stride start.
struct RawStride {
  Matrix data;  // len x 3
  int start_index = 0;
  int right_anchor = 0;
};

struct StrideSegment {
  std::string subject_id;
  Group group = Group::Unknown;
  Matrix data;  // (128*stride_count) x 3
  int stride_count = 1;
  std::vector<int> anchor_indices;  // heel-contact positions in normalized time
};

struct DatasetSplit {
  std::vector<std::string> train, validation, test;
  unsigned long long seed = 0;
};

struct SegmentationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoEventsDetected : SegmentationError {
  using SegmentationError::SegmentationError;
};
struct InsufficientEvents : SegmentationError {
  using SegmentationError::SegmentationError;
};
struct TooFewSubjects : SegmentationError {
  using SegmentationError::SegmentationError;
};

/// Heel-contact detection on the V+AP sum signal: prominence-thresholded
/// local maxima, minimum-interval suppression, ML-based side labeling, and
/// alternation repair.
std::vector<GaitEvent> detect_heel_contacts(const AccelTrace& trace,
                                            double min_step_interval_s = 0.35,
                                            double prominence_frac = 0.2);

std::vector<RawStride> extract_strides(const AccelTrace& trace,
                                       const std::vector<GaitEvent>& events);

constexpr int kStrideLen = 128;
constexpr int kStridesPerBlock = 8;
constexpr int kCnnSegmentsPerSubject = 80;
constexpr int kGruSegmentsPerSubject = 10;

/// One 128x3 segment per stride, temporal order, first 80.
std::vector<StrideSegment> build_cnn_segments(const std::vector<RawStride>& strides,
                                              const std::string& subject_id, Group group);

/// Non-overlapping runs of 8 consecutive strides concatenated into 1024x3
/// blocks, first 10.
std::vector<StrideSegment> build_gru_segments(const std::vector<RawStride>& strides,
                                              const std::string& subject_id, Group group);

/// Inclusion rule: a subject must yield at least 10 eight-stride blocks.
bool validate_subject(size_t stride_count);

struct SubjectLabel {
  std::string id;
  Group group = Group::Unknown;
};

DatasetSplit split_subjects(const std::vector<SubjectLabel>& subjects,
                            const std::array<int, 3>& ratio, unsigned long long seed);

// --- segment directory I/O (CSV files + JSON manifest) ---

void write_segments(const std::string& dir, const std::vector<StrideSegment>& segments);
std::vector<StrideSegment> read_segments(const std::string& dir);

void write_split_json(const DatasetSplit& split, const std::string& path);
DatasetSplit read_split_json(const std::string& path);

}  // namespace gaitshap
