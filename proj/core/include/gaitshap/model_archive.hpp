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
#include <stdexcept>
#include <string>

#include "gaitshap/nn.hpp"

namespace gaitshap::archive {

struct ArchiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CorruptArchive : ArchiveError {
  using ArchiveError::ArchiveError;
};
struct VersionMismatch : ArchiveError {
  using ArchiveError::ArchiveError;
};
struct ShapeMismatch : ArchiveError {
  using ArchiveError::ArchiveError;
};

constexpr int kFormatVersion = 1;

/// Single-file archive: 8-byte magic, little-endian u64 manifest length,
/// JSON manifest, then a contiguous little-endian float64 weight payload.
/// Round-trips are bit-exact.
void save_model(nn::Model& model, const std::string& path,
                const std::string& metrics_summary = "", const std::string& training_config = "");

struct LoadedModel {
  nn::ModelSpec spec;
  std::unique_ptr<nn::Model> model;
  std::string metrics_summary;
  std::string training_config;
};

LoadedModel load_model(const std::string& path);

}  // namespace gaitshap::archive
