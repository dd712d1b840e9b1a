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
#include "gaitshap/model_archive.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "json.hpp"

using nlohmann::json;

namespace gaitshap::archive {

namespace {

constexpr char kMagic[8] = {'G', 'S', 'H', 'A', 'P', 'M', 'D', 'L'};

json spec_to_json(const nn::ModelSpec& s) {
  json stacks = json::array();
  for (const auto& st : s.stacks)
    stacks.push_back({{"core", st.core == nn::CoreKind::Conv1D ? "conv1d" : "gru"},
                      {"units", st.units},
                      {"kernel_size", st.kernel_size},
                      {"activation", st.activation == nn::Activation::ReLU     ? "relu"
                                     : st.activation == nn::Activation::Tanh ? "tanh"
                                                                             : "identity"},
                      {"batch_norm", st.batch_norm},
                      {"pool", st.pool},
                      {"dropout", st.dropout}});
  return {{"input_len", s.input_len},
          {"input_channels", s.input_channels},
          {"stacks", stacks},
          {"dense_units", s.dense_units},
          {"head_dropout", s.head_dropout},
          {"output_units", s.output_units},
          {"learning_rate", s.learning_rate}};
}

nn::ModelSpec spec_from_json(const json& j) {
  nn::ModelSpec s;
  s.input_len = j.at("input_len").get<int>();
  s.input_channels = j.at("input_channels").get<int>();
  for (const auto& stj : j.at("stacks")) {
    nn::StackSpec st;
    st.core = stj.at("core").get<std::string>() == "gru" ? nn::CoreKind::Gru
                                                         : nn::CoreKind::Conv1D;
    st.units = stj.at("units").get<int>();
    st.kernel_size = stj.at("kernel_size").get<int>();
    const auto act = stj.at("activation").get<std::string>();
    st.activation = act == "relu"   ? nn::Activation::ReLU
                    : act == "tanh" ? nn::Activation::Tanh
                                    : nn::Activation::Identity;
    st.batch_norm = stj.at("batch_norm").get<bool>();
    st.pool = stj.at("pool").get<int>();
    st.dropout = stj.at("dropout").get<double>();
    s.stacks.push_back(st);
  }
  s.dense_units = j.at("dense_units").get<int>();
  s.head_dropout = j.at("head_dropout").get<double>();
  s.output_units = j.at("output_units").get<int>();
  s.learning_rate = j.at("learning_rate").get<double>();
  return s;
}

}  // namespace

void save_model(nn::Model& model, const std::string& path, const std::string& metrics_summary,
                const std::string& training_config) {
  const auto params = model.params();

  json weight_index = json::array();
  std::uint64_t offset = 0;
  for (const nn::Param* p : params) {
    const std::uint64_t bytes = p->size() * sizeof(double);
    weight_index.push_back({{"name", p->name},
                            {"shape", p->shape},
                            {"byte_offset", offset},
                            {"byte_length", bytes}});
    offset += bytes;
  }

  const auto& spec = model.spec();
  const bool is_gru = !spec.stacks.empty() && spec.stacks.front().core == nn::CoreKind::Gru;
  json manifest = {{"format_version", kFormatVersion},
                   {"model_kind", is_gru ? "gru" : "conv"},
                   {"spec", spec_to_json(spec)},
                   {"training_config", training_config},
                   {"metrics_summary", metrics_summary},
                   {"weight_index", weight_index}};
  const std::string mtext = manifest.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArchiveError("cannot write " + path);
  out.write(kMagic, sizeof(kMagic));
  const std::uint64_t mlen = mtext.size();
  out.write(reinterpret_cast<const char*>(&mlen), sizeof(mlen));
  out.write(mtext.data(), static_cast<std::streamsize>(mtext.size()));
  for (const nn::Param* p : params)
    out.write(reinterpret_cast<const char*>(p->w.data()),
              static_cast<std::streamsize>(p->w.size() * sizeof(double)));
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArchiveError("cannot open " + path);

  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw CorruptArchive("bad magic in " + path);
  std::uint64_t mlen = 0;
  if (!in.read(reinterpret_cast<char*>(&mlen), sizeof(mlen)))
    throw CorruptArchive("truncated header in " + path);
  std::string mtext(mlen, '\0');
  if (!in.read(mtext.data(), static_cast<std::streamsize>(mlen)))
    throw CorruptArchive("truncated manifest in " + path);

  json manifest;
  try {
    manifest = json::parse(mtext);
  } catch (const json::exception&) {
    throw CorruptArchive("unparsable manifest in " + path);
  }
  if (manifest.at("format_version").get<int>() != kFormatVersion)
    throw VersionMismatch("unsupported archive version");

  std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  LoadedModel loaded;
  loaded.spec = spec_from_json(manifest.at("spec"));
  loaded.metrics_summary = manifest.at("metrics_summary").get<std::string>();
  loaded.training_config = manifest.at("training_config").get<std::string>();
  loaded.model = std::make_unique<nn::Model>(loaded.spec, 0);

  auto params = loaded.model->params();
  const auto& index = manifest.at("weight_index");
  if (index.size() != params.size()) throw ShapeMismatch("weight index entry count mismatch");

  for (size_t i = 0; i < params.size(); ++i) {
    const auto& entry = index[i];
    const auto shape = entry.at("shape").get<std::vector<int>>();
    std::uint64_t elems = 1;
    for (int d : shape) elems *= static_cast<std::uint64_t>(d);
    const auto offset = entry.at("byte_offset").get<std::uint64_t>();
    const auto length = entry.at("byte_length").get<std::uint64_t>();
    if (elems * sizeof(double) != length)
      throw ShapeMismatch("shape/byte length mismatch for " + params[i]->name);
    if (offset + length > payload.size()) throw CorruptArchive("payload overrun in " + path);
    if (elems != params[i]->size() || shape != params[i]->shape)
      throw ShapeMismatch("stored shape differs from spec for " + params[i]->name);
    std::memcpy(params[i]->w.data(), payload.data() + offset, length);
  }
  return loaded;
}

}  // namespace gaitshap::archive
