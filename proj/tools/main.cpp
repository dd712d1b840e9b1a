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
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gaitshap/hyperopt.hpp"
#include "gaitshap/metrics.hpp"
#include "gaitshap/model_archive.hpp"
#include "gaitshap/nn.hpp"
#include "gaitshap/report.hpp"
#include "gaitshap/segmentation.hpp"
#include "gaitshap/shap.hpp"
#include "gaitshap/signal.hpp"
#include "gaitshap/synth.hpp"
#include "gaitshap/trace.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gaitshap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

void emit_manifest(const std::string& out_stem, const std::string& command, const json& config,
                   const std::vector<std::string>& inputs) {
  report::write_run_manifest(out_stem + ".run.json", command, config.dump(), inputs);
}

std::vector<std::string> trace_files(const std::string& dir) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto p = entry.path();
    if (p.extension() == ".csv") files.push_back(p.string());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw EmptyFile("no .csv traces in " + dir);
  return files;
}

// Segments of the listed subjects, preserving file order.
std::vector<StrideSegment> filter_segments(const std::vector<StrideSegment>& all,
                                           const std::vector<std::string>& ids) {
  const std::set<std::string> wanted(ids.begin(), ids.end());
  std::vector<StrideSegment> out;
  for (const auto& s : all)
    if (wanted.count(s.subject_id)) out.push_back(s);
  return out;
}

std::vector<double> positive_scores(const Matrix& probs) {
  std::vector<double> s(probs.rows);
  for (int i = 0; i < probs.rows; ++i) s[i] = probs.at(i, 1);
  return s;
}

std::vector<int> true_labels(const std::vector<StrideSegment>& segs) {
  std::vector<int> t(segs.size());
  for (size_t i = 0; i < segs.size(); ++i) t[i] = nn::label_of(segs[i].group);
  return t;
}

nn::ModelSpec named_spec(const std::string& name, double lr_override) {
  nn::ModelSpec spec;
  if (name == "cnn") {
    spec = nn::paper_cnn_spec();
  } else if (name == "gru") {
    spec = nn::paper_gru_spec();
  } else if (name == "tiny-cnn") {
    spec.input_len = 128;
    spec.stacks = {{nn::CoreKind::Conv1D, 8, 9, nn::Activation::ReLU, true, 2, 0.0},
                   {nn::CoreKind::Conv1D, 16, 5, nn::Activation::ReLU, true, 2, 0.0}};
    spec.dense_units = 16;
    spec.head_dropout = 0.2;
    spec.learning_rate = 2e-3;
  } else if (name == "tiny-gru") {
    spec.input_len = 1024;
    spec.stacks = {{nn::CoreKind::Gru, 12, 0, nn::Activation::Tanh, true, 2, 0.0}};
    spec.dense_units = 16;
    spec.head_dropout = 0.1;
    spec.learning_rate = 2e-3;
  } else {
    throw CLI::ValidationError("--spec", "unknown spec name: " + name);
  }
  if (lr_override > 0.0) spec.learning_rate = lr_override;
  return spec;
}

// ------------------------------------------------------------- subcommands

struct SynthOpts {
  std::string out;
  int n_adult = 20, n_older = 20;
  GaitGenParams base;
  double jitter = 0.05;
  unsigned long long seed = 1;
};

int run_synth(const SynthOpts& o, const std::string& command) {
  fs::create_directories(o.out);
  const auto cohort = generate_cohort(o.n_adult, o.n_older, o.base, o.jitter, o.seed);
  json events = json::object();
  std::vector<std::string> written;
  for (const auto& rec : cohort) {
    const std::string path = o.out + "/" + rec.trace.subject_id + ".csv";
    write_trace_csv(rec.trace, path);
    written.push_back(path);
    json ev = json::array();
    for (const auto& e : rec.events)
      ev.push_back({{"index", e.sample_index}, {"side", e.side == Side::Left ? "L" : "R"}});
    events[rec.trace.subject_id] = ev;
  }
  {
    std::ofstream f(o.out + "/events.json");
    f << events.dump(2) << '\n';
  }
  const json config = {{"n_adult", o.n_adult},
                       {"n_older", o.n_older},
                       {"stride_period_s", o.base.stride_period_s},
                       {"n_strides", o.base.n_strides},
                       {"group_contrast", o.base.group_contrast},
                       {"ml_sway_amp", o.base.ml_sway_amp},
                       {"noise_std", o.base.noise_std},
                       {"sample_rate_hz", o.base.sample_rate_hz},
                       {"jitter", o.jitter},
                       {"seed", o.seed}};
  emit_manifest(o.out + "/synth", command, config, {});
  std::printf("wrote %zu traces to %s\n", written.size(), o.out.c_str());
  return kExitOk;
}

struct PreprocessOpts {
  std::string in, out;
  double cutoff = 10.0;
  int order = 2;
};

int run_preprocess(const PreprocessOpts& o, const std::string& command) {
  fs::create_directories(o.out);
  const auto files = trace_files(o.in);
  std::vector<std::string> inputs;
  for (const auto& f : files) {
    auto t = read_exported_trace_csv(f);
    t = normalize_amplitude(butterworth_lowpass(t, o.cutoff, o.order));
    write_trace_csv(t, o.out + "/" + fs::path(f).filename().string());
    inputs.push_back(f);
  }
  const json config = {{"cutoff_hz", o.cutoff}, {"order", o.order}};
  emit_manifest(o.out + "/preprocess", command, config, inputs);
  std::printf("preprocessed %zu traces into %s\n", files.size(), o.out.c_str());
  return kExitOk;
}

struct SegmentOpts {
  std::string in, out, model = "cnn";
  double min_interval = 0.35, prominence = 0.2;
};

int run_segment(const SegmentOpts& o, const std::string& command) {
  const auto files = trace_files(o.in);
  std::vector<StrideSegment> all;
  int excluded = 0;
  for (const auto& f : files) {
    const auto t = read_exported_trace_csv(f);
    std::vector<RawStride> strides;
    try {
      strides = extract_strides(t, detect_heel_contacts(t, o.min_interval, o.prominence));
    } catch (const SegmentationError&) {
      ++excluded;
      continue;
    }
    if (!validate_subject(strides.size())) {
      ++excluded;
      continue;
    }
    const auto segs = o.model == "gru" ? build_gru_segments(strides, t.subject_id, t.group)
                                       : build_cnn_segments(strides, t.subject_id, t.group);
    all.insert(all.end(), segs.begin(), segs.end());
  }
  if (all.empty()) throw NoEventsDetected("no subject produced segments");
  write_segments(o.out, all);
  const json config = {{"model", o.model},
                       {"min_step_interval_s", o.min_interval},
                       {"prominence_frac", o.prominence},
                       {"excluded_subjects", excluded}};
  emit_manifest(o.out + "/segment", command, config, files);
  std::printf("wrote %zu segments (%d subjects excluded)\n", all.size(), excluded);
  return kExitOk;
}

struct SplitOpts {
  std::string segments, out;
  std::string ratio = "146:49:49";
  unsigned long long seed = 1;
};

int run_split(const SplitOpts& o, const std::string& command) {
  int r0, r1, r2;
  if (std::sscanf(o.ratio.c_str(), "%d:%d:%d", &r0, &r1, &r2) != 3 || r0 < 1 || r1 < 1 || r2 < 1)
    throw CLI::ValidationError("--ratio", "expected A:B:C with positive integers");

  const auto segs = read_segments(o.segments);
  std::vector<SubjectLabel> subjects;
  std::set<std::string> seen;
  for (const auto& s : segs)
    if (seen.insert(s.subject_id).second) subjects.push_back({s.subject_id, s.group});

  auto split = split_subjects(subjects, {r0, r1, r2}, o.seed);
  write_split_json(split, o.out);
  const json config = {{"ratio", o.ratio}, {"seed", o.seed}};
  emit_manifest(o.out, command, config, {o.segments + "/manifest.json"});
  std::printf("split %zu subjects into %zu/%zu/%zu\n", subjects.size(), split.train.size(),
              split.validation.size(), split.test.size());
  return kExitOk;
}

struct TrainOpts {
  std::string segments, split, out;
  std::string spec = "tiny-cnn";
  double lr = -1.0;
  nn::TrainConfig config;
};

int run_train(const TrainOpts& o, const std::string& command) {
  const auto all = read_segments(o.segments);
  const auto split = read_split_json(o.split);
  const auto train_set = filter_segments(all, split.train);
  const auto val_set = filter_segments(all, split.validation);

  auto spec = named_spec(o.spec, o.lr);
  if (!train_set.empty()) spec.input_len = train_set.front().data.rows;

  nn::Model model(spec, o.config.seed);
  const auto result = nn::train_model(model, train_set, val_set, o.config);

  char summary[128];
  std::snprintf(summary, sizeof(summary), "best_val_accuracy=%.6f best_epoch=%d epochs=%zu",
                result.best_val_accuracy, result.best_epoch, result.history.size());
  const json config = {{"spec", o.spec},
                       {"learning_rate", spec.learning_rate},
                       {"max_epochs", o.config.max_epochs},
                       {"patience", o.config.patience},
                       {"batch_size", o.config.batch_size},
                       {"seed", o.config.seed}};
  archive::save_model(model, o.out, summary, config.dump());
  emit_manifest(o.out, command, config, {o.segments + "/manifest.json", o.split});
  std::printf("trained %s: %s\n", o.spec.c_str(), summary);
  return kExitOk;
}

struct TuneOpts {
  std::string segments, split, out;
  std::string model = "cnn";
  int trials = 15, n_init = 5;
  int max_epochs = 30, patience = 10, batch_size = 32;
  unsigned long long seed = 1;
};

int run_tune(const TuneOpts& o, const std::string& command) {
  const auto all = read_segments(o.segments);
  const auto split = read_split_json(o.split);
  const auto train_set = filter_segments(all, split.train);
  const auto val_set = filter_segments(all, split.validation);
  if (train_set.empty() || val_set.empty())
    throw nn::EmptyDataset("tune needs non-empty train and validation sets");
  const int input_len = train_set.front().data.rows;

  hyperopt::SearchSpace space;
  space.kind = o.model == "gru" ? nn::CoreKind::Gru : nn::CoreKind::Conv1D;
  // keep desk-scale budgets sane; the paper box tops out at 768 units
  auto objective = [&](const hyperopt::HyperConfig& c) {
    auto spec = hyperopt::spec_from_config(c, space, input_len);
    nn::Model model(spec, o.seed);
    nn::TrainConfig tc;
    tc.max_epochs = o.max_epochs;
    tc.patience = o.patience;
    tc.batch_size = o.batch_size;
    tc.seed = o.seed;
    return nn::train_model(model, train_set, val_set, tc).best_val_accuracy;
  };

  const auto result = hyperopt::bayes_optimize(objective, space, o.trials, o.n_init, o.seed);
  hyperopt::write_trials_jsonl(result.log, o.out);
  const json config = {{"model", o.model},    {"trials", o.trials},
                       {"n_init", o.n_init},  {"max_epochs", o.max_epochs},
                       {"patience", o.patience}, {"batch_size", o.batch_size},
                       {"seed", o.seed}};
  emit_manifest(o.out, command, config, {o.segments + "/manifest.json", o.split});
  std::printf("best objective %.6f over %zu trials\n", result.best_objective,
              result.log.size());
  return kExitOk;
}

struct EvaluateOpts {
  std::string model, segments, split, out;
};

int run_evaluate(const EvaluateOpts& o, const std::string& command) {
  auto loaded = archive::load_model(o.model);
  const auto all = read_segments(o.segments);
  const auto split = read_split_json(o.split);
  const auto test_set = filter_segments(all, split.test);
  if (test_set.empty()) throw nn::EmptyDataset("empty test set");

  const auto probs = nn::predict(*loaded.model, test_set);
  const auto eval = metrics::evaluate(positive_scores(probs), true_labels(test_set));
  report::write_report(eval, {}, o.out);
  metrics::write_roc_csv(eval.roc, o.out + "_roc.csv");

  const json config = {{"model", o.model}, {"threshold", 0.5}};
  emit_manifest(o.out, command, config,
                {o.model, o.segments + "/manifest.json", o.split});
  std::printf("%s\n", report::format_metrics_row(eval.metrics, eval.auc).c_str());
  return kExitOk;
}

struct ExplainOpts {
  std::string model, segments, split, out;
  int window = 8;
  int n_perm = 64;
  int max_segments = 40;
  int background = 100;
  std::string baseline = "mean";
  bool per_class = false;  // explain class 1 instead of the true class
  unsigned long long seed = 1;
};

int run_explain(const ExplainOpts& o, const std::string& command) {
  auto loaded = archive::load_model(o.model);
  nn::Model& model = *loaded.model;
  const auto all = read_segments(o.segments);
  const auto split = read_split_json(o.split);
  const auto train_set = filter_segments(all, split.train);
  auto test_set = filter_segments(all, split.test);
  if (test_set.empty()) throw nn::EmptyDataset("empty test set");
  if (o.max_segments > 0 && static_cast<int>(test_set.size()) > o.max_segments)
    test_set.resize(o.max_segments);

  const int T = test_set.front().data.rows;
  const auto partition = shap::partition_features(T, 3, shap::Granularity::WindowPerAxis,
                                                  o.window);

  Matrix baseline(T, 3, 0.0);
  if (o.baseline == "mean") {
    const size_t n = std::min<size_t>(o.background, train_set.size());
    if (n == 0) throw nn::EmptyDataset("mean baseline needs training segments");
    for (size_t i = 0; i < n; ++i)
      for (size_t c = 0; c < baseline.v.size(); ++c) baseline.v[c] += train_set[i].data.v[c];
    for (auto& v : baseline.v) v /= static_cast<double>(n);
  } else if (o.baseline != "zero") {
    throw CLI::ValidationError("--baseline", "expected 'mean' or 'zero'");
  }

  auto prob_of_class = [&](const Matrix& seg, int cls) {
    nn::Tensor3 x(1, seg.rows, seg.cols);
    x.v = seg.v;
    return model.forward(x, false).at(0, cls);
  };

  std::vector<std::pair<std::string, shap::ShapAttribution>> rows;
  std::vector<shap::ShapAttribution> attrs;
  for (size_t i = 0; i < test_set.size(); ++i) {
    const auto& seg = test_set[i];
    const int cls = o.per_class ? 1 : nn::label_of(seg.group);
    shap::ModelFn fn = [&, cls](const Matrix& m) { return prob_of_class(m, cls); };
    auto attr = shap::permutation_shapley(fn, seg.data, partition, baseline, o.n_perm,
                                          o.seed + i);
    attr.output_class = cls;
    rows.emplace_back(seg.subject_id + "#" + std::to_string(i), attr);
    attrs.push_back(std::move(attr));
  }

  fs::create_directories(o.out);
  shap::write_attribution_csv(rows, partition, o.out + "/attributions.csv");
  const auto aggregate = shap::mean_abs_aggregate(attrs, partition);
  shap::write_heatmap_csv(aggregate, o.out + "/heatmap.csv");

  // mean acceleration curves over the explained segments
  Matrix curves(T, 3, 0.0);
  for (const auto& seg : test_set)
    for (size_t c = 0; c < curves.v.size(); ++c) curves.v[c] += seg.data.v[c];
  for (auto& v : curves.v) v /= static_cast<double>(test_set.size());

  std::vector<int> anchors;
  for (int a : test_set.front().anchor_indices)
    if (a % kStrideLen == 0) anchors.push_back(a);  // left contacts
  {
    std::ofstream svg(o.out + "/heatmap.svg");
    svg << report::render_heatmap(aggregate, curves, anchors);
  }

  const json config = {{"window", o.window},
                       {"n_perm", o.n_perm},
                       {"max_segments", o.max_segments},
                       {"background", o.background},
                       {"baseline", o.baseline},
                       {"per_class", o.per_class},
                       {"seed", o.seed}};
  emit_manifest(o.out + "/explain", command, config,
                {o.model, o.segments + "/manifest.json", o.split});
  std::printf("explained %zu segments into %s\n", test_set.size(), o.out.c_str());
  return kExitOk;
}

struct ReportOpts {
  std::string eval, trials, out;
};

int run_report(const ReportOpts& o, const std::string& command) {
  std::ifstream in(o.eval);
  if (!in) throw report::IoFailure("cannot open " + o.eval);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto eval = metrics::report_from_json(text);
  std::vector<hyperopt::Trial> trials;
  if (!o.trials.empty()) trials = hyperopt::read_trials_jsonl(o.trials);
  report::write_report(eval, trials, o.out);
  const json config = {{"eval", o.eval}, {"trials", o.trials}};
  std::vector<std::string> inputs = {o.eval};
  if (!o.trials.empty()) inputs.push_back(o.trials);
  emit_manifest(o.out, command, config, inputs);
  std::printf("wrote %s.json and %s.txt\n", o.out.c_str(), o.out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string command = join_args(argc, argv);

  CLI::App app{"gait classification and Shapley attribution pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI config file; flags override its values");

  SynthOpts synth;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic two-group cohort");
  c_synth->add_option("--out", synth.out, "output directory")->required();
  c_synth->add_option("--n-adult", synth.n_adult, "adult subjects");
  c_synth->add_option("--n-older", synth.n_older, "older-adult subjects");
  c_synth->add_option("--strides", synth.base.n_strides, "strides per subject");
  c_synth->add_option("--stride-period", synth.base.stride_period_s, "stride period [s]");
  c_synth->add_option("--contrast", synth.base.group_contrast, "group contrast in [0,1]");
  c_synth->add_option("--sway", synth.base.ml_sway_amp, "ML sway amplitude");
  c_synth->add_option("--noise", synth.base.noise_std, "additive noise stddev");
  c_synth->add_option("--rate", synth.base.sample_rate_hz, "sample rate [Hz]");
  c_synth->add_option("--jitter", synth.jitter, "per-subject parameter jitter");
  c_synth->add_option("--seed", synth.seed, "cohort seed");

  PreprocessOpts pre;
  auto* c_pre = app.add_subcommand("preprocess", "filter and normalize traces");
  c_pre->add_option("--in", pre.in, "input trace directory")->required();
  c_pre->add_option("--out", pre.out, "output directory")->required();
  c_pre->add_option("--cutoff", pre.cutoff, "low-pass cutoff [Hz]");
  c_pre->add_option("--order", pre.order, "filter order");

  SegmentOpts seg;
  auto* c_seg = app.add_subcommand("segment", "detect heel contacts and cut segments");
  c_seg->add_option("--in", seg.in, "preprocessed trace directory")->required();
  c_seg->add_option("--out", seg.out, "segment directory")->required();
  c_seg->add_option("--model", seg.model, "cnn (128x3) or gru (1024x3)")
      ->check(CLI::IsMember({"cnn", "gru"}));
  c_seg->add_option("--min-interval", seg.min_interval, "minimum step interval [s]");
  c_seg->add_option("--prominence", seg.prominence, "peak prominence fraction");

  SplitOpts split;
  auto* c_split = app.add_subcommand("split", "subject-level train/val/test split");
  c_split->add_option("--segments", split.segments, "segment directory")->required();
  c_split->add_option("--out", split.out, "split JSON path")->required();
  c_split->add_option("--ratio", split.ratio, "train:val:test integer ratio");
  c_split->add_option("--seed", split.seed, "shuffle seed");

  TrainOpts train;
  auto* c_train = app.add_subcommand("train", "train a classifier");
  c_train->add_option("--segments", train.segments, "segment directory")->required();
  c_train->add_option("--split", train.split, "split JSON path")->required();
  c_train->add_option("--out", train.out, "model archive path")->required();
  c_train->add_option("--spec", train.spec, "cnn | gru | tiny-cnn | tiny-gru");
  c_train->add_option("--lr", train.lr, "learning-rate override");
  c_train->add_option("--max-epochs", train.config.max_epochs, "epoch cap");
  c_train->add_option("--patience", train.config.patience, "early-stopping patience");
  c_train->add_option("--batch-size", train.config.batch_size, "mini-batch size");
  c_train->add_option("--seed", train.config.seed, "training seed");

  TuneOpts tune;
  auto* c_tune = app.add_subcommand("tune", "Bayesian hyperparameter optimization");
  c_tune->add_option("--segments", tune.segments, "segment directory")->required();
  c_tune->add_option("--split", tune.split, "split JSON path")->required();
  c_tune->add_option("--out", tune.out, "trial log path (JSON lines)")->required();
  c_tune->add_option("--model", tune.model, "cnn or gru search space")
      ->check(CLI::IsMember({"cnn", "gru"}));
  c_tune->add_option("--trials", tune.trials, "total trials");
  c_tune->add_option("--n-init", tune.n_init, "quasi-random warmup trials");
  c_tune->add_option("--max-epochs", tune.max_epochs, "epochs per trial");
  c_tune->add_option("--patience", tune.patience, "patience per trial");
  c_tune->add_option("--batch-size", tune.batch_size, "mini-batch size");
  c_tune->add_option("--seed", tune.seed, "optimization seed");

  EvaluateOpts eval;
  auto* c_eval = app.add_subcommand("evaluate", "test-set metrics, ROC, and AUC");
  c_eval->add_option("--model", eval.model, "model archive")->required();
  c_eval->add_option("--segments", eval.segments, "segment directory")->required();
  c_eval->add_option("--split", eval.split, "split JSON path")->required();
  c_eval->add_option("--out", eval.out, "report stem (writes .json/.txt/_roc.csv)")->required();

  ExplainOpts expl;
  auto* c_expl = app.add_subcommand("explain", "Shapley attributions and heatmaps");
  c_expl->add_option("--model", expl.model, "model archive")->required();
  c_expl->add_option("--segments", expl.segments, "segment directory")->required();
  c_expl->add_option("--split", expl.split, "split JSON path")->required();
  c_expl->add_option("--out", expl.out, "output directory")->required();
  c_expl->add_option("--window", expl.window, "time window per feature group");
  c_expl->add_option("--n-perm", expl.n_perm, "permutations per segment");
  c_expl->add_option("--max-segments", expl.max_segments, "test segments to explain (0 = all)");
  c_expl->add_option("--background", expl.background, "training segments in the mean baseline");
  c_expl->add_option("--baseline", expl.baseline, "mean or zero")
      ->check(CLI::IsMember({"mean", "zero"}));
  c_expl->add_flag("--positive-class", expl.per_class,
                   "explain the older-adult probability instead of the true class");
  c_expl->add_option("--seed", expl.seed, "permutation seed");

  ReportOpts rep;
  auto* c_rep = app.add_subcommand("report", "re-render a stored evaluation");
  c_rep->add_option("--eval", rep.eval, "EvalReport JSON path")->required();
  c_rep->add_option("--trials", rep.trials, "optional trial log (JSON lines)");
  c_rep->add_option("--out", rep.out, "report stem")->required();

  try {
    app.parse(argc, argv);
    if (c_synth->parsed()) return run_synth(synth, command);
    if (c_pre->parsed()) return run_preprocess(pre, command);
    if (c_seg->parsed()) return run_segment(seg, command);
    if (c_split->parsed()) return run_split(split, command);
    if (c_train->parsed()) return run_train(train, command);
    if (c_tune->parsed()) return run_tune(tune, command);
    if (c_eval->parsed()) return run_evaluate(eval, command);
    if (c_expl->parsed()) return run_explain(expl, command);
    if (c_rep->parsed()) return run_report(rep, command);
    return kExitValidation;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  } catch (const report::IoFailure& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const archive::ArchiveError& e) {
    std::cerr << "archive error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}
