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
#include "gaitshap/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "json.hpp"

using nlohmann::json;

namespace gaitshap::metrics {

ConfusionMatrix confusion_matrix(const std::vector<int>& predicted,
                                 const std::vector<int>& truths) {
  if (predicted.size() != truths.size()) throw LengthMismatch("predicted/truth length mismatch");
  if (predicted.empty()) throw EmptyInput("no samples");
  ConfusionMatrix cm;
  for (size_t i = 0; i < predicted.size(); ++i) {
    if (truths[i] == 1)
      predicted[i] == 1 ? ++cm.tp : ++cm.fn;
    else
      predicted[i] == 1 ? ++cm.fp : ++cm.tn;
  }
  return cm;
}

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw EmptyInput("empty confusion matrix");
  ClassificationMetrics m;
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / cm.total();
  m.precision = (cm.tp + cm.fp) > 0 ? static_cast<double>(cm.tp) / (cm.tp + cm.fp) : 0.0;
  m.recall = (cm.tp + cm.fn) > 0 ? static_cast<double>(cm.tp) / (cm.tp + cm.fn) : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

std::vector<RocPoint> roc_points(const std::vector<double>& scores,
                                 const std::vector<int>& truths) {
  if (scores.size() != truths.size()) throw LengthMismatch("scores/truth length mismatch");
  long P = 0, N = 0;
  for (int t : truths) (t == 1 ? P : N)++;
  if (P == 0 || N == 0) throw OneClassOnly("need both classes for a ROC curve");

  // group ties: positives/negatives per distinct score, descending
  std::map<double, std::pair<long, long>, std::greater<double>> by_score;
  for (size_t i = 0; i < scores.size(); ++i) {
    auto& [pos, neg] = by_score[scores[i]];
    (truths[i] == 1 ? pos : neg)++;
  }

  std::vector<RocPoint> roc{{0.0, 0.0}};
  long tp = 0, fp = 0;
  for (const auto& [score, counts] : by_score) {
    tp += counts.first;
    fp += counts.second;
    const RocPoint pt{static_cast<double>(fp) / N, static_cast<double>(tp) / P};
    if (pt.fpr != roc.back().fpr || pt.tpr != roc.back().tpr) roc.push_back(pt);
  }
  if (roc.back().fpr != 1.0 || roc.back().tpr != 1.0) roc.push_back({1.0, 1.0});
  return roc;
}

double auc_trapezoid(const std::vector<RocPoint>& roc) {
  double auc = 0.0;
  for (size_t i = 1; i < roc.size(); ++i)
    auc += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) / 2.0;
  return auc;
}

EvalReport evaluate(const std::vector<double>& scores, const std::vector<int>& truths,
                    double threshold) {
  EvalReport rep;
  std::vector<int> predicted(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) predicted[i] = scores[i] >= threshold ? 1 : 0;
  rep.confusion = confusion_matrix(predicted, truths);
  rep.metrics = classification_metrics(rep.confusion);
  rep.roc = roc_points(scores, truths);
  rep.auc = auc_trapezoid(rep.roc);
  return rep;
}

std::string report_to_json(const EvalReport& r) {
  json roc = json::array();
  for (const auto& p : r.roc) roc.push_back({p.fpr, p.tpr});
  const json j = {
      {"confusion", {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"tn", r.confusion.tn}, {"fn", r.confusion.fn}}},
      {"accuracy", r.metrics.accuracy},
      {"precision", r.metrics.precision},
      {"recall", r.metrics.recall},
      {"f1", r.metrics.f1},
      {"roc", roc},
      {"auc", r.auc}};
  return j.dump(2);
}

EvalReport report_from_json(const std::string& text) {
  const json j = json::parse(text);
  EvalReport r;
  r.confusion.tp = j.at("confusion").at("tp").get<long>();
  r.confusion.fp = j.at("confusion").at("fp").get<long>();
  r.confusion.tn = j.at("confusion").at("tn").get<long>();
  r.confusion.fn = j.at("confusion").at("fn").get<long>();
  r.metrics.accuracy = j.at("accuracy").get<double>();
  r.metrics.precision = j.at("precision").get<double>();
  r.metrics.recall = j.at("recall").get<double>();
  r.metrics.f1 = j.at("f1").get<double>();
  for (const auto& p : j.at("roc")) r.roc.push_back({p[0].get<double>(), p[1].get<double>()});
  r.auc = j.at("auc").get<double>();
  return r;
}

void write_roc_csv(const std::vector<RocPoint>& roc, const std::string& path) {
  std::ofstream out(path);
  out.precision(17);
  out << "fpr,tpr\n";
  for (const auto& p : roc) out << p.fpr << ',' << p.tpr << '\n';
}

}  // namespace gaitshap::metrics
