#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "doctest.h"
#include "gaitshap/metrics.hpp"

using namespace gaitshap::metrics;

namespace {

// Wilcoxon / pairwise-concordance AUC: P(score_pos > score_neg) + 0.5 P(tie).
double concordance_auc(const std::vector<double>& scores, const std::vector<int>& truths) {
  double num = 0.0;
  long pairs = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (truths[i] != 1) continue;
    for (size_t j = 0; j < scores.size(); ++j) {
      if (truths[j] != 0) continue;
      ++pairs;
      if (scores[i] > scores[j])
        num += 1.0;
      else if (scores[i] == scores[j])
        num += 0.5;
    }
  }
  return num / pairs;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("confusion matrix on perfect and degenerate predictors") {
  auto cm = confusion_matrix({1, 1, 0, 0}, {1, 1, 0, 0});
  CHECK(cm.tp == 2);
  CHECK(cm.tn == 2);
  CHECK(cm.fp == 0);
  CHECK(cm.fn == 0);

  cm = confusion_matrix({0, 0, 0, 0}, {1, 1, 1, 0});
  CHECK(cm.fn == 3);
  CHECK(cm.tn == 1);
  CHECK(cm.tp == 0);
  CHECK(cm.fp == 0);
}

TEST_CASE("confusion matrix matches a counting loop on random data") {
  std::mt19937_64 rng(3);
  std::vector<int> pred(100), truth(100);
  for (int i = 0; i < 100; ++i) {
    pred[i] = static_cast<int>(rng() % 2);
    truth[i] = static_cast<int>(rng() % 2);
  }
  const auto cm = confusion_matrix(pred, truth);
  long tp = 0, fp = 0, tn = 0, fn = 0;
  for (int i = 0; i < 100; ++i) {
    if (pred[i] == 1 && truth[i] == 1) ++tp;
    if (pred[i] == 1 && truth[i] == 0) ++fp;
    if (pred[i] == 0 && truth[i] == 0) ++tn;
    if (pred[i] == 0 && truth[i] == 1) ++fn;
  }
  CHECK(cm.tp == tp);
  CHECK(cm.fp == fp);
  CHECK(cm.tn == tn);
  CHECK(cm.fn == fn);
}

TEST_CASE("length mismatch and empty input rejected") {
  CHECK_THROWS_AS(confusion_matrix({1}, {1, 0}), LengthMismatch);
  CHECK_THROWS_AS(confusion_matrix({}, {}), EmptyInput);
}

TEST_CASE("published-figure cross-check: per-class rates reproduce the reported row") {
  // test split: 26 adult and 23 older subjects, 80 segments each;
  // 85.9% adult correct, 76.3% older correct
  const long adult_n = 26 * 80, older_n = 23 * 80;
  ConfusionMatrix cm;
  cm.tn = std::lround(adult_n * 0.859);
  cm.fp = adult_n - cm.tn;
  cm.tp = std::lround(older_n * 0.763);
  cm.fn = older_n - cm.tp;
  const auto m = classification_metrics(cm);
  CHECK(std::abs(m.precision - 0.827) < 0.005);
  CHECK(std::abs(m.recall - 0.763) < 0.001);
  CHECK(std::abs(m.accuracy - 0.814) < 0.005);
}

TEST_CASE("perfect matrix gives all ones; guards give zeros") {
  ConfusionMatrix cm;
  cm.tp = 10;
  cm.tn = 10;
  const auto m = classification_metrics(cm);
  CHECK(m.accuracy == 1.0);
  CHECK(m.precision == 1.0);
  CHECK(m.recall == 1.0);
  CHECK(m.f1 == 1.0);

  ConfusionMatrix no_pos;
  no_pos.tn = 5;
  no_pos.fn = 5;
  const auto g = classification_metrics(no_pos);
  CHECK(g.precision == 0.0);
  CHECK(g.f1 == 0.0);

  CHECK_THROWS_AS(classification_metrics(ConfusionMatrix{}), EmptyInput);
}

TEST_CASE("accuracy identity holds") {
  std::mt19937_64 rng(9);
  for (int it = 0; it < 20; ++it) {
    ConfusionMatrix cm;
    cm.tp = rng() % 50;
    cm.fp = rng() % 50;
    cm.tn = 1 + rng() % 50;
    cm.fn = rng() % 50;
    const auto m = classification_metrics(cm);
    const double P = cm.tp + cm.fn, N = cm.tn + cm.fp;
    const double specificity = N > 0 ? cm.tn / N : 0.0;
    const double recall = P > 0 ? cm.tp / P : 0.0;
    CHECK(std::abs(m.accuracy - (recall * P + specificity * N) / (P + N)) < 1e-12);
  }
}

TEST_CASE("roc on perfect separation and total ties") {
  auto roc = roc_points({0.9, 0.1}, {1, 0});
  REQUIRE(roc.size() == 3);
  CHECK(roc[0].fpr == 0.0);
  CHECK(roc[0].tpr == 0.0);
  CHECK(roc[1].fpr == 0.0);
  CHECK(roc[1].tpr == 1.0);
  CHECK(roc[2].fpr == 1.0);
  CHECK(roc[2].tpr == 1.0);

  roc = roc_points({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0});
  REQUIRE(roc.size() == 2);
  CHECK(roc[0].fpr == 0.0);
  CHECK(roc[1].tpr == 1.0);
}

TEST_CASE("roc matches an all-thresholds brute force") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> scores(10);
  std::vector<int> truths(10);
  for (int i = 0; i < 10; ++i) {
    scores[i] = std::round(u(rng) * 4.0) / 4.0;  // force ties
    truths[i] = i < 5 ? 1 : 0;
  }
  const auto roc = roc_points(scores, truths);

  // brute force: for every distinct threshold value, predict positive when
  // score >= threshold
  std::vector<double> thresholds = scores;
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  std::vector<RocPoint> ref = {{0.0, 0.0}};
  const double P = 5.0, N = 5.0;
  for (double th : thresholds) {
    double tp = 0, fp = 0;
    for (int i = 0; i < 10; ++i) {
      if (scores[i] >= th) (truths[i] == 1 ? tp : fp) += 1.0;
    }
    ref.push_back({fp / N, tp / P});
  }
  if (ref.back().fpr != 1.0 || ref.back().tpr != 1.0) ref.push_back({1.0, 1.0});
  // dedupe consecutive repeats the library may collapse
  std::vector<RocPoint> ref2;
  for (const auto& p : ref)
    if (ref2.empty() || p.fpr != ref2.back().fpr || p.tpr != ref2.back().tpr) ref2.push_back(p);

  REQUIRE(roc.size() == ref2.size());
  for (size_t i = 0; i < roc.size(); ++i) {
    CHECK(roc[i].fpr == doctest::Approx(ref2[i].fpr).epsilon(1e-12));
    CHECK(roc[i].tpr == doctest::Approx(ref2[i].tpr).epsilon(1e-12));
  }
}

TEST_CASE("one-class input rejected") {
  CHECK_THROWS_AS(roc_points({0.3, 0.4}, {1, 1}), OneClassOnly);
}

TEST_CASE("auc endpoints: perfect 1.0, diagonal 0.5") {
  CHECK(auc_trapezoid({{0, 0}, {0, 1}, {1, 1}}) == doctest::Approx(1.0));
  CHECK(auc_trapezoid({{0, 0}, {1, 1}}) == doctest::Approx(0.5));
}

TEST_CASE("trapezoid auc equals pairwise concordance on random instances") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 30; ++it) {
    const int n = 20 + static_cast<int>(rng() % 181);
    std::vector<double> scores(n);
    std::vector<int> truths(n);
    for (int i = 0; i < n; ++i) {
      scores[i] = std::round(u(rng) * 20.0) / 20.0;
      truths[i] = static_cast<int>(rng() % 2);
    }
    truths[0] = 1;
    truths[1] = 0;
    const double a = auc_trapezoid(roc_points(scores, truths));
    CHECK(a == doctest::Approx(concordance_auc(scores, truths)).epsilon(1e-12));
  }
}

TEST_CASE("metrics are sample-order invariant") {
  std::vector<double> scores = {0.9, 0.2, 0.7, 0.4, 0.6};
  std::vector<int> truths = {1, 0, 1, 0, 1};
  const auto r1 = evaluate(scores, truths);
  std::vector<size_t> perm = {4, 2, 0, 3, 1};
  std::vector<double> s2;
  std::vector<int> t2;
  for (size_t i : perm) {
    s2.push_back(scores[i]);
    t2.push_back(truths[i]);
  }
  const auto r2 = evaluate(s2, t2);
  CHECK(r1.metrics.accuracy == r2.metrics.accuracy);
  CHECK(r1.metrics.f1 == r2.metrics.f1);
  CHECK(r1.auc == doctest::Approx(r2.auc).epsilon(1e-12));
}

TEST_CASE("report json round trip") {
  const auto report = evaluate({0.9, 0.2, 0.7, 0.4}, {1, 0, 1, 0});
  const auto back = report_from_json(report_to_json(report));
  CHECK(back.confusion.tp == report.confusion.tp);
  CHECK(back.confusion.tn == report.confusion.tn);
  CHECK(back.metrics.accuracy == report.metrics.accuracy);
  CHECK(back.auc == report.auc);
  REQUIRE(back.roc.size() == report.roc.size());
  for (size_t i = 0; i < back.roc.size(); ++i) {
    CHECK(back.roc[i].fpr == report.roc[i].fpr);
    CHECK(back.roc[i].tpr == report.roc[i].tpr);
  }
}

}  // TEST_SUITE
