#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

#include "doctest.h"
#include "gaitshap/shap.hpp"

using namespace gaitshap;
using namespace gaitshap::shap;

namespace {

Matrix random_segment(int t, int a, unsigned long long seed) {
  Matrix m(t, a);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : m.v) v = u(rng);
  return m;
}

// Additive game: sum over groups of w_g * mean(cells of group g).
ModelFn linear_game(const FeaturePartition& p, const std::vector<double>& w) {
  return [&p, w](const Matrix& x) {
    double s = 0.0;
    for (int g = 0; g < p.size(); ++g) {
      double m = 0.0;
      for (int cell : p.groups[g]) m += x.v[cell];
      s += w[g] * m / p.groups[g].size();
    }
    return s;
  };
}

}  // namespace

TEST_SUITE("shap") {

TEST_CASE("partition sizes per granularity") {
  CHECK(partition_features(128, 3, Granularity::PerCellPerAxis).size() == 384);
  CHECK(partition_features(128, 3, Granularity::WindowPerAxis, 16).size() == 24);
  CHECK(partition_features(128, 3, Granularity::WholeAxis).size() == 3);
  CHECK_THROWS_AS(partition_features(128, 3, Granularity::WindowPerAxis, 0), InvalidWindow);
}

TEST_CASE("partition is a disjoint cover") {
  for (auto g : {Granularity::PerCellPerAxis, Granularity::WindowPerAxis, Granularity::WholeAxis}) {
    const auto p = partition_features(20, 3, g, 7);  // uneven window split
    std::vector<int> seen(60, 0);
    for (const auto& group : p.groups)
      for (int cell : group) ++seen[cell];
    for (int count : seen) CHECK(count == 1);
  }
}

TEST_CASE("coalition masking endpoints") {
  const auto p = partition_features(8, 3, Granularity::WholeAxis);
  const auto seg = random_segment(8, 3, 1);
  const auto base = random_segment(8, 3, 2);
  CHECK(mask_with_coalition(seg, {1, 1, 1}, p, base) == seg);
  CHECK(mask_with_coalition(seg, {0, 0, 0}, p, base) == base);

  const auto mixed = mask_with_coalition(seg, {1, 0, 1}, p, base);
  for (int t = 0; t < 8; ++t) {
    CHECK(mixed.at(t, 0) == seg.at(t, 0));
    CHECK(mixed.at(t, 1) == base.at(t, 1));
    CHECK(mixed.at(t, 2) == seg.at(t, 2));
  }
}

TEST_CASE("exact shapley recovers the closed form of an additive game") {
  const auto p = partition_features(8, 3, Granularity::WindowPerAxis, 4);  // N = 6
  const std::vector<double> w = {0.5, -1.0, 2.0, 0.0, 0.25, -0.75};
  const auto seg = random_segment(8, 3, 3);
  const Matrix base(8, 3, 0.0);
  const auto game = linear_game(p, w);
  const auto attr = exact_shapley(game, seg, p, base);

  CHECK(attr.phi0 == doctest::Approx(0.0).epsilon(1e-12));
  for (int g = 0; g < p.size(); ++g) {
    double mean = 0.0;
    for (int cell : p.groups[g]) mean += seg.v[cell];
    mean /= p.groups[g].size();
    CHECK(attr.phi[g] == doctest::Approx(w[g] * mean).epsilon(1e-9));
  }
  CHECK(std::abs(attr.efficiency_gap) <= 1e-6);
}

TEST_CASE("dummy group gets exactly zero") {
  const auto p = partition_features(4, 3, Granularity::WholeAxis);
  const auto seg = random_segment(4, 3, 5);
  const Matrix base(4, 3, 0.0);
  // game ignores axis 1 entirely
  ModelFn game = [](const Matrix& x) {
    double s = 0.0;
    for (int t = 0; t < x.rows; ++t) s += x.at(t, 0) - 0.5 * x.at(t, 2);
    return s;
  };
  const auto attr = exact_shapley(game, seg, p, base);
  CHECK(std::abs(attr.phi[1]) <= 1e-12);

  const auto report = check_shapley_properties(game, seg, p, base, attr);
  CHECK(report.efficiency_ok);
  CHECK(report.dummy_ok);
  REQUIRE(report.dummy_groups.size() == 1);
  CHECK(report.dummy_groups[0] == 1);
}

TEST_CASE("symmetric groups get equal phi") {
  const auto p = partition_features(4, 2, Granularity::WholeAxis);  // N = 2
  Matrix seg(4, 2);
  for (int t = 0; t < 4; ++t) seg.at(t, 0) = seg.at(t, 1) = 1.0;
  const Matrix base(4, 2, 0.0);
  // symmetric in the two axes
  ModelFn game = [](const Matrix& x) {
    double a = 0.0, b = 0.0;
    for (int t = 0; t < x.rows; ++t) {
      a += x.at(t, 0);
      b += x.at(t, 1);
    }
    return a + b + 0.3 * a * b;
  };
  const auto attr = exact_shapley(game, seg, p, base);
  CHECK(attr.phi[0] == doctest::Approx(attr.phi[1]).epsilon(1e-12));

  const auto report = check_shapley_properties(game, seg, p, base, attr);
  CHECK(report.symmetry_ok);
  REQUIRE(report.symmetric_pairs.size() == 1);
}

TEST_CASE("additivity of exact attributions") {
  const auto p = partition_features(6, 2, Granularity::WholeAxis);
  const auto seg = random_segment(6, 2, 7);
  const auto base = random_segment(6, 2, 8);
  ModelFn f1 = [](const Matrix& x) { return x.at(0, 0) * x.at(1, 1) + x.at(2, 0); };
  ModelFn f2 = [](const Matrix& x) { return std::sin(x.at(3, 1)) - 0.5 * x.at(4, 0); };
  ModelFn sum = [&](const Matrix& x) { return f1(x) + f2(x); };

  const auto attr = exact_shapley(sum, seg, p, base);
  const auto report = check_shapley_properties(sum, seg, p, base, attr, &f1, &f2);
  CHECK(report.additivity_ok);
  CHECK(report.additivity_residual <= 1e-9);
}

TEST_CASE("too many features for exact enumeration") {
  const auto p = partition_features(16, 3, Granularity::PerCellPerAxis);  // N = 48
  const auto seg = random_segment(16, 3, 9);
  const Matrix base(16, 3, 0.0);
  ModelFn game = [](const Matrix& x) { return x.v[0]; };
  CHECK_THROWS_AS(exact_shapley(game, seg, p, base), TooManyFeatures);
}

TEST_CASE("permutation estimator converges to exact on a random linear game") {
  const auto p = partition_features(8, 1, Granularity::PerCellPerAxis);  // N = 8
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> w(8);
  for (auto& v : w) v = u(rng);
  const auto seg = random_segment(8, 1, 12);
  const Matrix base(8, 1, 0.0);
  const auto game = linear_game(p, w);

  const auto exact = exact_shapley(game, seg, p, base);
  const int n_perm = 2000;
  const auto est = permutation_shapley(game, seg, p, base, n_perm, 13);

  // for a linear game each marginal is deterministic, so the estimate is
  // exact; allow the generic 3-sigma bound with a small floor
  for (int g = 0; g < 8; ++g) CHECK(std::abs(est.phi[g] - exact.phi[g]) < 1e-9);

  // a non-additive game genuinely exercises the bound
  ModelFn curved = [&](const Matrix& x) {
    double s = game(x);
    return s + 0.25 * x.v[0] * x.v[3] - 0.1 * x.v[5] * x.v[6];
  };
  const auto cx = exact_shapley(curved, seg, p, base);
  const auto ce = permutation_shapley(curved, seg, p, base, n_perm, 14);
  for (int g = 0; g < 8; ++g)
    CHECK(std::abs(ce.phi[g] - cx.phi[g]) < 3.0 * (0.5 / std::sqrt(n_perm)) + 1e-6);
}

TEST_CASE("single permutation telescopes to f(x) - phi0") {
  const auto p = partition_features(5, 1, Granularity::PerCellPerAxis);
  const auto seg = random_segment(5, 1, 15);
  const Matrix base(5, 1, 0.0);
  ModelFn game = [](const Matrix& x) {
    double s = 0.0;
    for (double v : x.v) s += std::tanh(v) + 0.2 * v * v;
    return s;
  };
  const auto attr = permutation_shapley(game, seg, p, base, 1, 17);
  double sum = attr.phi0;
  for (double v : attr.phi) sum += v;
  CHECK(sum == doctest::Approx(game(seg)).epsilon(1e-9));
  CHECK(std::abs(attr.efficiency_gap) <= 1e-9);
}

TEST_CASE("permutation estimates are deterministic per seed") {
  const auto p = partition_features(6, 1, Granularity::PerCellPerAxis);
  const auto seg = random_segment(6, 1, 19);
  const Matrix base(6, 1, 0.0);
  ModelFn game = [](const Matrix& x) { return x.v[0] * x.v[1] + x.v[4]; };
  const auto a = permutation_shapley(game, seg, p, base, 64, 21);
  const auto b = permutation_shapley(game, seg, p, base, 64, 21);
  CHECK(a.phi == b.phi);
  const auto c = permutation_shapley(game, seg, p, base, 64, 22);
  CHECK(a.phi != c.phi);
}

TEST_CASE("permutation estimator is unbiased across 50 seeds") {
  const auto p = partition_features(8, 1, Granularity::PerCellPerAxis);
  const auto seg = random_segment(8, 1, 23);
  const Matrix base(8, 1, 0.0);
  ModelFn game = [](const Matrix& x) {
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += (i % 2 ? 1.0 : -0.5) * x.v[i];
    return s + 0.4 * x.v[0] * x.v[7] + 0.3 * x.v[2] * x.v[3] * x.v[4];
  };
  const auto exact = exact_shapley(game, seg, p, base);

  const int n_seeds = 50, n_perm = 40;
  std::vector<std::vector<double>> estimates;
  for (int s = 0; s < n_seeds; ++s)
    estimates.push_back(permutation_shapley(game, seg, p, base, n_perm, 1000 + s).phi);

  for (int g = 0; g < 8; ++g) {
    double mean = 0.0;
    for (const auto& e : estimates) mean += e[g];
    mean /= n_seeds;
    double var = 0.0;
    for (const auto& e : estimates) var += std::pow(e[g] - mean, 2);
    var /= (n_seeds - 1);
    const double sem = std::sqrt(var / n_seeds) + 1e-12;
    CHECK(std::abs(mean - exact.phi[g]) < 3.0 * sem + 1e-9);
  }
}

TEST_CASE("explaining the baseline yields all-zero phi") {
  const auto p = partition_features(6, 3, Granularity::WholeAxis);
  const auto base = random_segment(6, 3, 29);
  ModelFn game = [](const Matrix& x) {
    double s = 0.0;
    for (double v : x.v) s += std::cos(v);
    return s;
  };
  const auto attr = exact_shapley(game, base, p, base);
  for (double v : attr.phi) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("mean-abs aggregation") {
  const auto p = partition_features(4, 1, Granularity::PerCellPerAxis);
  ShapAttribution a, b;
  a.phi = {0.5, -0.25, 0.0, 1.0};
  b.phi = {-0.5, 0.25, 0.0, 1.0};
  const auto agg = mean_abs_aggregate({a, b}, p);
  CHECK(agg.at(0, 0) == doctest::Approx(0.5));
  CHECK(agg.at(1, 0) == doctest::Approx(0.25));
  CHECK(agg.at(2, 0) == 0.0);
  CHECK(agg.at(3, 0) == doctest::Approx(1.0));

  // random attributions vs a direct loop, with broadcasting over a window
  const auto pw = partition_features(8, 2, Granularity::WindowPerAxis, 4);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ShapAttribution> attrs(10);
  for (auto& attr : attrs) {
    attr.phi.resize(pw.size());
    for (auto& v : attr.phi) v = u(rng);
  }
  const auto agg2 = mean_abs_aggregate(attrs, pw);
  for (int g = 0; g < pw.size(); ++g) {
    double expect = 0.0;
    for (const auto& attr : attrs) expect += std::abs(attr.phi[g]);
    expect /= attrs.size();
    for (int cell : pw.groups[g])
      CHECK(agg2.v[cell] == doctest::Approx(expect).epsilon(1e-12));
  }

  CHECK_THROWS_AS(mean_abs_aggregate({}, p), EmptyInput);
}

TEST_CASE("random small games satisfy all four axioms") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int it = 0; it < 20; ++it) {
    const int N = 3 + static_cast<int>(rng() % 8);  // N in [3, 10]
    const auto p = partition_features(N, 1, Granularity::PerCellPerAxis);
    const auto seg = random_segment(N, 1, 100 + it);
    const Matrix base(N, 1, 0.0);

    std::vector<double> w1(N), w2(N);
    for (auto& v : w1) v = u(rng);
    for (auto& v : w2) v = u(rng);
    const double q1 = u(rng), q2 = u(rng);
    ModelFn f1 = [w1, q1, N](const Matrix& x) {
      double s = 0.0;
      for (int i = 0; i < N; ++i) s += w1[i] * x.v[i];
      return s + q1 * x.v[0] * x.v[N - 1];
    };
    ModelFn f2 = [w2, q2, N](const Matrix& x) {
      double s = 0.0;
      for (int i = 0; i < N; ++i) s += w2[i] * x.v[i];
      return s + q2 * x.v[1] * x.v[N / 2 == 1 ? 2 : N / 2];
    };
    ModelFn sum = [&](const Matrix& x) { return f1(x) + f2(x); };

    const auto attr = exact_shapley(sum, seg, p, base);
    const auto report = check_shapley_properties(sum, seg, p, base, attr, &f1, &f2);
    CHECK(report.all_ok(true));
  }
}

TEST_CASE("attribution and heatmap csv output") {
  const auto p = partition_features(4, 3, Granularity::WholeAxis);
  ShapAttribution attr;
  attr.phi = {0.1, -0.2, 0.3};
  write_attribution_csv({{"seg0", attr}}, p, "test_attr.csv");
  {
    std::ifstream in("test_attr.csv");
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "segment_id,group_index,axis,time_start,time_end,phi");
    int rows = 0;
    while (std::getline(in, row))
      if (!row.empty()) ++rows;
    CHECK(rows == 3);
  }
  std::remove("test_attr.csv");

  const auto agg = mean_abs_aggregate({attr}, p);
  write_heatmap_csv(agg, "test_heat.csv");
  const auto back = read_heatmap_csv("test_heat.csv");
  CHECK(back == agg);
  std::remove("test_heat.csv");
}

}  // TEST_SUITE
