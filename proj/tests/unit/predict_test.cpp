#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixture.hpp"
#include "szzkit/predict/features.hpp"
#include "szzkit/predict/predict.hpp"
#include "szzkit/vcs/git_repository.hpp"

namespace szzkit::predict {
namespace {

using testing::TempDir;

std::optional<double> median_of(const std::vector<Row>& rows, std::size_t f) {
  std::vector<double> v;
  for (const auto& r : rows) {
    if (r[f]) v.push_back(*r[f]);
  }
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

TEST(TransferTransform, IdenticalSetsGiveLogOnePlus) {
  const std::vector<Row> rows{{1.0, 0.0}, {3.0, 10.0}, {7.0, 2.0}};
  const auto t = transfer_transform(rows, rows);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t f = 0; f < 2; ++f) {
      EXPECT_NEAR(*t.test[i][f], std::log1p(*rows[i][f]), 1e-12);
      EXPECT_NEAR(*t.train[i][f], std::log1p(*rows[i][f]), 1e-12);
    }
  }
}

TEST(TransferTransform, ConstantFeature) {
  const auto t = transfer_transform({{4.0}, {4.0}}, {{9.0}, {9.0}, {9.0}});
  for (const auto& r : t.test) EXPECT_NEAR(*r[0], std::log(5.0), 1e-12);
}

TEST(TransferTransform, MedianMovesToTrainingMedian) {
  const auto t = transfer_transform({{5.0}, {10.0}, {20.0}}, {{50.0}, {100.0}, {300.0}});
  EXPECT_NEAR(*median_of(t.test, 0), std::log(11.0), 1e-12);
}

TEST(TransferTransform, InvariantOnRandomTables) {
  std::mt19937 rng(99);
  std::lognormal_distribution<double> size(2, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t features = 1 + rng() % 6;
    std::vector<Row> train(3 + rng() % 40, Row(features)), test(3 + rng() % 40, Row(features));
    for (auto* set : {&train, &test}) {
      for (auto& r : *set) {
        for (auto& v : r) {
          if (rng() % 10 == 0) continue;  // missing
          v = std::round(size(rng)) - (trial % 4 == 0 ? 5.0 : 0.0);
        }
      }
    }
    const auto t = transfer_transform(train, test);
    for (std::size_t f = 0; f < features; ++f) {
      const auto want = t.train_medians[f];
      const auto got = median_of(t.test, f);
      if (!want || !got) continue;
      EXPECT_NEAR(*got, *want, 1e-12);
      EXPECT_NEAR(*median_of(t.train, f), *want, 1e-12);
    }
  }
}

TEST(TransferTransform, NegativeShift) {
  const auto s = negative_shift({{-3.0, 2.0}, {1.0, std::nullopt}}, {{-1.0, 5.0}});
  EXPECT_EQ(s, (std::vector<double>{3.0, 0.0}));
}

// Class 0 at {0, 2}, class 1 at {3, 7}: means 1 and 5, population variances 1
// and 4, epsilon = 1e-9 * var{0, 2, 3, 7} = 6.5e-9, equal priors.
TEST(GaussianNb, FourPointClosedForm) {
  const auto model = gaussian_nb({{0.0}, {2.0}, {3.0}, {7.0}}, {false, false, true, true});
  EXPECT_NEAR(model.epsilon, 6.5e-9, 1e-18);
  const double v0 = 1 + 6.5e-9, v1 = 4 + 6.5e-9;
  for (double x : {-1.0, 0.5, 2.5, 3.0, 4.2, 9.0}) {
    const double l0 = 0.5 * std::exp(-(x - 1) * (x - 1) / (2 * v0)) / std::sqrt(2 * M_PI * v0);
    const double l1 = 0.5 * std::exp(-(x - 5) * (x - 5) / (2 * v1)) / std::sqrt(2 * M_PI * v1);
    const auto p = predict(model, {x});
    EXPECT_NEAR(p.score, l1 / (l0 + l1), 1e-9) << x;
    EXPECT_EQ(p.defective, l1 > l0) << x;
  }
}

TEST(GaussianNb, SymmetricMidpointAndTies) {
  const auto model = gaussian_nb({{0.0}, {2.0}, {8.0}, {10.0}}, {false, false, true, true});
  const auto p = predict(model, {5.0});
  EXPECT_NEAR(p.score, 0.5, 1e-9);
  EXPECT_FALSE(p.defective);
  EXPECT_TRUE(predict(model, {10.0}).defective);
  EXPECT_FALSE(predict(model, {0.0}).defective);
}

TEST(GaussianNb, SingleClassThrows) {
  EXPECT_THROW((void)gaussian_nb({{1.0}, {2.0}}, {true, true}), PredictError);
}

TEST(GaussianNb, FeatureOrderDoesNotMatter) {
  std::mt19937 rng(4);
  std::normal_distribution<double> n;
  std::vector<Row> x, swapped;
  std::vector<bool> y;
  for (int i = 0; i < 60; ++i) {
    const bool label = i % 3 == 0;
    Row r{n(rng) + label, 2 * n(rng) - label, n(rng)};
    if (i % 7 == 0) r[1] = std::nullopt;
    x.push_back(r);
    swapped.push_back({r[2], r[0], r[1]});
    y.push_back(label);
  }
  const auto a = gaussian_nb(x, y), b = gaussian_nb(swapped, y);
  for (int i = 0; i < 20; ++i) {
    Row r{n(rng), n(rng), n(rng)};
    EXPECT_NEAR(predict(a, r).score, predict(b, {r[2], r[0], r[1]}).score, 1e-12);
  }
}

// Two projects whose single feature separates defective files perfectly.
std::vector<ReleaseData> separable_projects(std::size_t files_per_release) {
  std::vector<ReleaseData> out;
  for (const char* project : {"p", "q"}) {
    for (const char* release : {"1", "2"}) {
      ReleaseData d;
      d.project = project;
      d.release = release;
      d.feature_names = {"churn", "noise"};
      for (std::size_t i = 0; i < files_per_release; ++i) {
        const std::string f = "f" + std::to_string(i);
        const bool bad = i % 4 == 0;
        d.files.push_back(f);
        d.features.push_back({bad ? 100.0 + i : 1.0 + i % 3, double(i % 5)});
        d.sizes[f] = 10 + i;
        if (bad) {
          for (const char* v : {"a", "b"}) {
            d.defects[v].push_back({f});
            d.defective[v].insert(f);
          }
        }
      }
      for (const char* v : {"a", "b"}) d.defective[v];
      out.push_back(d);
    }
  }
  return out;
}

TEST(Experiment, SeparableFeaturePredictsPerfectly) {
  ExperimentConfig c;
  c.labels = {"a", "b"};
  c.feature_sets = {{"churn", {"churn"}}};
  c.min_files = 20;
  c.threads = 2;
  const auto r = run_experiment(separable_projects(40), c);
  EXPECT_EQ(r.releases.size(), 4u);
  ASSERT_FALSE(r.outcomes.empty());
  for (const auto& o : r.outcomes) {
    EXPECT_EQ(o.metrics.fp, 0u) << o.model << " " << o.release;
    EXPECT_EQ(o.metrics.fn, 0u) << o.model << " " << o.release;
    EXPECT_EQ(o.bounds.upper, stats::kInf);
  }
}

TEST(Experiment, IdenticalLabelVariantsGiveIdenticalOutcomes) {
  ExperimentConfig c;
  c.labels = {"a", "b"};
  c.feature_sets = {{"all", {"churn", "noise"}}};
  c.min_files = 20;
  const auto r = run_experiment(separable_projects(40), c);
  std::map<std::string, std::vector<double>> lower;
  for (const auto& o : r.outcomes) lower[o.model].push_back(o.bounds.lower);
  EXPECT_EQ(lower["a-all"], lower["b-all"]);
  EXPECT_EQ(lower["a-all-a"], lower["b-all"]);
  // "a-all" tested on the reference "b", and its self-test "a-all-a"
  EXPECT_NE(std::find(r.models.begin(), r.models.end(), "a-all-a"), r.models.end());
  EXPECT_NE(std::find(r.models.begin(), r.models.end(), "a-all"), r.models.end());
}

TEST(Experiment, TooFewReleasesPassTheFilter) {
  ExperimentConfig c;
  c.labels = {"a"};
  c.feature_sets = {{"all", {"churn"}}};
  EXPECT_THROW((void)run_experiment(separable_projects(40), c), PredictError);  // 40 < 100 files
}

TEST(Experiment, ResultsRoundTripThroughJson) {
  ExperimentConfig c;
  c.labels = {"a", "b"};
  c.feature_sets = {{"churn", {"churn"}}};
  c.min_files = 20;
  const auto r = run_experiment(separable_projects(40), c);
  const auto back = ExperimentResult::from_json(r.to_json());
  EXPECT_EQ(back.to_json(), r.to_json());
}

TEST(Features, LogicalLines) {
  EXPECT_EQ(logical_lines("a();\n\n  // note\n/* x\n y */ b();\n", inducing::LanguageProfile::java()), 2u);
  EXPECT_EQ(logical_lines("", inducing::LanguageProfile::java()), 0u);
}

TEST(Features, MetricsCsv) {
  const auto t = parse_metrics_csv("file,loc,cc\na.java,10,\nb.java,5,2\n");
  EXPECT_EQ(t.names, (std::vector<std::string>{"loc", "cc"}));
  EXPECT_EQ(t.get("a.java", 0), 10.0);
  EXPECT_FALSE(t.get("a.java", 1));
  EXPECT_THROW((void)parse_metrics_csv("name,loc\n"), FeatureError);
}

TEST(Features, ChurnOnDemoHistory) {
  TempDir dir;
  const auto fx = testing::build_demo(dir.path());
  const auto graph = vcs::ingest_repository(fx.repo);
  const std::string J = "src/main/java/demo/";
  const std::vector<std::string> files{J + "A.java", J + "L.java", J + "Retry.java"};
  const std::set<CommitId> fixes(fx.fixes.at("JLMIV").begin(), fx.fixes.at("JLMIV").end());
  const release::Release r1{"1.0", fx.sha.at("R1"), graph.commit(fx.sha.at("R1")).committer_date};
  const release::Release r2{"1.1", fx.sha.at("R2"), graph.commit(fx.sha.at("R2")).committer_date};

  const auto t1 = churn_features(graph, r1, {J + "A.java"}, fixes);
  // A.java before 1.0: import (12 lines), two lines by I1, one by I6
  EXPECT_EQ(t1.rows.at(J + "A.java"), (std::vector<std::optional<double>>{3.0, 15.0, 3.0, 2.0, 0.0, 10.0}));

  const auto t2 = churn_features(graph, r2, files, fixes);
  // plus F1 (a JLMIV fix), M6 and X
  EXPECT_EQ(t2.rows.at(J + "A.java"), (std::vector<std::optional<double>>{6.0, 19.0, 7.0, 3.0, 1.0, 25.0}));
  // import, I8 and F5 through the merge, which itself does not count
  EXPECT_EQ(t2.rows.at(J + "L.java"), (std::vector<std::optional<double>>{3.0, 15.0, 1.0, 3.0, 1.0, 25.0}));
  // added by F5 on day 19, released on day 25
  EXPECT_EQ(t2.rows.at(J + "Retry.java"), (std::vector<std::optional<double>>{1.0, 12.0, 0.0, 1.0, 1.0, 6.0}));
}

}  // namespace
}  // namespace szzkit::predict
