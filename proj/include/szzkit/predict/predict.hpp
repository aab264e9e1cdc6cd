#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "szzkit/stats/stats.hpp"

namespace szzkit::predict {

using Row = std::vector<std::optional<double>>;

class PredictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-feature shift that makes every value nonnegative (the global minimum
// over both sets when it is negative, 0 otherwise).
[[nodiscard]] std::vector<double> negative_shift(const std::vector<Row>& train, const std::vector<Row>& test);

struct Transformed {
  std::vector<Row> train;
  std::vector<Row> test;
  std::vector<std::optional<double>> train_medians;  // of log(1 + m), nullopt for all-missing features
};

// Training rows become log(1 + m); test rows are log(1 + m) moved by the
// difference between the training and test medians. Missing values stay missing.
[[nodiscard]] Transformed transfer_transform(const std::vector<Row>& train, const std::vector<Row>& test);

struct TransferModel {
  double prior[2] = {0, 0};
  // Per class and feature; nullopt when the class has no value for it.
  std::vector<std::optional<double>> mean[2];
  std::vector<std::optional<double>> variance[2];
  double epsilon = 0;
};

struct Prediction {
  double score = 0;  // posterior of the defective class
  bool defective = false;
};

// Population variances smoothed by 1e-9 times the largest feature variance.
[[nodiscard]] TransferModel gaussian_nb(const std::vector<Row>& x, const std::vector<bool>& y);
// Features without statistics in both classes, and missing values, are
// skipped. Equal posteriors predict the clean class.
[[nodiscard]] Prediction predict(const TransferModel& model, const Row& row);

// One release of one project, with every label variant.
struct ReleaseData {
  std::string project;
  std::string release;
  std::vector<std::string> files;
  std::vector<std::string> feature_names;
  std::vector<Row> features;                                              // aligned with files
  std::map<std::string, double> sizes;                                    // logical lines per file
  std::map<std::string, std::vector<std::set<std::string>>> defects;      // variant -> file set per issue
  std::map<std::string, std::set<std::string>> defective;                 // variant -> files

  [[nodiscard]] std::string id() const { return project + "/" + release; }
};

struct FeatureSet {
  std::string name;                   // "all", "sm", ...
  std::vector<std::string> features;  // names to use
};

struct ExperimentConfig {
  std::vector<std::string> labels;  // training label variants
  std::string reference;            // test label; defaults to the last entry of labels
  std::vector<FeatureSet> feature_sets;
  std::size_t min_files = 100;
  std::size_t min_defective = 5;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct ModelOutcome {
  std::string model;  // "<train>-<features>" or "<train>-<features>-<test>"
  std::string train_label, test_label, feature_set;
  std::string release;  // ReleaseData::id()
  stats::CostBounds bounds;
  stats::ClassificationMetrics metrics;
};

struct ModelSummary {
  std::string model;
  std::size_t releases = 0;
  double lower_median = 0, lower_mad = 0;
  double upper_median = 0, upper_mad = 0;
  double never_saves_share = 0;  // releases with lower >= upper
};

struct ExperimentResult {
  std::vector<std::string> models;
  std::vector<std::string> releases;   // evaluated releases
  std::vector<std::string> excluded;   // filtered out
  std::vector<ModelOutcome> outcomes;  // models x releases, release-major
  std::vector<ModelSummary> summaries;

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static ExperimentResult from_json(const nlohmann::json& j);
};

// Leave-one-project-out: every release is tested with a model trained on
// all releases of the other projects. Each training label is evaluated on
// the reference label, and also on itself when it differs.
[[nodiscard]] ExperimentResult run_experiment(const std::vector<ReleaseData>& datasets, const ExperimentConfig& config);

}  // namespace szzkit::predict
