#include "szzkit/predict/predict.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

namespace szzkit::predict {
namespace {

using nlohmann::json;

std::optional<double> median_present(const std::vector<Row>& rows, std::size_t f) {
  std::vector<double> v;
  for (const auto& r : rows) {
    if (f < r.size() && r[f]) v.push_back(*r[f]);
  }
  if (v.empty()) return std::nullopt;
  return stats::median(std::move(v));
}

std::size_t width(const std::vector<Row>& a, const std::vector<Row>& b) {
  std::size_t w = 0;
  bool set = false;
  for (const auto* rows : {&a, &b}) {
    for (const auto& r : *rows) {
      if (set && r.size() != w) throw PredictError("rows have different numbers of features");
      w = r.size();
      set = true;
    }
  }
  return w;
}

double population_variance(const std::vector<double>& v, double mean) {
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / double(v.size());
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / double(v.size());
}

json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from(const json& j) {
  if (j.is_string()) {
    if (j == "inf") return stats::kInf;
    if (j == "-inf") return -stats::kInf;
    throw PredictError("bad number in results: " + j.get<std::string>());
  }
  return j.get<double>();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

struct Model {
  std::string name, train, test;
  const FeatureSet* features;
};

std::vector<Row> select(const ReleaseData& d, const std::vector<std::string>& names) {
  std::vector<std::size_t> idx;
  for (const auto& n : names) {
    auto it = std::find(d.feature_names.begin(), d.feature_names.end(), n);
    if (it == d.feature_names.end()) throw PredictError(d.id() + " lacks feature " + n);
    idx.push_back(std::size_t(it - d.feature_names.begin()));
  }
  std::vector<Row> out;
  out.reserve(d.features.size());
  for (const auto& r : d.features) {
    Row row;
    for (std::size_t i : idx) row.push_back(r[i]);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<ModelOutcome> evaluate_release(const ReleaseData& test, const std::vector<const ReleaseData*>& train,
                                           const std::vector<Model>& models) {
  std::vector<ModelOutcome> out;
  for (const auto& m : models) {
    std::vector<Row> x;
    std::vector<bool> y;
    for (const ReleaseData* d : train) {
      auto rows = select(*d, m.features->features);
      const auto& bad = d->defective.at(m.train);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        x.push_back(std::move(rows[i]));
        y.push_back(bad.count(d->files[i]) > 0);
      }
    }
    const auto tx = transfer_transform(x, select(test, m.features->features));
    TransferModel model;
    try {
      model = gaussian_nb(tx.train, y);
    } catch (const PredictError& e) {
      throw PredictError("training for " + test.id() + " with " + m.name + ": " + e.what());
    }
    std::map<std::string, bool> predicted;
    std::vector<bool> preds, labels;
    const auto& truth = test.defective.at(m.test);
    for (std::size_t i = 0; i < test.files.size(); ++i) {
      const bool p = predict(model, tx.test[i]).defective;
      predicted[test.files[i]] = p;
      preds.push_back(p);
      labels.push_back(truth.count(test.files[i]) > 0);
    }
    ModelOutcome o;
    o.model = m.name;
    o.train_label = m.train;
    o.test_label = m.test;
    o.feature_set = m.features->name;
    o.release = test.id();
    o.bounds = stats::cost_bounds(predicted, test.sizes, test.defects.at(m.test));
    o.metrics = stats::classification_metrics(preds, labels);
    out.push_back(std::move(o));
  }
  return out;
}

// Median and MAD that tolerate infinite entries.
std::pair<double, double> robust_location(const std::vector<double>& v) {
  const double m = stats::median(v);
  if (std::isinf(m)) return {m, stats::kInf};
  return {m, stats::mad(v)};
}

}  // namespace

std::vector<double> negative_shift(const std::vector<Row>& train, const std::vector<Row>& test) {
  const std::size_t w = width(train, test);
  std::vector<double> shift(w, 0.0);
  for (const auto* rows : {&train, &test}) {
    for (const auto& r : *rows) {
      for (std::size_t f = 0; f < w; ++f) {
        if (r[f] && *r[f] < -shift[f]) shift[f] = -*r[f];
      }
    }
  }
  return shift;
}

Transformed transfer_transform(const std::vector<Row>& train, const std::vector<Row>& test) {
  const std::size_t w = width(train, test);
  const auto shift = negative_shift(train, test);
  const auto log_rows = [&](const std::vector<Row>& rows) {
    std::vector<Row> out = rows;
    for (auto& r : out) {
      for (std::size_t f = 0; f < w; ++f) {
        if (r[f]) r[f] = std::log1p(*r[f] + shift[f]);
      }
    }
    return out;
  };
  Transformed t;
  t.train = log_rows(train);
  t.test = log_rows(test);
  for (std::size_t f = 0; f < w; ++f) {
    const auto train_median = median_present(t.train, f);
    const auto test_median = median_present(t.test, f);
    t.train_medians.push_back(train_median);
    if (!train_median || !test_median) continue;
    const double delta = *train_median - *test_median;
    for (auto& r : t.test) {
      if (r[f]) r[f] = *r[f] + delta;
    }
  }
  return t;
}

TransferModel gaussian_nb(const std::vector<Row>& x, const std::vector<bool>& y) {
  if (x.size() != y.size()) throw PredictError("feature rows and labels differ in count");
  const std::size_t positives = std::size_t(std::count(y.begin(), y.end(), true));
  if (positives == 0 || positives == y.size()) throw PredictError("training data contains a single class");
  const std::size_t w = width(x, {});
  TransferModel m;
  m.prior[1] = double(positives) / double(y.size());
  m.prior[0] = 1.0 - m.prior[1];
  double max_var = 0;
  for (std::size_t f = 0; f < w; ++f) {
    std::vector<double> all, per[2];
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!x[i][f]) continue;
      all.push_back(*x[i][f]);
      per[y[i] ? 1 : 0].push_back(*x[i][f]);
    }
    if (!all.empty()) max_var = std::max(max_var, population_variance(all, mean_of(all)));
    for (int c = 0; c < 2; ++c) {
      if (per[c].empty()) {
        m.mean[c].emplace_back();
        m.variance[c].emplace_back();
        continue;
      }
      const double mu = mean_of(per[c]);
      m.mean[c].push_back(mu);
      m.variance[c].push_back(population_variance(per[c], mu));
    }
  }
  // Constant training data has no variance scale to borrow.
  m.epsilon = max_var > 0 ? 1e-9 * max_var : 1e-9;
  for (auto& v : m.variance) {
    for (auto& s : v) {
      if (s) *s += m.epsilon;
    }
  }
  return m;
}

Prediction predict(const TransferModel& model, const Row& row) {
  if (row.size() != model.mean[0].size()) throw PredictError("row width differs from the model");
  double joint[2];
  for (int c = 0; c < 2; ++c) {
    joint[c] = std::log(model.prior[c]);
    for (std::size_t f = 0; f < row.size(); ++f) {
      if (!row[f] || !model.mean[0][f] || !model.mean[1][f]) continue;
      const double var = *model.variance[c][f];
      const double d = *row[f] - *model.mean[c][f];
      joint[c] += -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
    }
  }
  Prediction p;
  p.score = 1.0 / (1.0 + std::exp(joint[0] - joint[1]));
  p.defective = joint[1] > joint[0];
  return p;
}

ExperimentResult run_experiment(const std::vector<ReleaseData>& datasets, const ExperimentConfig& config) {
  if (config.labels.empty()) throw PredictError("no training labels given");
  if (config.feature_sets.empty()) throw PredictError("no feature sets given");
  const std::string reference = config.reference.empty() ? config.labels.back() : config.reference;
  std::set<std::string> variants(config.labels.begin(), config.labels.end());
  variants.insert(reference);

  std::vector<Model> models;
  for (const auto& label : config.labels) {
    for (const auto& fs : config.feature_sets) {
      models.push_back(Model{label + "-" + fs.name, label, reference, &fs});
    }
  }
  for (const auto& label : config.labels) {
    if (label == reference) continue;
    for (const auto& fs : config.feature_sets) {
      models.push_back(Model{label + "-" + fs.name + "-" + label, label, label, &fs});
    }
  }

  ExperimentResult result;
  for (const auto& m : models) result.models.push_back(m.name);
  std::vector<const ReleaseData*> kept;
  std::set<std::string> seen;
  for (const auto& d : datasets) {
    if (!seen.insert(d.id()).second) throw PredictError("duplicate release " + d.id());
    if (d.features.size() != d.files.size()) throw PredictError(d.id() + ": feature rows differ from files");
    bool pass = d.files.size() >= config.min_files;
    for (const auto& v : variants) {
      if (!d.defective.count(v) || !d.defects.count(v)) throw PredictError(d.id() + " lacks label variant " + v);
      pass = pass && d.defective.at(v).size() >= config.min_defective;
    }
    if (pass) {
      kept.push_back(&d);
    } else {
      result.excluded.push_back(d.id());
    }
  }
  if (kept.size() < 2) {
    throw PredictError(kept.empty() ? "no release passes the filter" : "only one release passes the filter");
  }

  std::vector<std::vector<ModelOutcome>> per_release(kept.size());
  std::vector<std::exception_ptr> errors(kept.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < kept.size(); i = next++) {
      try {
        std::vector<const ReleaseData*> train;
        for (const ReleaseData* d : kept) {
          if (d->project != kept[i]->project) train.push_back(d);
        }
        if (train.empty()) throw PredictError("no training data from other projects for " + kept[i]->id());
        per_release[i] = evaluate_release(*kept[i], train, models);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, unsigned(kept.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t i = 0; i < kept.size(); ++i) {
    result.releases.push_back(kept[i]->id());
    for (auto& o : per_release[i]) result.outcomes.push_back(std::move(o));
  }
  for (const auto& m : models) {
    std::vector<double> lower, upper;
    std::size_t never = 0;
    for (const auto& o : result.outcomes) {
      if (o.model != m.name) continue;
      lower.push_back(o.bounds.lower);
      upper.push_back(o.bounds.upper);
      if (!o.bounds.can_save_costs()) ++never;
    }
    ModelSummary s;
    s.model = m.name;
    s.releases = lower.size();
    std::tie(s.lower_median, s.lower_mad) = robust_location(lower);
    std::tie(s.upper_median, s.upper_mad) = robust_location(upper);
    s.never_saves_share = double(never) / double(lower.size());
    result.summaries.push_back(s);
  }
  return result;
}

json ExperimentResult::to_json() const {
  json j;
  j["models"] = models;
  j["releases"] = releases;
  j["excluded"] = excluded;
  j["outcomes"] = json::array();
  for (const auto& o : outcomes) {
    j["outcomes"].push_back({{"model", o.model},
                             {"train_label", o.train_label},
                             {"test_label", o.test_label},
                             {"feature_set", o.feature_set},
                             {"release", o.release},
                             {"lower", number(o.bounds.lower)},
                             {"upper", number(o.bounds.upper)},
                             {"predicted_defects", o.bounds.predicted_defects},
                             {"missed_defects", o.bounds.missed_defects},
                             {"tp", o.metrics.tp},
                             {"fp", o.metrics.fp},
                             {"tn", o.metrics.tn},
                             {"fn", o.metrics.fn},
                             {"recall", optional_number(o.metrics.recall)},
                             {"precision", optional_number(o.metrics.precision)},
                             {"f_measure", optional_number(o.metrics.f_measure)}});
  }
  j["summaries"] = json::array();
  for (const auto& s : summaries) {
    j["summaries"].push_back({{"model", s.model},
                              {"releases", s.releases},
                              {"lower_median", number(s.lower_median)},
                              {"lower_mad", number(s.lower_mad)},
                              {"upper_median", number(s.upper_median)},
                              {"upper_mad", number(s.upper_mad)},
                              {"never_saves_share", s.never_saves_share}});
  }
  return j;
}

ExperimentResult ExperimentResult::from_json(const json& j) {
  ExperimentResult r;
  try {
    r.models = j.at("models").get<std::vector<std::string>>();
    r.releases = j.at("releases").get<std::vector<std::string>>();
    r.excluded = j.at("excluded").get<std::vector<std::string>>();
    for (const auto& o : j.at("outcomes")) {
      ModelOutcome m;
      m.model = o.at("model");
      m.train_label = o.at("train_label");
      m.test_label = o.at("test_label");
      m.feature_set = o.at("feature_set");
      m.release = o.at("release");
      m.bounds.lower = number_from(o.at("lower"));
      m.bounds.upper = number_from(o.at("upper"));
      m.bounds.predicted_defects = o.at("predicted_defects");
      m.bounds.missed_defects = o.at("missed_defects");
      m.metrics.tp = o.at("tp");
      m.metrics.fp = o.at("fp");
      m.metrics.tn = o.at("tn");
      m.metrics.fn = o.at("fn");
      m.metrics.recall = optional_from(o.at("recall"));
      m.metrics.precision = optional_from(o.at("precision"));
      m.metrics.f_measure = optional_from(o.at("f_measure"));
      r.outcomes.push_back(std::move(m));
    }
    for (const auto& s : j.at("summaries")) {
      ModelSummary m;
      m.model = s.at("model");
      m.releases = s.at("releases");
      m.lower_median = number_from(s.at("lower_median"));
      m.lower_mad = number_from(s.at("lower_mad"));
      m.upper_median = number_from(s.at("upper_median"));
      m.upper_mad = number_from(s.at("upper_mad"));
      m.never_saves_share = s.at("never_saves_share");
      r.summaries.push_back(std::move(m));
    }
  } catch (const json::exception& e) {
    throw PredictError(std::string("malformed results file: ") + e.what());
  }
  return r;
}

}  // namespace szzkit::predict
