#include "szzkit/stats/stats.hpp"

#include <algorithm>
#include <array>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

namespace szzkit::stats {

namespace {

void require_non_empty(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw StatsError(std::string(what) + ": empty sample");
}

// Demšar (2006), Table 5(a) and 5(b).
constexpr std::array<double, 9> kQ05{1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164};
constexpr std::array<double, 9> kQ10{1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920};

void check_matrix(const std::vector<std::vector<double>>& m) {
  if (m.size() < 2) throw StatsError("friedman: need at least two datasets");
  const std::size_t k = m.front().size();
  if (k < 2) throw StatsError("friedman: need at least two treatments");
  for (const auto& row : m) {
    if (row.size() != k) throw StatsError("friedman: rows differ in length");
    for (double v : row) {
      if (std::isnan(v)) throw StatsError("friedman: NaN in input");
    }
  }
}

double tie_term(const std::vector<double>& ranks) {
  // Σ (t^3 - t) over groups of equal mid-ranks
  std::map<double, int> groups;
  for (double r : ranks) ++groups[r];
  double sum = 0;
  for (const auto& [r, t] : groups) sum += double(t) * t * t - t;
  return sum;
}

double friedman_statistic(const std::vector<std::vector<double>>& ranks, double tie_sum) {
  const double n = double(ranks.size());
  const double k = double(ranks.front().size());
  std::vector<double> sums(ranks.front().size(), 0.0);
  for (const auto& row : ranks) {
    for (std::size_t j = 0; j < row.size(); ++j) sums[j] += row[j];
  }
  double ss = 0;
  for (double s : sums) ss += s * s;
  const double correction = 1.0 - tie_sum / (n * k * (k * k - 1.0));
  if (correction <= 1e-12) return 0.0;
  const double stat = (12.0 / (n * k * (k + 1.0)) * ss - 3.0 * n * (k + 1.0)) / correction;
  return std::max(0.0, stat);
}

}  // namespace

double median(std::vector<double> sample) {
  require_non_empty(sample, "median");
  std::sort(sample.begin(), sample.end());
  const std::size_t n = sample.size();
  return n % 2 == 1 ? sample[n / 2] : (sample[n / 2 - 1] + sample[n / 2]) / 2.0;
}

double mad(const std::vector<double>& sample) {
  require_non_empty(sample, "mad");
  const double m = median(sample);
  std::vector<double> dev;
  dev.reserve(sample.size());
  for (double x : sample) dev.push_back(std::fabs(x - m));
  return kMadScale * median(std::move(dev));
}

Quartiles quartiles(std::vector<double> sample) {
  require_non_empty(sample, "quartiles");
  std::sort(sample.begin(), sample.end());
  const auto at = [&](double p) {
    const double pos = p * double(sample.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sample.size() - 1);
    const double frac = pos - double(lo);
    return frac == 0.0 || sample[lo] == sample[hi] ? sample[lo] : sample[lo] + frac * (sample[hi] - sample[lo]);
  };
  return Quartiles{sample.front(), at(0.25), at(0.5), at(0.75), sample.back()};
}

std::optional<Agreement> agreement(const std::set<std::string>& candidate, const std::set<std::string>& baseline) {
  if (baseline.empty()) return std::nullopt;
  std::size_t both = 0, extra = 0;
  for (const auto& a : candidate) {
    if (baseline.count(a)) {
      ++both;
    } else {
      ++extra;
    }
  }
  const double n = double(baseline.size());
  return Agreement{baseline.size(), double(both) / n, double(extra) / n};
}

AgreementSummary summarize(const std::vector<std::optional<Agreement>>& per_project) {
  AgreementSummary s;
  std::vector<double> tp, add;
  for (const auto& a : per_project) {
    if (!a) {
      ++s.excluded;
      continue;
    }
    tp.push_back(a->true_positive_rate);
    add.push_back(a->additional_rate);
  }
  if (tp.empty()) throw StatsError("summarize: no project has a defined agreement");
  s.projects = tp.size();
  s.tp_median = median(tp);
  s.tp_mad = mad(tp);
  s.additional_median = median(add);
  s.additional_mad = mad(add);
  return s;
}

CostBounds cost_bounds(const std::map<std::string, bool>& predictions, const std::map<std::string, double>& sizes,
                       const std::vector<std::set<std::string>>& defects) {
  const auto predicted = [&](const std::string& file) {
    auto it = predictions.find(file);
    if (it == predictions.end()) throw StatsError("cost_bounds: no prediction for " + file);
    return it->second;
  };
  double size_pred = 0, size_rest = 0;
  bool any_predicted = false;
  for (const auto& [file, p] : predictions) {
    auto s = sizes.find(file);
    if (s == sizes.end()) throw StatsError("cost_bounds: no size for " + file);
    if (p) {
      size_pred += s->second;
      any_predicted = true;
    } else {
      size_rest += s->second;
    }
  }
  CostBounds b;
  for (const auto& d : defects) {
    const bool all = std::all_of(d.begin(), d.end(), predicted);
    if (all) {
      ++b.predicted_defects;
    } else {
      ++b.missed_defects;
    }
  }
  if (b.predicted_defects == 0) {
    b.lower = any_predicted ? kInf : 0.0;
  } else {
    b.lower = size_pred / double(b.predicted_defects);
  }
  b.upper = b.missed_defects == 0 ? kInf : size_rest / double(b.missed_defects);
  return b;
}

ClassificationMetrics classification_metrics(const std::vector<bool>& predictions, const std::vector<bool>& labels) {
  if (predictions.size() != labels.size()) throw StatsError("classification_metrics: size mismatch");
  ClassificationMetrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] && labels[i]) ++m.tp;
    if (predictions[i] && !labels[i]) ++m.fp;
    if (!predictions[i] && labels[i]) ++m.fn;
    if (!predictions[i] && !labels[i]) ++m.tn;
  }
  if (m.tp + m.fn > 0) m.recall = double(m.tp) / double(m.tp + m.fn);
  if (m.tp + m.fp > 0) m.precision = double(m.tp) / double(m.tp + m.fp);
  if (m.recall && m.precision && *m.recall + *m.precision > 0) {
    m.f_measure = 2.0 * *m.recall * *m.precision / (*m.recall + *m.precision);
  }
  return m;
}

std::vector<double> rank_row(const std::vector<double>& row, bool descending) {
  std::vector<std::size_t> idx(row.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return descending ? row[a] > row[b] : row[a] < row[b];
  });
  std::vector<double> ranks(row.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && row[idx[j + 1]] == row[idx[i]]) ++j;
    const double mid = (double(i) + double(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = mid;
    i = j + 1;
  }
  return ranks;
}

FriedmanResult friedman(const std::vector<std::vector<double>>& matrix, bool descending) {
  check_matrix(matrix);
  const std::size_t n = matrix.size(), k = matrix.front().size();
  std::vector<std::vector<double>> ranks;
  double ties = 0;
  for (const auto& row : matrix) {
    ranks.push_back(rank_row(row, descending));
    ties += tie_term(ranks.back());
  }
  FriedmanResult r;
  r.df = k - 1;
  r.statistic = friedman_statistic(ranks, ties);
  r.mean_ranks.assign(k, 0.0);
  for (const auto& row : ranks) {
    for (std::size_t j = 0; j < k; ++j) r.mean_ranks[j] += row[j] / double(n);
  }
  const boost::math::chi_squared dist(static_cast<double>(r.df));
  r.p_value = r.statistic <= 0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

double friedman_exact_p(const std::vector<std::vector<double>>& matrix) {
  check_matrix(matrix);
  const std::size_t n = matrix.size(), k = matrix.front().size();
  if (n * k > 12) throw StatsError("friedman_exact_p: limited to N * k <= 12");
  std::vector<std::vector<double>> ranks;
  double ties = 0;
  for (const auto& row : matrix) {
    ranks.push_back(rank_row(row));
    ties += tie_term(ranks.back());
  }
  const double observed = friedman_statistic(ranks, ties);

  // Relabeling treatments leaves the statistic unchanged, so the first row
  // can stay fixed; every other row runs through all k! orderings.
  std::vector<std::vector<std::size_t>> perms(n);
  for (auto& p : perms) {
    p.resize(k);
    std::iota(p.begin(), p.end(), 0);
  }
  std::vector<std::vector<double>> current = ranks;
  std::size_t total = 0, extreme = 0;
  for (;;) {
    for (std::size_t i = 1; i < n; ++i) {
      for (std::size_t j = 0; j < k; ++j) current[i][j] = ranks[i][perms[i][j]];
    }
    ++total;
    if (friedman_statistic(current, ties) >= observed - 1e-9) ++extreme;
    std::size_t row = 1;
    while (row < n && !std::next_permutation(perms[row].begin(), perms[row].end())) ++row;
    if (row >= n) break;
  }
  return double(extreme) / double(total);
}

double nemenyi_q(std::size_t k, double alpha) {
  if (k < 2 || k > 10) throw StatsError("nemenyi_q: k must be in 2..10");
  if (std::fabs(alpha - 0.05) < 1e-12) return kQ05[k - 2];
  if (std::fabs(alpha - 0.10) < 1e-12) return kQ10[k - 2];
  throw StatsError("nemenyi_q: alpha must be 0.05 or 0.10");
}

double nemenyi_critical_distance(std::size_t k, std::size_t n, double alpha) {
  if (n == 0) throw StatsError("nemenyi_critical_distance: no datasets");
  return nemenyi_q(k, alpha) * std::sqrt(double(k) * double(k + 1) / (6.0 * double(n)));
}

std::string_view to_string(Magnitude m) {
  switch (m) {
    case Magnitude::negligible: return "negligible";
    case Magnitude::small: return "small";
    case Magnitude::medium: return "medium";
    case Magnitude::large: return "large";
  }
  return "negligible";
}

Magnitude delta_magnitude(double delta) {
  const double d = std::fabs(delta);
  if (d < 0.147) return Magnitude::negligible;
  if (d < 0.33) return Magnitude::small;
  if (d < 0.474) return Magnitude::medium;
  return Magnitude::large;
}

CliffsDelta cliffs_delta(const std::vector<double>& x, const std::vector<double>& y) {
  require_non_empty(x, "cliffs_delta");
  require_non_empty(y, "cliffs_delta");
  // Count pairs through sorted y: for each x_i, #y below and #y above.
  std::vector<double> ys = y;
  std::sort(ys.begin(), ys.end());
  long long greater = 0, less = 0;
  for (double xi : x) {
    const auto lo = std::lower_bound(ys.begin(), ys.end(), xi);
    const auto hi = std::upper_bound(ys.begin(), ys.end(), xi);
    greater += lo - ys.begin();
    less += ys.end() - hi;
  }
  CliffsDelta r;
  r.delta = double(greater - less) / (double(x.size()) * double(y.size()));
  r.magnitude = delta_magnitude(r.delta);
  return r;
}

RankTestResult friedman_nemenyi(const std::vector<std::string>& treatments,
                                const std::vector<std::vector<double>>& matrix, double alpha, bool descending) {
  check_matrix(matrix);
  if (treatments.size() != matrix.front().size()) throw StatsError("friedman_nemenyi: treatment names mismatch");
  RankTestResult r;
  r.treatments = treatments;
  r.alpha = alpha;
  r.friedman = friedman(matrix, descending);
  const std::size_t k = treatments.size();
  r.critical_distance = nemenyi_critical_distance(k, matrix.size(), alpha);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      std::vector<double> xa, xb;
      for (const auto& row : matrix) {
        xa.push_back(row[a]);
        xb.push_back(row[b]);
      }
      RankTestResult::Pair p;
      p.a = treatments[a];
      p.b = treatments[b];
      p.rank_difference = r.friedman.mean_ranks[a] - r.friedman.mean_ranks[b];
      p.significant = std::fabs(p.rank_difference) >= r.critical_distance;
      p.effect = cliffs_delta(xa, xb);
      r.pairs.push_back(std::move(p));
    }
  }
  return r;
}

}  // namespace szzkit::stats
