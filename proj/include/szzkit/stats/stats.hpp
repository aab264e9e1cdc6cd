#pragma once

#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace szzkit::stats {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kMadScale = 1.4826;

class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Median; the mean of the central pair for even sizes.
[[nodiscard]] double median(std::vector<double> sample);
// kMadScale * median(|x_i - median(X)|)
[[nodiscard]] double mad(const std::vector<double>& sample);

struct Quartiles {
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};
// Linear interpolation between order statistics (the default of R and numpy).
[[nodiscard]] Quartiles quartiles(std::vector<double> sample);

struct Agreement {
  std::size_t baseline_size = 0;
  double true_positive_rate = 0;  // |A ∩ B| / |B|
  double additional_rate = 0;     // |A \ B| / |B|
};

// nullopt when the baseline is empty.
[[nodiscard]] std::optional<Agreement> agreement(const std::set<std::string>& candidate,
                                                 const std::set<std::string>& baseline);

struct AgreementSummary {
  std::size_t projects = 0;
  std::size_t excluded = 0;  // undefined entries
  double tp_median = 0, tp_mad = 0;
  double additional_median = 0, additional_mad = 0;
};
// Undefined entries are excluded and counted; throws when nothing is defined.
[[nodiscard]] AgreementSummary summarize(const std::vector<std::optional<Agreement>>& per_project);

struct CostBounds {
  double lower = 0;
  double upper = 0;
  std::size_t predicted_defects = 0;
  std::size_t missed_defects = 0;

  [[nodiscard]] bool can_save_costs() const { return lower < upper; }
};

// A defect is the set of files it affects. lower = size of predicted files /
// |D_PRED|, upper = size of files not predicted / |D_MISS|. When |D_PRED| = 0
// the lower bound is 0 for an empty prediction and infinite otherwise; when
// |D_MISS| = 0 the upper bound is infinite.
[[nodiscard]] CostBounds cost_bounds(const std::map<std::string, bool>& predictions,
                                     const std::map<std::string, double>& sizes,
                                     const std::vector<std::set<std::string>>& defects);

struct ClassificationMetrics {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::optional<double> recall, precision, f_measure;  // nullopt when undefined
};
[[nodiscard]] ClassificationMetrics classification_metrics(const std::vector<bool>& predictions,
                                                           const std::vector<bool>& labels);

// Mid-ranks within one row; rank 1 is the smallest value, infinities rank last.
[[nodiscard]] std::vector<double> rank_row(const std::vector<double>& row, bool descending = false);

struct FriedmanResult {
  double statistic = 0;  // chi-squared with tie correction
  std::size_t df = 0;
  double p_value = 1;
  std::vector<double> mean_ranks;
};

// Rows are datasets, columns treatments. Infinite values are allowed. With
// `descending`, larger values get better (smaller) ranks.
[[nodiscard]] FriedmanResult friedman(const std::vector<std::vector<double>>& matrix, bool descending = false);

// Exact p-value by enumerating within-row rank permutations; limited to
// N * k <= 12.
[[nodiscard]] double friedman_exact_p(const std::vector<std::vector<double>>& matrix);

// Critical values of the Nemenyi test (studentized range / sqrt 2, infinite
// degrees of freedom) for k = 2..10 and alpha in {0.05, 0.10}.
[[nodiscard]] double nemenyi_q(std::size_t k, double alpha);
[[nodiscard]] double nemenyi_critical_distance(std::size_t k, std::size_t n, double alpha);

enum class Magnitude { negligible, small, medium, large };
[[nodiscard]] std::string_view to_string(Magnitude m);
[[nodiscard]] Magnitude delta_magnitude(double delta);

struct CliffsDelta {
  double delta = 0;
  Magnitude magnitude = Magnitude::negligible;
};
[[nodiscard]] CliffsDelta cliffs_delta(const std::vector<double>& x, const std::vector<double>& y);

struct RankTestResult {
  std::vector<std::string> treatments;
  FriedmanResult friedman;
  double alpha = 0.05;
  double critical_distance = 0;
  struct Pair {
    std::string a, b;
    double rank_difference = 0;
    bool significant = false;
    CliffsDelta effect;
  };
  std::vector<Pair> pairs;
};

// Friedman test, Nemenyi critical distance and Cliff's delta for every pair.
[[nodiscard]] RankTestResult friedman_nemenyi(const std::vector<std::string>& treatments,
                                              const std::vector<std::vector<double>>& matrix, double alpha = 0.05,
                                              bool descending = false);

}  // namespace szzkit::stats
