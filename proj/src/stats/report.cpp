#include "szzkit/stats/report.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "szzkit/common/text.hpp"

namespace szzkit::stats {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.4f}", v);
}

nlohmann::json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string agreement_table(std::string_view title, const std::vector<NamedSummary>& rows) {
  std::size_t w = 8;
  for (const auto& [name, s] : rows) w = std::max(w, name.size());
  std::string out = fmt::format("{}\n{:<{}}  {:>8}  {:>8}  {:>8}  {:>8}  {:>8}  {:>8}\n", title, "strategy", w,
                                "projects", "excluded", "tp_med", "tp_mad", "add_med", "add_mad");
  for (const auto& [name, s] : rows) {
    out += fmt::format("{:<{}}  {:>8}  {:>8}  {:>8}  {:>8}  {:>8}  {:>8}\n", name, w, s.projects, s.excluded,
                       format_number(s.tp_median), format_number(s.tp_mad), format_number(s.additional_median),
                       format_number(s.additional_mad));
  }
  return out;
}

nlohmann::json to_json(const AgreementSummary& s) {
  return {{"projects", s.projects},
          {"excluded", s.excluded},
          {"tp_median", s.tp_median},
          {"tp_mad", s.tp_mad},
          {"additional_median", s.additional_median},
          {"additional_mad", s.additional_mad}};
}

std::string rank_test_table(std::string_view title, const RankTestResult& r) {
  std::size_t w = 9;
  for (const auto& t : r.treatments) w = std::max(w, t.size());
  std::string out = fmt::format("{}\nFriedman chi2={} df={} p={}  Nemenyi CD={} (alpha={})\n", title,
                                format_number(r.friedman.statistic), r.friedman.df,
                                fmt::format("{:.3g}", r.friedman.p_value), format_number(r.critical_distance), r.alpha);
  out += fmt::format("{:<{}}  {:>9}\n", "treatment", w, "mean_rank");
  for (std::size_t i = 0; i < r.treatments.size(); ++i) {
    out += fmt::format("{:<{}}  {:>9}\n", r.treatments[i], w, format_number(r.friedman.mean_ranks[i]));
  }
  out += fmt::format("{:<{}}  {:<{}}  {:>9}  {:>11}  {:>7}  {}\n", "a", w, "b", w, "rank_diff", "significant",
                     "delta", "magnitude");
  for (const auto& p : r.pairs) {
    out += fmt::format("{:<{}}  {:<{}}  {:>9}  {:>11}  {:>7}  {}\n", p.a, w, p.b, w, format_number(p.rank_difference),
                       p.significant ? "yes" : "no", fmt::format("{:.3f}", p.effect.delta),
                       to_string(p.effect.magnitude));
  }
  return out;
}

nlohmann::json to_json(const RankTestResult& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"a", p.a},
                     {"b", p.b},
                     {"rank_difference", p.rank_difference},
                     {"significant", p.significant},
                     {"cliffs_delta", p.effect.delta},
                     {"magnitude", to_string(p.effect.magnitude)}});
  }
  return {{"treatments", r.treatments},
          {"friedman", {{"statistic", r.friedman.statistic}, {"df", r.friedman.df}, {"p_value", r.friedman.p_value}}},
          {"mean_ranks", r.friedman.mean_ranks},
          {"alpha", r.alpha},
          {"critical_distance", r.critical_distance},
          {"pairs", pairs}};
}

std::string quartiles_csv(const std::vector<std::pair<std::string, std::vector<double>>>& groups) {
  std::string out = "group,n,min,q1,median,q3,max\n";
  for (const auto& [name, values] : groups) {
    if (values.empty()) continue;
    const Quartiles q = quartiles(values);
    out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(name), values.size(), format_number(q.min),
                       format_number(q.q1), format_number(q.median), format_number(q.q3), format_number(q.max));
  }
  return out;
}

}  // namespace szzkit::stats
