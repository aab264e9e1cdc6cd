#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "szzkit/stats/stats.hpp"

namespace szzkit::stats {

// Fixed notation with four decimals; "inf" for infinity.
[[nodiscard]] std::string format_number(double v);
// JSON number, or the string "inf"/"-inf".
[[nodiscard]] nlohmann::json json_number(double v);

using NamedSummary = std::pair<std::string, AgreementSummary>;

[[nodiscard]] std::string agreement_table(std::string_view title, const std::vector<NamedSummary>& rows);
[[nodiscard]] nlohmann::json to_json(const AgreementSummary& s);

[[nodiscard]] std::string rank_test_table(std::string_view title, const RankTestResult& r);
[[nodiscard]] nlohmann::json to_json(const RankTestResult& r);

// Box plot data: "group,n,min,q1,median,q3,max". Empty groups are skipped.
[[nodiscard]] std::string quartiles_csv(const std::vector<std::pair<std::string, std::vector<double>>>& groups);

}  // namespace szzkit::stats
