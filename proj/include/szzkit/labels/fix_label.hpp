#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "szzkit/issues/issue.hpp"
#include "szzkit/links/links.hpp"
#include "szzkit/validation/store.hpp"

namespace szzkit::labels {

using vcs::CommitId;

enum class Strategy { SZZ, JL, JLM, JLMIV };

[[nodiscard]] std::string_view to_string(Strategy s);
[[nodiscard]] std::optional<Strategy> strategy_from_string(std::string_view s);  // case-insensitive
inline constexpr std::array kAllStrategies{Strategy::SZZ, Strategy::JL, Strategy::JLM, Strategy::JLMIV};

struct FixLabel {
  CommitId commit;
  Strategy strategy = Strategy::SZZ;
  std::set<std::string> fixing_for;  // issue keys

  bool operator==(const FixLabel&) const = default;
};

struct LabelResult {
  std::vector<FixLabel> labels;  // ordered by commit id
  // JLMIV only: issues with a validated link whose type is not finally labeled yet.
  std::vector<std::string> unvalidated_issues;

  [[nodiscard]] std::set<CommitId> commits() const;
  [[nodiscard]] const FixLabel* find(const CommitId& commit) const;
};

// A commit is fixing when one of its SZZ-linked bug issues passes at least
// two semantic checks, or exactly one check together with a fix keyword or
// unambiguous number syntax.
[[nodiscard]] LabelResult label_szz(const std::vector<links::LinkCandidate>& candidates,
                                    const issues::IssueSet& issues);

// JL uses every JL candidate, JLM only auto-validated or expert-confirmed
// ones, and JLMIV additionally needs the final validated label BUG. All
// require the tracker type Bug and the issue to have been closed or resolved
// at some point.
[[nodiscard]] LabelResult label_jl_family(const std::vector<links::LinkCandidate>& candidates,
                                          const issues::IssueSet& issues,
                                          const std::map<std::string, validation::IssueLabel>& type_labels,
                                          Strategy strategy);

struct FixTableRow {
  CommitId commit;
  std::string issue;
  std::map<Strategy, bool> flags;
};

// One row per linked (commit, issue) pair, including pairs that no strategy
// accepts, so rejected links remain auditable.
[[nodiscard]] std::vector<FixTableRow> fix_table(const std::vector<links::LinkCandidate>& szz_candidates,
                                                 const std::vector<links::LinkCandidate>& jl_candidates,
                                                 const std::map<Strategy, LabelResult>& results);
[[nodiscard]] std::string fix_table_csv(const std::vector<FixTableRow>& rows);

}  // namespace szzkit::labels
