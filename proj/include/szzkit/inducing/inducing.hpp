#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "szzkit/inducing/filters.hpp"
#include "szzkit/issues/issue.hpp"
#include "szzkit/labels/fix_label.hpp"

namespace szzkit::inducing {

using vcs::CommitId;

enum class InducingStrategy { SZZ, JLMIV, JLMIV_R, JLMIV_RAV, JL_R };
enum class Classification { inducing_before_boundary, weak_suspect, partial_fix_suspect, hard_suspect };

[[nodiscard]] std::string_view to_string(InducingStrategy s);
[[nodiscard]] std::optional<InducingStrategy> inducing_strategy_from_string(std::string_view s);
[[nodiscard]] std::string_view to_string(Classification c);
[[nodiscard]] bool uses_filters(InducingStrategy s);

struct InducingChange {
  CommitId fixing_commit;
  std::string issue;
  std::string path;  // old-side path of the fixing action
  CommitId inducing_commit;
  std::set<int> lines;  // old-side lines attributed to the inducing commit
  Classification classification = Classification::hard_suspect;
  Timestamp boundary_used;
  InducingStrategy strategy = InducingStrategy::SZZ;
  // Audit trail for suspects kept as inducing: the issue the candidate commit
  // fixes (partial fix) or is inducing for (weak suspect).
  std::string related_issue;

  [[nodiscard]] bool is_suspect() const { return classification != Classification::inducing_before_boundary; }
  [[nodiscard]] bool is_hard_suspect() const { return classification == Classification::hard_suspect; }
};

struct InducingResult {
  std::vector<InducingChange> changes;  // deterministic order
  std::vector<std::string> notices;     // skipped merges, missing release dates, ...

  // Inducing changes that survive downstream (everything but hard suspects).
  [[nodiscard]] std::vector<const InducingChange*> kept() const;
};

struct InducingInputs {
  const vcs::ChangeGraph& graph;
  const issues::IssueSet& issues;
  const Filters& filters;
  // Released dates by version name, for the affected-versions boundary.
  const std::map<std::string, std::optional<Timestamp>>* version_dates = nullptr;
  const vcs::BlobSource* blobs = nullptr;
};

// Blames the old-side lines of every eligible fixing action and classifies
// each candidate against the strategy's boundary. `fixes` is the fix-label
// set the strategy is built on; it also decides which candidates are partial
// fixes.
[[nodiscard]] InducingResult find_inducing(const std::vector<labels::FixLabel>& fixes, const InducingInputs& in,
                                           InducingStrategy strategy);

// Boundary for one issue: the report date, or for JLMIV_RAV the earlier of
// the report date and the first release date among its affected versions.
[[nodiscard]] Timestamp suspect_boundary(const issues::Issue& issue, InducingStrategy strategy,
                                         const std::map<std::string, std::optional<Timestamp>>* version_dates,
                                         std::vector<std::string>* notices = nullptr);

[[nodiscard]] std::string inducing_table_csv(const InducingResult& result);

}  // namespace szzkit::inducing
