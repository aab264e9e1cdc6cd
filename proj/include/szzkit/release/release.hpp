#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "szzkit/inducing/inducing.hpp"
#include "szzkit/issues/issue.hpp"
#include "szzkit/labels/fix_label.hpp"

namespace szzkit::release {

using vcs::CommitId;

struct Release {
  std::string name;
  CommitId release_commit;
  Timestamp released_at;  // committer date of the release commit unless given explicitly
};

struct VersionRelease {
  std::string name;
  std::optional<Timestamp> released_at;
  std::optional<CommitId> release_commit;
};

class ReleaseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReleaseTable {
  std::vector<VersionRelease> versions;  // in file order
  // Versions with a release commit, ordered by release date then name.
  [[nodiscard]] std::vector<Release> releases(const vcs::ChangeGraph& graph) const;
  [[nodiscard]] std::map<std::string, std::optional<Timestamp>> version_dates(const vcs::ChangeGraph& graph) const;
  [[nodiscard]] const VersionRelease* find(const std::string& name) const;
};

// Lines "name,commit[,released_at]" with an optional header "name,commit,...".
// The commit may be empty for versions that only have a date (or nothing,
// e.g. unreleased work in progress). Commits must exist in the graph.
[[nodiscard]] ReleaseTable parse_release_table(std::string_view text, const vcs::ChangeGraph& graph);

struct UnresolvedVersion {
  std::string issue;
  std::string version;
  bool operator==(const UnresolvedVersion&) const = default;
};

// Affected versions that name no entry of the table with a release date.
[[nodiscard]] std::vector<UnresolvedVersion> unresolved_affected_versions(const issues::IssueSet& issues,
                                                                          const ReleaseTable& table,
                                                                          const vcs::ChangeGraph& graph);

enum class AssignStrategy { SixM, AV, IND };
enum class SixMVariant { reported, fixed };
[[nodiscard]] std::string_view to_string(AssignStrategy s);

inline constexpr std::int64_t kSixMonthsDays = 182;

struct ReleaseAssignment {
  Release release;
  AssignStrategy strategy = AssignStrategy::SixM;
  std::set<std::string> bugs;
  std::map<std::string, std::set<std::string>> defective_files;  // release-time path -> issues
  // Assigned bugs whose files could not be mapped to the release tree.
  std::map<std::string, std::set<std::string>> unmapped;  // issue -> original paths
  std::vector<UnresolvedVersion> unresolved;              // AV only
  std::set<std::string> audit;                            // IND only: bugs with suspects only
};

struct AssignInputs {
  const vcs::ChangeGraph& graph;
  const issues::IssueSet& issues;
  const inducing::Filters& filters;
  const vcs::BlobSource* blobs = nullptr;
};

[[nodiscard]] ReleaseAssignment assign_6m(const Release& release, const std::vector<labels::FixLabel>& fixes,
                                          const AssignInputs& in, SixMVariant variant = SixMVariant::fixed);
[[nodiscard]] ReleaseAssignment assign_av(const Release& release, const std::vector<labels::FixLabel>& fixes,
                                          const AssignInputs& in, const ReleaseTable& table);
[[nodiscard]] ReleaseAssignment assign_ind(const Release& release, const inducing::InducingResult& inducing,
                                           const std::vector<labels::FixLabel>& fixes, const AssignInputs& in);

// Latest committer date among the fixing commits of each issue.
[[nodiscard]] std::map<std::string, Timestamp> last_fix_dates(const std::vector<labels::FixLabel>& fixes,
                                                              const vcs::ChangeGraph& graph);

}  // namespace szzkit::release
