#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "szzkit/release/dataset.hpp"

namespace szzkit::predict {

using vcs::CommitId;

inline const std::vector<std::string> kChurnFeatures{"revisions", "lines_added", "lines_deleted",
                                                     "authors",   "prior_fixes", "age_days"};

class FeatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// History of every file in `files` (paths at the release commit), walking
// back from the release through renames until the file was last added.
// Merge commits do not count as revisions. Age is measured from the
// earliest addition reached to the release date.
[[nodiscard]] release::FeatureTable churn_features(const vcs::ChangeGraph& graph, const release::Release& release,
                                                   const std::vector<std::string>& files,
                                                   const std::set<CommitId>& fixing_commits);

// Non-blank lines once comments are removed.
[[nodiscard]] std::size_t logical_lines(std::string_view text, const inducing::LanguageProfile& profile);

// Logical size of every file at the release commit; binary or unreadable
// files count as 0.
[[nodiscard]] std::map<std::string, double> file_sizes(const vcs::ChangeGraph& graph, const release::Release& release,
                                                       const std::vector<std::string>& files,
                                                       const vcs::BlobSource& blobs,
                                                       const inducing::LanguageProfile& profile);

// "file,<metric>,..." with a header. Empty cells are missing values.
[[nodiscard]] release::FeatureTable parse_metrics_csv(std::string_view text);

// Column union; rows are keyed by path and missing cells stay missing.
[[nodiscard]] release::FeatureTable merge_features(const release::FeatureTable& a, const release::FeatureTable& b);

}  // namespace szzkit::predict
