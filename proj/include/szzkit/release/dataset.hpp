#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "szzkit/release/release.hpp"

namespace szzkit::release {

// Named numeric features per file; absent values stay absent.
struct FeatureTable {
  std::vector<std::string> names;
  std::map<std::string, std::vector<std::optional<double>>> rows;  // path -> values aligned with names

  [[nodiscard]] std::optional<double> get(const std::string& path, std::size_t feature) const;
};

struct MatrixColumn {
  std::string issue;
  std::optional<std::string> severity;
  std::optional<Timestamp> last_fix;

  // "<issuekey>__<severity>__<lastfixdate>"; "unknown" for missing parts.
  [[nodiscard]] std::string name() const;
};

// Rows are the release's files, columns the assigned issues.
struct IssueFileMatrix {
  std::vector<std::string> files;
  std::vector<MatrixColumn> columns;
  std::vector<std::vector<int>> cells;  // [file][column] in {0, 1}

  // Drops issues whose last fix lies after `cutoff`, e.g. to avoid leaking
  // information that was not available at training time.
  [[nodiscard]] IssueFileMatrix without_fixes_after(Timestamp cutoff) const;
  [[nodiscard]] std::vector<int> defect_counts() const;
  [[nodiscard]] std::string to_csv() const;
};

// Production source files in the tree of the release commit, sorted.
[[nodiscard]] std::vector<std::string> production_files(const vcs::ChangeGraph& graph, const Release& release,
                                                        const inducing::Filters& filters);

[[nodiscard]] IssueFileMatrix build_matrix(const std::vector<std::string>& files, const ReleaseAssignment& assignment,
                                           const issues::IssueSet& issues,
                                           const std::map<std::string, Timestamp>& last_fix);

struct LabelVariant {
  std::string name;  // e.g. "6m-szz", "ind-jlmivr"
  IssueFileMatrix matrix;
};

struct ReleaseDataset {
  std::string dataset_csv;  // file[, lloc], features..., one defect-count column per variant
  std::map<std::string, std::string> matrices;  // variant -> matrix csv
};

[[nodiscard]] ReleaseDataset emit_dataset(const std::vector<std::string>& files,
                                          const std::vector<LabelVariant>& variants,
                                          const FeatureTable* features = nullptr,
                                          const std::map<std::string, double>* sizes = nullptr);

// Writes "<release>.csv" and "<release>__<variant>.matrix.csv" into `dir`.
void write_dataset(const std::filesystem::path& dir, const std::string& release_name, const ReleaseDataset& data);

}  // namespace szzkit::release
