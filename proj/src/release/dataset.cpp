#include "szzkit/release/dataset.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "szzkit/common/text.hpp"

namespace szzkit::release {

std::optional<double> FeatureTable::get(const std::string& path, std::size_t feature) const {
  auto it = rows.find(path);
  if (it == rows.end() || feature >= it->second.size()) return std::nullopt;
  return it->second[feature];
}

std::string MatrixColumn::name() const {
  return issue + "__" + (severity && !severity->empty() ? *severity : "unknown") + "__" +
         (last_fix ? format_iso8601(*last_fix) : "unknown");
}

IssueFileMatrix IssueFileMatrix::without_fixes_after(Timestamp cutoff) const {
  IssueFileMatrix out;
  out.files = files;
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].last_fix && *columns[c].last_fix > cutoff) continue;
    keep.push_back(c);
    out.columns.push_back(columns[c]);
  }
  for (const auto& row : cells) {
    std::vector<int> r;
    for (std::size_t c : keep) r.push_back(row[c]);
    out.cells.push_back(std::move(r));
  }
  return out;
}

std::vector<int> IssueFileMatrix::defect_counts() const {
  std::vector<int> out;
  for (const auto& row : cells) {
    int n = 0;
    for (int v : row) n += v;
    out.push_back(n);
  }
  return out;
}

std::string IssueFileMatrix::to_csv() const {
  std::string out = "file";
  for (const auto& c : columns) out += "," + csv_field(c.name());
  out += "\n";
  for (std::size_t r = 0; r < files.size(); ++r) {
    out += csv_field(files[r]);
    for (int v : cells[r]) out += v ? ",1" : ",0";
    out += "\n";
  }
  return out;
}

std::vector<std::string> production_files(const vcs::ChangeGraph& graph, const Release& release,
                                          const inducing::Filters& filters) {
  std::vector<std::string> out;
  for (const auto& [path, state] : graph.tree_at(release.release_commit)) {
    if (filters.is_production(path)) out.push_back(path);
  }
  return out;
}

IssueFileMatrix build_matrix(const std::vector<std::string>& files, const ReleaseAssignment& assignment,
                             const issues::IssueSet& issues, const std::map<std::string, Timestamp>& last_fix) {
  IssueFileMatrix m;
  m.files = files;
  for (const auto& bug : assignment.bugs) {
    MatrixColumn c;
    c.issue = bug;
    if (const issues::Issue* issue = issues.find(bug)) c.severity = issue->severity;
    if (auto it = last_fix.find(bug); it != last_fix.end()) c.last_fix = it->second;
    m.columns.push_back(std::move(c));
  }
  for (const auto& file : files) {
    std::vector<int> row(m.columns.size(), 0);
    if (auto it = assignment.defective_files.find(file); it != assignment.defective_files.end()) {
      for (std::size_t c = 0; c < m.columns.size(); ++c) row[c] = it->second.count(m.columns[c].issue) ? 1 : 0;
    }
    m.cells.push_back(std::move(row));
  }
  return m;
}

ReleaseDataset emit_dataset(const std::vector<std::string>& files, const std::vector<LabelVariant>& variants,
                            const FeatureTable* features, const std::map<std::string, double>* sizes) {
  ReleaseDataset out;
  std::string csv = "file";
  if (sizes != nullptr) csv += ",lloc";
  if (features != nullptr) {
    for (const auto& n : features->names) csv += "," + csv_field(n);
  }
  for (const auto& v : variants) csv += "," + csv_field(v.name);
  csv += "\n";
  std::vector<std::vector<int>> counts;
  for (const auto& v : variants) {
    if (v.matrix.files != files) throw std::invalid_argument("matrix rows of " + v.name + " differ from the file list");
    counts.push_back(v.matrix.defect_counts());
  }
  for (std::size_t r = 0; r < files.size(); ++r) {
    csv += csv_field(files[r]);
    if (sizes != nullptr) {
      auto it = sizes->find(files[r]);
      csv += it != sizes->end() ? fmt::format(",{}", it->second) : ",";
    }
    if (features != nullptr) {
      for (std::size_t f = 0; f < features->names.size(); ++f) {
        auto value = features->get(files[r], f);
        csv += value ? fmt::format(",{}", *value) : ",";
      }
    }
    for (const auto& c : counts) csv += "," + std::to_string(c[r]);
    csv += "\n";
  }
  out.dataset_csv = std::move(csv);
  for (const auto& v : variants) out.matrices.emplace(v.name, v.matrix.to_csv());
  return out;
}

void write_dataset(const std::filesystem::path& dir, const std::string& release_name, const ReleaseDataset& data) {
  write_file(dir / (release_name + ".csv"), data.dataset_csv);
  for (const auto& [variant, csv] : data.matrices) {
    write_file(dir / (release_name + "__" + variant + ".matrix.csv"), csv);
  }
}

}  // namespace szzkit::release
