#include "szzkit/predict/features.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "szzkit/common/text.hpp"

namespace szzkit::predict {
namespace {

struct History {
  double revisions = 0, added = 0, deleted = 0, fixes = 0;
  std::set<std::string> authors;
  std::optional<Timestamp> origin;
};

}  // namespace

release::FeatureTable churn_features(const vcs::ChangeGraph& graph, const release::Release& release,
                                     const std::vector<std::string>& files, const std::set<CommitId>& fixing_commits) {
  if (!graph.contains(release.release_commit)) throw FeatureError("release commit not in graph: " + release.release_commit);
  std::set<CommitId> reachable = graph.ancestors(release.release_commit);
  reachable.insert(release.release_commit);

  std::vector<History> hist(files.size());
  // commit -> path at that commit -> release files whose history reaches it
  std::unordered_map<CommitId, std::map<std::string, std::set<std::size_t>>> pending;
  for (std::size_t i = 0; i < files.size(); ++i) pending[release.release_commit][files[i]].insert(i);

  const auto& topo = graph.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    if (!reachable.count(*it)) continue;
    auto node = pending.find(*it);
    if (node == pending.end()) continue;
    const vcs::Commit& commit = graph.commit(*it);
    const auto& diffs = graph.diffs(*it);
    for (const auto& [path, owners] : node->second) {
      for (std::size_t p = 0; p < diffs.size(); ++p) {
        const vcs::FileAction* action = graph.find_action(*it, p, path);
        if (!commit.is_merge() && action != nullptr) {
          for (std::size_t f : owners) {
            History& h = hist[f];
            h.revisions += 1;
            for (const auto& hunk : action->hunks) {
              h.added += hunk.new_len;
              h.deleted += hunk.old_len;
            }
            h.authors.insert(to_lower(commit.author_email.empty() ? commit.author_name : commit.author_email));
            if (fixing_commits.count(*it)) h.fixes += 1;
          }
        }
        if (action != nullptr && action->kind == vcs::ActionKind::added) {
          // a merge "adds" files that came in through another parent
          if (commit.is_merge()) continue;
          for (std::size_t f : owners) {
            History& h = hist[f];
            if (!h.origin || commit.committer_date < *h.origin) h.origin = commit.committer_date;
          }
          continue;
        }
        if (diffs[p].parent.empty()) continue;
        const std::string& older = action != nullptr && action->path_old ? *action->path_old : path;
        auto& slot = pending[diffs[p].parent][older];
        slot.insert(owners.begin(), owners.end());
      }
    }
    pending.erase(node);
  }

  release::FeatureTable table;
  table.names = kChurnFeatures;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const History& h = hist[i];
    double age = 0;
    if (h.origin) age = std::max(0.0, std::floor(days_between(*h.origin, release.released_at)));
    table.rows[files[i]] = {h.revisions, h.added, h.deleted, double(h.authors.size()), h.fixes, age};
  }
  return table;
}

std::size_t logical_lines(std::string_view text, const inducing::LanguageProfile& profile) {
  std::size_t n = 0;
  for (const auto& line : inducing::strip_comments_by_line(text, profile)) {
    if (!trim(line).empty()) ++n;
  }
  return n;
}

std::map<std::string, double> file_sizes(const vcs::ChangeGraph& graph, const release::Release& release,
                                         const std::vector<std::string>& files, const vcs::BlobSource& blobs,
                                         const inducing::LanguageProfile& profile) {
  const vcs::Tree tree = graph.tree_at(release.release_commit);
  if (auto* git = dynamic_cast<const vcs::GitBlobSource*>(&blobs)) {
    std::vector<std::string> ids;
    for (const auto& f : files) {
      if (auto it = tree.find(f); it != tree.end()) ids.push_back(it->second.blob);
    }
    git->prefetch(ids);
  }
  std::map<std::string, double> sizes;
  for (const auto& f : files) {
    double size = 0;
    auto it = tree.find(f);
    if (it != tree.end() && it->second.line_count) {
      if (auto content = blobs.blob(it->second.blob)) size = double(logical_lines(*content, profile));
    }
    sizes[f] = size;
  }
  return sizes;
}

release::FeatureTable parse_metrics_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw FeatureError("metrics file is empty");
  const auto header = parse_csv_line(lines.front());
  if (header.empty() || trim(header.front()) != "file") throw FeatureError("metrics header must start with 'file'");
  release::FeatureTable table;
  table.names.assign(header.begin() + 1, header.end());
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    const auto cells = parse_csv_line(lines[n]);
    if (cells.size() != header.size()) {
      throw FeatureError("metrics line " + std::to_string(n + 1) + ": expected " + std::to_string(header.size()) +
                         " cells");
    }
    std::vector<std::optional<double>> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const std::string cell{trim(cells[c])};
      if (cell.empty()) {
        row.emplace_back();
        continue;
      }
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cell.size() || !std::isfinite(v)) {
        throw FeatureError("metrics line " + std::to_string(n + 1) + ": not a number: " + cell);
      }
      row.push_back(v);
    }
    if (!table.rows.emplace(cells.front(), std::move(row)).second) {
      throw FeatureError("metrics line " + std::to_string(n + 1) + ": duplicate file " + cells.front());
    }
  }
  return table;
}

release::FeatureTable merge_features(const release::FeatureTable& a, const release::FeatureTable& b) {
  release::FeatureTable out;
  out.names = a.names;
  for (const auto& n : b.names) {
    if (std::find(a.names.begin(), a.names.end(), n) != a.names.end()) throw FeatureError("duplicate feature " + n);
    out.names.push_back(n);
  }
  std::set<std::string> paths;
  for (const auto& [p, r] : a.rows) paths.insert(p);
  for (const auto& [p, r] : b.rows) paths.insert(p);
  for (const auto& p : paths) {
    auto& row = out.rows[p];
    for (std::size_t i = 0; i < a.names.size(); ++i) row.push_back(a.get(p, i));
    for (std::size_t i = 0; i < b.names.size(); ++i) row.push_back(b.get(p, i));
  }
  return out;
}

}  // namespace szzkit::predict
