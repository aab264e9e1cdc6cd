#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "szzkit/common/time.hpp"

namespace szzkit::vcs {

using CommitId = std::string;  // 40-hex revision hash

struct Commit {
  CommitId id;
  std::vector<CommitId> parents;  // ordered, first parent first
  Timestamp author_date;
  Timestamp committer_date;
  std::string author_name;
  std::string author_email;
  std::string message;
  std::set<std::string> branch_reachability;  // head names reaching this commit

  [[nodiscard]] bool is_merge() const { return parents.size() > 1; }
};

struct Hunk {
  int old_start = 0;  // 1-based; for an empty range, the line after which the change applies
  int old_len = 0;
  int new_start = 0;
  int new_len = 0;
  std::vector<std::string> old_lines;
  std::vector<std::string> new_lines;
  // Set on merge diffs: every new-side line is unchanged relative to another
  // parent, so the change was made on a branch and is already attributed there.
  bool merge_duplicate = false;
};

enum class ActionKind { added, modified, deleted, renamed };

[[nodiscard]] std::string_view to_string(ActionKind kind);
[[nodiscard]] ActionKind action_kind_from_string(std::string_view s);

struct FileAction {
  CommitId commit;
  CommitId parent;  // empty for root commits
  std::optional<std::string> path_old;
  std::optional<std::string> path_new;
  ActionKind kind = ActionKind::modified;
  bool binary = false;
  std::string blob_old;  // full object ids; empty when absent
  std::string blob_new;
  std::vector<Hunk> hunks;

  // path_new, or path_old for deletions.
  [[nodiscard]] const std::string& path() const { return path_new ? *path_new : *path_old; }
  [[nodiscard]] int line_delta() const;
};

// Diff of a commit against one of its parents.
struct ParentDiff {
  CommitId parent;
  std::vector<FileAction> actions;
};

struct FileState {
  std::string blob;
  std::optional<int> line_count;  // absent for binary files
};

using Tree = std::map<std::string, FileState>;

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Immutable commit DAG with per-parent file actions. Safe to query concurrently.
class ChangeGraph {
 public:
  ChangeGraph() = default;
  ChangeGraph(std::vector<Commit> commits, std::map<CommitId, std::vector<ParentDiff>> diffs,
              std::map<std::string, CommitId> release_tags, std::map<std::string, CommitId> heads,
              std::filesystem::path repo_path = {});

  [[nodiscard]] std::size_t size() const { return commits_.size(); }
  [[nodiscard]] bool contains(const CommitId& id) const { return index_.count(id) > 0; }
  [[nodiscard]] const Commit& commit(const CommitId& id) const;

  // Parents before children; ties broken by committer date then id.
  [[nodiscard]] const std::vector<CommitId>& topological_order() const { return topo_; }
  [[nodiscard]] const std::vector<Commit>& commits() const { return commits_; }
  [[nodiscard]] const std::vector<CommitId>& children(const CommitId& id) const;

  // One entry per parent (a single entry with an empty parent id for root commits).
  [[nodiscard]] const std::vector<ParentDiff>& diffs(const CommitId& id) const;
  // Actions against the first parent (or the root diff).
  [[nodiscard]] const std::vector<FileAction>& actions(const CommitId& id) const;
  [[nodiscard]] const FileAction* find_action(const CommitId& id, std::size_t parent_index,
                                              const std::string& path_new) const;

  [[nodiscard]] const std::map<std::string, CommitId>& release_tags() const { return tags_; }
  [[nodiscard]] const std::map<std::string, CommitId>& heads() const { return heads_; }
  [[nodiscard]] const std::filesystem::path& repo_path() const { return repo_path_; }

  // Transitive closure over parents, excluding the commit itself.
  [[nodiscard]] std::set<CommitId> ancestors(const CommitId& id) const;
  [[nodiscard]] bool is_ancestor(const CommitId& ancestor, const CommitId& descendant) const;

  // File tree at a commit, reconstructed by replaying first-parent diffs.
  [[nodiscard]] Tree tree_at(const CommitId& id) const;

  // Sequence of commits from `descendant` down to `ancestor` (both inclusive),
  // each element a parent of the previous one; empty if not an ancestor.
  [[nodiscard]] std::vector<CommitId> path_between(const CommitId& ancestor, const CommitId& descendant) const;

  // Follows renames along the commit path between two commits in either
  // direction. Returns the path of the same file at `to`, or nullopt when the
  // file does not exist there.
  [[nodiscard]] std::optional<std::string> map_path(const CommitId& from, const std::string& path,
                                                    const CommitId& to) const;

 private:
  struct DiffIndex {
    std::vector<std::unordered_map<std::string, std::size_t>> by_path_new;  // per parent
  };

  std::vector<Commit> commits_;
  std::unordered_map<CommitId, std::size_t> index_;
  std::map<CommitId, std::vector<ParentDiff>> diffs_;
  std::unordered_map<CommitId, DiffIndex> diff_index_;
  std::unordered_map<CommitId, std::vector<CommitId>> children_;
  std::vector<CommitId> topo_;
  std::map<std::string, CommitId> tags_;
  std::map<std::string, CommitId> heads_;
  std::filesystem::path repo_path_;
};

// Maps a line number on the new side of a diff to the old side. Returns
// nullopt when the line was introduced or modified by the diff.
[[nodiscard]] std::optional<int> map_new_to_old(const std::vector<Hunk>& hunks, int new_line);
// The reverse: nullopt when the old line was removed or modified.
[[nodiscard]] std::optional<int> map_old_to_new(const std::vector<Hunk>& hunks, int old_line);

}  // namespace szzkit::vcs
