#include "szzkit/vcs/change_graph.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <tuple>

namespace szzkit::vcs {

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::added: return "added";
    case ActionKind::modified: return "modified";
    case ActionKind::deleted: return "deleted";
    case ActionKind::renamed: return "renamed";
  }
  return "modified";
}

ActionKind action_kind_from_string(std::string_view s) {
  if (s == "added") return ActionKind::added;
  if (s == "modified") return ActionKind::modified;
  if (s == "deleted") return ActionKind::deleted;
  if (s == "renamed") return ActionKind::renamed;
  throw GraphError("unknown action kind: " + std::string(s));
}

int FileAction::line_delta() const {
  int delta = 0;
  for (const auto& h : hunks) delta += h.new_len - h.old_len;
  return delta;
}

ChangeGraph::ChangeGraph(std::vector<Commit> commits, std::map<CommitId, std::vector<ParentDiff>> diffs,
                         std::map<std::string, CommitId> release_tags, std::map<std::string, CommitId> heads,
                         std::filesystem::path repo_path)
    : commits_(std::move(commits)),
      diffs_(std::move(diffs)),
      tags_(std::move(release_tags)),
      heads_(std::move(heads)),
      repo_path_(std::move(repo_path)) {
  std::sort(commits_.begin(), commits_.end(), [](const Commit& a, const Commit& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < commits_.size(); ++i) {
    if (!index_.emplace(commits_[i].id, i).second) throw GraphError("duplicate commit " + commits_[i].id);
  }
  for (const auto& c : commits_) {
    children_[c.id];
    for (const auto& p : c.parents) {
      if (!contains(p)) throw GraphError("commit " + c.id + " references missing parent " + p);
      children_[p].push_back(c.id);
    }
  }
  for (auto& [id, kids] : children_) {
    std::sort(kids.begin(), kids.end());
    kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
  }

  for (const auto& [id, per_parent] : diffs_) {
    if (!contains(id)) throw GraphError("actions reference missing commit " + id);
    DiffIndex idx;
    for (const auto& pd : per_parent) {
      std::unordered_map<std::string, std::size_t> m;
      for (std::size_t i = 0; i < pd.actions.size(); ++i) {
        if (pd.actions[i].path_new) m.emplace(*pd.actions[i].path_new, i);
      }
      idx.by_path_new.push_back(std::move(m));
    }
    diff_index_.emplace(id, std::move(idx));
  }

  // Kahn's algorithm; ready commits are taken in (committer date, id) order.
  using Key = std::tuple<std::int64_t, CommitId>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  std::unordered_map<CommitId, std::size_t> pending;
  for (const auto& c : commits_) {
    pending[c.id] = c.parents.size();
    if (c.parents.empty()) ready.emplace(to_unix(c.committer_date), c.id);
  }
  while (!ready.empty()) {
    auto [date, id] = ready.top();
    ready.pop();
    topo_.push_back(id);
    for (const auto& child : children_.at(id)) {
      const auto& parents = commit(child).parents;
      const auto times = static_cast<std::size_t>(std::count(parents.begin(), parents.end(), id));
      auto& left = pending[child];
      left -= times;
      if (left == 0) ready.emplace(to_unix(commit(child).committer_date), child);
    }
  }
  if (topo_.size() != commits_.size()) throw GraphError("commit graph contains a cycle");
}

const Commit& ChangeGraph::commit(const CommitId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw GraphError("unknown commit " + id);
  return commits_[it->second];
}

const std::vector<CommitId>& ChangeGraph::children(const CommitId& id) const {
  auto it = children_.find(id);
  if (it == children_.end()) throw GraphError("unknown commit " + id);
  return it->second;
}

const std::vector<ParentDiff>& ChangeGraph::diffs(const CommitId& id) const {
  static const std::vector<ParentDiff> kEmpty;
  if (!contains(id)) throw GraphError("unknown commit " + id);
  auto it = diffs_.find(id);
  return it == diffs_.end() ? kEmpty : it->second;
}

const std::vector<FileAction>& ChangeGraph::actions(const CommitId& id) const {
  static const std::vector<FileAction> kEmpty;
  const auto& d = diffs(id);
  return d.empty() ? kEmpty : d.front().actions;
}

const FileAction* ChangeGraph::find_action(const CommitId& id, std::size_t parent_index,
                                           const std::string& path_new) const {
  auto it = diff_index_.find(id);
  if (it == diff_index_.end() || parent_index >= it->second.by_path_new.size()) return nullptr;
  const auto& m = it->second.by_path_new[parent_index];
  auto hit = m.find(path_new);
  if (hit == m.end()) return nullptr;
  return &diffs_.at(id)[parent_index].actions[hit->second];
}

std::set<CommitId> ChangeGraph::ancestors(const CommitId& id) const {
  std::set<CommitId> seen;
  std::vector<CommitId> stack = commit(id).parents;
  while (!stack.empty()) {
    CommitId c = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(c).second) continue;
    for (const auto& p : commit(c).parents) stack.push_back(p);
  }
  return seen;
}

bool ChangeGraph::is_ancestor(const CommitId& ancestor, const CommitId& descendant) const {
  if (!contains(ancestor)) throw GraphError("unknown commit " + ancestor);
  std::set<CommitId> seen;
  std::vector<CommitId> stack = commit(descendant).parents;
  while (!stack.empty()) {
    CommitId c = std::move(stack.back());
    stack.pop_back();
    if (c == ancestor) return true;
    if (!seen.insert(c).second) continue;
    for (const auto& p : commit(c).parents) stack.push_back(p);
  }
  return false;
}

Tree ChangeGraph::tree_at(const CommitId& id) const {
  std::vector<CommitId> chain;
  for (CommitId c = id;;) {
    chain.push_back(c);
    const auto& parents = commit(c).parents;
    if (parents.empty()) break;
    c = parents.front();
  }
  Tree tree;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    for (const auto& a : actions(*it)) {
      const auto count_after = [&](std::optional<int> before) -> std::optional<int> {
        if (a.binary || !before) return std::nullopt;
        return *before + a.line_delta();
      };
      switch (a.kind) {
        case ActionKind::added:
          tree[*a.path_new] = FileState{a.blob_new, count_after(0)};
          break;
        case ActionKind::deleted:
          tree.erase(*a.path_old);
          break;
        case ActionKind::modified: {
          auto& st = tree[*a.path_new];
          st.blob = a.blob_new;
          st.line_count = count_after(st.line_count);
          break;
        }
        case ActionKind::renamed: {
          std::optional<int> before;
          if (auto old = tree.find(*a.path_old); old != tree.end()) {
            before = old->second.line_count;
            tree.erase(old);
          }
          tree[*a.path_new] = FileState{a.blob_new, count_after(before)};
          break;
        }
      }
    }
  }
  return tree;
}

std::vector<CommitId> ChangeGraph::path_between(const CommitId& ancestor, const CommitId& descendant) const {
  if (!contains(ancestor)) throw GraphError("unknown commit " + ancestor);
  std::unordered_map<CommitId, CommitId> came_from;
  std::deque<CommitId> queue{descendant};
  came_from.emplace(descendant, CommitId{});
  while (!queue.empty()) {
    CommitId c = queue.front();
    queue.pop_front();
    if (c == ancestor) {
      std::vector<CommitId> chain;
      for (CommitId cur = c; !cur.empty(); cur = came_from.at(cur)) chain.push_back(cur);
      std::reverse(chain.begin(), chain.end());
      return chain;
    }
    for (const auto& p : commit(c).parents) {
      if (came_from.emplace(p, c).second) queue.push_back(p);
    }
  }
  return {};
}

std::optional<std::string> ChangeGraph::map_path(const CommitId& from, const std::string& path,
                                                 const CommitId& to) const {
  std::string current = path;
  auto parent_index = [this](const CommitId& child, const CommitId& parent) {
    const auto& ps = commit(child).parents;
    return static_cast<std::size_t>(std::find(ps.begin(), ps.end(), parent) - ps.begin());
  };

  if (from != to) {
    if (auto back = path_between(to, from); !back.empty()) {
      // Walk towards the ancestor: renames map new -> old, additions end the file.
      for (std::size_t i = 0; i + 1 < back.size(); ++i) {
        const FileAction* a = find_action(back[i], parent_index(back[i], back[i + 1]), current);
        if (a == nullptr) continue;
        if (a->kind == ActionKind::added) return std::nullopt;
        if (a->kind == ActionKind::renamed) current = *a->path_old;
      }
    } else if (auto fwd = path_between(from, to); !fwd.empty()) {
      // fwd runs from `to` down to `from`; replay it oldest first.
      for (std::size_t i = fwd.size() - 1; i > 0; --i) {
        const CommitId& child = fwd[i - 1];
        const auto& pd = diffs(child)[parent_index(child, fwd[i])];
        for (const auto& a : pd.actions) {
          if (a.path_old && *a.path_old == current) {
            if (a.kind == ActionKind::deleted) return std::nullopt;
            if (a.kind == ActionKind::renamed) current = *a.path_new;
            break;
          }
        }
      }
    }
  }
  const Tree tree = tree_at(to);
  if (tree.count(current) == 0) return std::nullopt;
  return current;
}

std::optional<int> map_new_to_old(const std::vector<Hunk>& hunks, int new_line) {
  int offset = 0;
  for (const auto& h : hunks) {
    if (h.new_len > 0) {
      if (new_line >= h.new_start && new_line < h.new_start + h.new_len) return std::nullopt;
      if (h.new_start + h.new_len - 1 < new_line) offset += h.old_len - h.new_len;
    } else if (h.new_start < new_line) {
      offset += h.old_len;
    }
  }
  return new_line + offset;
}

std::optional<int> map_old_to_new(const std::vector<Hunk>& hunks, int old_line) {
  int offset = 0;
  for (const auto& h : hunks) {
    if (h.old_len > 0) {
      if (old_line >= h.old_start && old_line < h.old_start + h.old_len) return std::nullopt;
      if (h.old_start + h.old_len - 1 < old_line) offset += h.new_len - h.old_len;
    } else if (h.old_start < old_line) {
      offset += h.new_len;
    }
  }
  return old_line + offset;
}

}  // namespace szzkit::vcs
