#include "szzkit/vcs/blame.hpp"

#include <tuple>

namespace szzkit::vcs {
namespace {

struct Position {
  CommitId commit;
  std::string path;
  int line = 0;

  bool operator<(const Position& o) const { return std::tie(commit, path, line) < std::tie(o.commit, o.path, o.line); }
};

class Blamer {
 public:
  explicit Blamer(const ChangeGraph& graph) : graph_(graph) {}

  CommitId attribute(Position pos) {
    for (;;) {
      const Commit& c = graph_.commit(pos.commit);
      std::vector<Position> candidates;
      for (std::size_t i = 0; i < c.parents.size(); ++i) {
        const FileAction* a = graph_.find_action(c.id, i, pos.path);
        if (a == nullptr) {
          candidates.push_back(Position{c.parents[i], pos.path, pos.line});
          continue;
        }
        if (a->kind == ActionKind::added) continue;
        if (auto old = map_new_to_old(a->hunks, pos.line)) {
          candidates.push_back(Position{c.parents[i], *a->path_old, *old});
        }
      }
      if (candidates.empty()) return c.id;
      if (candidates.size() == 1) {
        pos = std::move(candidates.front());
        continue;
      }
      if (auto hit = memo_.find(pos); hit != memo_.end()) return hit->second;
      CommitId best;
      for (auto& cand : candidates) {
        CommitId found = attribute(cand);
        if (best.empty() || earlier(found, best)) best = std::move(found);
      }
      memo_.emplace(pos, best);
      return best;
    }
  }

 private:
  bool earlier(const CommitId& a, const CommitId& b) const {
    const auto da = graph_.commit(a).committer_date, db = graph_.commit(b).committer_date;
    return da != db ? da < db : a < b;
  }

  const ChangeGraph& graph_;
  std::map<Position, CommitId> memo_;
};

}  // namespace

std::map<int, CommitId> last_touch(const ChangeGraph& graph, const CommitId& commit, const std::string& path,
                                   const std::set<int>& lines) {
  if (!graph.contains(commit)) throw BlameError("unknown commit " + commit);
  const Tree tree = graph.tree_at(commit);
  const auto file = tree.find(path);
  if (file == tree.end()) throw BlameError(path + " does not exist at " + commit);
  Blamer blamer{graph};
  std::map<int, CommitId> out;
  for (int line : lines) {
    if (line < 1 || (file->second.line_count && line > *file->second.line_count)) {
      throw BlameError("line " + std::to_string(line) + " out of range for " + path + " at " + commit);
    }
    out.emplace(line, blamer.attribute(Position{commit, path, line}));
  }
  return out;
}

}  // namespace szzkit::vcs
