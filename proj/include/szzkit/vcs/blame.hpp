#pragma once

#include <map>
#include <set>
#include <string>

#include "szzkit/vcs/change_graph.hpp"

namespace szzkit::vcs {

class BlameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// For each queried 1-based line of `path` as it exists at `commit`, the commit
// that last introduced or modified it. Renames are followed. When a merge
// inherits a line unchanged from several parents, the attribution with the
// earliest committer date wins (smaller id on equal dates).
[[nodiscard]] std::map<int, CommitId> last_touch(const ChangeGraph& graph, const CommitId& commit,
                                                 const std::string& path, const std::set<int>& lines);

}  // namespace szzkit::vcs
