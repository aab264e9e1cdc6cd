#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "szzkit/vcs/change_graph.hpp"

namespace szzkit::vcs {

class DiffParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses "@@ -a[,b] +c[,d] @@ ..." into the range fields of `hunk`.
[[nodiscard]] bool parse_hunk_header(std::string_view line, Hunk& hunk);

// Undoes git's C-style path quoting ("\"a\\tb\"" -> "a\tb").
[[nodiscard]] std::string unquote_git_path(std::string_view quoted);

// Parses a sequence of "diff --git" sections (as produced by git with
// --full-index and any context size). Commit and parent fields are left empty.
[[nodiscard]] std::vector<FileAction> parse_unified_diff(std::string_view text);

struct DiffBlock {
  CommitId commit;
  std::vector<FileAction> actions;
};

// Parses `git diff-tree --stdin --always -p` output: every block starts with
// the bare commit id, followed by zero or more diff sections.
[[nodiscard]] std::vector<DiffBlock> parse_diff_tree_output(std::string_view text);

}  // namespace szzkit::vcs
