#pragma once

#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "szzkit/inducing/normalize.hpp"
#include "szzkit/vcs/change_graph.hpp"
#include "szzkit/vcs/git_repository.hpp"

namespace szzkit::inducing {

// Shell-style glob over repository-relative paths: `*` and `?` stay within
// one path segment, `**` spans segments and `**/` may match nothing.
class Glob {
 public:
  explicit Glob(std::string pattern);
  [[nodiscard]] bool matches(std::string_view path) const;
  [[nodiscard]] const std::string& pattern() const { return pattern_; }

 private:
  std::string pattern_;
  std::regex regex_;
};

[[nodiscard]] std::string glob_to_regex(std::string_view pattern);

struct RefactoringRange {
  vcs::CommitId commit;
  std::string path;  // old-side path
  int start = 0;     // old-side lines, inclusive
  int end = 0;
  std::string kind;
};

class FilterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Comma-separated "commit,path,old_start,old_end,kind" with a header line;
// '#' lines are comments.
[[nodiscard]] std::vector<RefactoringRange> parse_refactoring_report(std::string_view text);

struct FilterConfig {
  std::vector<std::string> nonproduction_path_patterns{"**/test/**",     "**/tests/**", "**/*Test*.java",
                                                       "**/examples/**", "**/tutorial*/**", "**/doc/**",
                                                       "**/docs/**"};
  std::vector<RefactoringRange> refactorings;
  LanguageProfile profile;
};

// Compiled form of a FilterConfig.
class Filters {
 public:
  explicit Filters(FilterConfig config);

  [[nodiscard]] const FilterConfig& config() const { return config_; }
  // Production code: a source extension of the profile and no non-production pattern.
  [[nodiscard]] bool is_production(std::string_view path) const;
  [[nodiscard]] bool covered_by_refactoring(const vcs::CommitId& commit, const std::string& path, int first,
                                            int last) const;

 private:
  FilterConfig config_;
  std::vector<Glob> globs_;
  std::map<std::pair<vcs::CommitId, std::string>, std::vector<std::pair<int, int>>> ranges_;
};

enum class Verdict { substantive, whitespace_only, comment_only, nonproduction, refactoring_only, pure_addition };
[[nodiscard]] std::string_view to_string(Verdict v);

struct HunkVerdict {
  bool whitespace_only = false;
  bool comment_only = false;  // also true when whitespace_only
  bool refactoring = false;   // every old-side line lies in a reported refactoring
};

struct TrivialChangeVerdict {
  const vcs::FileAction* action = nullptr;
  Verdict verdict = Verdict::substantive;
  std::vector<HunkVerdict> hunks;  // one per hunk of the action
};

// When `blobs` is given, comments are recognized on the full old and new file
// contents, so hunks starting inside a block comment are judged correctly;
// otherwise only the hunk text is used.
[[nodiscard]] TrivialChangeVerdict classify_action(const vcs::FileAction& action, const Filters& filters,
                                                   const vcs::BlobSource* blobs = nullptr);

}  // namespace szzkit::inducing
