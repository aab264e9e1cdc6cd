#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "szzkit/issues/issue.hpp"
#include "szzkit/vcs/change_graph.hpp"

namespace szzkit::links {

using vcs::CommitId;

enum class Detector { szz_number, jl_key };
enum class Validation { unvalidated, auto_validated, expert_confirmed, expert_rejected };

[[nodiscard]] std::string_view to_string(Detector d);
[[nodiscard]] std::string_view to_string(Validation v);
[[nodiscard]] Detector detector_from_string(std::string_view s);
[[nodiscard]] Validation validation_from_string(std::string_view s);

struct SemanticCheckResult {
  bool fixed_once = false;
  bool assignee_matches = false;
  bool text_contained = false;
  bool files_attached = false;
  int passed_count = 0;
  bool keyword_present = false;
  bool bare_number_syntax = false;

  bool operator==(const SemanticCheckResult&) const = default;
};

struct LinkCandidate {
  CommitId commit;
  std::string issue;
  Detector detector = Detector::jl_key;
  std::string matched_text;
  std::size_t offset = 0;  // byte offset of matched_text in the message
  bool at_message_start = false;
  SemanticCheckResult checks;
  Validation validation = Validation::unvalidated;

  bool operator==(const LinkCandidate&) const = default;
};

class LinkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Misspelled key prefix (as written in messages) -> the project prefix "KEY-".
using Misspellings = std::map<std::string, std::string>;

// Parses "WRONG=CORRECT" lines ('#' starts a comment). Every CORRECT must be
// the project prefix; anything else is reported rather than guessed.
[[nodiscard]] Misspellings parse_misspellings(std::string_view text, const std::string& project_key);

struct LinkConfig {
  std::vector<std::string> keywords{"bug", "fix", "defect", "patch"};
};

// Candidates are produced for non-merge commits only, ordered by commit id
// then message offset.
[[nodiscard]] std::vector<LinkCandidate> detect_szz_links(const vcs::ChangeGraph& graph,
                                                          const issues::IssueSet& issues,
                                                          const LinkConfig& config = {});
[[nodiscard]] std::vector<LinkCandidate> detect_jl_links(const vcs::ChangeGraph& graph,
                                                         const issues::IssueSet& issues,
                                                         const std::string& project_key,
                                                         const Misspellings& misspellings = {},
                                                         const LinkConfig& config = {});

// Full-key matches in a single message, before checking which issues exist.
struct KeyMatch {
  std::string key;  // corrected key
  std::string matched_text;
  std::size_t offset = 0;
};
[[nodiscard]] std::vector<KeyMatch> find_issue_keys(std::string_view message, const std::string& project_key,
                                                    const Misspellings& misspellings = {});
[[nodiscard]] bool at_message_start(std::string_view message, std::size_t offset);
[[nodiscard]] bool has_keyword(std::string_view message, const std::vector<std::string>& keywords);
[[nodiscard]] bool bare_number_syntax(std::string_view message, std::string_view number);

[[nodiscard]] SemanticCheckResult evaluate_semantic_checks(const LinkCandidate& candidate, const vcs::Commit& commit,
                                                           const issues::Issue& issue,
                                                           const std::set<std::string>& action_paths,
                                                           const LinkConfig& config = {});

// A JL candidate becomes auto_validated iff it is its commit's only JL
// candidate and sits at the start of the message. Other candidates are
// returned unchanged.
[[nodiscard]] std::vector<LinkCandidate> auto_validate(std::vector<LinkCandidate> candidates);

[[nodiscard]] nlohmann::json to_json(const LinkCandidate& c);
[[nodiscard]] LinkCandidate candidate_from_json(const nlohmann::json& j);
// One candidate per line.
[[nodiscard]] std::string candidates_to_jsonl(const std::vector<LinkCandidate>& candidates);
[[nodiscard]] std::vector<LinkCandidate> candidates_from_jsonl(std::string_view text);

}  // namespace szzkit::links
