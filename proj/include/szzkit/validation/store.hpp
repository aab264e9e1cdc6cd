#pragma once

#include <array>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "szzkit/issues/issue.hpp"
#include "szzkit/links/links.hpp"
#include "szzkit/vcs/change_graph.hpp"

namespace szzkit::validation {

using links::LinkCandidate;
using vcs::CommitId;

enum class Verdict { addressed, mentioned_only, wrong };
enum class IssueLabel { BUG, IMPROVEMENT, TEST, DOC, OTHER };
enum class Round { independent, committee };
enum class QueueKind { links, issues, conflicts };

[[nodiscard]] std::string_view to_string(Verdict v);
[[nodiscard]] std::string_view to_string(IssueLabel l);
[[nodiscard]] std::string_view to_string(Round r);
[[nodiscard]] std::string_view to_string(QueueKind k);
[[nodiscard]] std::optional<Verdict> verdict_from_string(std::string_view s);
[[nodiscard]] std::optional<IssueLabel> label_from_string(std::string_view s);
[[nodiscard]] std::optional<Round> round_from_string(std::string_view s);
[[nodiscard]] std::optional<QueueKind> queue_from_string(std::string_view s);

struct LinkDecision {
  CommitId commit;
  std::string issue;
  std::string rater;
  Verdict verdict = Verdict::addressed;
  Timestamp decided_at;
};

struct IssueTypeDecision {
  std::string issue;
  std::string rater;
  IssueLabel label = IssueLabel::BUG;
  Round round = Round::independent;
  // Committee only: the committee could not decide, which resolves to BUG.
  bool in_doubt = false;
  Timestamp decided_at;
};

enum class ErrorCode { not_found, conflict, invalid };

class StoreError : public std::runtime_error {
 public:
  StoreError(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct StoreOptions {
  // Queue linked issues for type validation even when the tracker did not type them as bugs.
  bool include_non_bug_issues = false;
};

struct ValidationQueue {
  std::vector<CommitId> pending_links;     // commits with unvalidated candidates
  std::vector<std::string> pending_issues;  // issues lacking two independent labels
  std::vector<std::string> conflicts;       // disagreeing labels awaiting the committee
};

struct IssueTypeOutcome {
  bool conflict = false;
  std::optional<IssueLabel> final_label;
};

// Event-sourced store of expert decisions. The append-only log is the source
// of truth; a compacted snapshot is rewritten after every decision. All
// methods are safe to call concurrently.
class ValidationStore {
 public:
  // `candidates` are the JL candidates after auto-validation. When `log_path`
  // is non-empty, existing decisions are replayed from it and new ones are
  // appended. The graph and issues must outlive the store.
  ValidationStore(std::vector<LinkCandidate> candidates, const issues::IssueSet& issues,
                  const vcs::ChangeGraph& graph, std::filesystem::path log_path = {}, StoreOptions options = {});

  void record_link_decision(const LinkDecision& decision);
  IssueTypeOutcome record_issue_type(const IssueTypeDecision& decision);

  // Candidates with the validation state implied by the decisions.
  [[nodiscard]] std::vector<LinkCandidate> candidates() const;
  [[nodiscard]] std::optional<IssueLabel> final_label(const std::string& issue) const;
  [[nodiscard]] std::map<std::string, IssueLabel> final_labels() const;
  [[nodiscard]] std::vector<LinkDecision> link_decisions() const;
  [[nodiscard]] std::vector<IssueTypeDecision> issue_decisions() const;

  // Queues as seen by `rater`; an empty rater sees everything pending.
  [[nodiscard]] ValidationQueue queues(const std::string& rater = {}) const;
  // The next item `rater` may decide, or nullopt when the queue is empty for them.
  [[nodiscard]] std::optional<nlohmann::json> next_work_item(QueueKind kind, const std::string& rater) const;
  // Item by id ("link:<commit>", "issue:<key>", "conflict:<key>").
  [[nodiscard]] nlohmann::json item(const std::string& id) const;

  [[nodiscard]] nlohmann::json snapshot() const;
  [[nodiscard]] const std::filesystem::path& log_path() const { return log_path_; }
  [[nodiscard]] static std::filesystem::path snapshot_path(const std::filesystem::path& log_path);

 private:
  struct IssueState {
    std::vector<IssueTypeDecision> independent;
    std::optional<IssueTypeDecision> committee;
  };

  void apply_link(const LinkDecision& d);
  IssueTypeOutcome apply_issue(const IssueTypeDecision& d);
  void append(const nlohmann::json& record);
  void write_snapshot_locked() const;
  [[nodiscard]] nlohmann::json snapshot_locked() const;
  [[nodiscard]] std::optional<IssueLabel> final_label_locked(const std::string& issue) const;
  [[nodiscard]] std::set<std::string> issues_needing_type_locked() const;
  [[nodiscard]] ValidationQueue queues_locked(const std::string& rater) const;
  [[nodiscard]] nlohmann::json item_locked(const std::string& id) const;
  [[nodiscard]] nlohmann::json issue_json(const std::string& key) const;
  [[nodiscard]] nlohmann::json commit_json(const CommitId& id) const;

  const issues::IssueSet& issues_;
  const vcs::ChangeGraph& graph_;
  std::filesystem::path log_path_;
  StoreOptions options_;
  mutable std::shared_mutex mutex_;
  std::vector<LinkCandidate> candidates_;
  std::map<std::pair<CommitId, std::string>, std::size_t> candidate_index_;
  std::vector<LinkDecision> link_log_;
  std::vector<IssueTypeDecision> issue_log_;
  std::map<std::string, IssueState> issue_state_;
};

[[nodiscard]] nlohmann::json to_json(const LinkDecision& d);
[[nodiscard]] nlohmann::json to_json(const IssueTypeDecision& d);

}  // namespace szzkit::validation
