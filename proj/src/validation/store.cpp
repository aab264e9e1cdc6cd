#include "szzkit/validation/store.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>

#include "szzkit/common/text.hpp"

namespace szzkit::validation {

using nlohmann::json;

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(std::string_view s, const std::array<E, N>& all) {
  for (E e : all) {
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

constexpr std::array kVerdicts{Verdict::addressed, Verdict::mentioned_only, Verdict::wrong};
constexpr std::array kLabels{IssueLabel::BUG, IssueLabel::IMPROVEMENT, IssueLabel::TEST, IssueLabel::DOC,
                             IssueLabel::OTHER};
constexpr std::array kRounds{Round::independent, Round::committee};
constexpr std::array kQueues{QueueKind::links, QueueKind::issues, QueueKind::conflicts};

constexpr std::size_t kMaxPreviewLines = 200;

std::string fmt_hunk_header(const vcs::Hunk& h) {
  return "@@ -" + std::to_string(h.old_start) + "," + std::to_string(h.old_len) + " +" + std::to_string(h.new_start) +
         "," + std::to_string(h.new_len) + " @@";
}

LinkDecision link_from_json(const json& j) {
  LinkDecision d;
  d.commit = j.at("commit");
  d.issue = j.at("issue");
  d.rater = j.at("rater");
  auto v = verdict_from_string(j.at("verdict").get<std::string>());
  if (!v) throw StoreError(ErrorCode::invalid, "unknown verdict " + j.at("verdict").dump());
  d.verdict = *v;
  d.decided_at = from_unix(j.at("decided_at").get<std::int64_t>());
  return d;
}

IssueTypeDecision issue_from_json(const json& j) {
  IssueTypeDecision d;
  d.issue = j.at("issue");
  d.rater = j.at("rater");
  auto l = label_from_string(j.at("label").get<std::string>());
  auto r = round_from_string(j.at("round").get<std::string>());
  if (!l || !r) throw StoreError(ErrorCode::invalid, "bad label or round in " + j.dump());
  d.label = *l;
  d.round = *r;
  d.in_doubt = j.value("in_doubt", false);
  d.decided_at = from_unix(j.at("decided_at").get<std::int64_t>());
  return d;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::addressed: return "addressed";
    case Verdict::mentioned_only: return "mentioned_only";
    case Verdict::wrong: return "wrong";
  }
  return "wrong";
}

std::string_view to_string(IssueLabel l) {
  switch (l) {
    case IssueLabel::BUG: return "BUG";
    case IssueLabel::IMPROVEMENT: return "IMPROVEMENT";
    case IssueLabel::TEST: return "TEST";
    case IssueLabel::DOC: return "DOC";
    case IssueLabel::OTHER: return "OTHER";
  }
  return "OTHER";
}

std::string_view to_string(Round r) { return r == Round::independent ? "independent" : "committee"; }

std::string_view to_string(QueueKind k) {
  switch (k) {
    case QueueKind::links: return "links";
    case QueueKind::issues: return "issues";
    case QueueKind::conflicts: return "conflicts";
  }
  return "links";
}

std::optional<Verdict> verdict_from_string(std::string_view s) { return lookup(s, kVerdicts); }
std::optional<IssueLabel> label_from_string(std::string_view s) { return lookup(s, kLabels); }
std::optional<Round> round_from_string(std::string_view s) { return lookup(s, kRounds); }
std::optional<QueueKind> queue_from_string(std::string_view s) { return lookup(s, kQueues); }

json to_json(const LinkDecision& d) {
  return json{{"type", "link"},          {"commit", d.commit},
              {"issue", d.issue},        {"rater", d.rater},
              {"verdict", to_string(d.verdict)}, {"decided_at", to_unix(d.decided_at)}};
}

json to_json(const IssueTypeDecision& d) {
  json j{{"type", "issue_type"},       {"issue", d.issue},
         {"rater", d.rater},           {"label", to_string(d.label)},
         {"round", to_string(d.round)}, {"decided_at", to_unix(d.decided_at)}};
  if (d.in_doubt) j["in_doubt"] = true;
  return j;
}

ValidationStore::ValidationStore(std::vector<LinkCandidate> candidates, const issues::IssueSet& issues,
                                 const vcs::ChangeGraph& graph, std::filesystem::path log_path,
                                 StoreOptions options)
    : issues_(issues), graph_(graph), log_path_(std::move(log_path)), options_(options) {
  for (auto& c : candidates) {
    if (c.detector != links::Detector::jl_key) continue;
    const auto key = std::make_pair(c.commit, c.issue);
    if (candidate_index_.count(key)) continue;
    candidate_index_.emplace(key, candidates_.size());
    candidates_.push_back(std::move(c));
  }
  if (log_path_.empty() || !std::filesystem::exists(log_path_)) return;
  std::ifstream in(log_path_);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      const std::string type = j.at("type");
      if (type == "link") {
        apply_link(link_from_json(j));
      } else if (type == "issue_type") {
        apply_issue(issue_from_json(j));
      } else {
        throw StoreError(ErrorCode::invalid, "unknown record type " + type);
      }
    } catch (const std::exception& e) {
      throw StoreError(ErrorCode::invalid,
                       log_path_.string() + ":" + std::to_string(line_no) + ": cannot replay decision: " + e.what());
    }
  }
}

std::filesystem::path ValidationStore::snapshot_path(const std::filesystem::path& log_path) {
  auto p = log_path;
  p += ".snapshot.json";
  return p;
}

void ValidationStore::apply_link(const LinkDecision& d) {
  if (d.rater.empty()) throw StoreError(ErrorCode::invalid, "rater must not be empty");
  auto it = candidate_index_.find({d.commit, d.issue});
  if (it == candidate_index_.end()) {
    throw StoreError(ErrorCode::not_found, "no link candidate " + d.commit + " -> " + d.issue);
  }
  LinkCandidate& c = candidates_[it->second];
  if (c.validation != links::Validation::unvalidated) {
    throw StoreError(ErrorCode::conflict, "link " + d.commit + " -> " + d.issue + " is already " +
                                              std::string(links::to_string(c.validation)));
  }
  c.validation =
      d.verdict == Verdict::addressed ? links::Validation::expert_confirmed : links::Validation::expert_rejected;
  link_log_.push_back(d);
}

IssueTypeOutcome ValidationStore::apply_issue(const IssueTypeDecision& d) {
  if (d.rater.empty()) throw StoreError(ErrorCode::invalid, "rater must not be empty");
  if (issues_.find(d.issue) == nullptr) throw StoreError(ErrorCode::not_found, "unknown issue " + d.issue);
  IssueState& st = issue_state_[d.issue];
  const auto rated_by = [&](const std::string& r) {
    return std::any_of(st.independent.begin(), st.independent.end(),
                       [&](const IssueTypeDecision& x) { return x.rater == r; });
  };
  const bool disagreement = st.independent.size() == 2 && st.independent[0].label != st.independent[1].label;
  if (d.round == Round::independent) {
    if (d.in_doubt) throw StoreError(ErrorCode::invalid, "in_doubt applies to committee decisions only");
    if (rated_by(d.rater)) throw StoreError(ErrorCode::conflict, d.rater + " already labeled " + d.issue);
    if (st.independent.size() >= 2) {
      throw StoreError(ErrorCode::conflict, d.issue + " already has two independent labels");
    }
    st.independent.push_back(d);
  } else {
    if (st.committee) throw StoreError(ErrorCode::conflict, d.issue + " already has a committee decision");
    if (!disagreement) throw StoreError(ErrorCode::invalid, "committee decision without a conflict on " + d.issue);
    if (rated_by(d.rater)) {
      throw StoreError(ErrorCode::invalid, "committee rater must differ from the independent raters");
    }
    IssueTypeDecision c = d;
    if (c.in_doubt) c.label = IssueLabel::BUG;
    st.committee = c;
  }
  issue_log_.push_back(d);
  IssueTypeOutcome out;
  out.conflict = st.independent.size() == 2 && st.independent[0].label != st.independent[1].label && !st.committee;
  out.final_label = final_label_locked(d.issue);
  return out;
}

void ValidationStore::append(const json& record) {
  if (log_path_.empty()) return;
  if (log_path_.has_parent_path()) std::filesystem::create_directories(log_path_.parent_path());
  std::ofstream out(log_path_, std::ios::app);
  out << record.dump() << '\n';
  out.flush();
  if (!out) throw std::runtime_error("cannot append to decision log " + log_path_.string());
}

void ValidationStore::record_link_decision(const LinkDecision& decision) {
  std::unique_lock lock(mutex_);
  // Validate on a copy of the affected state first so a failed append leaves
  // memory and log consistent.
  auto it = candidate_index_.find({decision.commit, decision.issue});
  const auto before = it == candidate_index_.end() ? links::Validation::unvalidated : candidates_[it->second].validation;
  apply_link(decision);
  try {
    append(to_json(decision));
  } catch (...) {
    candidates_[it->second].validation = before;
    link_log_.pop_back();
    throw;
  }
  write_snapshot_locked();
}

IssueTypeOutcome ValidationStore::record_issue_type(const IssueTypeDecision& decision) {
  std::unique_lock lock(mutex_);
  const IssueState before = issue_state_[decision.issue];
  IssueTypeOutcome out;
  try {
    out = apply_issue(decision);
  } catch (...) {
    if (before.independent.empty() && !before.committee) issue_state_.erase(decision.issue);
    throw;
  }
  try {
    append(to_json(decision));
  } catch (...) {
    issue_state_[decision.issue] = before;
    issue_log_.pop_back();
    throw;
  }
  write_snapshot_locked();
  return out;
}

std::vector<LinkCandidate> ValidationStore::candidates() const {
  std::shared_lock lock(mutex_);
  return candidates_;
}

std::optional<IssueLabel> ValidationStore::final_label_locked(const std::string& issue) const {
  auto it = issue_state_.find(issue);
  if (it == issue_state_.end()) return std::nullopt;
  const IssueState& st = it->second;
  if (st.committee) return st.committee->label;
  if (st.independent.size() == 2 && st.independent[0].label == st.independent[1].label) {
    return st.independent[0].label;
  }
  return std::nullopt;
}

std::optional<IssueLabel> ValidationStore::final_label(const std::string& issue) const {
  std::shared_lock lock(mutex_);
  return final_label_locked(issue);
}

std::map<std::string, IssueLabel> ValidationStore::final_labels() const {
  std::shared_lock lock(mutex_);
  std::map<std::string, IssueLabel> out;
  for (const auto& [key, st] : issue_state_) {
    if (auto l = final_label_locked(key)) out.emplace(key, *l);
  }
  return out;
}

std::vector<LinkDecision> ValidationStore::link_decisions() const {
  std::shared_lock lock(mutex_);
  return link_log_;
}

std::vector<IssueTypeDecision> ValidationStore::issue_decisions() const {
  std::shared_lock lock(mutex_);
  return issue_log_;
}

std::set<std::string> ValidationStore::issues_needing_type_locked() const {
  std::set<std::string> out;
  for (const auto& c : candidates_) {
    if (c.validation != links::Validation::auto_validated && c.validation != links::Validation::expert_confirmed) {
      continue;
    }
    const issues::Issue* issue = issues_.find(c.issue);
    if (issue == nullptr || !issues::was_closed_or_resolved(*issue)) continue;
    if (!issue->is_bug_typed() && !options_.include_non_bug_issues) continue;
    out.insert(c.issue);
  }
  return out;
}

ValidationQueue ValidationStore::queues_locked(const std::string& rater) const {
  ValidationQueue q;
  std::set<CommitId> commits;
  for (const auto& c : candidates_) {
    if (c.validation != links::Validation::unvalidated) continue;
    const issues::Issue* issue = issues_.find(c.issue);
    if (issue == nullptr || !issues::was_closed_or_resolved(*issue)) continue;
    if (!issue->is_bug_typed() && !options_.include_non_bug_issues) continue;
    commits.insert(c.commit);
  }
  q.pending_links.assign(commits.begin(), commits.end());

  for (const auto& key : issues_needing_type_locked()) {
    auto it = issue_state_.find(key);
    const std::size_t n = it == issue_state_.end() ? 0 : it->second.independent.size();
    if (n >= 2) continue;
    if (!rater.empty() && it != issue_state_.end() &&
        std::any_of(it->second.independent.begin(), it->second.independent.end(),
                    [&](const IssueTypeDecision& d) { return d.rater == rater; })) {
      continue;
    }
    q.pending_issues.push_back(key);
  }
  for (const auto& [key, st] : issue_state_) {
    if (st.committee || st.independent.size() != 2 || st.independent[0].label == st.independent[1].label) continue;
    if (!rater.empty() && (st.independent[0].rater == rater || st.independent[1].rater == rater)) continue;
    q.conflicts.push_back(key);
  }
  return q;
}

ValidationQueue ValidationStore::queues(const std::string& rater) const {
  std::shared_lock lock(mutex_);
  return queues_locked(rater);
}

std::optional<json> ValidationStore::next_work_item(QueueKind kind, const std::string& rater) const {
  std::shared_lock lock(mutex_);
  const ValidationQueue q = queues_locked(rater);
  switch (kind) {
    case QueueKind::links:
      if (q.pending_links.empty()) return std::nullopt;
      return item_locked("link:" + q.pending_links.front());
    case QueueKind::issues:
      if (q.pending_issues.empty()) return std::nullopt;
      return item_locked("issue:" + q.pending_issues.front());
    case QueueKind::conflicts:
      if (q.conflicts.empty()) return std::nullopt;
      return item_locked("conflict:" + q.conflicts.front());
  }
  return std::nullopt;
}

json ValidationStore::item(const std::string& id) const {
  std::shared_lock lock(mutex_);
  return item_locked(id);
}

json ValidationStore::issue_json(const std::string& key) const {
  const issues::Issue* issue = issues_.find(key);
  if (issue == nullptr) return json{{"key", key}, {"missing", true}};
  json comments = json::array();
  for (const auto& c : issue->comments) {
    comments.push_back({{"author", c.author}, {"created", format_iso8601(c.at)}, {"text", c.text}});
  }
  return json{{"key", issue->key},
              {"type", issue->original_type},
              {"title", issue->title},
              {"description", issue->description},
              {"status", issue->status},
              {"resolution", issue->resolution},
              {"reported_at", format_iso8601(issue->reported_at)},
              {"affected_versions", issue->affected_versions},
              {"comments", comments}};
}

json ValidationStore::commit_json(const CommitId& id) const {
  const vcs::Commit& c = graph_.commit(id);
  json files = json::array();
  for (const auto& a : graph_.actions(id)) {
    int added = 0, deleted = 0;
    json hunks = json::array();
    std::size_t budget = kMaxPreviewLines;
    for (const auto& h : a.hunks) {
      added += h.new_len;
      deleted += h.old_len;
      json lines = json::array();
      for (const auto& l : h.old_lines) {
        if (budget == 0) break;
        lines.push_back("-" + l);
        --budget;
      }
      for (const auto& l : h.new_lines) {
        if (budget == 0) break;
        lines.push_back("+" + l);
        --budget;
      }
      hunks.push_back({{"header", fmt_hunk_header(h)}, {"lines", lines}});
    }
    json f{{"path", a.path()}, {"kind", vcs::to_string(a.kind)}, {"added", added}, {"deleted", deleted},
           {"binary", a.binary}, {"hunks", hunks}};
    if (a.kind == vcs::ActionKind::renamed) f["path_old"] = *a.path_old;
    files.push_back(std::move(f));
  }
  return json{{"id", c.id},
              {"author", c.author_name},
              {"committed_at", format_iso8601(c.committer_date)},
              {"message", c.message},
              {"files", files}};
}

json ValidationStore::item_locked(const std::string& id) const {
  const auto colon = id.find(':');
  if (colon == std::string::npos) throw StoreError(ErrorCode::not_found, "unknown item " + id);
  const std::string kind = id.substr(0, colon), ref = id.substr(colon + 1);
  if (kind == "link") {
    if (!graph_.contains(ref)) throw StoreError(ErrorCode::not_found, "unknown item " + id);
    json cands = json::array();
    for (const auto& c : candidates_) {
      if (c.commit != ref) continue;
      cands.push_back({{"issue", c.issue},
                       {"matched_text", c.matched_text},
                       {"offset", c.offset},
                       {"at_message_start", c.at_message_start},
                       {"validation", links::to_string(c.validation)},
                       {"details", issue_json(c.issue)}});
    }
    if (cands.empty()) throw StoreError(ErrorCode::not_found, "unknown item " + id);
    return json{{"id", id}, {"kind", "link"}, {"commit", commit_json(ref)}, {"candidates", cands}};
  }
  if (kind == "issue" || kind == "conflict") {
    if (issues_.find(ref) == nullptr) throw StoreError(ErrorCode::not_found, "unknown item " + id);
    json commits = json::array();
    std::set<CommitId> seen;
    for (const auto& c : candidates_) {
      if (c.issue != ref || c.validation == links::Validation::expert_rejected || !seen.insert(c.commit).second) {
        continue;
      }
      commits.push_back(commit_json(c.commit));
    }
    json out{{"id", id}, {"kind", kind}, {"issue", issue_json(ref)}, {"commits", commits}};
    if (kind == "issue") {
      out["round"] = "independent";
      return out;
    }
    auto st = issue_state_.find(ref);
    if (st == issue_state_.end() || st->second.independent.size() != 2) {
      throw StoreError(ErrorCode::not_found, "no conflict recorded for " + ref);
    }
    // Blinded: labels only, sorted so their order does not reveal who gave them.
    std::vector<std::string> labels{std::string(to_string(st->second.independent[0].label)),
                                    std::string(to_string(st->second.independent[1].label))};
    std::sort(labels.begin(), labels.end());
    out["round"] = "committee";
    out["labels"] = labels;
    out["resolved"] = st->second.committee.has_value();
    return out;
  }
  throw StoreError(ErrorCode::not_found, "unknown item " + id);
}

json ValidationStore::snapshot_locked() const {
  json links = json::array();
  for (const auto& c : candidates_) {
    links.push_back({{"commit", c.commit}, {"issue", c.issue}, {"validation", links::to_string(c.validation)}});
  }
  json labels = json::object();
  for (const auto& [key, st] : issue_state_) {
    auto fl = final_label_locked(key);
    labels[key] = {{"independent", st.independent.size()},
                   {"committee", st.committee.has_value()},
                   {"final", fl ? json(to_string(*fl)) : json(nullptr)}};
  }
  const ValidationQueue q = queues_locked({});
  return json{{"links", links},
              {"issue_labels", labels},
              {"decisions", link_log_.size() + issue_log_.size()},
              {"pending", {{"links", q.pending_links.size()},
                           {"issues", q.pending_issues.size()},
                           {"conflicts", q.conflicts.size()}}}};
}

json ValidationStore::snapshot() const {
  std::shared_lock lock(mutex_);
  return snapshot_locked();
}

void ValidationStore::write_snapshot_locked() const {
  if (log_path_.empty()) return;
  write_file(snapshot_path(log_path_), snapshot_locked().dump(2) + "\n");
}

}  // namespace szzkit::validation
