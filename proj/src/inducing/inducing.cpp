#include "szzkit/inducing/inducing.hpp"

#include <algorithm>

#include "szzkit/common/text.hpp"
#include "szzkit/vcs/blame.hpp"

namespace szzkit::inducing {

std::string_view to_string(InducingStrategy s) {
  switch (s) {
    case InducingStrategy::SZZ: return "SZZ";
    case InducingStrategy::JLMIV: return "JLMIV";
    case InducingStrategy::JLMIV_R: return "JLMIV_R";
    case InducingStrategy::JLMIV_RAV: return "JLMIV_RAV";
    case InducingStrategy::JL_R: return "JL_R";
  }
  return "SZZ";
}

std::optional<InducingStrategy> inducing_strategy_from_string(std::string_view s) {
  // "JLMIV_R", "jlmiv+r" and "jlmivr" all name the same strategy
  const auto squash = [](std::string_view v) {
    std::string out;
    for (char c : v) {
      if (c != '_' && c != '+' && c != '-') out += c;
    }
    return out;
  };
  for (auto st : {InducingStrategy::SZZ, InducingStrategy::JLMIV, InducingStrategy::JLMIV_R,
                  InducingStrategy::JLMIV_RAV, InducingStrategy::JL_R}) {
    if (iequals(squash(to_string(st)), squash(s))) return st;
  }
  return std::nullopt;
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::inducing_before_boundary: return "inducing_before_boundary";
    case Classification::weak_suspect: return "weak_suspect";
    case Classification::partial_fix_suspect: return "partial_fix_suspect";
    case Classification::hard_suspect: return "hard_suspect";
  }
  return "hard_suspect";
}

bool uses_filters(InducingStrategy s) {
  return s == InducingStrategy::JLMIV_R || s == InducingStrategy::JLMIV_RAV || s == InducingStrategy::JL_R;
}

std::vector<const InducingChange*> InducingResult::kept() const {
  std::vector<const InducingChange*> out;
  for (const auto& c : changes) {
    if (!c.is_hard_suspect()) out.push_back(&c);
  }
  return out;
}

Timestamp suspect_boundary(const issues::Issue& issue, InducingStrategy strategy,
                           const std::map<std::string, std::optional<Timestamp>>* version_dates,
                           std::vector<std::string>* notices) {
  Timestamp boundary = issue.reported_at;
  if (strategy != InducingStrategy::JLMIV_RAV) return boundary;
  for (const auto& v : issue.affected_versions) {
    std::optional<Timestamp> date;
    if (version_dates != nullptr) {
      if (auto it = version_dates->find(v); it != version_dates->end()) date = it->second;
    }
    if (!date) {
      if (notices != nullptr) {
        notices->push_back(issue.key + ": affected version " + v + " has no known release date; using report date");
      }
      continue;
    }
    boundary = std::min(boundary, *date);
  }
  return boundary;
}

InducingResult find_inducing(const std::vector<labels::FixLabel>& fixes, const InducingInputs& in,
                             InducingStrategy strategy) {
  InducingResult result;
  std::map<CommitId, std::set<std::string>> fix_issues;
  for (const auto& f : fixes) fix_issues[f.commit].insert(f.fixing_for.begin(), f.fixing_for.end());
  const bool filtered = uses_filters(strategy);

  for (const auto& [fix_commit, keys] : fix_issues) {
    const vcs::Commit& commit = in.graph.commit(fix_commit);
    if (commit.is_merge()) {
      result.notices.push_back(fix_commit + ": merge commit skipped as fixing commit");
      continue;
    }
    if (commit.parents.empty()) continue;  // a root commit only adds files
    const CommitId& parent = commit.parents.front();

    // path -> inducing commit -> lines
    std::map<std::string, std::map<CommitId, std::set<int>>> blamed;
    for (const auto& action : in.graph.actions(fix_commit)) {
      if (action.kind == vcs::ActionKind::added || action.binary || !action.path_old) continue;
      std::optional<TrivialChangeVerdict> tv;
      if (filtered) {
        tv = classify_action(action, in.filters, in.blobs);
        if (tv->verdict != Verdict::substantive) continue;
      }
      std::set<int> lines;
      for (std::size_t h = 0; h < action.hunks.size(); ++h) {
        const auto& hunk = action.hunks[h];
        if (tv && (tv->hunks[h].comment_only || tv->hunks[h].refactoring)) continue;
        for (int l = hunk.old_start; l < hunk.old_start + hunk.old_len; ++l) lines.insert(l);
      }
      if (lines.empty()) continue;
      for (const auto& [line, inducing] : vcs::last_touch(in.graph, parent, *action.path_old, lines)) {
        blamed[*action.path_old][inducing].insert(line);
      }
    }

    for (const auto& key : keys) {
      const issues::Issue* issue = in.issues.find(key);
      if (issue == nullptr) {
        result.notices.push_back(fix_commit + ": linked issue " + key + " not found");
        continue;
      }
      const Timestamp boundary = suspect_boundary(*issue, strategy, in.version_dates, &result.notices);
      for (const auto& [path, by_commit] : blamed) {
        for (const auto& [inducing, lines] : by_commit) {
          InducingChange c;
          c.fixing_commit = fix_commit;
          c.issue = key;
          c.path = path;
          c.inducing_commit = inducing;
          c.lines = lines;
          c.boundary_used = boundary;
          c.strategy = strategy;
          c.classification = in.graph.commit(inducing).committer_date < boundary
                                 ? Classification::inducing_before_boundary
                                 : Classification::hard_suspect;
          result.changes.push_back(std::move(c));
        }
      }
    }
  }

  // Single pass over suspects, using only before-boundary attributions.
  std::map<CommitId, std::set<std::string>> inducing_for;
  for (const auto& c : result.changes) {
    if (c.classification == Classification::inducing_before_boundary) inducing_for[c.inducing_commit].insert(c.issue);
  }
  for (auto& c : result.changes) {
    if (c.classification == Classification::inducing_before_boundary) continue;
    if (auto f = fix_issues.find(c.inducing_commit); f != fix_issues.end()) {
      c.classification = Classification::partial_fix_suspect;
      c.related_issue = *f->second.begin();
      continue;
    }
    if (auto w = inducing_for.find(c.inducing_commit); w != inducing_for.end()) {
      for (const auto& other : w->second) {
        if (other != c.issue) {
          c.classification = Classification::weak_suspect;
          c.related_issue = other;
          break;
        }
      }
    }
  }
  std::sort(result.changes.begin(), result.changes.end(), [](const InducingChange& a, const InducingChange& b) {
    return std::tie(a.fixing_commit, a.issue, a.path, a.inducing_commit) <
           std::tie(b.fixing_commit, b.issue, b.path, b.inducing_commit);
  });
  std::sort(result.notices.begin(), result.notices.end());
  result.notices.erase(std::unique(result.notices.begin(), result.notices.end()), result.notices.end());
  return result;
}

std::string inducing_table_csv(const InducingResult& result) {
  std::string out = "fixing_commit,issue,path,inducing_commit,lines,classification,boundary,strategy,related_issue\n";
  for (const auto& c : result.changes) {
    std::string lines;
    for (int l : c.lines) lines += (lines.empty() ? "" : " ") + std::to_string(l);
    out += c.fixing_commit + "," + csv_field(c.issue) + "," + csv_field(c.path) + "," + c.inducing_commit + "," +
           lines + "," + std::string(to_string(c.classification)) + "," + format_iso8601(c.boundary_used) + "," +
           std::string(to_string(c.strategy)) + "," + csv_field(c.related_issue) + "\n";
  }
  return out;
}

}  // namespace szzkit::inducing
