#include "szzkit/release/release.hpp"

#include <algorithm>

#include "szzkit/common/text.hpp"

namespace szzkit::release {

namespace {

std::map<std::string, std::set<CommitId>> commits_by_issue(const std::vector<labels::FixLabel>& fixes) {
  std::map<std::string, std::set<CommitId>> out;
  for (const auto& f : fixes) {
    for (const auto& key : f.fixing_for) out[key].insert(f.commit);
  }
  return out;
}

// Production files changed substantively by the bug's fixing commits, mapped
// to their path at the release.
void add_fix_files(ReleaseAssignment& a, const std::string& bug, const std::set<CommitId>& fix_commits,
                   const AssignInputs& in) {
  for (const auto& fc : fix_commits) {
    const vcs::Commit& commit = in.graph.commit(fc);
    if (commit.is_merge() || commit.parents.empty()) continue;
    for (const auto& action : in.graph.actions(fc)) {
      if (action.kind == vcs::ActionKind::added || !action.path_old) continue;
      if (inducing::classify_action(action, in.filters, in.blobs).verdict != inducing::Verdict::substantive) continue;
      auto mapped = in.graph.map_path(commit.parents.front(), *action.path_old, a.release.release_commit);
      if (mapped && in.filters.is_production(*mapped)) {
        a.defective_files[*mapped].insert(bug);
      } else {
        a.unmapped[bug].insert(*action.path_old);
      }
    }
  }
}

}  // namespace

std::string_view to_string(AssignStrategy s) {
  switch (s) {
    case AssignStrategy::SixM: return "6M";
    case AssignStrategy::AV: return "AV";
    case AssignStrategy::IND: return "IND";
  }
  return "6M";
}

ReleaseTable parse_release_table(std::string_view text, const vcs::ChangeGraph& graph) {
  ReleaseTable table;
  std::set<std::string> names;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = parse_csv_line(t);
    if (line_no == 1 && !f.empty() && f[0] == "name") continue;
    if (f.empty() || f.size() > 3 || trim(f[0]).empty()) {
      throw ReleaseError("release table line " + std::to_string(line_no) + ": expected name,commit[,released_at]");
    }
    VersionRelease v;
    v.name = std::string(trim(f[0]));
    if (!names.insert(v.name).second) {
      throw ReleaseError("release table line " + std::to_string(line_no) + ": duplicate version " + v.name);
    }
    if (f.size() >= 2 && !trim(f[1]).empty()) {
      const std::string commit{trim(f[1])};
      if (!graph.contains(commit)) {
        throw ReleaseError("release table line " + std::to_string(line_no) + ": commit " + commit +
                           " is not in the repository graph");
      }
      v.release_commit = commit;
      v.released_at = graph.commit(commit).committer_date;
    }
    if (f.size() == 3 && !trim(f[2]).empty()) {
      auto ts = parse_iso8601(trim(f[2]));
      if (!ts) throw ReleaseError("release table line " + std::to_string(line_no) + ": bad release date");
      v.released_at = *ts;
    }
    table.versions.push_back(std::move(v));
  }
  return table;
}

std::vector<Release> ReleaseTable::releases(const vcs::ChangeGraph& graph) const {
  std::vector<Release> out;
  for (const auto& v : versions) {
    if (!v.release_commit) continue;
    out.push_back(Release{v.name, *v.release_commit,
                          v.released_at.value_or(graph.commit(*v.release_commit).committer_date)});
  }
  std::sort(out.begin(), out.end(), [](const Release& a, const Release& b) {
    return a.released_at != b.released_at ? a.released_at < b.released_at : a.name < b.name;
  });
  return out;
}

std::map<std::string, std::optional<Timestamp>> ReleaseTable::version_dates(const vcs::ChangeGraph& graph) const {
  std::map<std::string, std::optional<Timestamp>> out;
  for (const auto& v : versions) {
    std::optional<Timestamp> t = v.released_at;
    if (!t && v.release_commit) t = graph.commit(*v.release_commit).committer_date;
    out.emplace(v.name, t);
  }
  return out;
}

const VersionRelease* ReleaseTable::find(const std::string& name) const {
  for (const auto& v : versions) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

std::vector<UnresolvedVersion> unresolved_affected_versions(const issues::IssueSet& issues, const ReleaseTable& table,
                                                            const vcs::ChangeGraph& graph) {
  const auto dates = table.version_dates(graph);
  std::vector<UnresolvedVersion> out;
  for (const auto& [key, issue] : issues.issues) {
    for (const auto& v : issue.affected_versions) {
      auto it = dates.find(v);
      if (it == dates.end() || !it->second) out.push_back({key, v});
    }
  }
  return out;
}

std::map<std::string, Timestamp> last_fix_dates(const std::vector<labels::FixLabel>& fixes,
                                                const vcs::ChangeGraph& graph) {
  std::map<std::string, Timestamp> out;
  for (const auto& f : fixes) {
    const Timestamp t = graph.commit(f.commit).committer_date;
    for (const auto& key : f.fixing_for) {
      auto [it, inserted] = out.emplace(key, t);
      if (!inserted) it->second = std::max(it->second, t);
    }
  }
  return out;
}

ReleaseAssignment assign_6m(const Release& release, const std::vector<labels::FixLabel>& fixes,
                            const AssignInputs& in, SixMVariant variant) {
  ReleaseAssignment a;
  a.release = release;
  a.strategy = AssignStrategy::SixM;
  const Timestamp window_end = add_days(release.released_at, kSixMonthsDays);
  const auto last_fix = last_fix_dates(fixes, in.graph);
  for (const auto& [bug, commits] : commits_by_issue(fixes)) {
    Timestamp ref;
    if (variant == SixMVariant::fixed) {
      ref = last_fix.at(bug);
    } else {
      const issues::Issue* issue = in.issues.find(bug);
      if (issue == nullptr) continue;
      ref = issue->reported_at;
    }
    if (!(ref > release.released_at && ref <= window_end)) continue;
    a.bugs.insert(bug);
    add_fix_files(a, bug, commits, in);
  }
  return a;
}

ReleaseAssignment assign_av(const Release& release, const std::vector<labels::FixLabel>& fixes,
                            const AssignInputs& in, const ReleaseTable& table) {
  ReleaseAssignment a;
  a.release = release;
  a.strategy = AssignStrategy::AV;
  const auto dates = table.version_dates(in.graph);
  for (const auto& [bug, commits] : commits_by_issue(fixes)) {
    const issues::Issue* issue = in.issues.find(bug);
    if (issue == nullptr) continue;
    for (const auto& v : issue->affected_versions) {
      auto it = dates.find(v);
      if (it == dates.end() || !it->second) a.unresolved.push_back({bug, v});
    }
    const auto& av = issue->affected_versions;
    if (std::find(av.begin(), av.end(), release.name) == av.end()) continue;
    a.bugs.insert(bug);
    add_fix_files(a, bug, commits, in);
  }
  return a;
}

ReleaseAssignment assign_ind(const Release& release, const inducing::InducingResult& inducing,
                             const std::vector<labels::FixLabel>& fixes, const AssignInputs& in) {
  ReleaseAssignment a;
  a.release = release;
  a.strategy = AssignStrategy::IND;
  std::set<CommitId> upto = in.graph.ancestors(release.release_commit);
  upto.insert(release.release_commit);

  std::map<std::string, std::vector<const inducing::InducingChange*>> by_bug;
  for (const auto& c : inducing.changes) by_bug[c.issue].push_back(&c);

  for (const auto& [bug, commits] : commits_by_issue(fixes)) {
    auto it = by_bug.find(bug);
    if (it == by_bug.end()) continue;
    const auto& changes = it->second;
    const bool any_non_suspect = std::any_of(changes.begin(), changes.end(), [](const auto* c) {
      return !c->is_suspect();
    });
    if (!any_non_suspect) {
      a.audit.insert(bug);
      continue;
    }
    const bool all_before = std::all_of(changes.begin(), changes.end(), [&](const auto* c) {
      return c->is_suspect() || upto.count(c->inducing_commit) > 0;
    });
    const bool fixed_after = std::any_of(commits.begin(), commits.end(), [&](const CommitId& f) {
      return upto.count(f) == 0;
    });
    if (!all_before || !fixed_after) continue;
    a.bugs.insert(bug);
    for (const auto* c : changes) {
      if (c->is_hard_suspect() || upto.count(c->inducing_commit) == 0) continue;
      const auto& parents = in.graph.commit(c->fixing_commit).parents;
      auto mapped = in.graph.map_path(parents.front(), c->path, release.release_commit);
      if (mapped && in.filters.is_production(*mapped)) {
        a.defective_files[*mapped].insert(bug);
      } else {
        a.unmapped[bug].insert(c->path);
      }
    }
  }
  return a;
}

}  // namespace szzkit::release
