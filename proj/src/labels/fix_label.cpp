#include "szzkit/labels/fix_label.hpp"

#include <algorithm>

#include "szzkit/common/text.hpp"

namespace szzkit::labels {

namespace {

LabelResult collect(const std::map<CommitId, std::set<std::string>>& fixing, Strategy strategy) {
  LabelResult r;
  for (const auto& [commit, keys] : fixing) r.labels.push_back(FixLabel{commit, strategy, keys});
  return r;
}

bool szz_passes(const links::SemanticCheckResult& c) {
  return c.passed_count >= 2 || (c.passed_count == 1 && (c.keyword_present || c.bare_number_syntax));
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::SZZ: return "SZZ";
    case Strategy::JL: return "JL";
    case Strategy::JLM: return "JLM";
    case Strategy::JLMIV: return "JLMIV";
  }
  return "SZZ";
}

std::optional<Strategy> strategy_from_string(std::string_view s) {
  for (Strategy st : kAllStrategies) {
    if (iequals(to_string(st), s)) return st;
  }
  return std::nullopt;
}

std::set<CommitId> LabelResult::commits() const {
  std::set<CommitId> out;
  for (const auto& l : labels) out.insert(l.commit);
  return out;
}

const FixLabel* LabelResult::find(const CommitId& commit) const {
  auto it = std::lower_bound(labels.begin(), labels.end(), commit,
                             [](const FixLabel& l, const CommitId& c) { return l.commit < c; });
  return it != labels.end() && it->commit == commit ? &*it : nullptr;
}

LabelResult label_szz(const std::vector<links::LinkCandidate>& candidates, const issues::IssueSet& issues) {
  std::map<CommitId, std::set<std::string>> fixing;
  for (const auto& c : candidates) {
    if (c.detector != links::Detector::szz_number) continue;
    const issues::Issue* issue = issues.find(c.issue);
    if (issue == nullptr || !issue->is_bug_typed()) continue;
    if (szz_passes(c.checks)) fixing[c.commit].insert(c.issue);
  }
  return collect(fixing, Strategy::SZZ);
}

LabelResult label_jl_family(const std::vector<links::LinkCandidate>& candidates, const issues::IssueSet& issues,
                            const std::map<std::string, validation::IssueLabel>& type_labels, Strategy strategy) {
  if (strategy == Strategy::SZZ) throw std::invalid_argument("label_jl_family does not compute SZZ");
  std::map<CommitId, std::set<std::string>> fixing;
  std::set<std::string> unvalidated;
  for (const auto& c : candidates) {
    if (c.detector != links::Detector::jl_key) continue;
    const issues::Issue* issue = issues.find(c.issue);
    if (issue == nullptr || !issue->is_bug_typed() || !issues::was_closed_or_resolved(*issue)) continue;
    if (strategy != Strategy::JL && c.validation != links::Validation::auto_validated &&
        c.validation != links::Validation::expert_confirmed) {
      continue;
    }
    if (strategy == Strategy::JLMIV) {
      auto label = type_labels.find(c.issue);
      if (label == type_labels.end()) {
        unvalidated.insert(c.issue);
        continue;
      }
      if (label->second != validation::IssueLabel::BUG) continue;
    }
    fixing[c.commit].insert(c.issue);
  }
  LabelResult r = collect(fixing, strategy);
  r.unvalidated_issues.assign(unvalidated.begin(), unvalidated.end());
  return r;
}

std::vector<FixTableRow> fix_table(const std::vector<links::LinkCandidate>& szz_candidates,
                                   const std::vector<links::LinkCandidate>& jl_candidates,
                                   const std::map<Strategy, LabelResult>& results) {
  std::set<std::pair<CommitId, std::string>> pairs;
  for (const auto& c : szz_candidates) pairs.emplace(c.commit, c.issue);
  for (const auto& c : jl_candidates) pairs.emplace(c.commit, c.issue);
  std::vector<FixTableRow> rows;
  for (const auto& [commit, issue] : pairs) {
    FixTableRow row{commit, issue, {}};
    for (const auto& [strategy, result] : results) {
      const FixLabel* l = result.find(commit);
      row.flags[strategy] = l != nullptr && l->fixing_for.count(issue) > 0;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string fix_table_csv(const std::vector<FixTableRow>& rows) {
  std::string out = "commit,issue";
  for (Strategy s : kAllStrategies) out += "," + std::string(to_string(s));
  out += "\n";
  for (const auto& r : rows) {
    out += r.commit + "," + csv_field(r.issue);
    for (Strategy s : kAllStrategies) {
      auto it = r.flags.find(s);
      out += it == r.flags.end() ? "," : (it->second ? ",1" : ",0");
    }
    out += "\n";
  }
  return out;
}

}  // namespace szzkit::labels
