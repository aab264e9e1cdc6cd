#include "szzkit/links/links.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "szzkit/common/text.hpp"

namespace szzkit::links {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool prefix_at(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > text.size()) return false;
  return iequals(text.substr(pos, prefix.size()), prefix);
}

std::set<std::string> changed_paths(const vcs::ChangeGraph& graph, const CommitId& id) {
  std::set<std::string> paths;
  for (const auto& a : graph.actions(id)) {
    if (a.path_old) paths.insert(*a.path_old);
    if (a.path_new) paths.insert(*a.path_new);
  }
  return paths;
}

std::string local_part(const std::string& email) { return email.substr(0, email.find('@')); }

}  // namespace

std::string_view to_string(Detector d) { return d == Detector::szz_number ? "SZZ_NUMBER" : "JL_KEY"; }

std::string_view to_string(Validation v) {
  switch (v) {
    case Validation::unvalidated: return "unvalidated";
    case Validation::auto_validated: return "auto_validated";
    case Validation::expert_confirmed: return "expert_confirmed";
    case Validation::expert_rejected: return "expert_rejected";
  }
  return "unvalidated";
}

Detector detector_from_string(std::string_view s) {
  if (s == "SZZ_NUMBER") return Detector::szz_number;
  if (s == "JL_KEY") return Detector::jl_key;
  throw LinkError("unknown detector " + std::string(s));
}

Validation validation_from_string(std::string_view s) {
  for (auto v : {Validation::unvalidated, Validation::auto_validated, Validation::expert_confirmed,
                 Validation::expert_rejected}) {
    if (to_string(v) == s) return v;
  }
  throw LinkError("unknown validation state " + std::string(s));
}

Misspellings parse_misspellings(std::string_view text, const std::string& project_key) {
  const std::string correct = project_key + "-";
  Misspellings out;
  std::size_t line_no = 0;
  for (const auto& raw : split_lines(text)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw LinkError("misspellings line " + std::to_string(line_no) + ": expected WRONG=CORRECT");
    }
    const std::string wrong{trim(line.substr(0, eq))};
    const std::string right{trim(line.substr(eq + 1))};
    if (wrong.empty()) throw LinkError("misspellings line " + std::to_string(line_no) + ": empty misspelling");
    if (right != correct) {
      throw LinkError("misspellings line " + std::to_string(line_no) + ": unknown target prefix '" + right +
                      "', expected '" + correct + "'");
    }
    if (iequals(wrong, correct)) {
      throw LinkError("misspellings line " + std::to_string(line_no) + ": '" + wrong + "' is the correct prefix");
    }
    if (is_digit(wrong.back())) {
      throw LinkError("misspellings line " + std::to_string(line_no) + ": misspelling must not end in a digit");
    }
    out[wrong] = right;
  }
  return out;
}

std::vector<KeyMatch> find_issue_keys(std::string_view message, const std::string& project_key,
                                      const Misspellings& misspellings) {
  std::vector<std::string> prefixes{project_key + "-"};
  for (const auto& [wrong, right] : misspellings) prefixes.push_back(wrong);
  // Longest first so "IVY-" wins over a misspelling "IVY" at the same position.
  std::stable_sort(prefixes.begin(), prefixes.end(),
                   [](const std::string& a, const std::string& b) { return a.size() > b.size(); });

  std::vector<KeyMatch> out;
  for (std::size_t i = 0; i < message.size(); ++i) {
    if (i > 0 && is_alnum(message[i - 1])) continue;
    for (const auto& prefix : prefixes) {
      if (!prefix_at(message, i, prefix)) continue;
      std::size_t j = i + prefix.size();
      if (j >= message.size() || message[j] < '1' || message[j] > '9') continue;
      while (j < message.size() && is_digit(message[j])) ++j;
      if (j < message.size() && is_alnum(message[j])) continue;
      const std::string number{message.substr(i + prefix.size(), j - i - prefix.size())};
      out.push_back(KeyMatch{project_key + "-" + number, std::string(message.substr(i, j - i)), i});
      break;
    }
  }
  return out;
}

bool at_message_start(std::string_view message, std::size_t offset) {
  std::size_t i = 0;
  while (i < message.size() && std::isspace(static_cast<unsigned char>(message[i]))) ++i;
  if (i == offset) return true;
  return i < message.size() && (message[i] == '[' || message[i] == '(') && i + 1 == offset;
}

bool has_keyword(std::string_view message, const std::vector<std::string>& keywords) {
  for (const auto& kw : keywords) {
    for (std::size_t i = 0; i + kw.size() <= message.size(); ++i) {
      if ((i == 0 || !is_alnum(message[i - 1])) && prefix_at(message, i, kw)) return true;
    }
  }
  return false;
}

bool bare_number_syntax(std::string_view message, std::string_view number) {
  // "bug #<n>" with optional spaces
  for (std::size_t i = 0; i + 3 <= message.size(); ++i) {
    if (!prefix_at(message, i, "bug") || (i > 0 && is_alnum(message[i - 1]))) continue;
    std::size_t j = i + 3;
    while (j < message.size() && std::isspace(static_cast<unsigned char>(message[j]))) ++j;
    if (j >= message.size() || message[j] != '#') continue;
    ++j;
    while (j < message.size() && std::isspace(static_cast<unsigned char>(message[j]))) ++j;
    if (message.substr(j, number.size()) != number) continue;
    const std::size_t end = j + number.size();
    if (end == message.size() || !is_digit(message[end])) return true;
  }
  // the message is nothing but numbers
  bool any_digit = false;
  for (char c : message) {
    if (is_digit(c)) {
      any_digit = true;
    } else if (!(std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == ';' || c == '#')) {
      return false;
    }
  }
  return any_digit;
}

SemanticCheckResult evaluate_semantic_checks(const LinkCandidate& candidate, const vcs::Commit& commit,
                                             const issues::Issue& issue, const std::set<std::string>& action_paths,
                                             const LinkConfig& config) {
  SemanticCheckResult r;
  r.fixed_once = issues::was_fixed_once(issue);

  std::vector<std::string> identities;
  if (issue.assignee) identities.push_back(*issue.assignee);
  if (issue.assignee_name) identities.push_back(*issue.assignee_name);
  if (issue.assignee_email) identities.push_back(*issue.assignee_email);
  for (const auto& who : identities) {
    if (who.empty()) continue;
    if (iequals(who, commit.author_name) || iequals(who, commit.author_email) ||
        (!commit.author_email.empty() && iequals(who, local_part(commit.author_email)))) {
      r.assignee_matches = true;
    }
  }

  const std::string msg = to_lower(commit.message);
  const auto contained = [&](const std::string& text) {
    const auto t = trim(text);
    return !t.empty() && msg.find(to_lower(t)) != std::string::npos;
  };
  r.text_contained = contained(issue.title) || contained(issue.description);

  for (const auto& path : action_paths) {
    const std::string base = basename(path);
    if (std::find(issue.attachments.begin(), issue.attachments.end(), base) != issue.attachments.end()) {
      r.files_attached = true;
    }
  }
  r.passed_count = int(r.fixed_once) + int(r.assignee_matches) + int(r.text_contained) + int(r.files_attached);
  r.keyword_present = has_keyword(commit.message, config.keywords);
  r.bare_number_syntax = bare_number_syntax(commit.message, std::to_string(issue.number()));
  (void)candidate;
  return r;
}

std::vector<LinkCandidate> detect_szz_links(const vcs::ChangeGraph& graph, const issues::IssueSet& issues,
                                            const LinkConfig& config) {
  std::map<long, std::vector<const issues::Issue*>> by_number;
  for (const auto& [key, issue] : issues.issues) by_number[issue.number()].push_back(&issue);

  std::vector<LinkCandidate> out;
  for (const auto& commit : graph.commits()) {
    if (commit.is_merge()) continue;
    const std::string& msg = commit.message;
    std::set<std::string> seen;
    std::optional<std::set<std::string>> paths;
    for (std::size_t i = 0; i < msg.size();) {
      if (!is_digit(msg[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < msg.size() && is_digit(msg[j])) ++j;
      const std::string run = msg.substr(i, j - i);
      const auto first = run.find_first_not_of('0');
      if (first != std::string::npos && run.size() - first <= 18) {
        const long n = std::stol(run.substr(first));
        if (auto hit = by_number.find(n); hit != by_number.end()) {
          for (const issues::Issue* issue : hit->second) {
            if (!seen.insert(issue->key).second) continue;
            if (!paths) paths = changed_paths(graph, commit.id);
            LinkCandidate c{commit.id, issue->key, Detector::szz_number, run, i, at_message_start(msg, i), {}, {}};
            c.checks = evaluate_semantic_checks(c, commit, *issue, *paths, config);
            out.push_back(std::move(c));
          }
        }
      }
      i = j;
    }
  }
  return out;
}

std::vector<LinkCandidate> detect_jl_links(const vcs::ChangeGraph& graph, const issues::IssueSet& issues,
                                           const std::string& project_key, const Misspellings& misspellings,
                                           const LinkConfig& config) {
  std::vector<LinkCandidate> out;
  for (const auto& commit : graph.commits()) {
    if (commit.is_merge()) continue;
    std::set<std::string> seen;
    std::optional<std::set<std::string>> paths;
    for (auto& m : find_issue_keys(commit.message, project_key, misspellings)) {
      const issues::Issue* issue = issues.find(m.key);
      if (issue == nullptr || !seen.insert(m.key).second) continue;
      if (!paths) paths = changed_paths(graph, commit.id);
      LinkCandidate c{commit.id, m.key, Detector::jl_key, m.matched_text, m.offset,
                      at_message_start(commit.message, m.offset), {}, {}};
      c.checks = evaluate_semantic_checks(c, commit, *issue, *paths, config);
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<LinkCandidate> auto_validate(std::vector<LinkCandidate> candidates) {
  std::map<CommitId, int> per_commit;
  for (const auto& c : candidates) {
    if (c.detector == Detector::jl_key) ++per_commit[c.commit];
  }
  for (auto& c : candidates) {
    if (c.detector == Detector::jl_key && c.validation == Validation::unvalidated && per_commit[c.commit] == 1 &&
        c.at_message_start) {
      c.validation = Validation::auto_validated;
    }
  }
  return candidates;
}

nlohmann::json to_json(const LinkCandidate& c) {
  const auto& k = c.checks;
  return {{"commit", c.commit},
          {"issue", c.issue},
          {"detector", to_string(c.detector)},
          {"matched_text", c.matched_text},
          {"offset", c.offset},
          {"at_message_start", c.at_message_start},
          {"checks",
           {{"fixed_once", k.fixed_once},
            {"assignee_matches", k.assignee_matches},
            {"text_contained", k.text_contained},
            {"files_attached", k.files_attached},
            {"passed_count", k.passed_count},
            {"keyword_present", k.keyword_present},
            {"bare_number_syntax", k.bare_number_syntax}}},
          {"validation", to_string(c.validation)}};
}

LinkCandidate candidate_from_json(const nlohmann::json& j) {
  try {
    LinkCandidate c;
    c.commit = j.at("commit");
    c.issue = j.at("issue");
    c.detector = detector_from_string(j.at("detector").get<std::string>());
    c.matched_text = j.at("matched_text");
    c.offset = j.at("offset");
    c.at_message_start = j.at("at_message_start");
    const auto& k = j.at("checks");
    c.checks.fixed_once = k.at("fixed_once");
    c.checks.assignee_matches = k.at("assignee_matches");
    c.checks.text_contained = k.at("text_contained");
    c.checks.files_attached = k.at("files_attached");
    c.checks.passed_count = k.at("passed_count");
    c.checks.keyword_present = k.at("keyword_present");
    c.checks.bare_number_syntax = k.at("bare_number_syntax");
    c.validation = validation_from_string(j.at("validation").get<std::string>());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw LinkError(std::string("malformed link candidate: ") + e.what());
  }
}

std::string candidates_to_jsonl(const std::vector<LinkCandidate>& candidates) {
  std::string out;
  for (const auto& c : candidates) out += to_json(c).dump() + "\n";
  return out;
}

std::vector<LinkCandidate> candidates_from_jsonl(std::string_view text) {
  std::vector<LinkCandidate> out;
  std::size_t n = 0;
  for (const auto& line : split_lines(text)) {
    ++n;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw LinkError("link file line " + std::to_string(n) + ": " + e.what());
    }
    out.push_back(candidate_from_json(j));
  }
  return out;
}

}  // namespace szzkit::links
