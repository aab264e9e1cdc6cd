#include "szzkit/issues/issue.hpp"

#include <algorithm>
#include <regex>

#include "szzkit/common/text.hpp"

namespace szzkit::issues {

using nlohmann::json;

namespace {

std::string str_or(const json& j, const char* key, std::string fallback = {}) {
  if (!j.is_object()) return fallback;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (it->is_string()) return it->get<std::string>();
  return it->dump();
}

// Objects like {"name": "Bug"} or plain strings.
std::string name_of(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_object()) {
    if (auto s = str_or(j, "name"); !s.empty()) return s;
    return str_or(j, "value");
  }
  return {};
}

Timestamp require_time(const json& j, const char* key, const std::string& ctx) {
  const std::string raw = str_or(j, key);
  auto t = parse_iso8601(raw);
  if (!t) throw IssueError(ctx + ": bad or missing timestamp '" + std::string(key) + "'");
  return *t;
}

std::vector<std::string> names(const json& fields, const char* key) {
  std::vector<std::string> out;
  auto it = fields.find(key);
  if (it == fields.end() || !it->is_array()) return out;
  for (const auto& v : *it) {
    if (auto n = name_of(v); !n.empty()) out.push_back(n);
  }
  return out;
}

const std::set<std::string> kInterpretedFields{"issuetype", "created", "summary", "description", "assignee",
                                               "priority", "versions", "fixVersions", "attachment", "comment",
                                               "status", "resolution"};

}  // namespace

bool Issue::is_bug_typed() const { return iequals(original_type, "bug"); }

bool is_valid_issue_key(std::string_view key) {
  static const std::regex kKey("[A-Z][A-Z0-9_]*-[1-9][0-9]*");
  return std::regex_match(key.begin(), key.end(), kKey);
}

Issue parse_issue_record(const json& record) {
  if (!record.is_object()) throw IssueError("record is not an object");
  Issue issue;
  issue.key = str_or(record, "key");
  if (!is_valid_issue_key(issue.key)) throw IssueError("invalid issue key '" + issue.key + "'");
  const auto fit = record.find("fields");
  if (fit == record.end() || !fit->is_object()) throw IssueError(issue.key + ": missing fields object");
  const json& f = *fit;

  issue.reported_at = require_time(f, "created", issue.key);
  issue.original_type = f.contains("issuetype") ? name_of(f["issuetype"]) : "";
  if (issue.original_type.empty()) throw IssueError(issue.key + ": missing issue type");
  issue.title = str_or(f, "summary");
  issue.description = str_or(f, "description");
  if (auto a = f.find("assignee"); a != f.end() && a->is_object()) {
    std::string id = str_or(*a, "name");
    if (id.empty()) id = str_or(*a, "key");
    if (id.empty()) id = str_or(*a, "accountId");
    if (!id.empty()) issue.assignee = id;
    if (auto d = str_or(*a, "displayName"); !d.empty()) issue.assignee_name = d;
    if (auto e = str_or(*a, "emailAddress"); !e.empty()) issue.assignee_email = e;
  }
  if (auto p = f.find("priority"); p != f.end()) {
    if (auto s = name_of(*p); !s.empty()) issue.severity = s;
  }
  issue.affected_versions = names(f, "versions");
  issue.fix_versions = names(f, "fixVersions");
  if (auto at = f.find("attachment"); at != f.end() && at->is_array()) {
    for (const auto& a : *at) {
      if (auto n = str_or(a, "filename"); !n.empty()) issue.attachments.push_back(n);
    }
  }
  if (auto c = f.find("comment"); c != f.end() && c->is_object() && c->contains("comments")) {
    for (const auto& jc : (*c)["comments"]) {
      Comment cm;
      cm.author = jc.contains("author") ? str_or(jc["author"], "name") : "";
      cm.at = require_time(jc, "created", issue.key + " comment");
      cm.text = str_or(jc, "body");
      issue.comments.push_back(std::move(cm));
    }
    std::stable_sort(issue.comments.begin(), issue.comments.end(),
                     [](const Comment& a, const Comment& b) { return a.at < b.at; });
  }
  issue.status = to_upper(f.contains("status") ? name_of(f["status"]) : "");
  issue.resolution = to_upper(f.contains("resolution") ? name_of(f["resolution"]) : "");

  // Replay the changelog; each history touching status or resolution yields
  // one event carrying the state after the change.
  struct History {
    Timestamp at;
    std::optional<std::string> status, resolution;
  };
  std::vector<History> histories;
  if (auto cl = record.find("changelog"); cl != record.end() && cl->is_object() && cl->contains("histories")) {
    for (const auto& h : (*cl)["histories"]) {
      History hist{require_time(h, "created", issue.key + " changelog"), {}, {}};
      if (!h.contains("items")) continue;
      for (const auto& item : h["items"]) {
        const std::string field = to_lower(str_or(item, "field"));
        if (field == "status") hist.status = to_upper(str_or(item, "toString"));
        if (field == "resolution") hist.resolution = to_upper(str_or(item, "toString"));
      }
      if (hist.status || hist.resolution) histories.push_back(std::move(hist));
    }
  }
  std::stable_sort(histories.begin(), histories.end(), [](const History& a, const History& b) { return a.at < b.at; });
  std::string status = "OPEN", resolution;
  for (const auto& h : histories) {
    if (h.status) status = *h.status;
    if (h.resolution) resolution = *h.resolution;
    issue.resolutions.push_back(ResolutionEvent{h.at, status, resolution});
  }

  for (const auto& [k, v] : f.items()) {
    if (!kInterpretedFields.count(k) && !v.is_null()) issue.extra[k] = v;
  }
  return issue;
}

IssueSet parse_issue_export(std::string_view text, const std::string& project_key) {
  IssueSet set;
  std::size_t line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      Issue issue = parse_issue_record(json::parse(line));
      if (issue.project() != project_key) {
        set.skipped.push_back({line_no, issue.key + " belongs to another project"});
        continue;
      }
      if (set.issues.count(issue.key)) {
        set.skipped.push_back({line_no, "duplicate record for " + issue.key});
        continue;
      }
      set.issues.emplace(issue.key, std::move(issue));
    } catch (const json::exception& e) {
      set.skipped.push_back({line_no, std::string("malformed JSON: ") + e.what()});
    } catch (const IssueError& e) {
      set.skipped.push_back({line_no, e.what()});
    }
  }
  return set;
}

IssueSet load_issue_export(const std::filesystem::path& file, const std::string& project_key) {
  if (!std::filesystem::exists(file)) throw IssueError("issue export not found: " + file.string());
  return parse_issue_export(read_file(file), project_key);
}

bool was_fixed_once(const Issue& issue) {
  if (issue.resolution == "FIXED") return true;
  return std::any_of(issue.resolutions.begin(), issue.resolutions.end(),
                     [](const ResolutionEvent& e) { return e.resolution == "FIXED"; });
}

bool was_closed_or_resolved(const Issue& issue) {
  const auto done = [](const std::string& s) { return s == "CLOSED" || s == "RESOLVED"; };
  if (done(issue.status)) return true;
  return std::any_of(issue.resolutions.begin(), issue.resolutions.end(),
                     [&](const ResolutionEvent& e) { return done(e.status); });
}

}  // namespace szzkit::issues
