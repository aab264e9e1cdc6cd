#pragma once

#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "szzkit/common/time.hpp"

namespace szzkit::issues {

struct ResolutionEvent {
  Timestamp at;
  std::string status;      // upper case, e.g. RESOLVED
  std::string resolution;  // upper case, e.g. FIXED; empty when unset
};

struct Comment {
  std::string author;
  Timestamp at;
  std::string text;
};

struct Issue {
  std::string key;
  Timestamp reported_at;
  std::string original_type;  // as declared by the tracker, e.g. "Bug"
  std::vector<ResolutionEvent> resolutions;
  std::vector<std::string> affected_versions;
  std::vector<std::string> fix_versions;
  std::optional<std::string> assignee;  // user id
  std::optional<std::string> assignee_name;
  std::optional<std::string> assignee_email;
  std::optional<std::string> severity;
  std::string title;
  std::string description;
  std::vector<Comment> comments;
  std::vector<std::string> attachments;
  std::string status;      // current, upper case
  std::string resolution;  // current, upper case
  nlohmann::json extra = nlohmann::json::object();  // fields we do not interpret

  [[nodiscard]] std::string project() const { return key.substr(0, key.rfind('-')); }
  [[nodiscard]] long number() const { return std::stol(key.substr(key.rfind('-') + 1)); }
  [[nodiscard]] bool is_bug_typed() const;
};

struct SkippedRecord {
  std::size_t line = 0;
  std::string reason;
};

struct IssueSet {
  std::map<std::string, Issue> issues;  // by key
  std::vector<SkippedRecord> skipped;

  [[nodiscard]] const Issue* find(const std::string& key) const {
    auto it = issues.find(key);
    return it == issues.end() ? nullptr : &it->second;
  }
};

class IssueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[nodiscard]] bool is_valid_issue_key(std::string_view key);

// Parses one record of the export format (the tracker's REST issue payload
// with an expanded changelog). Throws IssueError when required fields are
// missing or malformed.
[[nodiscard]] Issue parse_issue_record(const nlohmann::json& record);

// Malformed lines and issues of other projects are skipped and reported.
[[nodiscard]] IssueSet parse_issue_export(std::string_view text, const std::string& project_key);
[[nodiscard]] IssueSet load_issue_export(const std::filesystem::path& file, const std::string& project_key);

[[nodiscard]] bool was_fixed_once(const Issue& issue);
[[nodiscard]] bool was_closed_or_resolved(const Issue& issue);

struct RestSource {
  std::string base_url;  // e.g. https://issues.example.org/jira
  std::string authorization;  // optional Authorization header value
  int page_size = 100;
};

// Pages through the tracker's search endpoint and returns the export text
// (one record per line), ready to be written to disk and parsed offline.
[[nodiscard]] std::string fetch_issue_export(const RestSource& source, const std::string& project_key);

}  // namespace szzkit::issues
