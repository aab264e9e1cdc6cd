#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "szzkit/issues/issue.hpp"

namespace szzkit::issues {

namespace {

// Splits "https://host:port/prefix" into the scheme+authority and the path prefix.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw IssueError("not an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, ""};
  std::string prefix = url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, path_start), prefix};
}

}  // namespace

std::string fetch_issue_export(const RestSource& source, const std::string& project_key) {
  const auto [origin, prefix] = split_url(source.base_url);
  httplib::Client client(origin);
  client.set_follow_location(true);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);
  httplib::Headers headers{{"Accept", "application/json"}};
  if (!source.authorization.empty()) headers.emplace("Authorization", source.authorization);

  std::string out;
  int start = 0;
  for (;;) {
    httplib::Params params{{"jql", "project=" + project_key + " ORDER BY key ASC"},
                           {"startAt", std::to_string(start)},
                           {"maxResults", std::to_string(source.page_size)},
                           {"expand", "changelog"},
                           {"fields", "*all"}};
    auto res = client.Get(prefix + "/rest/api/2/search", params, headers);
    if (!res) throw IssueError("issue tracker unreachable at " + source.base_url + ": " + httplib::to_string(res.error()));
    if (res->status != 200) {
      throw IssueError("issue tracker returned HTTP " + std::to_string(res->status) + " for " + source.base_url);
    }
    nlohmann::json page;
    try {
      page = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw IssueError(std::string("unparseable search response: ") + e.what());
    }
    const auto& batch = page.at("issues");
    for (const auto& issue : batch) out += issue.dump() + "\n";
    start += static_cast<int>(batch.size());
    const int total = page.value("total", 0);
    if (batch.empty() || start >= total) break;
  }
  return out;
}

}  // namespace szzkit::issues
