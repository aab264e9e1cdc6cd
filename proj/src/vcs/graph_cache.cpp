#include "szzkit/vcs/graph_cache.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "szzkit/common/text.hpp"

namespace szzkit::vcs {

using nlohmann::json;

namespace {

json hunk_to_json(const Hunk& h) {
  json j{{"old", {h.old_start, h.old_len}}, {"new", {h.new_start, h.new_len}}, {"old_lines", h.old_lines},
         {"new_lines", h.new_lines}};
  if (h.merge_duplicate) j["merge_duplicate"] = true;
  return j;
}

Hunk hunk_from_json(const json& j) {
  Hunk h;
  h.old_start = j.at("old").at(0);
  h.old_len = j.at("old").at(1);
  h.new_start = j.at("new").at(0);
  h.new_len = j.at("new").at(1);
  h.old_lines = j.at("old_lines").get<std::vector<std::string>>();
  h.new_lines = j.at("new_lines").get<std::vector<std::string>>();
  h.merge_duplicate = j.value("merge_duplicate", false);
  return h;
}

json action_to_json(const FileAction& a) {
  json j{{"kind", to_string(a.kind)}};
  if (a.path_old) j["path_old"] = *a.path_old;
  if (a.path_new) j["path_new"] = *a.path_new;
  if (a.binary) j["binary"] = true;
  if (!a.blob_old.empty()) j["blob_old"] = a.blob_old;
  if (!a.blob_new.empty()) j["blob_new"] = a.blob_new;
  j["hunks"] = json::array();
  for (const auto& h : a.hunks) j["hunks"].push_back(hunk_to_json(h));
  return j;
}

FileAction action_from_json(const json& j, const CommitId& commit, const CommitId& parent) {
  FileAction a;
  a.commit = commit;
  a.parent = parent;
  a.kind = action_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("path_old")) a.path_old = j["path_old"].get<std::string>();
  if (j.contains("path_new")) a.path_new = j["path_new"].get<std::string>();
  a.binary = j.value("binary", false);
  a.blob_old = j.value("blob_old", "");
  a.blob_new = j.value("blob_new", "");
  for (const auto& h : j.at("hunks")) a.hunks.push_back(hunk_from_json(h));
  return a;
}

}  // namespace

void save_graph(const ChangeGraph& graph, const std::filesystem::path& file) {
  std::ostringstream out;
  json header{{"format", "szzkit-graph"},
              {"version", kGraphCacheVersion},
              {"repo", graph.repo_path().string()},
              {"heads", graph.heads()},
              {"release_tags", graph.release_tags()}};
  out << header.dump() << '\n';
  for (const auto& id : graph.topological_order()) {
    const Commit& c = graph.commit(id);
    json jc{{"type", "commit"},
            {"id", c.id},
            {"parents", c.parents},
            {"author_date", to_unix(c.author_date)},
            {"committer_date", to_unix(c.committer_date)},
            {"author_name", c.author_name},
            {"author_email", c.author_email},
            {"message", c.message},
            {"branches", c.branch_reachability}};
    out << jc.dump() << '\n';
    for (const auto& pd : graph.diffs(id)) {
      json jd{{"type", "diff"}, {"commit", id}, {"parent", pd.parent}, {"actions", json::array()}};
      for (const auto& a : pd.actions) jd["actions"].push_back(action_to_json(a));
      out << jd.dump() << '\n';
    }
  }
  write_file(file, out.str());
}

ChangeGraph load_graph(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw CacheError("cannot open graph cache " + file.string());
  std::string line;
  if (!std::getline(in, line)) throw CacheError("empty graph cache " + file.string());
  std::vector<Commit> commits;
  std::map<CommitId, std::vector<ParentDiff>> diffs;
  std::map<std::string, CommitId> heads, tags;
  std::filesystem::path repo;
  std::size_t line_no = 1;
  try {
    const json header = json::parse(line);
    if (header.value("format", "") != "szzkit-graph") throw CacheError("not a graph cache: " + file.string());
    if (header.value("version", 0) != kGraphCacheVersion) {
      throw CacheError("unsupported graph cache version in " + file.string());
    }
    repo = header.value("repo", "");
    heads = header.at("heads").get<std::map<std::string, CommitId>>();
    tags = header.at("release_tags").get<std::map<std::string, CommitId>>();
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json j = json::parse(line);
      const std::string type = j.at("type");
      if (type == "commit") {
        Commit c;
        c.id = j.at("id");
        c.parents = j.at("parents").get<std::vector<CommitId>>();
        c.author_date = from_unix(j.at("author_date"));
        c.committer_date = from_unix(j.at("committer_date"));
        c.author_name = j.at("author_name");
        c.author_email = j.at("author_email");
        c.message = j.at("message");
        c.branch_reachability = j.at("branches").get<std::set<std::string>>();
        commits.push_back(std::move(c));
      } else if (type == "diff") {
        const CommitId id = j.at("commit"), parent = j.at("parent");
        ParentDiff pd{parent, {}};
        for (const auto& ja : j.at("actions")) pd.actions.push_back(action_from_json(ja, id, parent));
        diffs[id].push_back(std::move(pd));
      } else {
        throw CacheError("unknown record type '" + type + "'");
      }
    }
  } catch (const json::exception& e) {
    throw CacheError(file.string() + ":" + std::to_string(line_no) + ": " + e.what());
  }
  return ChangeGraph(std::move(commits), std::move(diffs), std::move(tags), std::move(heads), repo);
}

}  // namespace szzkit::vcs
