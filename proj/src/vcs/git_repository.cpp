#include "szzkit/vcs/git_repository.hpp"

#include <cctype>
#include <regex>
#include <sstream>

#include "szzkit/common/text.hpp"
#include "szzkit/vcs/diff_parser.hpp"

namespace szzkit::vcs {
namespace {

std::string first_object_id(std::string_view text) {
  static const std::regex kOid("[0-9a-f]{40}");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(text.begin(), text.end(), m, kOid)) return m.str();
  return {};
}

// A line of a merge diff is "unchanged" relative to another parent when that
// parent's diff leaves it alone.
bool line_unchanged_against(const ParentDiff& other, const std::string& path, int new_line) {
  for (const auto& a : other.actions) {
    if (!a.path_new || *a.path_new != path) continue;
    if (a.kind == ActionKind::added) return false;
    return map_new_to_old(a.hunks, new_line).has_value();
  }
  return true;
}

bool deletion_point_unchanged_against(const ParentDiff& other, const std::string& path, int after_line) {
  for (const auto& a : other.actions) {
    if (!a.path_new || *a.path_new != path) continue;
    if (a.kind == ActionKind::added) return false;
    for (const auto& h : a.hunks) {
      if (h.new_len == 0 && h.new_start == after_line) return false;
    }
    if (after_line >= 1 && !map_new_to_old(a.hunks, after_line)) return false;
    return true;
  }
  return true;
}

void flag_merge_duplicates(std::vector<ParentDiff>& diffs) {
  if (diffs.size() < 2) return;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    for (auto& action : diffs[i].actions) {
      if (!action.path_new) continue;  // deletions relative to one parent only
      for (auto& hunk : action.hunks) {
        bool duplicate = false;
        for (std::size_t j = 0; j < diffs.size() && !duplicate; ++j) {
          if (j == i) continue;
          if (hunk.new_len == 0) {
            duplicate = deletion_point_unchanged_against(diffs[j], *action.path_new, hunk.new_start);
            continue;
          }
          bool all = true;
          for (int l = hunk.new_start; l < hunk.new_start + hunk.new_len && all; ++l) {
            all = line_unchanged_against(diffs[j], *action.path_new, l);
          }
          duplicate = all;
        }
        hunk.merge_duplicate = duplicate;
      }
    }
  }
}

std::vector<Commit> parse_log(std::string_view out) {
  std::vector<Commit> commits;
  for (const auto& record : split(out, '\x1e')) {
    if (trim(record).empty()) continue;
    auto fields = split(record, '\x1f');
    if (fields.size() < 7) throw RepositoryError("malformed git log record");
    Commit c;
    c.id = std::string(trim(fields[0]));
    for (const auto& p : split(trim(fields[1]), ' ')) {
      if (!p.empty()) c.parents.push_back(p);
    }
    c.author_date = from_unix(std::stoll(fields[2]));
    c.committer_date = from_unix(std::stoll(fields[3]));
    c.author_name = fields[4];
    c.author_email = fields[5];
    std::string message = fields[6];
    for (std::size_t k = 7; k < fields.size(); ++k) message += '\x1f' + fields[k];
    while (!message.empty() && message.back() == '\n') message.pop_back();
    c.message = std::move(message);
    commits.push_back(std::move(c));
  }
  return commits;
}

}  // namespace

GitRepository::GitRepository(std::filesystem::path path) : path_(std::move(path)) {}

ProcessResult GitRepository::git(const std::vector<std::string>& args, std::string_view input) const {
  std::vector<std::string> argv{"git", "-c", "core.quotepath=false", "-c", "diff.noprefix=false",
                                "-c", "log.showSignature=false", "-C", path_.string()};
  argv.insert(argv.end(), args.begin(), args.end());
  ProcessResult r = run_process(argv, input);
  if (r.exit_code != 0) {
    std::string msg = "git " + (args.empty() ? std::string{} : args.front()) + " failed in " + path_.string() + ": " +
                      std::string(trim(r.err));
    throw RepositoryError(msg, first_object_id(r.err));
  }
  return r;
}

std::map<std::string, std::string> GitRepository::read_blobs(const std::vector<std::string>& ids) const {
  std::map<std::string, std::string> blobs;
  if (ids.empty()) return blobs;
  std::string input;
  for (const auto& id : ids) input += id + "\n";
  const ProcessResult r = git({"cat-file", "--batch"}, input);
  std::string_view out = r.out;
  std::size_t pos = 0;
  while (pos < out.size()) {
    const auto eol = out.find('\n', pos);
    if (eol == std::string_view::npos) break;
    const std::string_view header = out.substr(pos, eol - pos);
    pos = eol + 1;
    const auto parts = split(header, ' ');
    if (parts.size() == 2 && parts[1] == "missing") continue;
    if (parts.size() != 3) throw RepositoryError("unexpected cat-file header: " + std::string(header));
    const std::size_t size = std::stoull(parts[2]);
    if (parts[1] == "blob") blobs.emplace(parts[0], std::string(out.substr(pos, size)));
    pos += size + 1;
  }
  return blobs;
}

std::vector<TreeEntry> GitRepository::list_tree(const CommitId& commit) const {
  const ProcessResult r = git({"ls-tree", "-r", "-z", "--full-tree", commit});
  std::vector<TreeEntry> entries;
  for (const auto& rec : split(r.out, '\0')) {
    if (rec.empty()) continue;
    const auto tab = rec.find('\t');
    const auto meta = split(rec.substr(0, tab), ' ');
    if (meta.size() != 3 || tab == std::string::npos) throw RepositoryError("unexpected ls-tree output");
    entries.push_back(TreeEntry{meta[0], meta[1], meta[2], rec.substr(tab + 1)});
  }
  return entries;
}

ChangeGraph ingest_repository(const std::filesystem::path& repo_path, const std::vector<std::string>& heads) {
  GitRepository repo{repo_path};
  try {
    repo.git({"rev-parse", "--git-dir"});
  } catch (const RepositoryError& e) {
    throw RepositoryError("unreadable repository " + repo_path.string() + ": " + e.what());
  }

  std::map<std::string, CommitId> all_heads, tags;
  {
    const ProcessResult r =
        repo.git({"for-each-ref", "--format=%(objectname)%09%(objecttype)%09%(*objectname)%09%(*objecttype)%09%(refname)",
                  "refs/heads", "refs/tags"});
    for (const auto& line : split_lines(r.out)) {
      const auto f = split(line, '\t');
      if (f.size() != 5) continue;
      if (f[4].rfind("refs/heads/", 0) == 0) {
        if (f[1] == "commit") all_heads.emplace(f[4].substr(11), f[0]);
      } else if (f[4].rfind("refs/tags/", 0) == 0) {
        if (f[1] == "commit") tags.emplace(f[4].substr(10), f[0]);
        else if (f[1] == "tag" && f[3] == "commit") tags.emplace(f[4].substr(10), f[2]);
      }
    }
  }

  std::map<std::string, CommitId> selected;
  if (heads.empty()) {
    selected = all_heads;
  } else {
    for (const auto& h : heads) {
      auto it = all_heads.find(h);
      if (it == all_heads.end()) throw RepositoryError("unknown head " + h + " in " + repo_path.string());
      selected.insert(*it);
    }
  }
  if (selected.empty()) return ChangeGraph({}, {}, {}, {}, repo_path);

  std::vector<std::string> log_args{"log", "--topo-order", "--format=%x1e%H%x1f%P%x1f%at%x1f%ct%x1f%an%x1f%ae%x1f%B"};
  for (const auto& [name, id] : selected) log_args.push_back(id);
  log_args.push_back("--");
  std::vector<Commit> commits = parse_log(repo.git(log_args).out);

  std::string requests;
  std::vector<std::pair<CommitId, CommitId>> order;
  for (const auto& c : commits) {
    if (c.parents.empty()) {
      requests += c.id + "\n";
      order.emplace_back(c.id, CommitId{});
    }
    for (const auto& p : c.parents) {
      requests += c.id + " " + p + "\n";
      order.emplace_back(c.id, p);
    }
  }
  const ProcessResult diff_out =
      repo.git({"diff-tree", "--stdin", "--always", "-r", "--root", "-p", "-M60%", "--unified=0", "--full-index",
                "--no-color", "--no-ext-diff", "--src-prefix=a/", "--dst-prefix=b/"},
               requests);
  std::vector<DiffBlock> blocks = parse_diff_tree_output(diff_out.out);
  if (blocks.size() != order.size()) {
    throw RepositoryError("diff-tree returned " + std::to_string(blocks.size()) + " blocks for " +
                          std::to_string(order.size()) + " requests");
  }

  std::map<CommitId, std::vector<ParentDiff>> diffs;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& [cid, pid] = order[i];
    if (blocks[i].commit != cid) throw RepositoryError("diff-tree output out of order at " + cid, cid);
    ParentDiff pd{pid, std::move(blocks[i].actions)};
    for (auto& a : pd.actions) {
      a.commit = cid;
      a.parent = pid;
    }
    diffs[cid].push_back(std::move(pd));
  }
  for (auto& [id, per_parent] : diffs) flag_merge_duplicates(per_parent);

  // Head reachability.
  std::map<CommitId, std::size_t> pos;
  for (std::size_t i = 0; i < commits.size(); ++i) pos.emplace(commits[i].id, i);
  for (const auto& [name, tip] : selected) {
    std::vector<CommitId> stack{tip};
    while (!stack.empty()) {
      CommitId c = std::move(stack.back());
      stack.pop_back();
      auto it = pos.find(c);
      if (it == pos.end()) continue;
      auto& commit = commits[it->second];
      if (!commit.branch_reachability.insert(name).second) continue;
      for (const auto& p : commit.parents) stack.push_back(p);
    }
  }

  std::map<std::string, CommitId> release_tags;
  for (const auto& [name, id] : tags) {
    if (pos.count(id)) release_tags.emplace(name, id);
  }
  return ChangeGraph(std::move(commits), std::move(diffs), std::move(release_tags), std::move(selected), repo_path);
}

void GitBlobSource::prefetch(const std::vector<std::string>& ids) const {
  std::vector<std::string> missing;
  {
    std::lock_guard lock(mutex_);
    for (const auto& id : ids) {
      if (!id.empty() && !cache_.count(id)) missing.push_back(id);
    }
  }
  if (missing.empty()) return;
  auto loaded = repo_.read_blobs(missing);
  std::lock_guard lock(mutex_);
  for (const auto& id : missing) {
    auto it = loaded.find(id);
    cache_[id] = it == loaded.end() ? std::nullopt : std::optional<std::string>(std::move(it->second));
  }
}

std::optional<std::string> GitBlobSource::blob(const std::string& id) const {
  if (id.empty()) return std::nullopt;
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  }
  prefetch({id});
  std::lock_guard lock(mutex_);
  return cache_[id];
}

}  // namespace szzkit::vcs
