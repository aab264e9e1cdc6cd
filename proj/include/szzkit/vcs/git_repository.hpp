#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "szzkit/common/process.hpp"
#include "szzkit/vcs/change_graph.hpp"

namespace szzkit::vcs {

class RepositoryError : public std::runtime_error {
 public:
  RepositoryError(const std::string& what, std::string object_id = {})
      : std::runtime_error(what), object_id_(std::move(object_id)) {}
  // Offending object when git reported a corrupt or missing object.
  [[nodiscard]] const std::string& object_id() const { return object_id_; }

 private:
  std::string object_id_;
};

struct TreeEntry {
  std::string mode;
  std::string type;
  std::string object;
  std::string path;
};

// Thin wrapper around the git command line.
class GitRepository {
 public:
  explicit GitRepository(std::filesystem::path path);

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

  // Runs `git -C <repo> args...`; throws RepositoryError on a non-zero exit.
  ProcessResult git(const std::vector<std::string>& args, std::string_view input = {}) const;

  // Missing objects are absent from the result.
  [[nodiscard]] std::map<std::string, std::string> read_blobs(const std::vector<std::string>& ids) const;
  [[nodiscard]] std::vector<TreeEntry> list_tree(const CommitId& commit) const;

 private:
  std::filesystem::path path_;
};

// Loads every commit reachable from the selected heads (all local branches
// when `heads` is empty), with per-parent diffs, 60% rename detection and
// release tags.
[[nodiscard]] ChangeGraph ingest_repository(const std::filesystem::path& repo_path,
                                            const std::vector<std::string>& heads = {});

// Source of file contents by blob id.
class BlobSource {
 public:
  virtual ~BlobSource() = default;
  [[nodiscard]] virtual std::optional<std::string> blob(const std::string& id) const = 0;
};

// Reads blobs from a repository, caching every content it has loaded.
class GitBlobSource final : public BlobSource {
 public:
  explicit GitBlobSource(std::filesystem::path repo) : repo_(std::move(repo)) {}

  // Loads many blobs with a single git invocation.
  void prefetch(const std::vector<std::string>& ids) const;
  [[nodiscard]] std::optional<std::string> blob(const std::string& id) const override;

 private:
  GitRepository repo_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::optional<std::string>> cache_;
};

}  // namespace szzkit::vcs
