#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "szzkit/pipeline/pipeline.hpp"
#include "szzkit/vcs/change_graph.hpp"

namespace szzkit::testing {

namespace fs = std::filesystem;

using FileState = std::map<std::string, std::vector<std::string>>;  // path -> lines

struct Op {
  enum Kind { set_line, insert_line, delete_line, write_file, remove_file, take_file } kind;
  std::string path;
  int line = 0;             // 1-based; insert_line places the text before this line
  std::vector<std::string> text;
  int from_mark = 0;        // take_file: copy the file as it is at this commit
};

Op set_line(std::string path, int line, std::string text);
Op insert_line(std::string path, int line, std::string text);
Op delete_line(std::string path, int line);
Op write_file(std::string path, std::vector<std::string> lines);
Op remove_file(std::string path);
Op take_file(std::string path, int from_mark);

struct Person {
  std::string name;
  std::string email;
};

// Builds a repository through `git fast-import` with fixed dates, so the
// same script always yields the same commit ids.
class RepoBuilder {
 public:
  explicit RepoBuilder(fs::path dir);

  // Starts `branch` at `from` (0: orphan); returns the new commit's mark.
  int commit(const std::string& branch, const std::string& message, const Person& who, std::int64_t unix_time,
             const std::vector<Op>& ops, int from = 0, std::vector<int> merges = {});
  void tag(const std::string& name, int mark);
  // Runs fast-import and checks out main; returns mark -> commit id.
  std::map<int, std::string> finish();

  [[nodiscard]] const FileState& state(int mark) const { return states_.at(mark); }
  [[nodiscard]] const std::vector<int>& parents(int mark) const { return parents_.at(mark); }
  [[nodiscard]] std::int64_t time(int mark) const { return times_.at(mark); }
  [[nodiscard]] const std::vector<int>& marks() const { return order_; }
  [[nodiscard]] const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::string stream_;
  int next_mark_ = 1;
  std::map<std::string, int> heads_;
  std::map<int, FileState> states_;
  std::map<int, std::vector<int>> parents_;
  std::map<int, std::int64_t> times_;
  std::vector<int> order_;
};

void write_text(const fs::path& file, const std::string& text);

// One inducing attribution: fixing commit, issue, path, inducing commit, classification.
using InducingRow = std::tuple<std::string, std::string, std::string, std::string, std::string>;
// release -> path -> issues
using Assignment = std::map<std::string, std::map<std::string, std::set<std::string>>>;

// The planted demonstration project "DEMO": two branches with one merge, two
// releases and one example of every labeling pitfall.
struct DemoFixture {
  fs::path root;
  fs::path repo;
  fs::path issues;
  fs::path decisions;
  fs::path refactorings;
  fs::path releases;
  std::map<std::string, std::string> sha;  // commit name -> id
  std::map<std::string, std::set<std::string>> fixes;  // strategy -> commit ids
  std::map<std::string, std::set<InducingRow>> inducing;  // JLMIV, JLMIV_R
  Assignment ind;  // IND with JLMIV+R
  // Kept for the blame oracle.
  std::shared_ptr<RepoBuilder> builder;
  std::map<int, std::string> mark_sha;
};

[[nodiscard]] DemoFixture build_demo(const fs::path& root);

// Pipeline configuration for the DEMO project writing to `out`.
[[nodiscard]] pipeline::PipelineConfig demo_config(const DemoFixture& fx, const fs::path& out);

// Label, inducing and IND results read back from a pipeline output directory.
struct PipelineOutputs {
  std::map<std::string, std::set<std::string>> fixes;
  std::map<std::string, std::set<InducingRow>> inducing;
  std::map<std::string, Assignment> assignments;  // variant -> release -> files
};

[[nodiscard]] PipelineOutputs read_outputs(const fs::path& out);

// Randomized project "RND": random edits on up to two branches and commit
// messages mixing every link form. Everything is derived from `seed`.
struct RandomFixture {
  fs::path repo;
  fs::path issues;
  std::shared_ptr<RepoBuilder> builder;
  std::map<int, std::string> mark_sha;
};

[[nodiscard]] RandomFixture build_random(const fs::path& root, std::uint32_t seed);

struct MonotonicityCheck {
  std::size_t jl = 0, jlm = 0, jlmiv = 0;            // fixing commits
  std::size_t inducing = 0, inducing_filtered = 0;  // JLMIV and JLMIV+R attributions
  std::vector<std::string> violations;
};

// Builds the random project for `seed`, takes random expert decisions and
// checks JLMIV within JLM within JL (commits) and JLMIV+R within JLMIV
// (fix, issue, path, inducing commit, lines).
[[nodiscard]] MonotonicityCheck check_monotonicity(const fs::path& root, std::uint32_t seed);

// Brute-force line origins: replays every commit forward, matching lines by
// longest common subsequence. Inherited merge lines take the origin with the
// earliest commit date (smaller id on ties); lines new against every parent
// belong to the merge. Returns mark -> path -> origin mark per line.
[[nodiscard]] std::map<int, std::map<std::string, std::vector<int>>> replay_origins(const RepoBuilder& b,
                                                                                     const std::map<int, std::string>& sha);

struct BlameCheck {
  std::size_t compared = 0;
  std::vector<std::string> mismatches;  // "commit path:line got X want Y"
};

// Compares vcs::last_touch with replay_origins on every line of every file at
// every commit of the builder's history.
[[nodiscard]] BlameCheck check_blame(const RepoBuilder& b, const std::map<int, std::string>& sha,
                                     const vcs::ChangeGraph& graph);

// Temporary directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  [[nodiscard]] const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace szzkit::testing
