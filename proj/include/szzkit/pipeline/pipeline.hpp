#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace szzkit::pipeline {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBlocked = 3;  // expert validation still pending

struct PipelineConfig {
  fs::path repo;
  std::vector<std::string> heads;  // empty: all local branches
  std::string project;
  fs::path issues_file;
  std::string issues_url;
  std::string issues_auth;
  fs::path misspellings;
  fs::path refactorings;
  fs::path releases;
  fs::path metrics_dir;  // "<release>.csv" static metrics per release
  std::vector<std::string> nonproduction;  // empty: built-in patterns
  std::vector<std::string> keywords;       // empty: built-in keywords
  std::vector<std::string> strategies{"szz", "jl", "jlm", "jlmiv"};
  std::vector<std::string> inducing{"szz", "jlmiv", "jlmivr", "jlmivrav", "jlr"};
  std::vector<std::string> variants{"6m-szz", "av-jlmiv", "ind-jlmivr"};
  std::string six_months = "fixed";  // or "reported"
  bool include_non_bug_issues = false;
  fs::path out = "szzkit-out";
  fs::path decisions;  // default: <out>/decisions.jsonl
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string token;
  // experiment / evaluate
  std::vector<fs::path> data;  // pipeline output directories, one per project
  std::vector<std::string> labels{"6m-szz", "ind-jlmivr"};
  std::vector<std::string> features{"all", "sm"};
  std::string reference;
  std::size_t min_files = 100;
  std::size_t min_defective = 5;
  double alpha = 0.05;
  unsigned threads = 0;

  [[nodiscard]] fs::path decision_log() const { return decisions.empty() ? out / "decisions.jsonl" : decisions; }
};

class PipelineError : public std::runtime_error {
 public:
  explicit PipelineError(const std::string& what, int exit_code = kExitError)
      : std::runtime_error(what), exit_code_(exit_code) {}
  [[nodiscard]] int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

// Copies every key present in `j` over `base`; unknown keys are errors.
[[nodiscard]] PipelineConfig apply_config(const nlohmann::json& j, PipelineConfig base);

// Checks what `subcommand` needs; throws PipelineError with kExitUsage.
void validate_config(const PipelineConfig& config, const std::string& subcommand);

inline const std::vector<std::string> kSubcommands{"ingest-vcs", "ingest-issues", "detect-links", "serve",
                                                   "labels",     "inducing",      "assign",       "emit",
                                                   "evaluate",   "experiment",    "all"};

struct RunContext {
  std::ostream& out;
  std::ostream& err;
  // Wall clock for the metadata sidecar; injectable for tests.
  std::function<std::string()> now;
  // Called by `serve` once the port is bound; the argument stops the server.
  std::function<void(int port, std::function<void()> stop)> on_serving;
};

// Runs one subcommand; returns the process exit status.
int run(const std::string& subcommand, const PipelineConfig& config, RunContext& ctx);

// Individual stages, throwing PipelineError.
void ingest_vcs(const PipelineConfig& c, RunContext& ctx);
void ingest_issues(const PipelineConfig& c, RunContext& ctx);
void detect_links(const PipelineConfig& c, RunContext& ctx);
void serve(const PipelineConfig& c, RunContext& ctx);
void labels(const PipelineConfig& c, RunContext& ctx);
void inducing(const PipelineConfig& c, RunContext& ctx);
void assign(const PipelineConfig& c, RunContext& ctx);
void emit(const PipelineConfig& c, RunContext& ctx);
void evaluate(const PipelineConfig& c, RunContext& ctx);
void experiment(const PipelineConfig& c, RunContext& ctx);
void all(const PipelineConfig& c, RunContext& ctx);

// Files an output directory holds after `all`, excluding the metadata sidecar.
[[nodiscard]] std::vector<fs::path> primary_outputs(const fs::path& out);

}  // namespace szzkit::pipeline
