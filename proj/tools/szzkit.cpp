#include <CLI11.hpp>
#include <chrono>
#include <iostream>

#include "szzkit/common/text.hpp"
#include "szzkit/common/time.hpp"
#include "szzkit/pipeline/pipeline.hpp"

namespace pl = szzkit::pipeline;

int main(int argc, char** argv) {
  CLI::App app{"Defect label and dataset pipeline"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  pl::PipelineConfig c;
  std::string config_file;
  std::string repo, issues, misspellings, refactorings, releases, metrics, out = c.out.string(), decisions;
  std::vector<std::string> data;

  app.add_option("--config", config_file, "JSON config; its keys override flags")->check(CLI::ExistingFile);
  app.add_option("--repo", repo, "Git repository");
  app.add_option("--head", c.heads, "Branch to ingest (repeatable; default: all local branches)");
  app.add_option("--project", c.project, "Issue tracker project key");
  app.add_option("--issues,--from", issues, "Issue export file (JSON lines)");
  app.add_option("--url", c.issues_url, "Tracker base URL to fetch issues from");
  app.add_option("--auth", c.issues_auth, "Authorization header value for --url");
  app.add_option("--misspellings", misspellings, "WRONG=CORRECT key prefix corrections");
  app.add_option("--refactorings", refactorings, "Refactoring report (commit,path,old_start,old_end,kind)");
  app.add_option("--releases", releases, "Release table (name,commit[,released_at])");
  app.add_option("--metrics", metrics, "Directory of per-release static metric files <release>.csv");
  app.add_option("--nonproduction", c.nonproduction, "Non-production path globs (replaces the defaults)")
      ->delimiter(',');
  app.add_option("--keywords", c.keywords, "Fix keywords for SZZ linking")->delimiter(',');
  app.add_option("--strategy,--strategies", c.strategies, "Fix label strategies")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--inducing", c.inducing, "Inducing strategies")->delimiter(',')->capture_default_str();
  app.add_option("--variants", c.variants, "Label variants to assign and emit, <6m|av|ind>-<strategy>")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--six-months", c.six_months, "6M reference date: fixed or reported")->capture_default_str();
  app.add_flag("--include-non-bug-issues", c.include_non_bug_issues, "Queue non-bug issues for type validation");
  app.add_option("--out", out, "Output directory holding the pipeline state")->capture_default_str();
  app.add_option("--decisions", decisions, "Decision log (default <out>/decisions.jsonl)");
  app.add_option("--host", c.host, "Bind address for serve")->capture_default_str();
  app.add_option("--port", c.port, "Port for serve (0: any free port)")->capture_default_str();
  app.add_option("--token", c.token, "Session token required by the validation API");
  app.add_option("--data", data, "Pipeline output directories of the projects to compare");
  app.add_option("--labels", c.labels, "Training label variants")->delimiter(',')->capture_default_str();
  app.add_option("--features", c.features, "Feature sets: all, sm, churn")->delimiter(',')->capture_default_str();
  app.add_option("--reference", c.reference, "Test label variant (default: last of --labels)");
  app.add_option("--min-files", c.min_files, "Release filter: minimum files")->capture_default_str();
  app.add_option("--min-defective", c.min_defective, "Release filter: minimum defective files per label")
      ->capture_default_str();
  app.add_option("--alpha", c.alpha, "Significance level for Nemenyi (0.05 or 0.10)")->capture_default_str();
  app.add_option("--threads", c.threads, "Worker threads for experiment (0: all cores)");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"ingest-vcs", "Read the commit graph into <out>/graph.jsonl"},
      {"ingest-issues", "Read the issue export (file or tracker) into <out>/issues.jsonl"},
      {"detect-links", "Find commit-issue link candidates"},
      {"serve", "Host the validation HTTP API"},
      {"labels", "Label fixing commits per strategy"},
      {"inducing", "Find bug-inducing changes"},
      {"assign", "Assign bugs to releases"},
      {"emit", "Write per-release datasets and issue-file matrices"},
      {"evaluate", "Agreement reports and rank tests"},
      {"experiment", "Cross-project defect prediction experiment"},
      {"all", "ingest-vcs through evaluate"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pl::kExitUsage;
  }

  c.repo = repo;
  c.issues_file = issues;
  c.misspellings = misspellings;
  c.refactorings = refactorings;
  c.releases = releases;
  c.metrics_dir = metrics;
  c.out = out;
  c.decisions = decisions;
  for (const auto& d : data) c.data.emplace_back(d);
  if (!config_file.empty()) {
    try {
      c = pl::apply_config(nlohmann::json::parse(szzkit::read_file(config_file)), c);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: " << config_file << ": " << e.what() << "\n";
      return pl::kExitUsage;
    } catch (const pl::PipelineError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return e.exit_code();
    }
  }

  pl::RunContext ctx{std::cout, std::cerr, [] {
                       return szzkit::format_iso8601(
                           std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()));
                     },
                     {}};
  return pl::run(app.get_subcommands().front()->get_name(), c, ctx);
}
