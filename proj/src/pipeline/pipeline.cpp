#include "szzkit/pipeline/pipeline.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <ostream>
#include <thread>

#include "szzkit/common/text.hpp"
#include "szzkit/inducing/inducing.hpp"
#include "szzkit/labels/fix_label.hpp"
#include "szzkit/links/links.hpp"
#include "szzkit/predict/features.hpp"
#include "szzkit/predict/predict.hpp"
#include "szzkit/release/dataset.hpp"
#include "szzkit/release/release.hpp"
#include "szzkit/stats/report.hpp"
#include "szzkit/validation/service.hpp"
#include "szzkit/validation/store.hpp"
#include "szzkit/vcs/git_repository.hpp"
#include "szzkit/vcs/graph_cache.hpp"

namespace szzkit::pipeline {
namespace {

using nlohmann::json;

constexpr const char* kGraph = "graph.jsonl";
constexpr const char* kIssues = "issues.jsonl";
constexpr const char* kSkipped = "issues.skipped.csv";
constexpr const char* kSzzLinks = "links.szz.jsonl";
constexpr const char* kJlLinks = "links.jl.jsonl";
constexpr const char* kLabels = "labels.json";
constexpr const char* kFixes = "fixes.csv";
constexpr const char* kInducing = "inducing.json";
constexpr const char* kInducingCsv = "inducing.csv";
constexpr const char* kAssignments = "assignments.json";
constexpr const char* kDataset = "dataset";
constexpr const char* kManifest = "manifest.json";
constexpr const char* kReports = "reports";
constexpr const char* kExperiment = "experiment";
constexpr const char* kMetadata = "metadata.json";

std::string dump(const json& j) { return j.dump(2) + "\n"; }

fs::path require(const fs::path& file, const std::string& producer) {
  if (!fs::exists(file)) {
    throw PipelineError(fmt::format("missing {}; run `{}` first", file.string(), producer));
  }
  return file;
}

json read_json(const fs::path& file, const std::string& producer) {
  try {
    return json::parse(read_file(require(file, producer)));
  } catch (const json::exception& e) {
    throw PipelineError(fmt::format("{} is not valid JSON: {}", file.string(), e.what()));
  }
}

// ---- inputs --------------------------------------------------------------

vcs::ChangeGraph load_state_graph(const PipelineConfig& c) { return vcs::load_graph(require(c.out / kGraph, "ingest-vcs")); }

issues::IssueSet load_state_issues(const PipelineConfig& c) {
  return issues::parse_issue_export(read_file(require(c.out / kIssues, "ingest-issues")), c.project);
}

std::vector<links::LinkCandidate> load_links(const PipelineConfig& c, const char* name) {
  return links::candidates_from_jsonl(read_file(require(c.out / name, "detect-links")));
}

inducing::Filters make_filters(const PipelineConfig& c) {
  inducing::FilterConfig fc;
  if (!c.nonproduction.empty()) fc.nonproduction_path_patterns = c.nonproduction;
  if (!c.refactorings.empty()) fc.refactorings = inducing::parse_refactoring_report(read_file(c.refactorings));
  return inducing::Filters(std::move(fc));
}

links::LinkConfig link_config(const PipelineConfig& c) {
  links::LinkConfig lc;
  if (!c.keywords.empty()) lc.keywords = c.keywords;
  return lc;
}

std::vector<labels::Strategy> fix_strategies(const PipelineConfig& c) {
  std::vector<labels::Strategy> out;
  for (const auto& s : c.strategies) {
    auto st = labels::strategy_from_string(s);
    if (!st) throw PipelineError("unknown strategy " + s, kExitUsage);
    if (std::find(out.begin(), out.end(), *st) == out.end()) out.push_back(*st);
  }
  return out;
}

labels::Strategy fix_base(inducing::InducingStrategy s) {
  switch (s) {
    case inducing::InducingStrategy::SZZ: return labels::Strategy::SZZ;
    case inducing::InducingStrategy::JL_R: return labels::Strategy::JL;
    default: return labels::Strategy::JLMIV;
  }
}

std::vector<inducing::InducingStrategy> inducing_strategies(const PipelineConfig& c) {
  std::vector<inducing::InducingStrategy> out;
  for (const auto& s : c.inducing) {
    auto st = inducing::inducing_strategy_from_string(s);
    if (!st) throw PipelineError("unknown inducing strategy " + s, kExitUsage);
    if (std::find(out.begin(), out.end(), *st) == out.end()) out.push_back(*st);
  }
  return out;
}

struct Variant {
  std::string name;
  release::AssignStrategy assign = release::AssignStrategy::SixM;
  labels::Strategy fixes = labels::Strategy::SZZ;
  std::optional<inducing::InducingStrategy> inducing;
};

// "6m-szz", "av-jlmiv", "ind-jlmivr", ...
Variant parse_variant(const std::string& name) {
  const auto dash = name.find('-');
  if (dash == std::string::npos) throw PipelineError("label variant must look like <assign>-<strategy>: " + name, kExitUsage);
  const std::string head = to_lower(name.substr(0, dash)), tail = name.substr(dash + 1);
  Variant v;
  v.name = to_lower(name);
  if (head == "6m" || head == "av") {
    v.assign = head == "6m" ? release::AssignStrategy::SixM : release::AssignStrategy::AV;
    auto st = labels::strategy_from_string(tail);
    if (!st) throw PipelineError("unknown fix strategy in label variant " + name, kExitUsage);
    v.fixes = *st;
  } else if (head == "ind") {
    v.assign = release::AssignStrategy::IND;
    auto st = inducing::inducing_strategy_from_string(tail);
    if (!st) throw PipelineError("unknown inducing strategy in label variant " + name, kExitUsage);
    v.inducing = *st;
    v.fixes = fix_base(*st);
  } else {
    throw PipelineError("unknown assignment strategy in label variant " + name, kExitUsage);
  }
  return v;
}

// ---- serialization of stage outputs -------------------------------------

json labels_to_json(const labels::LabelResult& r) {
  json rows = json::array();
  for (const auto& l : r.labels) rows.push_back({{"commit", l.commit}, {"issues", l.fixing_for}});
  return {{"fixes", rows}, {"unvalidated_issues", r.unvalidated_issues}};
}

std::map<labels::Strategy, std::vector<labels::FixLabel>> load_labels(const PipelineConfig& c) {
  const json j = read_json(c.out / kLabels, "labels");
  std::map<labels::Strategy, std::vector<labels::FixLabel>> out;
  for (const auto& [name, body] : j.items()) {
    auto st = labels::strategy_from_string(name);
    if (!st) throw PipelineError("unknown strategy in " + std::string(kLabels) + ": " + name);
    auto& v = out[*st];
    for (const auto& row : body.at("fixes")) {
      v.push_back(labels::FixLabel{row.at("commit"), *st, row.at("issues").get<std::set<std::string>>()});
    }
  }
  return out;
}

const std::vector<labels::FixLabel>& labels_for(const std::map<labels::Strategy, std::vector<labels::FixLabel>>& all,
                                                labels::Strategy s) {
  auto it = all.find(s);
  if (it == all.end()) {
    throw PipelineError(fmt::format("no {} labels; run `labels` with --strategy {}", to_string(s), to_lower(to_string(s))));
  }
  return it->second;
}

std::optional<inducing::Classification> classification_from_string(std::string_view s) {
  using C = inducing::Classification;
  for (C c : {C::inducing_before_boundary, C::weak_suspect, C::partial_fix_suspect, C::hard_suspect}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

json inducing_to_json(const inducing::InducingResult& r) {
  json changes = json::array();
  for (const auto& c : r.changes) {
    changes.push_back({{"fixing_commit", c.fixing_commit},
                       {"issue", c.issue},
                       {"path", c.path},
                       {"inducing_commit", c.inducing_commit},
                       {"lines", c.lines},
                       {"classification", to_string(c.classification)},
                       {"boundary", format_iso8601(c.boundary_used)},
                       {"related_issue", c.related_issue}});
  }
  return {{"changes", changes}, {"notices", r.notices}};
}

std::map<inducing::InducingStrategy, inducing::InducingResult> load_inducing(const PipelineConfig& c) {
  const json j = read_json(c.out / kInducing, "inducing");
  std::map<inducing::InducingStrategy, inducing::InducingResult> out;
  for (const auto& [name, body] : j.items()) {
    auto st = inducing::inducing_strategy_from_string(name);
    if (!st) throw PipelineError("unknown inducing strategy in " + std::string(kInducing) + ": " + name);
    auto& r = out[*st];
    r.notices = body.at("notices").get<std::vector<std::string>>();
    for (const auto& row : body.at("changes")) {
      inducing::InducingChange ch;
      ch.fixing_commit = row.at("fixing_commit");
      ch.issue = row.at("issue");
      ch.path = row.at("path");
      ch.inducing_commit = row.at("inducing_commit");
      ch.lines = row.at("lines").get<std::set<int>>();
      auto cls = classification_from_string(row.at("classification").get<std::string>());
      auto boundary = parse_iso8601(row.at("boundary").get<std::string>());
      if (!cls || !boundary) throw PipelineError("malformed inducing record in " + std::string(kInducing));
      ch.classification = *cls;
      ch.boundary_used = *boundary;
      ch.strategy = *st;
      ch.related_issue = row.at("related_issue");
      r.changes.push_back(std::move(ch));
    }
  }
  return out;
}

json release_to_json(const release::Release& r) {
  return {{"name", r.name}, {"commit", r.release_commit}, {"released_at", format_iso8601(r.released_at)}};
}

json assignment_to_json(const release::ReleaseAssignment& a) {
  json unresolved = json::array();
  for (const auto& u : a.unresolved) unresolved.push_back({{"issue", u.issue}, {"version", u.version}});
  return {{"release", release_to_json(a.release)},
          {"strategy", to_string(a.strategy)},
          {"bugs", a.bugs},
          {"defective_files", a.defective_files},
          {"unmapped", a.unmapped},
          {"unresolved", unresolved},
          {"audit", a.audit}};
}

release::ReleaseAssignment assignment_from_json(const json& j) {
  release::ReleaseAssignment a;
  const auto& r = j.at("release");
  a.release.name = r.at("name");
  a.release.release_commit = r.at("commit");
  auto at = parse_iso8601(r.at("released_at").get<std::string>());
  if (!at) throw PipelineError("malformed release date in " + std::string(kAssignments));
  a.release.released_at = *at;
  const std::string strategy = j.at("strategy");
  a.strategy = strategy == "AV" ? release::AssignStrategy::AV
                                : strategy == "IND" ? release::AssignStrategy::IND : release::AssignStrategy::SixM;
  a.bugs = j.at("bugs").get<std::set<std::string>>();
  a.defective_files = j.at("defective_files").get<std::map<std::string, std::set<std::string>>>();
  a.unmapped = j.at("unmapped").get<std::map<std::string, std::set<std::string>>>();
  for (const auto& u : j.at("unresolved")) a.unresolved.push_back({u.at("issue"), u.at("version")});
  a.audit = j.at("audit").get<std::set<std::string>>();
  return a;
}

release::ReleaseTable load_release_table(const PipelineConfig& c, const vcs::ChangeGraph& graph) {
  if (c.releases.empty()) throw PipelineError("no release table given (--releases)", kExitUsage);
  return release::parse_release_table(read_file(c.releases), graph);
}

void write_metadata(const PipelineConfig& c, RunContext& ctx, const std::string& subcommand,
                    const std::string& started) {
  const fs::path file = c.out / kMetadata;
  json j = json::object();
  if (fs::exists(file)) {
    try {
      j = json::parse(read_file(file));
    } catch (const json::exception&) {
      j = json::object();
    }
  }
  j[subcommand] = {{"started_at", started}, {"finished_at", ctx.now ? ctx.now() : std::string{}}};
  write_file(file, dump(j));
}

std::string queue_summary(const validation::ValidationQueue& q) {
  return fmt::format("pending links: {}\npending issues: {}\nconflicts: {}\n", q.pending_links.size(),
                     q.pending_issues.size(), q.conflicts.size());
}

// ---- experiment inputs ---------------------------------------------------

std::vector<predict::ReleaseData> load_project(const fs::path& dir) {
  const fs::path ds = dir / kDataset;
  const json manifest = read_json(ds / kManifest, "emit");
  const std::string project = manifest.at("project");
  const auto variants = manifest.at("variants").get<std::vector<std::string>>();
  const auto churn = manifest.at("churn_features").get<std::vector<std::string>>();
  const auto stat = manifest.at("static_features").get<std::vector<std::string>>();
  std::vector<predict::ReleaseData> out;
  for (const auto& name : manifest.at("releases").get<std::vector<std::string>>()) {
    predict::ReleaseData d;
    d.project = project;
    d.release = name;
    d.feature_names = churn;
    d.feature_names.insert(d.feature_names.end(), stat.begin(), stat.end());
    const auto lines = split_lines(read_file(require(ds / (name + ".csv"), "emit")));
    if (lines.empty()) throw PipelineError("empty dataset file for " + name);
    const auto header = parse_csv_line(lines.front());
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const auto& f : d.feature_names) {
      if (!col.count(f)) throw PipelineError(fmt::format("dataset {} lacks column {}", name, f));
    }
    if (!col.count("lloc")) throw PipelineError(fmt::format("dataset {} lacks column lloc", name));
    for (std::size_t n = 1; n < lines.size(); ++n) {
      const auto cells = parse_csv_line(lines[n]);
      if (cells.size() != header.size()) throw PipelineError(fmt::format("dataset {} line {} is malformed", name, n + 1));
      d.files.push_back(cells[0]);
      predict::Row row;
      for (const auto& f : d.feature_names) {
        const std::string& cell = cells[col[f]];
        row.push_back(cell.empty() ? std::nullopt : std::optional<double>(std::stod(cell)));
      }
      d.features.push_back(std::move(row));
      const std::string& size = cells[col["lloc"]];
      d.sizes[cells[0]] = size.empty() ? 0.0 : std::stod(size);
    }
    for (const auto& v : variants) {
      const auto mlines = split_lines(read_file(require(ds / (name + "__" + v + ".matrix.csv"), "emit")));
      const auto mheader = parse_csv_line(mlines.at(0));
      std::vector<std::set<std::string>> defects(mheader.size() - 1);
      std::set<std::string> defective;
      for (std::size_t n = 1; n < mlines.size(); ++n) {
        const auto cells = parse_csv_line(mlines[n]);
        for (std::size_t k = 1; k < cells.size() && k < mheader.size(); ++k) {
          if (cells[k] == "1") {
            defects[k - 1].insert(cells[0]);
            defective.insert(cells[0]);
          }
        }
      }
      d.defects[v] = std::move(defects);
      d.defective[v] = std::move(defective);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<predict::FeatureSet> feature_sets(const PipelineConfig& c, const std::vector<predict::ReleaseData>& data,
                                              const std::vector<std::string>& churn, const std::vector<std::string>& stat) {
  (void)data;
  std::vector<predict::FeatureSet> out;
  for (const auto& name : c.features) {
    const std::string n = to_lower(name);
    predict::FeatureSet fs{n, {}};
    if (n == "all") {
      fs.features = churn;
      fs.features.insert(fs.features.end(), stat.begin(), stat.end());
    } else if (n == "sm") {
      fs.features = stat;
    } else if (n == "churn") {
      fs.features = churn;
    } else {
      throw PipelineError("unknown feature set " + name + " (all, sm, churn)", kExitUsage);
    }
    if (fs.features.empty()) throw PipelineError("feature set " + name + " is empty; supply --metrics for static metrics");
    out.push_back(std::move(fs));
  }
  return out;
}

}  // namespace

// ---- configuration -------------------------------------------------------

PipelineConfig apply_config(const json& j, PipelineConfig c) {
  if (!j.is_object()) throw PipelineError("config file must hold a JSON object", kExitUsage);
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "repo") c.repo = v.get<std::string>();
      else if (key == "heads") c.heads = v.get<std::vector<std::string>>();
      else if (key == "project") c.project = v.get<std::string>();
      else if (key == "issues") c.issues_file = v.get<std::string>();
      else if (key == "issues_url") c.issues_url = v.get<std::string>();
      else if (key == "issues_auth") c.issues_auth = v.get<std::string>();
      else if (key == "misspellings") c.misspellings = v.get<std::string>();
      else if (key == "refactorings") c.refactorings = v.get<std::string>();
      else if (key == "releases") c.releases = v.get<std::string>();
      else if (key == "metrics") c.metrics_dir = v.get<std::string>();
      else if (key == "nonproduction") c.nonproduction = v.get<std::vector<std::string>>();
      else if (key == "keywords") c.keywords = v.get<std::vector<std::string>>();
      else if (key == "strategies") c.strategies = v.get<std::vector<std::string>>();
      else if (key == "inducing") c.inducing = v.get<std::vector<std::string>>();
      else if (key == "variants") c.variants = v.get<std::vector<std::string>>();
      else if (key == "six_months") c.six_months = v.get<std::string>();
      else if (key == "include_non_bug_issues") c.include_non_bug_issues = v.get<bool>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "decisions") c.decisions = v.get<std::string>();
      else if (key == "host") c.host = v.get<std::string>();
      else if (key == "port") c.port = v.get<int>();
      else if (key == "token") c.token = v.get<std::string>();
      else if (key == "data") {
        c.data.clear();
        for (const auto& d : v.get<std::vector<std::string>>()) c.data.emplace_back(d);
      }
      else if (key == "labels") c.labels = v.get<std::vector<std::string>>();
      else if (key == "features") c.features = v.get<std::vector<std::string>>();
      else if (key == "reference") c.reference = v.get<std::string>();
      else if (key == "min_files") c.min_files = v.get<std::size_t>();
      else if (key == "min_defective") c.min_defective = v.get<std::size_t>();
      else if (key == "alpha") c.alpha = v.get<double>();
      else if (key == "threads") c.threads = v.get<unsigned>();
      else throw PipelineError("unknown config key " + key, kExitUsage);
    }
  } catch (const json::exception& e) {
    throw PipelineError(std::string("bad config value: ") + e.what(), kExitUsage);
  }
  return c;
}

void validate_config(const PipelineConfig& c, const std::string& sub) {
  const auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw PipelineError(fmt::format("{} needs {}", sub, what), kExitUsage);
  };
  const auto exists = [&](const fs::path& p, const std::string& flag) {
    if (!p.empty() && !fs::exists(p)) throw PipelineError(fmt::format("{} {} does not exist", flag, p.string()), kExitUsage);
  };
  if (std::find(kSubcommands.begin(), kSubcommands.end(), sub) == kSubcommands.end()) {
    throw PipelineError("unknown subcommand " + sub, kExitUsage);
  }
  exists(c.repo, "--repo");
  exists(c.issues_file, "--issues");
  exists(c.misspellings, "--misspellings");
  exists(c.refactorings, "--refactorings");
  exists(c.releases, "--releases");
  exists(c.metrics_dir, "--metrics");
  need(!c.strategies.empty(), "at least one strategy");
  (void)fix_strategies(c);
  (void)inducing_strategies(c);
  for (const auto& v : c.variants) (void)parse_variant(v);
  need(c.six_months == "fixed" || c.six_months == "reported", "--six-months fixed|reported");
  if (sub == "ingest-vcs" || sub == "all") need(!c.repo.empty(), "--repo");
  if (sub == "ingest-issues" || sub == "all") need(!c.issues_file.empty() || !c.issues_url.empty(), "--issues or --url");
  if (sub != "ingest-vcs" && sub != "experiment" && sub != "evaluate") need(!c.project.empty(), "--project");
  if (sub == "serve") need(!c.token.empty(), "--token");
  if (sub == "assign" || sub == "emit") need(!c.releases.empty(), "--releases");
  if (sub == "experiment") {
    need(!c.labels.empty(), "--labels");
    need(!c.features.empty(), "--features");
    for (const auto& l : c.labels) (void)parse_variant(l);
  }
  need(c.alpha == 0.05 || c.alpha == 0.10, "--alpha 0.05 or 0.10");
}

// ---- stages ----------------------------------------------------------------

void ingest_vcs(const PipelineConfig& c, RunContext& ctx) {
  fs::create_directories(c.out);
  const vcs::ChangeGraph graph = vcs::ingest_repository(c.repo, c.heads);
  vcs::save_graph(graph, c.out / kGraph);
  ctx.out << fmt::format("ingested {} commits, {} tags from {}\n", graph.size(), graph.release_tags().size(),
                         c.repo.string());
}

void ingest_issues(const PipelineConfig& c, RunContext& ctx) {
  fs::create_directories(c.out);
  const std::string text = !c.issues_file.empty()
                               ? read_file(c.issues_file)
                               : issues::fetch_issue_export(issues::RestSource{c.issues_url, c.issues_auth}, c.project);
  const issues::IssueSet set = issues::parse_issue_export(text, c.project);
  write_file(c.out / kIssues, text);
  std::string skipped = "line,reason\n";
  for (const auto& s : set.skipped) skipped += fmt::format("{},{}\n", s.line, csv_field(s.reason));
  write_file(c.out / kSkipped, skipped);
  ctx.out << fmt::format("ingested {} issues of {} ({} records skipped)\n", set.issues.size(), c.project,
                         set.skipped.size());
}

void detect_links(const PipelineConfig& c, RunContext& ctx) {
  const auto graph = load_state_graph(c);
  const auto set = load_state_issues(c);
  links::Misspellings misspellings;
  if (!c.misspellings.empty()) misspellings = links::parse_misspellings(read_file(c.misspellings), c.project);
  const auto strategies = fix_strategies(c);
  const bool want_szz = std::count(strategies.begin(), strategies.end(), labels::Strategy::SZZ) > 0;
  const bool want_jl = std::any_of(strategies.begin(), strategies.end(),
                                   [](labels::Strategy s) { return s != labels::Strategy::SZZ; });
  const auto lc = link_config(c);
  if (want_szz) {
    const auto szz = links::detect_szz_links(graph, set, lc);
    write_file(c.out / kSzzLinks, links::candidates_to_jsonl(szz));
    ctx.out << fmt::format("SZZ: {} candidates\n", szz.size());
  }
  if (want_jl) {
    const auto jl = links::auto_validate(links::detect_jl_links(graph, set, c.project, misspellings, lc));
    write_file(c.out / kJlLinks, links::candidates_to_jsonl(jl));
    const auto autos = std::count_if(jl.begin(), jl.end(), [](const links::LinkCandidate& l) {
      return l.validation == links::Validation::auto_validated;
    });
    ctx.out << fmt::format("JL: {} candidates, {} auto-validated\n", jl.size(), autos);
  }
}

void serve(const PipelineConfig& c, RunContext& ctx) {
  const auto graph = load_state_graph(c);
  const auto set = load_state_issues(c);
  validation::ValidationStore store(load_links(c, kJlLinks), set, graph, c.decision_log(),
                                    validation::StoreOptions{c.include_non_bug_issues});
  validation::ValidationService service(store, c.token);
  int port = c.port;
  if (port == 0) {
    port = service.bind_to_any_port(c.host);
    if (port < 0) throw PipelineError("cannot bind " + c.host);
  } else if (!service.bind(c.host, port)) {
    throw PipelineError(fmt::format("cannot bind {}:{}", c.host, port));
  }
  ctx.out << fmt::format("serving validation API on http://{}:{}\n", c.host, port) << queue_summary(store.queues());
  ctx.out.flush();
  std::thread notifier;
  if (ctx.on_serving) {
    notifier = std::thread([&] {
      service.wait_until_ready();
      ctx.on_serving(port, [&service] { service.stop(); });
    });
  }
  service.listen_after_bind();
  if (notifier.joinable()) notifier.join();
}

void labels(const PipelineConfig& c, RunContext& ctx) {
  const auto graph = load_state_graph(c);
  const auto set = load_state_issues(c);
  const auto strategies = fix_strategies(c);
  std::map<labels::Strategy, labels::LabelResult> results;
  std::vector<links::LinkCandidate> szz, jl;
  const bool want_jl = std::any_of(strategies.begin(), strategies.end(),
                                   [](labels::Strategy s) { return s != labels::Strategy::SZZ; });
  if (std::count(strategies.begin(), strategies.end(), labels::Strategy::SZZ)) {
    szz = load_links(c, kSzzLinks);
    results[labels::Strategy::SZZ] = labels::label_szz(szz, set);
  }
  if (want_jl) {
    validation::ValidationStore store(load_links(c, kJlLinks), set, graph, c.decision_log(),
                                      validation::StoreOptions{c.include_non_bug_issues});
    const auto q = store.queues();
    const bool needs_links = std::any_of(strategies.begin(), strategies.end(), [](labels::Strategy s) {
      return s == labels::Strategy::JLM || s == labels::Strategy::JLMIV;
    });
    const bool needs_types = std::count(strategies.begin(), strategies.end(), labels::Strategy::JLMIV) > 0;
    if ((needs_links && !q.pending_links.empty()) ||
        (needs_types && (!q.pending_issues.empty() || !q.conflicts.empty()))) {
      ctx.out << "expert validation pending; run `serve` and decide the queued items\n" << queue_summary(q);
      throw PipelineError("labels blocked by pending validation", kExitBlocked);
    }
    jl = store.candidates();
    const auto final_labels = store.final_labels();
    for (auto s : strategies) {
      if (s != labels::Strategy::SZZ) results[s] = labels::label_jl_family(jl, set, final_labels, s);
    }
  }
  json j = json::object();
  for (const auto& [s, r] : results) {
    j[std::string(to_string(s))] = labels_to_json(r);
    ctx.out << fmt::format("{}: {} fixing commits\n", to_string(s), r.labels.size());
  }
  write_file(c.out / kLabels, dump(j));
  write_file(c.out / kFixes, labels::fix_table_csv(labels::fix_table(szz, jl, results)));
}

void inducing(const PipelineConfig& c, RunContext& ctx) {
  const auto graph = load_state_graph(c);
  const auto set = load_state_issues(c);
  const auto all_labels = load_labels(c);
  const auto filters = make_filters(c);
  std::optional<std::map<std::string, std::optional<Timestamp>>> version_dates;
  if (!c.releases.empty()) version_dates = load_release_table(c, graph).version_dates(graph);
  vcs::GitBlobSource blobs(graph.repo_path());
  inducing::InducingInputs in{graph, set, filters, version_dates ? &*version_dates : nullptr, &blobs};
  json j = json::object();
  std::string csv;
  std::string notices;
  for (auto s : inducing_strategies(c)) {
    const auto result = inducing::find_inducing(labels_for(all_labels, fix_base(s)), in, s);
    j[std::string(to_string(s))] = inducing_to_json(result);
    std::string table = inducing::inducing_table_csv(result);
    if (!csv.empty()) table.erase(0, table.find('\n') + 1);
    csv += table;
    for (const auto& n : result.notices) notices += fmt::format("{}: {}\n", to_string(s), n);
    ctx.out << fmt::format("{}: {} inducing changes, {} kept\n", to_string(s), result.changes.size(),
                           result.kept().size());
  }
  write_file(c.out / kInducing, dump(j));
  write_file(c.out / kInducingCsv, csv);
  write_file(c.out / "inducing.notices.txt", notices);
}

void assign(const PipelineConfig& c, RunContext& ctx) {
  const auto graph = load_state_graph(c);
  const auto set = load_state_issues(c);
  const auto all_labels = load_labels(c);
  const auto table = load_release_table(c, graph);
  const auto filters = make_filters(c);
  vcs::GitBlobSource blobs(graph.repo_path());
  const release::AssignInputs in{graph, set, filters, &blobs};
  std::optional<std::map<inducing::InducingStrategy, inducing::InducingResult>> ind;
  const auto variant = c.six_months == "reported" ? release::SixMVariant::reported : release::SixMVariant::fixed;
  json j = json::object();
  for (const auto& name : c.variants) {
    const Variant v = parse_variant(name);
    const auto& fixes = labels_for(all_labels, v.fixes);
    json per = json::object();
    for (const auto& r : table.releases(graph)) {
      release::ReleaseAssignment a;
      switch (v.assign) {
        case release::AssignStrategy::SixM: a = release::assign_6m(r, fixes, in, variant); break;
        case release::AssignStrategy::AV: a = release::assign_av(r, fixes, in, table); break;
        case release::AssignStrategy::IND: {
          if (!ind) ind = load_inducing(c);
          auto it = ind->find(*v.inducing);
          if (it == ind->end()) {
            throw PipelineError(fmt::format("no {} inducing changes; run `inducing` with --inducing {}",
                                            to_string(*v.inducing), to_lower(to_string(*v.inducing))));
          }
          a = release::assign_ind(r, it->second, fixes, in);
          break;
        }
      }
      per[r.name] = assignment_to_json(a);
      ctx.out << fmt::format("{} {}: {} bugs, {} defective files\n", v.name, r.name, a.bugs.size(),
                             a.defective_files.size());
    }
    j[v.name] = per;
  }
  write_file(c.out / kAssignments, dump(j));
}

void emit(const PipelineConfig& c, RunContext& ctx) {
  const auto graph = load_state_graph(c);
  const auto set = load_state_issues(c);
  const auto all_labels = load_labels(c);
  const json assignments = read_json(c.out / kAssignments, "assign");
  const auto table = load_release_table(c, graph);
  const auto filters = make_filters(c);
  vcs::GitBlobSource blobs(graph.repo_path());

  // Prior fixes are counted with the most accurate label set available.
  std::set<vcs::CommitId> feature_fixes;
  for (auto s : {labels::Strategy::JLMIV, labels::Strategy::JLM, labels::Strategy::JL, labels::Strategy::SZZ}) {
    if (auto it = all_labels.find(s); it != all_labels.end()) {
      for (const auto& l : it->second) feature_fixes.insert(l.commit);
      break;
    }
  }

  const fs::path dir = c.out / kDataset;
  fs::create_directories(dir);
  std::vector<std::string> release_names, static_names;
  std::vector<std::string> variant_names;
  for (const auto& name : c.variants) {
    const Variant v = parse_variant(name);
    if (!assignments.contains(v.name)) throw PipelineError("no assignment for " + v.name + "; run `assign` first");
    variant_names.push_back(v.name);
  }
  bool static_seen = false;
  for (const auto& r : table.releases(graph)) {
    const auto files = release::production_files(graph, r, filters);
    release::FeatureTable features = predict::churn_features(graph, r, files, feature_fixes);
    if (!c.metrics_dir.empty()) {
      const fs::path metrics = c.metrics_dir / (r.name + ".csv");
      if (fs::exists(metrics)) {
        const auto sm = predict::parse_metrics_csv(read_file(metrics));
        if (static_seen && sm.names != static_names) {
          throw PipelineError("static metrics of " + r.name + " have different columns than earlier releases");
        }
        static_names = sm.names;
        static_seen = true;
        features = predict::merge_features(features, sm);
      }
    }
    if (static_seen && features.names.size() == predict::kChurnFeatures.size()) {
      throw PipelineError("no static metrics file for release " + r.name);
    }
    const auto sizes = predict::file_sizes(graph, r, files, blobs, filters.config().profile);
    std::vector<release::LabelVariant> variants;
    for (const auto& name : variant_names) {
      const Variant v = parse_variant(name);
      const json& per = assignments.at(v.name);
      if (!per.contains(r.name)) throw PipelineError("no assignment of " + r.name + " for " + v.name);
      const auto a = assignment_from_json(per.at(r.name));
      const auto last = release::last_fix_dates(labels_for(all_labels, v.fixes), graph);
      variants.push_back({v.name, release::build_matrix(files, a, set, last)});
    }
    const auto data = release::emit_dataset(files, variants, &features, &sizes);
    release::write_dataset(dir, r.name, data);
    release_names.push_back(r.name);
    ctx.out << fmt::format("{}: {} files\n", r.name, files.size());
  }
  const json manifest{{"project", c.project},
                      {"releases", release_names},
                      {"variants", variant_names},
                      {"churn_features", predict::kChurnFeatures},
                      {"static_features", static_names}};
  write_file(dir / kManifest, dump(manifest));
}

void evaluate(const PipelineConfig& c, RunContext& ctx) {
  std::vector<fs::path> dirs = c.data.empty() ? std::vector<fs::path>{c.out} : c.data;
  const fs::path reports = c.out / kReports;
  fs::create_directories(reports);
  json out = json::object();
  std::string text;
  std::vector<std::pair<std::string, std::vector<double>>> plot;

  // fix labels against the best available baseline
  {
    std::map<std::string, std::vector<std::optional<stats::Agreement>>> per;
    std::optional<labels::Strategy> baseline;
    for (const auto& dir : dirs) {
      PipelineConfig dc = c;
      dc.out = dir;
      const auto all_labels = load_labels(dc);
      if (!baseline) {
        for (auto s : {labels::Strategy::JLMIV, labels::Strategy::JLM, labels::Strategy::JL, labels::Strategy::SZZ}) {
          if (all_labels.count(s)) {
            baseline = s;
            break;
          }
        }
      }
      if (!baseline || !all_labels.count(*baseline)) throw PipelineError("no baseline labels in " + dir.string());
      std::set<std::string> base;
      for (const auto& l : all_labels.at(*baseline)) base.insert(l.commit);
      for (const auto& [s, ls] : all_labels) {
        std::set<std::string> cand;
        for (const auto& l : ls) cand.insert(l.commit);
        per[std::string(to_string(s))].push_back(stats::agreement(cand, base));
      }
    }
    std::vector<stats::NamedSummary> rows;
    json j = json::object();
    for (const auto& [name, values] : per) {
      std::vector<double> tp;
      for (const auto& a : values) {
        if (a) tp.push_back(a->true_positive_rate);
      }
      if (tp.empty()) continue;
      rows.emplace_back(name, stats::summarize(values));
      j[name] = stats::to_json(rows.back().second);
      plot.emplace_back("fixes:" + name, tp);
    }
    text += stats::agreement_table(fmt::format("Fixing commits vs {}", to_string(*baseline)), rows) + "\n";
    out["fixes"] = {{"baseline", to_string(*baseline)}, {"strategies", j}};
  }

  // inducing changes against JLMIV_R when present
  {
    std::map<std::string, std::vector<std::optional<stats::Agreement>>> per;
    std::string baseline_name;
    for (const auto& dir : dirs) {
      PipelineConfig dc = c;
      dc.out = dir;
      if (!fs::exists(dir / kInducing)) continue;
      const auto ind = load_inducing(dc);
      auto base_it = ind.find(inducing::InducingStrategy::JLMIV_R);
      if (base_it == ind.end()) base_it = std::prev(ind.end());
      baseline_name = std::string(to_string(base_it->first));
      const auto keys = [](const inducing::InducingResult& r) {
        std::set<std::string> s;
        for (const auto* ch : r.kept()) s.insert(ch->fixing_commit + "|" + ch->path + "|" + ch->inducing_commit);
        return s;
      };
      const auto base = keys(base_it->second);
      for (const auto& [s, r] : ind) per[std::string(to_string(s))].push_back(stats::agreement(keys(r), base));
    }
    std::vector<stats::NamedSummary> rows;
    json j = json::object();
    for (const auto& [name, values] : per) {
      if (std::none_of(values.begin(), values.end(), [](const auto& a) { return a.has_value(); })) continue;
      rows.emplace_back(name, stats::summarize(values));
      j[name] = stats::to_json(rows.back().second);
    }
    if (!rows.empty()) {
      text += stats::agreement_table("Inducing changes vs " + baseline_name, rows) + "\n";
      out["inducing"] = {{"baseline", baseline_name}, {"strategies", j}};
    }
  }

  // defective files per release against the reference variant
  {
    std::map<std::string, std::vector<std::optional<stats::Agreement>>> per;
    std::string reference;
    for (const auto& dir : dirs) {
      if (!fs::exists(dir / kAssignments)) continue;
      PipelineConfig dc = c;
      dc.out = dir;
      const json a = read_json(dir / kAssignments, "assign");
      std::string ref = !c.reference.empty() ? to_lower(c.reference) : a.contains("ind-jlmivr") ? "ind-jlmivr" : "";
      if (ref.empty() && !a.empty()) ref = a.items().begin().key();
      if (!a.contains(ref)) throw PipelineError("reference variant " + ref + " not assigned in " + dir.string());
      reference = ref;
      for (const auto& [variant, releases] : a.items()) {
        for (const auto& [rel, body] : releases.items()) {
          const auto files = [](const json& b) {
            std::set<std::string> s;
            for (const auto& [f, issues] : b.at("defective_files").items()) s.insert(f);
            return s;
          };
          per[variant].push_back(stats::agreement(files(body), files(a.at(ref).at(rel))));
        }
      }
    }
    std::vector<stats::NamedSummary> rows;
    json j = json::object();
    for (const auto& [name, values] : per) {
      if (std::none_of(values.begin(), values.end(), [](const auto& a) { return a.has_value(); })) {
        j[name] = {{"projects", 0}, {"excluded", values.size()}};
        continue;
      }
      rows.emplace_back(name, stats::summarize(values));
      j[name] = stats::to_json(rows.back().second);
      std::vector<double> add;
      for (const auto& v : values) {
        if (v) add.push_back(v->additional_rate);
      }
      plot.emplace_back("files-additional:" + name, add);
    }
    if (!per.empty()) {
      text += stats::agreement_table("Defective files per release vs " + reference, rows) + "\n";
      out["defective_files"] = {{"baseline", reference}, {"variants", j}};
    }
  }

  // cost boundaries of an experiment, when one was run into this directory
  const fs::path results_file = c.out / kExperiment / "results.json";
  if (fs::exists(results_file)) {
    const auto res = predict::ExperimentResult::from_json(read_json(results_file, "experiment"));
    std::map<std::pair<std::string, std::string>, const predict::ModelOutcome*> cell;
    for (const auto& o : res.outcomes) cell[{o.release, o.model}] = &o;
    std::vector<std::vector<double>> lower, upper;
    for (const auto& r : res.releases) {
      std::vector<double> lo, up;
      for (const auto& m : res.models) {
        const auto* o = cell.at({r, m});
        lo.push_back(o->bounds.lower);
        up.push_back(o->bounds.upper);
      }
      lower.push_back(std::move(lo));
      upper.push_back(std::move(up));
    }
    for (std::size_t m = 0; m < res.models.size(); ++m) {
      std::vector<double> lo, up;
      for (std::size_t r = 0; r < res.releases.size(); ++r) {
        lo.push_back(lower[r][m]);
        up.push_back(upper[r][m]);
      }
      plot.emplace_back("lower:" + res.models[m], lo);
      plot.emplace_back("upper:" + res.models[m], up);
    }
    const std::size_t k = res.models.size();
    if (k >= 2 && k <= 10 && res.releases.size() >= 2) {
      const auto lo = stats::friedman_nemenyi(res.models, lower, c.alpha, false);
      const auto up = stats::friedman_nemenyi(res.models, upper, c.alpha, true);
      text += stats::rank_test_table("Lower boundary (smaller is better)", lo) + "\n";
      text += stats::rank_test_table("Upper boundary (larger is better)", up) + "\n";
      out["rank_tests"] = {{"lower", stats::to_json(lo)}, {"upper", stats::to_json(up)}};
    } else {
      text += fmt::format("Rank tests skipped: {} models over {} releases\n", k, res.releases.size());
    }
  }

  write_file(reports / "evaluation.txt", text);
  write_file(reports / "evaluation.json", dump(out));
  write_file(reports / "quartiles.csv", stats::quartiles_csv(plot));
  ctx.out << text;
}

void experiment(const PipelineConfig& c, RunContext& ctx) {
  std::vector<fs::path> dirs = c.data.empty() ? std::vector<fs::path>{c.out} : c.data;
  std::vector<predict::ReleaseData> data;
  std::vector<std::string> churn, stat;
  bool first = true;
  for (const auto& dir : dirs) {
    const json manifest = read_json(dir / kDataset / kManifest, "emit");
    const auto ch = manifest.at("churn_features").get<std::vector<std::string>>();
    const auto st = manifest.at("static_features").get<std::vector<std::string>>();
    if (first) {
      churn = ch;
      stat = st;
      first = false;
    } else if (ch != churn || st != stat) {
      throw PipelineError("projects disagree on feature columns: " + dir.string());
    }
    auto rel = load_project(dir);
    data.insert(data.end(), std::make_move_iterator(rel.begin()), std::make_move_iterator(rel.end()));
  }
  predict::ExperimentConfig ec;
  for (const auto& l : c.labels) ec.labels.push_back(parse_variant(l).name);
  ec.reference = c.reference.empty() ? std::string{} : parse_variant(c.reference).name;
  ec.feature_sets = feature_sets(c, data, churn, stat);
  ec.min_files = c.min_files;
  ec.min_defective = c.min_defective;
  ec.threads = c.threads;
  predict::ExperimentResult res;
  try {
    res = predict::run_experiment(data, ec);
  } catch (const predict::PredictError& e) {
    throw PipelineError(e.what());
  }
  const fs::path dir = c.out / kExperiment;
  fs::create_directories(dir);
  write_file(dir / "results.json", dump(res.to_json()));
  std::string text = fmt::format("{} releases evaluated, {} excluded by the filter\n", res.releases.size(),
                                 res.excluded.size());
  text += fmt::format("{:<28} {:>8} {:>12} {:>12} {:>12} {:>12} {:>8}\n", "model", "releases", "lower_med",
                      "lower_mad", "upper_med", "upper_mad", "never");
  for (const auto& s : res.summaries) {
    text += fmt::format("{:<28} {:>8} {:>12} {:>12} {:>12} {:>12} {:>8}\n", s.model, s.releases,
                        stats::format_number(s.lower_median), stats::format_number(s.lower_mad),
                        stats::format_number(s.upper_median), stats::format_number(s.upper_mad),
                        fmt::format("{:.1f}%", 100.0 * s.never_saves_share));
  }
  write_file(dir / "summary.txt", text);
  ctx.out << text;
}

void all(const PipelineConfig& c, RunContext& ctx) {
  ingest_vcs(c, ctx);
  ingest_issues(c, ctx);
  detect_links(c, ctx);
  labels(c, ctx);
  inducing(c, ctx);
  if (!c.releases.empty()) {
    assign(c, ctx);
    emit(c, ctx);
  }
  evaluate(c, ctx);
}

int run(const std::string& subcommand, const PipelineConfig& config, RunContext& ctx) {
  const std::string started = ctx.now ? ctx.now() : std::string{};
  try {
    validate_config(config, subcommand);
    if (subcommand == "ingest-vcs") ingest_vcs(config, ctx);
    else if (subcommand == "ingest-issues") ingest_issues(config, ctx);
    else if (subcommand == "detect-links") detect_links(config, ctx);
    else if (subcommand == "serve") serve(config, ctx);
    else if (subcommand == "labels") labels(config, ctx);
    else if (subcommand == "inducing") inducing(config, ctx);
    else if (subcommand == "assign") assign(config, ctx);
    else if (subcommand == "emit") emit(config, ctx);
    else if (subcommand == "evaluate") evaluate(config, ctx);
    else if (subcommand == "experiment") experiment(config, ctx);
    else if (subcommand == "all") all(config, ctx);
    if (fs::exists(config.out)) write_metadata(config, ctx, subcommand, started);
    return kExitOk;
  } catch (const PipelineError& e) {
    ctx.err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

std::vector<fs::path> primary_outputs(const fs::path& out) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(out)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), out);
    if (rel == kMetadata) continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace szzkit::pipeline
