#include "fixture.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "szzkit/common/process.hpp"
#include "szzkit/common/time.hpp"
#include "szzkit/inducing/inducing.hpp"
#include "szzkit/issues/issue.hpp"
#include "szzkit/labels/fix_label.hpp"
#include "szzkit/links/links.hpp"
#include "szzkit/validation/store.hpp"
#include "szzkit/vcs/blame.hpp"
#include "szzkit/vcs/git_repository.hpp"

namespace szzkit::testing {

using nlohmann::json;

Op set_line(std::string path, int line, std::string text) { return {Op::set_line, std::move(path), line, {std::move(text)}}; }
Op insert_line(std::string path, int line, std::string text) {
  return {Op::insert_line, std::move(path), line, {std::move(text)}};
}
Op delete_line(std::string path, int line) { return {Op::delete_line, std::move(path), line, {}}; }
Op write_file(std::string path, std::vector<std::string> lines) { return {Op::write_file, std::move(path), 0, std::move(lines)}; }
Op remove_file(std::string path) { return {Op::remove_file, std::move(path), 0, {}}; }
Op take_file(std::string path, int from_mark) { return {Op::take_file, std::move(path), 0, {}, from_mark}; }

void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + file.string());
}

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

void git(const fs::path& dir, const std::vector<std::string>& args, std::string_view input = {}) {
  std::vector<std::string> argv{"git", "-C", dir.string()};
  argv.insert(argv.end(), args.begin(), args.end());
  const auto r = run_process(argv, input);
  if (r.exit_code != 0) throw std::runtime_error("git " + args.front() + " failed: " + r.err);
}

}  // namespace

RepoBuilder::RepoBuilder(fs::path dir) : dir_(std::move(dir)) {}

int RepoBuilder::commit(const std::string& branch, const std::string& message, const Person& who,
                        std::int64_t unix_time, const std::vector<Op>& ops, int from, std::vector<int> merges) {
  int parent = from;
  if (parent == 0) {
    if (auto it = heads_.find(branch); it != heads_.end()) parent = it->second;
  }
  FileState before = parent ? states_.at(parent) : FileState{};
  FileState st = before;
  for (const auto& op : ops) {
    auto& lines = st[op.path];
    switch (op.kind) {
      case Op::set_line: lines.at(op.line - 1) = op.text.front(); break;
      case Op::insert_line: lines.insert(lines.begin() + (op.line - 1), op.text.front()); break;
      case Op::delete_line: lines.erase(lines.begin() + (op.line - 1)); break;
      case Op::write_file: lines = op.text; break;
      case Op::remove_file: st.erase(op.path); break;
      case Op::take_file: {
        const auto& src = states_.at(op.from_mark);
        if (auto it = src.find(op.path); it != src.end()) {
          lines = it->second;
        } else {
          st.erase(op.path);
        }
        break;
      }
    }
  }

  const int mark = next_mark_++;
  const std::string ident = who.name + " <" + who.email + "> " + std::to_string(unix_time) + " +0000";
  std::ostringstream s;
  s << "commit refs/heads/" << branch << "\nmark :" << mark << "\nauthor " << ident << "\ncommitter " << ident
    << "\ndata " << message.size() << "\n" << message << "\n";
  if (parent) s << "from :" << parent << "\n";
  for (int m : merges) s << "merge :" << m << "\n";
  for (const auto& [path, lines] : before) {
    if (!st.count(path)) s << "D " << path << "\n";
  }
  for (const auto& [path, lines] : st) {
    auto it = before.find(path);
    if (it != before.end() && it->second == lines) continue;
    const std::string body = join_lines(lines);
    s << "M 100644 inline " << path << "\ndata " << body.size() << "\n" << body << "\n";
  }
  s << "\n";
  stream_ += s.str();

  std::vector<int> ps;
  if (parent) ps.push_back(parent);
  ps.insert(ps.end(), merges.begin(), merges.end());
  parents_[mark] = ps;
  states_[mark] = std::move(st);
  times_[mark] = unix_time;
  order_.push_back(mark);
  heads_[branch] = mark;
  return mark;
}

void RepoBuilder::tag(const std::string& name, int mark) {
  stream_ += "reset refs/tags/" + name + "\nfrom :" + std::to_string(mark) + "\n\n";
}

std::map<int, std::string> RepoBuilder::finish() {
  fs::create_directories(dir_);
  const auto init = run_process({"git", "init", "-q", "-b", "main", dir_.string()});
  if (init.exit_code != 0) throw std::runtime_error("git init failed: " + init.err);
  const fs::path marks = dir_ / ".git" / "fixture-marks";
  git(dir_, {"fast-import", "--quiet", "--done", "--export-marks=" + marks.string()}, stream_ + "done\n");
  std::map<int, std::string> out;
  std::ifstream in(marks);
  std::string m, sha;
  while (in >> m >> sha) out[std::stoi(m.substr(1))] = sha;
  return out;
}

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "szzkit-test-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

// ---- the DEMO project --------------------------------------------------------

namespace {

constexpr std::int64_t kT0 = 1609718400;  // 2021-01-04T00:00:00Z
constexpr std::int64_t kDay = 86400;

std::int64_t at(double day) { return kT0 + static_cast<std::int64_t>(day * kDay) + 9 * 3600; }

std::string iso(std::int64_t unix_time) { return format_iso8601(from_unix(unix_time)); }

const Person kAlice{"Alice Archer", "alice@example.org"};
const Person kBob{"Bob Baker", "bob@example.org"};
const Person kCarol{"Carol Chen", "carol@example.org"};

// "class A {", ten numbered fields, "}"
std::vector<std::string> java_class(const std::string& name) {
  std::vector<std::string> lines{"class " + name + " {"};
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
  for (int i = 2; i <= 11; ++i) lines.push_back("  int " + lower + "_" + std::to_string(i) + " = " + std::to_string(i) + ";");
  lines.push_back("}");
  return lines;
}

struct PlannedIssue {
  std::string key;
  std::string type = "Bug";
  double reported_day = 0;
  const Person* assignee = nullptr;
  std::optional<double> resolved_day;  // resolved as Fixed
  std::vector<std::string> versions;
  std::string summary;
};

json issue_record(const PlannedIssue& s) {
  json fields{{"issuetype", {{"name", s.type}}},
              {"created", iso(at(s.reported_day))},
              {"summary", s.summary},
              {"description", ""},
              {"status", {{"name", s.resolved_day ? "Resolved" : "Open"}}},
              {"versions", json::array()},
              {"fixVersions", json::array()}};
  for (const auto& v : s.versions) fields["versions"].push_back({{"name", v}});
  if (s.assignee != nullptr) {
    const std::string id = s.assignee->email.substr(0, s.assignee->email.find('@'));
    fields["assignee"] = {{"name", id}, {"displayName", s.assignee->name}, {"emailAddress", s.assignee->email}};
  }
  json histories = json::array();
  if (s.resolved_day) {
    fields["resolution"] = {{"name", "Fixed"}};
    histories.push_back({{"created", iso(at(*s.resolved_day))},
                         {"items",
                          {{{"field", "status"}, {"fromString", "Open"}, {"toString", "Resolved"}},
                           {{"field", "resolution"}, {"fromString", ""}, {"toString", "Fixed"}}}}});
  }
  return {{"key", s.key}, {"fields", fields}, {"changelog", {{"histories", histories}}}};
}

json link_decision(const std::string& commit, const std::string& issue, const std::string& rater,
                   const std::string& verdict, double day) {
  return {{"type", "link"}, {"commit", commit}, {"issue", issue}, {"rater", rater}, {"verdict", verdict},
          {"decided_at", at(day)}};
}

json type_decision(const std::string& issue, const std::string& rater, const std::string& label,
                   const std::string& round, double day) {
  return {{"type", "issue_type"}, {"issue", issue}, {"rater", rater}, {"label", label}, {"round", round},
          {"decided_at", at(day)}};
}

}  // namespace

DemoFixture build_demo(const fs::path& root) {
  DemoFixture fx;
  fx.root = root;
  fx.repo = root / "demo.git";
  fx.builder = std::make_shared<RepoBuilder>(fx.repo);
  RepoBuilder& b = *fx.builder;
  std::map<std::string, int> m;

  const std::string J = "src/main/java/demo/";
  const std::string A = J + "A.java", B = J + "B.java", C = J + "C.java", D = J + "D.java", E = J + "E.java",
                    G = J + "G.java", H = J + "H.java", K = J + "K.java", L = J + "L.java", R = J + "Retry.java";
  const std::string T = "src/test/java/demo/ATest.java";
  auto e_lines = java_class("E");
  e_lines[1] = "  // e note about defaults";

  m["C0"] = b.commit("main", "Initial import", kAlice, at(0),
                     {write_file(A, java_class("A")), write_file(B, java_class("B")), write_file(C, java_class("C")),
                      write_file(D, java_class("D")), write_file(E, e_lines), write_file(G, java_class("G")),
                      write_file(H, java_class("H")), write_file(K, java_class("K")), write_file(L, java_class("L")),
                      write_file(T, {"class ATest {", "  void testParse() {}", "  void testEmpty() {}", "}"}),
                      write_file("pom.xml", {"<project>", "  <version>one-snapshot</version>", "</project>"})});
  m["N1"] = b.commit("main", "Add readme", kBob, at(1), {write_file("README.md", {"Demo project", "Build with maven"})});
  m["I1"] = b.commit("main", "Add parser validation", kBob, at(2),
                     {set_line(A, 3, "  int a_3 = validate(three);"), set_line(A, 4, "  int a_4 = validate(four);")});
  m["I2"] = b.commit("main", "Add builder defaults", kCarol, at(3),
                     {set_line(B, 5, "  int b_5 = defaults(five);"), set_line(B, 6, "  int b_6 = defaults(six);")});
  m["I4"] = b.commit("main", "Tune engine limits", kBob, at(4),
                     {set_line(G, 2, "  int g_2 = limit(two);"), set_line(G, 3, "  int g_3 = limit(three);")});
  m["I3"] = b.commit("main", "Rework cache eviction", kAlice, at(5),
                     {set_line(K, 4, "  int k_4 = evict(four);"), set_line(K, 5, "  int k_5 = evict(five);")});
  m["I5"] = b.commit("main", "Improve handler timeouts", kCarol, at(6),
                     {set_line(H, 7, "  int h_7 = timeout(seven);"), set_line(H, 8, "  int h_8 = timeout(eight);")});
  m["I6"] = b.commit("main", "Cache lookups", kAlice, at(7), {set_line(A, 8, "  int a_8 = lookup(eight);")});
  m["I7"] = b.commit("main", "Helper for docs", kBob, at(8), {set_line(K, 9, "  int k_9 = helper(nine);")});
  m["N2"] = b.commit("main", "Polish logging", kCarol, at(9), {set_line(K, 11, "  int k_11 = logged(eleven);")});
  m["R1"] = b.commit("main", "Prepare release", kAlice, at(10),
                     {set_line("pom.xml", 2, "  <version>first</version>")});
  b.tag("1.0", m["R1"]);

  m["F1"] = b.commit("main", "DEMO-1: fix null check in parser", kAlice, at(14),
                     {set_line(A, 3, "  int a_3 = validate(three, nonNull);"),
                      set_line(A, 4, "  int a_4 = validate(four, nonNull);"), set_line(D, 5, "        int d_5 = 5;")});
  m["F2a"] = b.commit("main", "DEMO-2: fix builder defaults", kCarol, at(15),
                      {set_line(B, 5, "  int b_5 = defaults(five, safe);"),
                       set_line(B, 6, "  int b_6 = defaults(six, safe);")});
  m["U"] = b.commit("main", "Tidy engine logging", kBob, at(16), {set_line(G, 5, "  int g_5 = tidy(five);")});
  {
    auto ops = std::vector<Op>{set_line(K, 4, "  int k_4 = evict(four, lru);"),
                               set_line(K, 5, "  int k_5 = evict(five, lru);"),
                               set_line(E, 2, "  // e note about the default values")};
    m["F3"] = b.commit("main", "DEMO-3 fix cache eviction order", kAlice, at(17), ops);
  }
  m["F4"] = b.commit("main", "DEMO-4: fix engine limit overflow", kBob, at(18),
                     {set_line(G, 2, "  int g_2 = limit(two, cap);"), set_line(G, 3, "  int g_3 = limit(three, cap);"),
                      set_line(G, 5, "  int g_5 = tidy(five, cap);"), set_line(T, 2, "  void testParse() { check(); }")});

  // feature branch from the first release
  const std::vector<Op> f5_ops{set_line(H, 7, "  int h_7 = timeout(seven, retry);"),
                               set_line(H, 8, "  int h_8 = timeout(eight, retry);"),
                               insert_line(L, 12, "  int l_extra = extra();"), insert_line(L, 13, "  int l_more = more();"),
                               write_file(R, java_class("Retry"))};
  m["F5"] = b.commit("feature", "DEMO-5: fix handler timeout", kCarol, at(19), f5_ops, m["R1"]);
  m["N4"] = b.commit("feature", "Feature cleanup", kCarol, at(20), {set_line(H, 11, "  int h_11 = cleaned(eleven);")});

  m["F2b"] = b.commit("main", "DEMO-2: complete builder fix", kCarol, at(20.5),
                      {set_line(B, 5, "  int b_5 = defaults(five, safe, checked);"),
                       set_line(B, 6, "  int b_6 = defaults(six, safe, checked);"),
                       set_line(C, 2, "  int c_2 = extracted(two);"), set_line(C, 3, "  int c_3 = extracted(three);")});
  m["M6"] = b.commit("main", "DEMO-6: speed up cache lookup", kAlice, at(21), {set_line(A, 8, "  int a_8 = lookup(eight, fast);")});
  m["M7"] = b.commit("main", "DEMO-7 document helper", kBob, at(22), {set_line(K, 9, "  int k_9 = helper(nine, documented);")});
  m["X"] = b.commit("main", "Refactor parser, see DEMO-3 for context", kCarol, at(23),
                    {set_line(A, 10, "  int a_10 = parsed(ten);")});
  m["I8"] = b.commit("main", "Speed up loader", kBob, at(23.5), {set_line(L, 3, "  int l_3 = loader(three);")});
  m["MF"] = b.commit("main", "Merge branch feature", kAlice, at(24),
                     {take_file(H, m["N4"]), take_file(R, m["N4"]), insert_line(L, 12, "  int l_extra = extra();"),
                      insert_line(L, 13, "  int l_more = more();")},
                     0, {m["N4"]});
  m["R2"] = b.commit("main", "Prepare release", kAlice, at(25), {set_line("pom.xml", 2, "  <version>second</version>")});
  b.tag("1.1", m["R2"]);
  m["V"] = b.commit("main", "bump version to 1.2", kAlice, at(26), {set_line("pom.xml", 2, "  <version>third</version>")});
  m["N3"] = b.commit("main", "Update readme", kBob, at(27.2), {set_line("README.md", 2, "Build with maven or gradle")});
  m["F8"] = b.commit("main", "DEMO-8: fix loader regression", kBob, at(28), {set_line(L, 3, "  int l_3 = loader(three, once);")});

  fx.mark_sha = b.finish();
  for (const auto& [name, mark] : m) fx.sha[name] = fx.mark_sha.at(mark);
  const auto& s = fx.sha;

  // issues
  std::vector<PlannedIssue> planned_issues{
      {"DEMO-1", "Bug", 11, &kAlice, 14.5, {"1.0"}, "Parser crashes on null input"},
      {"DEMO-2", "Bug", 12, &kCarol, 20.6, {"1.0"}, "Builder defaults are wrong"},
      {"DEMO-3", "Bug", 12, &kAlice, 17.5, {"1.0"}, "Cache evicts the wrong entries"},
      {"DEMO-4", "Bug", 13, &kBob, 18.5, {"1.0"}, "Engine limit overflows"},
      {"DEMO-5", "Bug", 13, &kCarol, 19.5, {"1.0"}, "Handler times out"},
      {"DEMO-6", "Bug", 12, &kAlice, 21.5, {"1.0"}, "Cache lookup is slow"},
      {"DEMO-7", "Bug", 12, &kBob, 22.5, {"1.0"}, "Helper lacks documentation"},
      {"DEMO-8", "Bug", 27, &kBob, 28.5, {"1.1"}, "Loader regression"},
      {"DEMO-9", "Improvement", 15, &kCarol, std::nullopt, {}, "Support gradle builds"},
  };
  std::string issues;
  for (const auto& planned : planned_issues) issues += issue_record(planned).dump() + "\n";
  fx.issues = root / "demo-issues.jsonl";
  write_text(fx.issues, issues);

  // seeded expert decisions
  std::string log;
  log += link_decision(s.at("X"), "DEMO-3", "rater1", "mentioned_only", 30).dump() + "\n";
  for (const char* key : {"DEMO-1", "DEMO-2", "DEMO-3", "DEMO-4", "DEMO-5", "DEMO-8"}) {
    log += type_decision(key, "rater1", "BUG", "independent", 31).dump() + "\n";
    log += type_decision(key, "rater2", "BUG", "independent", 31.5).dump() + "\n";
  }
  log += type_decision("DEMO-6", "rater1", "IMPROVEMENT", "independent", 31).dump() + "\n";
  log += type_decision("DEMO-6", "rater2", "IMPROVEMENT", "independent", 31.5).dump() + "\n";
  log += type_decision("DEMO-7", "rater1", "DOC", "independent", 31).dump() + "\n";
  log += type_decision("DEMO-7", "rater2", "BUG", "independent", 31.5).dump() + "\n";
  log += type_decision("DEMO-7", "rater3", "DOC", "committee", 32).dump() + "\n";
  fx.decisions = root / "demo-decisions.jsonl";
  write_text(fx.decisions, log);

  fx.refactorings = root / "demo-refactorings.csv";
  write_text(fx.refactorings, "commit,path,old_start,old_end,kind\n" + s.at("F2b") + "," + C + ",2,3,Extract Method\n");
  fx.releases = root / "demo-releases.csv";
  write_text(fx.releases, "name,commit\n1.0," + s.at("R1") + "\n1.1," + s.at("R2") + "\n");

  // planted expectations
  const auto ids = [&](std::initializer_list<const char*> names) {
    std::set<std::string> out;
    for (const char* n : names) out.insert(s.at(n));
    return out;
  };
  fx.fixes["SZZ"] = ids({"F1", "F2a", "F2b", "F3", "F4", "F5", "M6", "M7", "V", "F8"});
  fx.fixes["JL"] = ids({"F1", "F2a", "F2b", "F3", "F4", "F5", "M6", "M7", "X", "F8"});
  fx.fixes["JLM"] = ids({"F1", "F2a", "F2b", "F3", "F4", "F5", "M6", "M7", "F8"});
  fx.fixes["JLMIV"] = ids({"F1", "F2a", "F2b", "F3", "F4", "F5", "F8"});

  const auto row = [&](const char* fix, const char* issue, const std::string& path, const char* ind, const char* cls) {
    return InducingRow{s.at(fix), issue, path, s.at(ind), cls};
  };
  const char* ibb = "inducing_before_boundary";
  std::set<InducingRow> filtered{
      row("F1", "DEMO-1", A, "I1", ibb),  row("F2a", "DEMO-2", B, "I2", ibb),
      row("F2b", "DEMO-2", B, "F2a", "partial_fix_suspect"),
      row("F3", "DEMO-3", K, "I3", ibb),  row("F4", "DEMO-4", G, "I4", ibb),
      row("F4", "DEMO-4", G, "U", "hard_suspect"),
      row("F5", "DEMO-5", H, "I5", ibb),  row("F8", "DEMO-8", L, "I8", ibb),
  };
  fx.inducing["JLMIV_R"] = filtered;
  auto unfiltered = filtered;
  unfiltered.insert(row("F1", "DEMO-1", D, "C0", ibb));   // whitespace-only
  unfiltered.insert(row("F2b", "DEMO-2", C, "C0", ibb));  // covered by a refactoring
  unfiltered.insert(row("F3", "DEMO-3", E, "C0", ibb));   // comment-only
  unfiltered.insert(row("F4", "DEMO-4", T, "C0", ibb));   // test code
  fx.inducing["JLMIV"] = unfiltered;

  fx.ind["1.0"] = {{A, {"DEMO-1"}}, {B, {"DEMO-2"}}, {K, {"DEMO-3"}}, {G, {"DEMO-4"}}, {H, {"DEMO-5"}}};
  fx.ind["1.1"] = {{L, {"DEMO-8"}}};
  return fx;
}

pipeline::PipelineConfig demo_config(const DemoFixture& fx, const fs::path& out) {
  pipeline::PipelineConfig c;
  c.repo = fx.repo;
  c.project = "DEMO";
  c.issues_file = fx.issues;
  c.decisions = fx.decisions;
  c.refactorings = fx.refactorings;
  c.releases = fx.releases;
  c.variants = {"6m-szz", "av-jlmiv", "ind-jlmivr"};
  c.out = out;
  c.threads = 1;
  return c;
}

PipelineOutputs read_outputs(const fs::path& out) {
  const auto load = [&](const char* name) {
    std::ifstream in(out / name);
    if (!in) throw std::runtime_error(std::string("missing output ") + name);
    return json::parse(in);
  };
  PipelineOutputs o;
  const json labels = load("labels.json");
  for (const auto& [strategy, body] : labels.items()) {
    auto& set = o.fixes[strategy];
    for (const auto& row : body.at("fixes")) set.insert(row.at("commit").get<std::string>());
  }
  const json inducing = load("inducing.json");
  for (const auto& [strategy, body] : inducing.items()) {
    auto& set = o.inducing[strategy];
    for (const auto& c : body.at("changes")) {
      const auto str = [&](const char* k) { return c.at(k).get<std::string>(); };
      set.insert({str("fixing_commit"), str("issue"), str("path"), str("inducing_commit"), str("classification")});
    }
  }
  if (fs::exists(out / "assignments.json")) {
    const json assignments = load("assignments.json");
    for (const auto& [variant, per] : assignments.items()) {
      auto& a = o.assignments[variant];
      for (const auto& [release, body] : per.items()) {
        a[release] = body.at("defective_files").get<std::map<std::string, std::set<std::string>>>();
      }
    }
  }
  return o;
}

// ---- randomized projects -----------------------------------------------------

RandomFixture build_random(const fs::path& root, std::uint32_t seed) {
  std::mt19937 rng(seed);
  const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  RandomFixture fx;
  fx.repo = root / ("rnd-" + std::to_string(seed));
  fx.builder = std::make_shared<RepoBuilder>(fx.repo);
  RepoBuilder& b = *fx.builder;
  const std::vector<Person> people{kAlice, kBob, kCarol};
  const int n_files = pick(3, 5);
  const int n_issues = pick(4, 8);
  std::vector<std::string> paths;
  for (int f = 0; f < n_files; ++f) paths.push_back("src/main/java/rnd/F" + std::string(1, char('a' + f)) + ".java");
  paths.push_back("src/test/java/rnd/FaTest.java");

  int counter = 0;
  const auto fresh = [&](bool comment) {
    ++counter;
    return comment ? "  // remark r" + std::to_string(counter) : "  int v" + std::to_string(counter) + " = next();";
  };
  std::vector<Op> init;
  for (const auto& p : paths) {
    std::vector<std::string> lines{"class X {"};
    const int n = pick(6, 12);
    for (int i = 0; i < n; ++i) lines.push_back(fresh(chance(0.2)));
    lines.push_back("}");
    init.push_back(write_file(p, lines));
  }
  double day = 0;
  int head = b.commit("main", "Initial import", people[0], at(day), init);

  const auto key = [&] { return "RND-" + std::to_string(pick(1, n_issues)); };
  const auto message = [&] {
    switch (pick(0, 7)) {
      case 0: return key() + ": fix crash";
      case 1: return key() + " resolve failure";
      case 2: return "Fixed " + key() + " and cleanup";
      case 3: return "see " + key() + " for context";
      case 4: return key() + ", " + key() + ": fix both";
      case 5: return std::string("bump version to ") + std::to_string(pick(1, n_issues)) + "." + std::to_string(pick(1, 9));
      case 6: return std::string("Tidy code");
      default: return "[" + key() + "] patch edge case";
    }
  };
  const auto edits = [&](int mark, const std::vector<std::string>& allowed) {
    std::vector<Op> ops;
    FileState st = b.state(mark);
    const int n_touched = pick(1, 2);
    for (int t = 0; t < n_touched; ++t) {
      const std::string& p = allowed[pick(0, static_cast<int>(allowed.size()) - 1)];
      auto& lines = st[p];
      const int body = static_cast<int>(lines.size()) - 2;
      const int line = pick(2, body + 1);
      switch (pick(0, 4)) {
        case 0:
          if (body > 4) {
            ops.push_back(delete_line(p, line));
            lines.erase(lines.begin() + (line - 1));
            break;
          }
          [[fallthrough]];
        case 1: {
          auto text = fresh(chance(0.2));
          ops.push_back(insert_line(p, line, text));
          lines.insert(lines.begin() + (line - 1), text);
          break;
        }
        case 2: {  // re-indent only
          auto text = "    " + lines[line - 1];
          ops.push_back(set_line(p, line, text));
          lines[line - 1] = text;
          break;
        }
        default: {
          auto text = fresh(chance(0.25));
          ops.push_back(set_line(p, line, text));
          lines[line - 1] = text;
        }
      }
    }
    return ops;
  };

  const int n_commits = pick(12, 22);
  const int branch_at = chance(0.7) ? pick(3, n_commits - 4) : -1;
  int feature = 0, fork = 0;
  const std::vector<std::string> rest(paths.begin() + 1, paths.end());
  const std::vector<std::string> first{paths.front()};
  for (int i = 1; i < n_commits; ++i) {
    day += 1 + pick(0, 3) / 2.0;
    const Person& who = people[pick(0, 2)];
    if (i == branch_at) {
      fork = head;
      feature = b.commit("feature", message(), who, at(day), edits(fork, first), fork);
      continue;
    }
    const bool on_feature = feature && fork && chance(0.3);
    if (on_feature) {
      feature = b.commit("feature", message(), who, at(day), edits(feature, first));
      continue;
    }
    if (feature && fork && chance(0.25)) {
      head = b.commit("main", "Merge branch feature", who, at(day), {take_file(paths.front(), feature)}, 0, {feature});
      feature = fork = 0;
      continue;
    }
    head = b.commit("main", message(), who, at(day), edits(head, fork ? rest : paths));
  }
  fx.mark_sha = b.finish();

  std::string issues;
  for (int n = 1; n <= n_issues; ++n) {
    PlannedIssue planned;
    planned.key = "RND-" + std::to_string(n);
    planned.type = chance(0.75) ? "Bug" : "Improvement";
    planned.reported_day = pick(0, static_cast<int>(day));
    planned.assignee = &people[pick(0, 2)];
    if (chance(0.8)) planned.resolved_day = day + 1;
    planned.summary = "Issue number " + std::to_string(n);
    issues += issue_record(planned).dump() + "\n";
  }
  fx.issues = root / ("rnd-" + std::to_string(seed) + "-issues.jsonl");
  write_text(fx.issues, issues);
  return fx;
}

MonotonicityCheck check_monotonicity(const fs::path& root, std::uint32_t seed) {
  using validation::IssueLabel;
  MonotonicityCheck check;
  const auto fx = build_random(root, seed);
  const auto graph = vcs::ingest_repository(fx.repo);
  const auto set = issues::load_issue_export(fx.issues, "RND");
  validation::ValidationStore store(links::auto_validate(links::detect_jl_links(graph, set, "RND")), set, graph);

  std::mt19937 rng(seed * 7919u + 17u);
  const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const Timestamp when = from_unix(kT0);
  for (const auto& c : store.candidates()) {
    if (c.validation != links::Validation::unvalidated || pick(0, 9) == 0) continue;
    const validation::Verdict verdicts[] = {validation::Verdict::addressed, validation::Verdict::addressed,
                                            validation::Verdict::mentioned_only, validation::Verdict::wrong};
    store.record_link_decision({c.commit, c.issue, "rater1", verdicts[pick(0, 3)], when});
  }
  const IssueLabel labels[] = {IssueLabel::BUG, IssueLabel::BUG, IssueLabel::BUG, IssueLabel::IMPROVEMENT,
                               IssueLabel::DOC, IssueLabel::TEST, IssueLabel::OTHER};
  for (const auto& key : store.queues().pending_issues) {
    if (pick(0, 9) == 0) continue;
    store.record_issue_type({key, "rater1", labels[pick(0, 6)], validation::Round::independent, false, when});
    const auto outcome =
        store.record_issue_type({key, "rater2", labels[pick(0, 6)], validation::Round::independent, false, when});
    if (outcome.conflict && pick(0, 4) != 0) {
      store.record_issue_type({key, "rater3", labels[pick(0, 6)], validation::Round::committee, pick(0, 3) == 0, when});
    }
  }

  const auto candidates = store.candidates();
  const auto final_labels = store.final_labels();
  const auto jl = labels::label_jl_family(candidates, set, final_labels, labels::Strategy::JL);
  const auto jlm = labels::label_jl_family(candidates, set, final_labels, labels::Strategy::JLM);
  const auto jlmiv = labels::label_jl_family(candidates, set, final_labels, labels::Strategy::JLMIV);
  const auto subset = [&](const std::set<std::string>& a, const std::set<std::string>& b, const char* what) {
    for (const auto& x : a) {
      if (!b.count(x)) check.violations.push_back(std::string(what) + ": " + x);
    }
  };
  subset(jlmiv.commits(), jlm.commits(), "JLMIV commit outside JLM");
  subset(jlm.commits(), jl.commits(), "JLM commit outside JL");
  check.jl = jl.labels.size();
  check.jlm = jlm.labels.size();
  check.jlmiv = jlmiv.labels.size();

  const inducing::Filters filters{inducing::FilterConfig{}};
  vcs::GitBlobSource blobs(fx.repo);
  const inducing::InducingInputs in{graph, set, filters, nullptr, &blobs};
  const auto plain = inducing::find_inducing(jlmiv.labels, in, inducing::InducingStrategy::JLMIV);
  const auto filtered = inducing::find_inducing(jlmiv.labels, in, inducing::InducingStrategy::JLMIV_R);
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::set<int>> all;
  for (const auto& c : plain.changes) all[{c.fixing_commit, c.issue, c.path, c.inducing_commit}] = c.lines;
  for (const auto& c : filtered.changes) {
    auto it = all.find({c.fixing_commit, c.issue, c.path, c.inducing_commit});
    if (it == all.end() || !std::includes(it->second.begin(), it->second.end(), c.lines.begin(), c.lines.end())) {
      check.violations.push_back("JLMIV+R attribution outside JLMIV: " + c.fixing_commit + " " + c.path);
    }
  }
  check.inducing = plain.changes.size();
  check.inducing_filtered = filtered.changes.size();
  return check;
}

// ---- blame oracle ------------------------------------------------------------

namespace {

// new index -> old index (or -1), by a textbook LCS table
std::vector<int> lcs_map(const std::vector<std::string>& older, const std::vector<std::string>& newer) {
  const std::size_t n = older.size(), m = newer.size();
  std::vector<std::vector<int>> t(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      t[i][j] = older[i] == newer[j] ? t[i + 1][j + 1] + 1 : std::max(t[i + 1][j], t[i][j + 1]);
    }
  }
  std::vector<int> map(m, -1);
  std::size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (older[i] == newer[j]) {
      map[j] = static_cast<int>(i);
      ++i;
      ++j;
    } else if (t[i + 1][j] >= t[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }
  return map;
}

}  // namespace

std::map<int, std::map<std::string, std::vector<int>>> replay_origins(const RepoBuilder& b,
                                                                      const std::map<int, std::string>& sha) {
  std::map<int, std::map<std::string, std::vector<int>>> origins;
  for (int mark : b.marks()) {
    const auto& parents = b.parents(mark);
    auto& mine = origins[mark];
    for (const auto& [path, lines] : b.state(mark)) {
      std::vector<std::vector<int>> candidates(lines.size());
      for (int p : parents) {
        const auto& ps = b.state(p);
        auto it = ps.find(path);
        if (it == ps.end()) continue;
        const auto map = lcs_map(it->second, lines);
        for (std::size_t j = 0; j < lines.size(); ++j) {
          if (map[j] >= 0) candidates[j].push_back(origins.at(p).at(path)[map[j]]);
        }
      }
      auto& out = mine[path];
      for (auto& c : candidates) {
        if (c.empty()) {
          out.push_back(mark);
          continue;
        }
        out.push_back(*std::min_element(c.begin(), c.end(), [&](int x, int y) {
          return std::pair(b.time(x), sha.at(x)) < std::pair(b.time(y), sha.at(y));
        }));
      }
    }
  }
  return origins;
}

BlameCheck check_blame(const RepoBuilder& b, const std::map<int, std::string>& sha, const vcs::ChangeGraph& graph) {
  BlameCheck check;
  const auto origins = replay_origins(b, sha);
  for (const auto& [mark, files] : origins) {
    for (const auto& [path, want] : files) {
      std::set<int> lines;
      for (int l = 1; l <= static_cast<int>(want.size()); ++l) lines.insert(l);
      const auto got = vcs::last_touch(graph, sha.at(mark), path, lines);
      for (int l = 1; l <= static_cast<int>(want.size()); ++l) {
        ++check.compared;
        const std::string expected = sha.at(want[l - 1]);
        auto it = got.find(l);
        const std::string actual = it == got.end() ? "none" : it->second;
        if (actual != expected) {
          check.mismatches.push_back(sha.at(mark).substr(0, 8) + " " + path + ":" + std::to_string(l) + " got " +
                                     actual.substr(0, 8) + " want " + expected.substr(0, 8));
        }
      }
    }
  }
  return check;
}

}  // namespace szzkit::testing
