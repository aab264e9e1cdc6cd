#include "szzkit/inducing/filters.hpp"

#include <algorithm>

#include "szzkit/common/text.hpp"

namespace szzkit::inducing {

std::string glob_to_regex(std::string_view pattern) {
  std::string re;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const char c = pattern[i];
    if (c == '*') {
      if (i + 1 < pattern.size() && pattern[i + 1] == '*') {
        const bool slash = i + 2 < pattern.size() && pattern[i + 2] == '/';
        re += slash ? "(?:.*/)?" : ".*";
        i += slash ? 2 : 1;
      } else {
        re += "[^/]*";
      }
    } else if (c == '?') {
      re += "[^/]";
    } else if (std::string_view(".^$|()[]{}+\\").find(c) != std::string_view::npos) {
      re += '\\';
      re += c;
    } else {
      re += c;
    }
  }
  return re;
}

Glob::Glob(std::string pattern) : pattern_(std::move(pattern)) {
  try {
    regex_ = std::regex(glob_to_regex(pattern_), std::regex::ECMAScript | std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw FilterError("bad path pattern '" + pattern_ + "': " + e.what());
  }
}

bool Glob::matches(std::string_view path) const { return std::regex_match(path.begin(), path.end(), regex_); }

std::vector<RefactoringRange> parse_refactoring_report(std::string_view text) {
  std::vector<RefactoringRange> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto f = parse_csv_line(t);
    if (!header_seen) {
      header_seen = true;
      if (!f.empty() && f[0] == "commit") continue;
    }
    if (f.size() != 5) {
      throw FilterError("refactoring report line " + std::to_string(line_no) + ": expected 5 fields");
    }
    RefactoringRange r;
    r.commit = f[0];
    r.path = f[1];
    try {
      r.start = std::stoi(f[2]);
      r.end = std::stoi(f[3]);
    } catch (const std::exception&) {
      throw FilterError("refactoring report line " + std::to_string(line_no) + ": bad line range");
    }
    if (r.start < 1 || r.end < r.start) {
      throw FilterError("refactoring report line " + std::to_string(line_no) + ": bad line range");
    }
    r.kind = f[4];
    out.push_back(std::move(r));
  }
  return out;
}

Filters::Filters(FilterConfig config) : config_(std::move(config)) {
  if (config_.profile.block_open.empty() != config_.profile.block_close.empty()) {
    throw FilterError("block comment delimiters must be given together");
  }
  for (const auto& p : config_.nonproduction_path_patterns) globs_.emplace_back(p);
  for (const auto& r : config_.refactorings) ranges_[{r.commit, r.path}].emplace_back(r.start, r.end);
}

bool Filters::is_production(std::string_view path) const {
  if (!config_.profile.source_extensions.count(extension(path))) return false;
  return std::none_of(globs_.begin(), globs_.end(), [&](const Glob& g) { return g.matches(path); });
}

bool Filters::covered_by_refactoring(const vcs::CommitId& commit, const std::string& path, int first,
                                     int last) const {
  auto it = ranges_.find({commit, path});
  if (it == ranges_.end()) return false;
  for (int line = first; line <= last; ++line) {
    const bool inside = std::any_of(it->second.begin(), it->second.end(),
                                    [&](const auto& r) { return line >= r.first && line <= r.second; });
    if (!inside) return false;
  }
  return true;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::substantive: return "substantive";
    case Verdict::whitespace_only: return "whitespace_only";
    case Verdict::comment_only: return "comment_only";
    case Verdict::nonproduction: return "nonproduction";
    case Verdict::refactoring_only: return "refactoring_only";
    case Verdict::pure_addition: return "pure_addition";
  }
  return "substantive";
}

namespace {

std::string squeeze(const std::vector<std::string>& lines) {
  std::string joined;
  for (const auto& l : lines) joined += l + "\n";
  return normalize_source(joined, LanguageProfile::without_comments()).text;
}

std::vector<std::string> slice(const std::vector<std::string>& lines, int start, int len) {
  std::vector<std::string> out;
  for (int i = start; i < start + len; ++i) {
    if (i >= 1 && static_cast<std::size_t>(i) <= lines.size()) out.push_back(lines[i - 1]);
  }
  return out;
}

}  // namespace

TrivialChangeVerdict classify_action(const vcs::FileAction& action, const Filters& filters,
                                     const vcs::BlobSource* blobs) {
  TrivialChangeVerdict v;
  v.action = &action;
  const auto& profile = filters.config().profile;

  std::optional<std::vector<std::string>> old_code, new_code;
  if (blobs != nullptr && !action.binary) {
    auto o = action.blob_old.empty() ? std::optional<std::string>("") : blobs->blob(action.blob_old);
    auto n = action.blob_new.empty() ? std::optional<std::string>("") : blobs->blob(action.blob_new);
    if (o && n) {
      old_code = strip_comments_by_line(*o, profile);
      new_code = strip_comments_by_line(*n, profile);
    }
  }

  bool all_ws = !action.hunks.empty(), all_comment = !action.hunks.empty(), all_refactoring = !action.hunks.empty();
  const std::string old_path = action.path_old.value_or(action.path());
  for (const auto& h : action.hunks) {
    HunkVerdict hv;
    hv.whitespace_only = squeeze(h.old_lines) == squeeze(h.new_lines);
    if (old_code && new_code) {
      hv.comment_only = squeeze(slice(*old_code, h.old_start, h.old_len)) ==
                        squeeze(slice(*new_code, h.new_start, h.new_len));
    } else {
      std::string o, n;
      for (const auto& l : h.old_lines) o += l + "\n";
      for (const auto& l : h.new_lines) n += l + "\n";
      hv.comment_only = normalize_source(o, profile).text == normalize_source(n, profile).text;
    }
    hv.comment_only = hv.comment_only || hv.whitespace_only;
    hv.refactoring = h.old_len > 0 &&
                     filters.covered_by_refactoring(action.commit, old_path, h.old_start, h.old_start + h.old_len - 1);
    all_ws = all_ws && hv.whitespace_only;
    all_comment = all_comment && hv.comment_only;
    all_refactoring = all_refactoring && (hv.refactoring || hv.comment_only || h.old_len == 0);
    v.hunks.push_back(hv);
  }
  const bool any_refactoring = std::any_of(v.hunks.begin(), v.hunks.end(), [](const HunkVerdict& h) {
    return h.refactoring;
  });

  const std::string& path = action.path();
  if (!filters.is_production(path)) {
    v.verdict = Verdict::nonproduction;
  } else if (action.kind == vcs::ActionKind::added) {
    v.verdict = Verdict::pure_addition;
  } else if (all_ws) {
    v.verdict = Verdict::whitespace_only;
  } else if (all_comment) {
    v.verdict = Verdict::comment_only;
  } else if (all_refactoring && any_refactoring) {
    v.verdict = Verdict::refactoring_only;
  } else {
    v.verdict = Verdict::substantive;
  }
  return v;
}

}  // namespace szzkit::inducing
