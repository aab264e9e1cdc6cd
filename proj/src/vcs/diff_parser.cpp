#include "szzkit/vcs/diff_parser.hpp"

#include <cctype>
#include <charconv>

#include "szzkit/common/text.hpp"

namespace szzkit::vcs {
namespace {

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

bool is_commit_header(std::string_view line) {
  if (line.size() != 40 && line.size() != 64) return false;
  for (char c : line) {
    if (!std::isxdigit(static_cast<unsigned char>(c)) || std::isupper(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_range(std::string_view s, int& start, int& len) {
  const auto comma = s.find(',');
  if (comma == std::string_view::npos) {
    len = 1;
    return parse_int(s, start);
  }
  return parse_int(s.substr(0, comma), start) && parse_int(s.substr(comma + 1), len);
}

std::string strip_prefix(std::string path, char side) {
  if (path.size() > 2 && path[0] == side && path[1] == '/') path.erase(0, 2);
  return path;
}

std::string path_token(std::string_view raw) {
  raw = trim(raw);
  // git appends a tab after names containing spaces in ---/+++ lines
  if (auto tab = raw.find('\t'); tab != std::string_view::npos && raw.front() != '"') raw = raw.substr(0, tab);
  if (!raw.empty() && raw.front() == '"') return unquote_git_path(raw);
  return std::string(raw);
}

// Splits "a/X b/Y" from a diff --git header. Unquoted names with spaces are
// only recoverable when both sides are identical, which is the case whenever
// the header is the sole source of the path.
std::pair<std::string, std::string> header_paths(std::string_view rest) {
  if (!rest.empty() && rest.front() == '"') {
    std::size_t i = 1;
    while (i < rest.size() && !(rest[i] == '"' && rest[i - 1] != '\\')) ++i;
    std::string a = unquote_git_path(rest.substr(0, i + 1));
    std::string b = path_token(rest.substr(std::min(rest.size(), i + 2)));
    return {strip_prefix(a, 'a'), strip_prefix(b, 'b')};
  }
  if (auto q = rest.find(" \""); q != std::string_view::npos) {
    return {strip_prefix(std::string(rest.substr(0, q)), 'a'), strip_prefix(path_token(rest.substr(q + 1)), 'b')};
  }
  if (rest.size() >= 5 && (rest.size() - 1) % 2 == 0) {
    const std::size_t half = (rest.size() - 1) / 2;
    std::string_view a = rest.substr(0, half);
    std::string_view b = rest.substr(half + 1);
    if (a.substr(2) == b.substr(2)) return {strip_prefix(std::string(a), 'a'), strip_prefix(std::string(b), 'b')};
  }
  const auto space = rest.find(" b/");
  if (space == std::string_view::npos) throw DiffParseError("unparseable diff header: " + std::string(rest));
  return {strip_prefix(std::string(rest.substr(0, space)), 'a'), strip_prefix(std::string(rest.substr(space + 1)), 'b')};
}

class LineCursor {
 public:
  explicit LineCursor(std::string_view text) : text_(text) {}
  bool done() const { return pos_ >= text_.size(); }
  std::string_view peek() const {
    const auto end = text_.find('\n', pos_);
    return text_.substr(pos_, end == std::string_view::npos ? std::string_view::npos : end - pos_);
  }
  std::string_view next() {
    std::string_view line = peek();
    pos_ += line.size() + 1;
    return line;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

bool is_zero_oid(std::string_view s) { return s.find_first_not_of('0') == std::string_view::npos; }

FileAction parse_section(LineCursor& cur) {
  const std::string_view header = cur.next();
  auto [hdr_old, hdr_new] = header_paths(header.substr(std::string_view("diff --git ").size()));

  FileAction action;
  bool added = false, deleted = false, renamed = false;
  std::optional<std::string> minus_path, plus_path, rename_from, rename_to;
  bool minus_null = false, plus_null = false;

  while (!cur.done()) {
    const std::string_view line = cur.peek();
    if (starts_with(line, "diff --git ") || starts_with(line, "@@") || is_commit_header(line)) break;
    cur.next();
    if (starts_with(line, "new file mode")) {
      added = true;
    } else if (starts_with(line, "deleted file mode")) {
      deleted = true;
    } else if (starts_with(line, "rename from ")) {
      renamed = true;
      rename_from = path_token(line.substr(12));
    } else if (starts_with(line, "rename to ")) {
      renamed = true;
      rename_to = path_token(line.substr(10));
    } else if (starts_with(line, "index ")) {
      std::string_view ids = line.substr(6);
      if (auto sp = ids.find(' '); sp != std::string_view::npos) ids = ids.substr(0, sp);
      const auto dots = ids.find("..");
      if (dots != std::string_view::npos) {
        const auto o = ids.substr(0, dots), n = ids.substr(dots + 2);
        if (!is_zero_oid(o)) action.blob_old = std::string(o);
        if (!is_zero_oid(n)) action.blob_new = std::string(n);
      }
    } else if (starts_with(line, "--- ")) {
      if (line.substr(4) == "/dev/null") minus_null = true;
      else minus_path = strip_prefix(path_token(line.substr(4)), 'a');
    } else if (starts_with(line, "+++ ")) {
      if (line.substr(4) == "/dev/null") plus_null = true;
      else plus_path = strip_prefix(path_token(line.substr(4)), 'b');
    } else if (starts_with(line, "Binary files ") || starts_with(line, "GIT binary patch")) {
      action.binary = true;
    }
  }

  if (added || minus_null) {
    action.kind = ActionKind::added;
    action.path_new = plus_path ? *plus_path : hdr_new;
  } else if (deleted || plus_null) {
    action.kind = ActionKind::deleted;
    action.path_old = minus_path ? *minus_path : hdr_old;
  } else if (renamed) {
    action.kind = ActionKind::renamed;
    action.path_old = rename_from ? *rename_from : hdr_old;
    action.path_new = rename_to ? *rename_to : hdr_new;
  } else {
    action.kind = ActionKind::modified;
    action.path_old = minus_path ? *minus_path : hdr_old;
    action.path_new = plus_path ? *plus_path : hdr_new;
  }

  while (!cur.done() && starts_with(cur.peek(), "@@")) {
    Hunk hunk;
    const std::string_view hh = cur.next();
    if (!parse_hunk_header(hh, hunk)) throw DiffParseError("bad hunk header: " + std::string(hh));
    int old_left = hunk.old_len, new_left = hunk.new_len;
    while ((old_left > 0 || new_left > 0) && !cur.done()) {
      const std::string_view line = cur.next();
      if (line.empty()) {
        // an empty context line whose leading space was stripped
        --old_left;
        --new_left;
        continue;
      }
      switch (line.front()) {
        case '-':
          hunk.old_lines.emplace_back(line.substr(1));
          --old_left;
          break;
        case '+':
          hunk.new_lines.emplace_back(line.substr(1));
          --new_left;
          break;
        case ' ':
          hunk.old_lines.emplace_back(line.substr(1));
          hunk.new_lines.emplace_back(line.substr(1));
          --old_left;
          --new_left;
          break;
        case '\\':
          break;
        default:
          throw DiffParseError("unexpected line in hunk: " + std::string(line));
      }
    }
    if (old_left != 0 || new_left != 0) throw DiffParseError("truncated hunk: " + std::string(hh));
    while (!cur.done() && starts_with(cur.peek(), "\\")) cur.next();
    action.hunks.push_back(std::move(hunk));
  }
  return action;
}

}  // namespace

bool parse_hunk_header(std::string_view line, Hunk& hunk) {
  if (!starts_with(line, "@@ -")) return false;
  line.remove_prefix(4);
  const auto space = line.find(' ');
  if (space == std::string_view::npos) return false;
  const std::string_view old_range = line.substr(0, space);
  line.remove_prefix(space + 1);
  if (!starts_with(line, "+")) return false;
  line.remove_prefix(1);
  const auto end = line.find(" @@");
  if (end == std::string_view::npos) return false;
  const std::string_view new_range = line.substr(0, end);
  return parse_range(old_range, hunk.old_start, hunk.old_len) && parse_range(new_range, hunk.new_start, hunk.new_len) &&
         hunk.old_len >= 0 && hunk.new_len >= 0;
}

std::string unquote_git_path(std::string_view quoted) {
  if (quoted.size() < 2 || quoted.front() != '"' || quoted.back() != '"') return std::string(quoted);
  quoted = quoted.substr(1, quoted.size() - 2);
  std::string out;
  for (std::size_t i = 0; i < quoted.size(); ++i) {
    const char c = quoted[i];
    if (c != '\\' || i + 1 >= quoted.size()) {
      out += c;
      continue;
    }
    const char e = quoted[++i];
    switch (e) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      case 'a': out += '\a'; break;
      case 'b': out += '\b'; break;
      case 'f': out += '\f'; break;
      case 'v': out += '\v'; break;
      case '"': out += '"'; break;
      case '\\': out += '\\'; break;
      default:
        if (e >= '0' && e <= '7' && i + 2 < quoted.size()) {
          const int v = (e - '0') * 64 + (quoted[i + 1] - '0') * 8 + (quoted[i + 2] - '0');
          out += static_cast<char>(v);
          i += 2;
        } else {
          out += e;
        }
    }
  }
  return out;
}

std::vector<FileAction> parse_unified_diff(std::string_view text) {
  LineCursor cur{text};
  std::vector<FileAction> actions;
  while (!cur.done()) {
    if (starts_with(cur.peek(), "diff --git ")) {
      actions.push_back(parse_section(cur));
    } else {
      cur.next();
    }
  }
  return actions;
}

std::vector<DiffBlock> parse_diff_tree_output(std::string_view text) {
  LineCursor cur{text};
  std::vector<DiffBlock> blocks;
  while (!cur.done()) {
    const std::string_view line = cur.peek();
    if (is_commit_header(line)) {
      blocks.push_back(DiffBlock{std::string(line), {}});
      cur.next();
    } else if (starts_with(line, "diff --git ")) {
      if (blocks.empty()) throw DiffParseError("diff section before any commit header");
      blocks.back().actions.push_back(parse_section(cur));
    } else if (line.empty()) {
      cur.next();
    } else {
      throw DiffParseError("unexpected diff-tree output: " + std::string(line));
    }
  }
  return blocks;
}

}  // namespace szzkit::vcs
