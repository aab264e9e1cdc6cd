#include "szzkit/inducing/normalize.hpp"

#include <cctype>

#include "szzkit/common/text.hpp"

namespace szzkit::inducing {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool starts_at(std::string_view text, std::size_t pos, const std::string& token) {
  return !token.empty() && text.substr(pos, token.size()) == token;
}

enum class Mode { code, literal, line_comment, block_comment };

// Shared scanner. `emit` receives every character that is not part of a
// comment, together with whether it belongs to a literal; comment bodies are
// replaced by nothing except their newlines, which are emitted as code.
template <typename Emit>
bool scan(std::string_view text, const LanguageProfile& p, Emit&& emit) {
  Mode mode = Mode::code;
  char quote = 0;
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    switch (mode) {
      case Mode::code:
        if (starts_at(text, i, p.line_comment)) {
          mode = Mode::line_comment;
          i += p.line_comment.size();
        } else if (starts_at(text, i, p.block_open)) {
          mode = Mode::block_comment;
          i += p.block_open.size();
        } else if (p.quotes.find(c) != std::string::npos) {
          mode = Mode::literal;
          quote = c;
          emit(c, true);
          ++i;
        } else {
          emit(c, false);
          ++i;
        }
        break;
      case Mode::literal:
        emit(c, true);
        if (c == p.escape && i + 1 < text.size() && text[i + 1] != '\n') {
          emit(text[i + 1], true);
          i += 2;
          break;
        }
        if (c == quote || c == '\n') mode = Mode::code;
        ++i;
        break;
      case Mode::line_comment:
        if (c == '\n') {
          mode = Mode::code;
          emit(c, false);
        }
        ++i;
        break;
      case Mode::block_comment:
        if (starts_at(text, i, p.block_close)) {
          mode = Mode::code;
          i += p.block_close.size();
        } else {
          if (c == '\n') emit(c, false);
          ++i;
        }
        break;
    }
  }
  return mode == Mode::block_comment;
}

// Would appending `next` to `out` create a comment opener spanning the join?
bool joins_into_opener(const std::string& out, std::string_view rest, const LanguageProfile& p) {
  for (const std::string* d : {&p.line_comment, &p.block_open}) {
    for (std::size_t k = 1; k < d->size(); ++k) {
      if (out.size() >= k && out.compare(out.size() - k, k, *d, 0, k) == 0 &&
          rest.substr(0, d->size() - k) == std::string_view(*d).substr(k)) {
        return true;
      }
    }
  }
  return false;
}

}  // namespace

LanguageProfile LanguageProfile::without_comments() {
  LanguageProfile p;
  p.line_comment.clear();
  p.block_open.clear();
  p.block_close.clear();
  return p;
}

NormalizedText normalize_source(std::string_view text, const LanguageProfile& profile) {
  // First pass: drop comments.
  std::string code;
  std::vector<bool> literal;
  code.reserve(text.size());
  const bool unterminated = scan(text, profile, [&](char c, bool in_literal) {
    code += c;
    literal.push_back(in_literal);
  });
  // Second pass: drop whitespace outside literals.
  NormalizedText out;
  out.unterminated_comment = unterminated;
  bool pending_space = false;
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (!literal[i] && is_space(code[i])) {
      pending_space = true;
      continue;
    }
    if (pending_space && !literal[i] && joins_into_opener(out.text, std::string_view(code).substr(i), profile)) {
      out.text += ' ';
    }
    pending_space = false;
    out.text += code[i];
  }
  return out;
}

std::vector<std::string> strip_comments_by_line(std::string_view text, const LanguageProfile& profile) {
  std::vector<std::string> lines(1);
  scan(text, profile, [&](char c, bool) {
    if (c == '\n') {
      lines.emplace_back();
    } else {
      lines.back() += c;
    }
  });
  if (!text.empty() && text.back() == '\n') lines.pop_back();
  if (text.empty()) lines.clear();
  return lines;
}

}  // namespace szzkit::inducing
