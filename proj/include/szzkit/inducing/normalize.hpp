#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace szzkit::inducing {

// Comment and literal syntax of a source language.
struct LanguageProfile {
  std::string line_comment = "//";
  std::string block_open = "/*";
  std::string block_close = "*/";
  std::string quotes = "\"'";  // characters that open and close a literal
  char escape = '\\';
  std::set<std::string> source_extensions{".java"};

  [[nodiscard]] static LanguageProfile java() { return {}; }
  // No comment syntax at all; literals are still respected.
  [[nodiscard]] static LanguageProfile without_comments();
};

struct NormalizedText {
  std::string text;
  bool unterminated_comment = false;
};

// Removes comments (never inside literals) and then all whitespace outside
// literals. Where dropping whitespace would glue two characters into a
// comment opener (as in "a / / b"), a single space is kept so the result is
// stable under repeated normalization.
[[nodiscard]] NormalizedText normalize_source(std::string_view text, const LanguageProfile& profile);

// Per-line code with comments removed and whitespace kept; comment state is
// carried across lines, so the result has one entry per input line.
[[nodiscard]] std::vector<std::string> strip_comments_by_line(std::string_view text, const LanguageProfile& profile);

}  // namespace szzkit::inducing
