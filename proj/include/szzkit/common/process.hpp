#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace szzkit {

struct ProcessResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs argv[0] (looked up on PATH) with the given stdin, collecting stdout and
// stderr. The three pipes are serviced together, so large inputs and outputs
// cannot deadlock.
[[nodiscard]] ProcessResult run_process(const std::vector<std::string>& argv, std::string_view input = {},
                                        const std::filesystem::path& cwd = {});

}  // namespace szzkit
