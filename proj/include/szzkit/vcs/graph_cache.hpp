#pragma once

#include <filesystem>

#include "szzkit/vcs/change_graph.hpp"

namespace szzkit::vcs {

inline constexpr int kGraphCacheVersion = 1;

class CacheError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Line-delimited JSON: a header record followed by one record per commit and
// one per (commit, parent) diff, all in a deterministic order.
void save_graph(const ChangeGraph& graph, const std::filesystem::path& file);
[[nodiscard]] ChangeGraph load_graph(const std::filesystem::path& file);

}  // namespace szzkit::vcs
