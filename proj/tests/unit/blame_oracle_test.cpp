#include <gtest/gtest.h>

#include "fixture.hpp"
#include "szzkit/vcs/git_repository.hpp"

namespace szzkit::testing {
namespace {

TEST(BlameOracle, DemoHistoryMatchesForwardReplay) {
  TempDir dir;
  const auto fx = build_demo(dir.path());
  const auto graph = vcs::ingest_repository(fx.repo);
  const auto check = check_blame(*fx.builder, fx.mark_sha, graph);
  EXPECT_GE(check.compared, 500u);
  EXPECT_TRUE(check.mismatches.empty()) << check.mismatches.size() << " mismatches, first: " << check.mismatches.front();
}

TEST(BlameOracle, RandomHistoriesMatchForwardReplay) {
  TempDir dir;
  for (std::uint32_t seed = 1; seed <= 10; ++seed) {
    const auto fx = build_random(dir.path(), seed);
    const auto graph = vcs::ingest_repository(fx.repo);
    const auto check = check_blame(*fx.builder, fx.mark_sha, graph);
    EXPECT_TRUE(check.mismatches.empty()) << "seed " << seed << ": " << check.mismatches.front();
  }
}

}  // namespace
}  // namespace szzkit::testing
