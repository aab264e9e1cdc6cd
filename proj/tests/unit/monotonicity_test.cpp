#include <gtest/gtest.h>

#include "fixture.hpp"

namespace szzkit::testing {
namespace {

TEST(Monotonicity, HoldsOnRandomProjects) {
  TempDir dir;
  std::size_t jl = 0, jlmiv = 0, filtered = 0;
  for (std::uint32_t seed = 100; seed < 120; ++seed) {
    const auto check = check_monotonicity(dir.path(), seed);
    EXPECT_TRUE(check.violations.empty()) << "seed " << seed << ": " << check.violations.front();
    jl += check.jl;
    jlmiv += check.jlmiv;
    filtered += check.inducing_filtered;
  }
  // the generator must actually exercise the strategies
  EXPECT_GT(jl, jlmiv);
  EXPECT_GT(jlmiv, 0u);
  EXPECT_GT(filtered, 0u);
}

}  // namespace
}  // namespace szzkit::testing
