#include <gtest/gtest.h>

#include "fixture.hpp"
#include "szzkit/common/text.hpp"
#include "szzkit/common/time.hpp"
#include "szzkit/release/release.hpp"
#include "szzkit/vcs/git_repository.hpp"

namespace szzkit {
namespace {

TEST(Time, Iso8601Forms) {
  const auto base = parse_iso8601("2021-03-01T10:00:00Z");
  ASSERT_TRUE(base);
  EXPECT_EQ(to_unix(*base), 1614592800);
  EXPECT_EQ(parse_iso8601("2021-03-01T10:00:00.123+0000"), base);
  EXPECT_EQ(parse_iso8601("2021-03-01T12:00+02:00"), base);
  EXPECT_EQ(parse_iso8601("2021-03-01T05:00:00-05"), base);
  EXPECT_EQ(parse_iso8601("2021-03-01T10:00:00"), base);
  EXPECT_EQ(to_unix(*parse_iso8601("2021-03-01")), 1614556800);
  EXPECT_FALSE(parse_iso8601("2021-13-01"));
  EXPECT_FALSE(parse_iso8601("yesterday"));
  EXPECT_EQ(format_iso8601(*base), "2021-03-01T10:00:00Z");
  EXPECT_EQ(format_date(*base), "2021-03-01");
  EXPECT_DOUBLE_EQ(days_between(*base, add_days(*base, 182)), 182.0);
}

TEST(Text, SplittingAndCsv) {
  EXPECT_EQ(split_lines("a\nb\n"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(split_lines("a\n\nb"), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
  EXPECT_EQ(basename("src/a/B.java"), "B.java");
  EXPECT_EQ(extension("src/a/B.java"), ".java");
  EXPECT_EQ(extension("Makefile"), "");
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  for (const std::string field : {"plain", "a,b", "say \"hi\"", "", " x "}) {
    EXPECT_EQ(parse_csv_line(csv_field(field) + "," + csv_field(field)), (std::vector<std::string>{field, field}));
  }
  EXPECT_TRUE(iequals("Fix", "fIX"));
  EXPECT_EQ(trim("  x y \t"), "x y");
}

TEST(Text, WriteFileReplacesAtomically) {
  testing::TempDir dir;
  const auto p = dir.path() / "sub" / "f.txt";
  write_file(p, "one");
  write_file(p, "two");
  EXPECT_EQ(read_file(p), "two");
  EXPECT_EQ(std::distance(std::filesystem::directory_iterator(p.parent_path()), {}), 1);
}

class ReleaseTables : public ::testing::Test {
 protected:
  void SetUp() override {
    fx_ = std::make_unique<testing::DemoFixture>(testing::build_demo(dir_.path()));
    graph_ = vcs::ingest_repository(fx_->repo);
  }
  testing::TempDir dir_;
  std::unique_ptr<testing::DemoFixture> fx_;
  vcs::ChangeGraph graph_;
};

TEST_F(ReleaseTables, ParsesAndOrdersByDate) {
  const std::string r1 = fx_->sha.at("R1"), r2 = fx_->sha.at("R2");
  const auto t = release::parse_release_table(
      "name,commit,released_at\n1.1," + r2 + "\n1.0," + r1 + ",2021-01-20\n0.9,,2020-12-01\n2.0,\n", graph_);
  ASSERT_EQ(t.versions.size(), 4u);
  const auto rel = t.releases(graph_);
  ASSERT_EQ(rel.size(), 2u);
  EXPECT_EQ(rel[0].name, "1.0");
  EXPECT_EQ(format_date(rel[0].released_at), "2021-01-20");
  EXPECT_EQ(rel[1].released_at, graph_.commit(r2).committer_date);
  const auto dates = t.version_dates(graph_);
  EXPECT_TRUE(dates.at("0.9"));
  EXPECT_FALSE(dates.at("2.0"));
  EXPECT_NE(t.find("0.9"), nullptr);
  EXPECT_EQ(t.find("3.0"), nullptr);
}

TEST_F(ReleaseTables, HeaderIsOptional) {
  const auto t = release::parse_release_table("1.0," + fx_->sha.at("R1") + "\n", graph_);
  EXPECT_EQ(t.releases(graph_).size(), 1u);
}

TEST_F(ReleaseTables, RejectsBadRows) {
  const std::string r1 = fx_->sha.at("R1");
  EXPECT_THROW((void)release::parse_release_table("1.0," + std::string(40, 'f') + "\n", graph_), release::ReleaseError);
  EXPECT_THROW((void)release::parse_release_table("1.0," + r1 + "\n1.0," + r1 + "\n", graph_), release::ReleaseError);
  EXPECT_THROW((void)release::parse_release_table("1.0," + r1 + ",someday\n", graph_), release::ReleaseError);
  EXPECT_THROW((void)release::parse_release_table("1.0," + r1 + ",2021-01-01,extra\n", graph_), release::ReleaseError);
}

TEST_F(ReleaseTables, UnresolvedAffectedVersions) {
  const auto issues = issues::load_issue_export(fx_->issues, "DEMO");
  const auto t = release::parse_release_table("1.0," + fx_->sha.at("R1") + "\n", graph_);
  const auto u = release::unresolved_affected_versions(issues, t, graph_);
  // only DEMO-8 names 1.1
  EXPECT_EQ(u, (std::vector<release::UnresolvedVersion>{{"DEMO-8", "1.1"}}));
}

}  // namespace
}  // namespace szzkit
