#include <gtest/gtest.h>

#include <sstream>

#include "ipf/cli.hpp"
#include "support/fixtures.hpp"

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run ipf_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = ipf::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kSample = IPF_SAMPLE_DATA;
const std::string kInventory = kSample + "/inventory.json";
const std::string kCorpus = kSample + "/corpus";

TEST(Cli, BuildWritesJsonlAndSummary) {
  fixtures::TempDir dir;
  const auto out = (dir / "ipf.jsonl").string();
  const auto r = ipf_cli({"build", "--inventory", kInventory, "--corpus", kCorpus, "--out", out});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "ipf-build ok synsets=4 senses=20 no_data=9 categories=3 alpha=0.8 mode=inclusive\n");
  EXPECT_EQ(r.err, "ipf-build skipped_unknown occurrences=1 distinct=1\n");
  std::ifstream in(out);
  const auto doc = ipf::read_jsonl(in);
  EXPECT_EQ(doc.header.categories, (std::vector<std::string>{"fiction", "journal", "technical"}));
  EXPECT_EQ(doc.records.size(), 20u);
}

TEST(Cli, BuildBothFormats) {
  fixtures::TempDir dir;
  const auto r = ipf_cli({"build", "--inventory", kInventory, "--corpus", kCorpus, "--out", (dir / "res").string(),
                          "--format", "both", "--alpha", "0.5", "--footprint-mode", "exclusive"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("alpha=0.5 mode=exclusive"), std::string::npos);
  EXPECT_TRUE(fixtures::fs::exists(dir / "res.jsonl"));
  EXPECT_TRUE(fixtures::fs::exists(dir / "res.tsv"));
  EXPECT_EQ(fixtures::read_text(dir / "res.tsv").rfind("# format_version\tipf/1\n", 0), 0u);
}

TEST(Cli, UnknownSenseFailPolicy) {
  fixtures::TempDir dir;
  const auto r = ipf_cli({"build", "--inventory", kInventory, "--corpus", kCorpus, "--out", (dir / "x").string(),
                          "--unknown-sense", "fail"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("UnknownSense"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("floret%1:20:00::"), std::string::npos) << r.err;
}

TEST(Cli, AlphaOutOfRange) {
  const auto r = ipf_cli({"build", "--inventory", kInventory, "--corpus", kCorpus, "--out", "/nonexistent/x", "--alpha",
                          "1.5"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err, "error: InvalidConfig: alpha must be in (0,1]\n");
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(ipf_cli({}).code, 1);
  EXPECT_EQ(ipf_cli({"frobnicate"}).code, 1);
  EXPECT_EQ(ipf_cli({"build", "--inventory", kInventory}).code, 1);
  EXPECT_EQ(ipf_cli({"build", "--inventory", kInventory, "--corpus", kCorpus, "--out", "x", "--variant", "2001"}).code,
            1);
  const auto help = ipf_cli({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("validate-inventory"), std::string::npos);
}

TEST(Cli, InspectRebuildsWithDiagnostics) {
  const auto r = ipf_cli({"inspect", "11669335-n", "--inventory", kInventory, "--corpus", kCorpus});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("synset 11669335-n alpha=0.8 mode=inclusive categories=3\n", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("sense 1 bloom%1:20:00:: status=ok"), std::string::npos);
  EXPECT_NE(r.out.find("  category\tpmv\twsp\tpi_1983\tpi_1993\n"), std::string::npos);
  EXPECT_NE(r.out.find("interval_1993 ["), std::string::npos);
}

TEST(Cli, InspectAndStatsFromResults) {
  fixtures::TempDir dir;
  const auto res = (dir / "ipf.jsonl").string();
  ASSERT_EQ(ipf_cli({"build", "--inventory", kInventory, "--corpus", kCorpus, "--out", res}).code, 0);

  const auto r = ipf_cli({"inspect", "02075049-v", "--results", res});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("sense 0 run%2:38:04:: status=ok"), std::string::npos);
  EXPECT_NE(r.out.find("sense 2 lam%2:38:00:: status=no-data"), std::string::npos);
  EXPECT_NE(r.out.find("build with --verbose"), std::string::npos);

  EXPECT_EQ(ipf_cli({"inspect", "99999999-n", "--results", res}).code, 1);
  EXPECT_EQ(ipf_cli({"inspect", "not-a-synset", "--results", res}).code, 1);

  const auto s = ipf_cli({"stats", "--results", res});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(s.out.rfind("records ok=11 no_data=9\n", 0), 0u) << s.out;

  fixtures::write_text(dir / "broken.jsonl", fixtures::read_text(res).substr(0, 300));
  const auto b = ipf_cli({"stats", "--results", (dir / "broken.jsonl").string()});
  EXPECT_EQ(b.code, 1);
  EXPECT_NE(b.err.find("MalformedLine"), std::string::npos) << b.err;
}

TEST(Cli, InspectNeedsAnInputSource) {
  const auto r = ipf_cli({"inspect", "11669335-n"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--results"), std::string::npos);
}

TEST(Cli, ValidateInventory) {
  const auto r = ipf_cli({"validate-inventory", "--inventory", std::string(IPF_TEST_DATA) + "/wn30_excerpt.sense"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("inventory ok synsets=6 senses=27 singleton_synsets=3 fingerprint=sha256:", 0), 0u) << r.out;

  const auto j = ipf_cli({"validate-inventory", "--inventory", kInventory});
  EXPECT_EQ(j.code, 0);
  EXPECT_NE(j.out.find("synsets=4 senses=20 singleton_synsets=1"), std::string::npos) << j.out;

  fixtures::TempDir dir;
  fixtures::write_text(dir / "bad.sense", "bloom%1:20:00:: 11669335 2 2\nbloom%1:20:00:: 11669335 2 2\n");
  const auto bad = ipf_cli({"validate-inventory", "--inventory", (dir / "bad.sense").string()});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("DuplicateSenseKey"), std::string::npos) << bad.err;

  EXPECT_EQ(ipf_cli({"validate-inventory", "--inventory", (dir / "missing.sense").string()}).code, 1);
}

}  // namespace
