#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace cogeval;
using testsupport::TempDir;

namespace {

std::string default_profile_json() {
  std::ostringstream out;
  save_profile(default_profile(), out);
  return out.str();
}

std::string small_corpus() {
  auto record = [](const std::string& id, const std::string& cand,
                   const std::string& ref, double score) {
    nlohmann::json j;
    j["id"] = id;
    j["candidate"] = {{"text", cand}};
    j["references"] = {{{"text", ref}}};
    j["human_score"] = score;
    return j.dump();
  };
  return record("u1", "the cat sat", "the cat sat", 0.9) + "\n" +
         record("u2", "dog ran away", "the dog ran home", 0.6) + "\n" +
         record("u3", "completely different words", "nothing shared here",
                0.1) +
         "\n";
}

struct Fixture {
  TempDir dir;
  CommandPaths paths;

  explicit Fixture(const std::string& corpus_text) {
    paths.corpus = dir.file("corpus.jsonl", corpus_text);
    paths.profile = dir.file("profile.json", default_profile_json());
    paths.lexicon = dir.file("freq.tsv",
                             "the\t100\ncat\t60\nsat\t50\ndog\t40\nran\t30\n"
                             "away\t20\nhome\t10\n");
    paths.stats = dir.file(
        "stats.json",
        R"({"ave_sentence_len": 10, "ave_chunks_per_sentence": 4})");
    paths.out = dir.path("out.json");
  }
};

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(CmdScore, WritesReportWithMeans) {
  Fixture fx(small_corpus());
  std::ostringstream out, err;
  int code = cmd_score(fx.paths, {}, out, err);
  EXPECT_EQ(code, kExitOk) << err.str();

  auto report = read_json(fx.paths.out);
  ASSERT_EQ(report["units"].size(), 3u);
  EXPECT_EQ(report["units"][0]["id"], "u1");
  double mean = 0.0;
  for (const auto& unit : report["units"])
    mean += unit["overall_G"].get<double>();
  mean /= 3.0;
  EXPECT_NEAR(report["corpus_mean_G"].get<double>(), mean, 1e-12);
  EXPECT_FALSE(report["profile_hash"].get<std::string>().empty());
  // Identical candidate/reference with all Q inputs under the averages:
  // full adequacy on the word level.
  EXPECT_DOUBLE_EQ(report["units"][0]["levels"]["word"]["A"].get<double>(),
                   1.0);
}

TEST(CmdScore, ReportGoesToStdoutWithoutOutPath) {
  Fixture fx(small_corpus());
  fx.paths.out.clear();
  std::ostringstream out, err;
  ASSERT_EQ(cmd_score(fx.paths, {}, out, err), kExitOk);
  auto report = nlohmann::json::parse(out.str());
  EXPECT_EQ(report["units"].size(), 3u);
}

TEST(CmdScore, SummaryPrintsSingleDecimal) {
  Fixture fx(small_corpus());
  ScoreFlags flags;
  flags.summary = true;
  std::ostringstream out, err;
  int code = cmd_score(fx.paths, flags, out, err);
  EXPECT_EQ(code, kExitOk);
  auto report = read_json(fx.paths.out);
  double mean = report["corpus_mean_G"].get<double>();
  char expected[32];
  std::snprintf(expected, sizeof(expected), "%.6f\n", mean);
  EXPECT_EQ(out.str(), expected);
}

TEST(CmdScore, MissingProfileIsUsageError) {
  Fixture fx(small_corpus());
  fx.paths.profile = fx.dir.path("absent.json");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_score(fx.paths, {}, out, err), kExitUsage);
  EXPECT_FALSE(err.str().empty());
}

TEST(CmdScore, InvalidProfileIsValidationError) {
  Fixture fx(small_corpus());
  fx.paths.profile =
      fx.dir.file("bad_profile.json",
                  R"({"levels": {"word": {"w": 0.5, "alpha": {"lex": 1.0}}}})");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_score(fx.paths, {}, out, err), kExitValidation);
}

TEST(CmdScore, StrictFailsOnBadRecord) {
  Fixture fx(small_corpus() + "not json\n");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_score(fx.paths, {}, out, err), kExitOk);  // lenient default
  ScoreFlags flags;
  flags.strict = true;
  EXPECT_EQ(cmd_score(fx.paths, flags, out, err), kExitValidation);
}

TEST(CmdScore, ParallelMatchesSequential) {
  std::ostringstream corpus;
  std::mt19937 rng(51);
  std::vector<UnitPair> pairs;
  for (int i = 0; i < 40; ++i) {
    auto unit = testsupport::random_unit(rng);
    pairs.push_back(testsupport::self_pair(unit, "u" + std::to_string(i)));
  }
  serialize_corpus(pairs, corpus);
  Fixture fx(corpus.str());

  std::ostringstream out1, out2, err;
  ScoreFlags seq;
  int code = cmd_score(fx.paths, seq, out1, err);
  ASSERT_EQ(code, kExitOk) << err.str();
  auto sequential = read_json(fx.paths.out);

  ScoreFlags par;
  par.jobs = 4;
  code = cmd_score(fx.paths, par, out2, err);
  ASSERT_EQ(code, kExitOk);
  auto parallel = read_json(fx.paths.out);
  EXPECT_EQ(sequential, parallel);
}

TEST(CmdScore, ReportRoundTripsThroughStoredParameters) {
  // Recomputing every level from the stored P/Q values and the stored
  // profile must reproduce the stored A/B/G and overall G.
  std::ostringstream corpus;
  std::mt19937 rng(52);
  std::vector<UnitPair> pairs;
  for (int i = 0; i < 25; ++i) {
    UnitPair pair;
    pair.id = "u" + std::to_string(i);
    pair.source = testsupport::random_unit(rng);
    pair.candidate = testsupport::random_unit(rng);
    pair.references = {testsupport::random_unit(rng),
                       testsupport::random_unit(rng)};
    pairs.push_back(std::move(pair));
  }
  serialize_corpus(pairs, corpus);
  Fixture fx(corpus.str());

  std::ostringstream out, err;
  ASSERT_EQ(cmd_score(fx.paths, {}, out, err), kExitOk) << err.str();
  auto report = read_json(fx.paths.out);
  WeightProfile profile = profile_from_json(report["profile"]);
  EXPECT_EQ(report["profile_hash"], profile_hash(profile));

  for (const auto& unit : report["units"]) {
    std::map<Level, LevelScore> rescored;
    for (const auto& [name, lj] : unit["levels"].items()) {
      Level level = *level_from_name(name);
      if (!lj["active"].get<bool>()) {
        rescored[level] = LevelScore{};
        continue;
      }
      auto p = lj["P"].get<std::map<std::string, double>>();
      auto q = lj["Q"].get<std::map<std::string, double>>();
      LevelScore score = finish_level(p, q, profile.levels.at(level));
      EXPECT_NEAR(score.adequacy, lj["A"].get<double>(), 1e-9);
      EXPECT_NEAR(score.disfluency, lj["B"].get<double>(), 1e-9);
      EXPECT_NEAR(score.ease, lj["G"].get<double>(), 1e-9);
      rescored[level] = score;
    }
    EXPECT_NEAR(aggregate(rescored, profile), unit["overall_G"].get<double>(),
                1e-9);
  }
}

TEST(CmdScore, StemSuffixesFromLanguageStats) {
  nlohmann::json j;
  j["id"] = "u1";
  j["candidate"] = {{"text", "running"}};
  j["references"] = {{{"text", "run"}}};
  Fixture fx(j.dump() + "\n");

  std::ostringstream out, err;
  ASSERT_EQ(cmd_score(fx.paths, {}, out, err), kExitOk);
  double without = read_json(fx.paths.out)["units"][0]["overall_G"].get<double>();

  fx.paths.stats = fx.dir.file(
      "stats_stem.json",
      R"({"ave_sentence_len": 10, "ave_chunks_per_sentence": 4,
          "stem_suffixes": ["ning"]})");
  ASSERT_EQ(cmd_score(fx.paths, {}, out, err), kExitOk);
  double with_rule = read_json(fx.paths.out)["units"][0]["overall_G"].get<double>();

  EXPECT_GT(with_rule, without);  // "running" now stems to "run"
  auto report = read_json(fx.paths.out);
  EXPECT_DOUBLE_EQ(report["units"][0]["levels"]["word"]["P"]["lex"].get<double>(),
                   1.0);
}

TEST(CmdTune, WritesFittedProfileAndLosses) {
  Fixture fx(small_corpus());
  fx.paths.out = fx.dir.path("fitted.json");
  TuneFlags flags;
  flags.seed = 7;
  flags.max_iters = 30;
  std::ostringstream out, err;
  int code = cmd_tune(fx.paths, flags, out, err);
  EXPECT_EQ(code, kExitOk) << err.str();
  EXPECT_NE(out.str().find("initial loss:"), std::string::npos);
  EXPECT_NE(out.str().find("final loss:"), std::string::npos);
  EXPECT_NE(out.str().find("pearson:"), std::string::npos);
  EXPECT_NE(out.str().find("spearman:"), std::string::npos);

  std::ifstream fitted_in(fx.paths.out);
  ASSERT_TRUE(fitted_in.good());
  WeightProfile fitted = load_profile(fitted_in);
  EXPECT_TRUE(validate_profile(fitted).empty());
}

TEST(CmdTune, DeterministicAcrossRuns) {
  Fixture fx(small_corpus());
  TuneFlags flags;
  flags.seed = 7;
  flags.max_iters = 25;

  fx.paths.out = fx.dir.path("fit_a.json");
  std::ostringstream out1, err1;
  ASSERT_EQ(cmd_tune(fx.paths, flags, out1, err1), kExitOk);
  std::ifstream a(fx.paths.out);
  std::stringstream a_text;
  a_text << a.rdbuf();

  fx.paths.out = fx.dir.path("fit_b.json");
  std::ostringstream out2, err2;
  ASSERT_EQ(cmd_tune(fx.paths, flags, out2, err2), kExitOk);
  std::ifstream b(fx.paths.out);
  std::stringstream b_text;
  b_text << b.rdbuf();

  EXPECT_EQ(a_text.str(), b_text.str());  // byte-identical profiles
}

TEST(CmdTune, MissingHumanScoreIsValidationError) {
  nlohmann::json j;
  j["id"] = "u1";
  j["candidate"] = {{"text", "a"}};
  j["references"] = {{{"text", "a"}}};
  Fixture fx(j.dump() + "\n");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_tune(fx.paths, {}, out, err), kExitValidation);
  EXPECT_NE(err.str().find("human_score"), std::string::npos);
}

TEST(CmdExplain, UnknownUnitIsValidationError) {
  Fixture fx(small_corpus());
  std::ostringstream out, err;
  EXPECT_EQ(cmd_explain(fx.paths, "nope", out, err), kExitValidation);
}

TEST(CmdExplain, AggregationLineMatchesLevelTable) {
  Fixture fx(small_corpus());
  std::ostringstream out, err;
  ASSERT_EQ(cmd_explain(fx.paths, "u2", out, err), kExitOk) << err.str();
  const std::string text = out.str();

  // Collect the G= and w'= columns and check they reproduce the overall.
  double total = 0.0;
  std::istringstream lines(text);
  std::string line;
  double overall = -1.0;
  while (std::getline(lines, line)) {
    auto gpos = line.find("G=");
    auto wpos = line.find("w'=");
    if (gpos != std::string::npos && wpos != std::string::npos) {
      const double g = std::stod(line.substr(gpos + 2));
      const double w = std::stod(line.substr(wpos + 3));
      total += g * w;
    }
    if (line.rfind("overall G = ", 0) == 0)
      overall = std::stod(line.substr(12));
  }
  ASSERT_GE(overall, 0.0);
  EXPECT_NEAR(total, overall, 1e-6);  // printed at 6 decimals
}

TEST(CmdExplain, InactiveLevelsAreMarked) {
  Fixture fx(small_corpus());
  std::ostringstream out, err;
  ASSERT_EQ(cmd_explain(fx.paths, "u1", out, err), kExitOk);
  EXPECT_NE(out.str().find("inactive"), std::string::npos);
}

TEST(CmdExplain, ZeroAdequacyShowsZeroEase) {
  auto record = [] {
    nlohmann::json j;
    j["id"] = "zero";
    j["candidate"] = {{"text", "completely unrelated tokens"}};
    j["references"] = {{{"text", "nothing in common"}}};
    return j.dump() + "\n";
  }();
  Fixture fx(record);
  std::ostringstream out, err;
  ASSERT_EQ(cmd_explain(fx.paths, "zero", out, err), kExitOk);
  const std::string text = out.str();
  auto word_line = text.find("word");
  ASSERT_NE(word_line, std::string::npos);
  auto line_end = text.find('\n', word_line);
  std::string line = text.substr(word_line, line_end - word_line);
  EXPECT_NE(line.find("A=0.000000"), std::string::npos);
  EXPECT_NE(line.find("G=0.000000"), std::string::npos);
}
