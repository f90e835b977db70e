#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "andes/chrf.hpp"
#include "test_util.hpp"

namespace andes {
namespace {

constexpr double kOracleTolerance = 0.01;

const nlohmann::json& fixtures() {
  static const nlohmann::json doc = [] {
    std::ifstream in(std::string(ANDES_TEST_DATA_DIR) + "/chrf_fixtures.json");
    return nlohmann::json::parse(in);
  }();
  return doc;
}

TEST(SentenceChrf, Examples) {
  EXPECT_DOUBLE_EQ(sentence_chrf_pp("kunan punchaw", "kunan punchaw"), 100.0);
  EXPECT_DOUBLE_EQ(sentence_chrf_pp("", "kunan punchaw"), 0.0);
  EXPECT_DOUBLE_EQ(sentence_chrf_pp("abcd", "wxyz"), 0.0);
  EXPECT_DOUBLE_EQ(sentence_chrf_pp("", ""), 0.0);
}

TEST(SentenceChrf, MatchesOracle) {
  const auto& cases = fixtures().at("sentences");
  ASSERT_GE(cases.size(), 50u);
  ChrfConfig chrf;
  chrf.word_order = 0;
  for (const auto& c : cases) {
    const auto hyp = c.at("hyp").get<std::string>();
    const auto ref = c.at("ref").get<std::string>();
    EXPECT_NEAR(sentence_chrf_pp(hyp, ref), c.at("chrf_pp").get<double>(), kOracleTolerance)
        << hyp << " | " << ref;
    EXPECT_NEAR(sentence_chrf_pp(hyp, ref, chrf), c.at("chrf").get<double>(), kOracleTolerance)
        << hyp << " | " << ref;
  }
}

TEST(CorpusChrf, MatchesOracle) {
  std::vector<std::string> hyps, refs;
  for (const auto& c : fixtures().at("sentences")) {
    hyps.push_back(c.at("hyp"));
    refs.push_back(c.at("ref"));
  }
  const auto& expected = fixtures().at("corpus");
  EXPECT_NEAR(corpus_chrf_pp(hyps, refs), expected.at("chrf_pp").get<double>(), kOracleTolerance);
  ChrfConfig chrf;
  chrf.word_order = 0;
  EXPECT_NEAR(corpus_chrf_pp(hyps, refs, chrf), expected.at("chrf").get<double>(), kOracleTolerance);
}

TEST(CorpusChrf, SingleSegmentEqualsSentence) {
  for (const auto& c : fixtures().at("single_segment")) {
    const std::vector<std::string> hyp = {c.at("hyp")};
    const std::vector<std::string> ref = {c.at("ref")};
    const double corpus = corpus_chrf_pp(hyp, ref);
    EXPECT_DOUBLE_EQ(corpus, sentence_chrf_pp(hyp[0], ref[0]));
    EXPECT_NEAR(corpus, c.at("corpus_chrf_pp").get<double>(), kOracleTolerance);
  }
}

TEST(CorpusChrf, Preconditions) {
  const std::vector<std::string> one = {"a"};
  const std::vector<std::string> two = {"a", "b"};
  const std::vector<std::string> none;
  EXPECT_THROW(corpus_chrf_pp(one, two), DataError);
  EXPECT_THROW(corpus_chrf_pp(none, none), ContractError);
  EXPECT_DOUBLE_EQ(corpus_chrf_pp(two, two), 100.0);
}

TEST(ChrfConfig, Validation) {
  ChrfConfig c;
  c.char_order = 0;
  EXPECT_THROW(c.validate(), ContractError);
  c = {};
  c.word_order = -1;
  EXPECT_THROW(c.validate(), ContractError);
  c = {};
  c.beta = 0;
  EXPECT_THROW(c.validate(), ContractError);
}

TEST(ChrfStatistics, PerOrderBreakdown) {
  const auto stats = chrf_segment_statistics("ab ab", "ab");
  ASSERT_EQ(stats.size(), 8u);
  // Character unigrams: a,b,a,b vs a,b.
  EXPECT_EQ(stats[0], (NgramStats{NgramStats::Unit::character, 1, 2, 4, 2}));
  // Word unigrams: ab,ab vs ab.
  EXPECT_EQ(stats[6], (NgramStats{NgramStats::Unit::word, 1, 1, 2, 1}));
  // No word bigram in the reference: hypothesis total is reported as zero.
  EXPECT_EQ(stats[7], (NgramStats{NgramStats::Unit::word, 2, 0, 0, 0}));
  const auto j = chrf_statistics_json(stats);
  EXPECT_EQ(j.size(), 8u);
  EXPECT_EQ(j[6]["unit"], "word");
}

TEST(ScoreWithNormalization, QuechuaMerge) {
  const std::vector<std::string> hyp = {"sin ch i"};
  const std::vector<std::string> ref = {"sinchi"};
  EXPECT_DOUBLE_EQ(score_with_normalization(hyp, ref, lang::quy), 100.0);
}

TEST(ScoreWithNormalization, SpanishIsBasePass) {
  const std::vector<std::string> hyp = {"hola  mundo", "buenos ’días"};
  const std::vector<std::string> ref = {"hola mundo!", "buenos 'dias"};
  std::vector<std::string> h, r;
  for (const auto& x : hyp) h.push_back(normalize_for_language(x, lang::es));
  for (const auto& x : ref) r.push_back(normalize_for_language(x, lang::es));
  EXPECT_DOUBLE_EQ(score_with_normalization(hyp, ref, lang::es), corpus_chrf_pp(h, r));
}

TEST(ScoreWithNormalization, RaisesScoreOnSpacingArtifacts) {
  const std::vector<std::string> hyp = {"ch aypiqa wasiman ripun"};
  const std::vector<std::string> ref = {"chaypiqa wasiman ripun"};
  EXPECT_GT(score_with_normalization(hyp, ref, lang::quy), corpus_chrf_pp(hyp, ref));
}

TEST(ChrfProperty, RangeAndIdentity) {
  testing::TextFuzzer fuzz(31);
  for (int i = 0; i < 2000; ++i) {
    const std::string a = fuzz.next();
    const std::string b = fuzz.next();
    const double s = sentence_chrf_pp(a, b);
    ASSERT_GE(s, 0.0);
    ASSERT_LE(s, 100.0);
    bool has_text = false;
    for (char32_t c : unicode::decode(a)) has_text |= !unicode::is_python_space(c);
    if (has_text) {
      ASSERT_NEAR(sentence_chrf_pp(a, a), 100.0, 1e-9) << a;
    }
  }
}

TEST(ChrfProperty, NormalizationNeverHurtsSpacingOnlyDifferences) {
  // References are clean words; hypotheses split them with the spacing
  // artifacts the Quechua rules target.
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"ch aypiqa", "chaypiqa"}, {"sin ch i", "sinchi"},   {"uma ll iqniy", "umalliqniy"},
      {"ch u", "chu"},           {"wasi n", "wasin"},       {"ch aypi ch u", "chaypi chu"},
      {"ñuqa ch u", "ñuqa chu"}, {"kay ll a ta", "kaylla ta"}};
  for (const auto& [h, r] : cases) {
    const std::vector<std::string> hyp = {h};
    const std::vector<std::string> ref = {r};
    EXPECT_GE(score_with_normalization(hyp, ref, lang::quy), corpus_chrf_pp(hyp, ref)) << h;
  }
}

}  // namespace
}  // namespace andes
