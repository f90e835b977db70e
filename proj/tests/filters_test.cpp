#include <gtest/gtest.h>

#include <random>

#include "andes/filters.hpp"
#include "andes/normalize.hpp"
#include "test_util.hpp"

namespace andes {
namespace {

std::string words(std::size_t n, std::string_view w = "wasi") {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += w;
  }
  return out;
}

TEST(LengthRatio, Examples) {
  auto d = length_ratio_decision(0, 10, 30, 2.5);
  EXPECT_FALSE(d.kept());
  EXPECT_EQ(d.reason, DropReason::length_ratio);
  EXPECT_TRUE(length_ratio_decision(0, 10, 25, 2.5).kept());
  EXPECT_TRUE(length_ratio_decision(0, 5, 2, 2.5).kept());
  d = length_ratio_decision(0, 0, 7, 2.5);
  EXPECT_FALSE(d.kept());
  EXPECT_EQ(d.reason, DropReason::empty);
}

TEST(LengthRatio, BoundaryJustAboveTau) {
  // t/s = 2.5 + 1e-9 exactly representable as integer counts.
  EXPECT_FALSE(length_ratio_decision(0, 1'000'000'000, 2'500'000'001, 2.5).kept());
  EXPECT_FALSE(length_ratio_decision(0, 2'500'000'001, 1'000'000'000, 2.5).kept());
  EXPECT_TRUE(length_ratio_decision(0, 1'000'000'000, 2'500'000'000, 2.5).kept());
}

TEST(LengthRatio, FilterUsesTokenCounts) {
  EXPECT_TRUE(length_ratio_filter(SentencePair(0, words(10), words(25)), 2.5).kept());
  EXPECT_FALSE(length_ratio_filter(SentencePair(0, words(10), words(26)), 2.5).kept());
}

TEST(LengthRatio, SymmetryProperty) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<std::size_t> len(1, 60);
  std::uniform_real_distribution<double> tau(1.01, 6.0);
  for (int i = 0; i < 20000; ++i) {
    const auto s = len(rng), t = len(rng);
    const double tt = tau(rng);
    ASSERT_EQ(length_ratio_decision(0, s, t, tt).kept(), length_ratio_decision(0, t, s, tt).kept());
  }
}

TEST(Dedup, Examples) {
  Corpus c(lang::es, lang::quy, Split::train);
  c.add("a", "b");
  c.add("a", "b");
  c.add("a", "c");
  const auto d = dedup(c);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_TRUE(d[0].kept());
  EXPECT_EQ(d[1].reason, DropReason::duplicate);
  EXPECT_EQ(d[1].detail, "duplicate of pair 0");
  EXPECT_TRUE(d[2].kept());

  Corpus cased(lang::es, lang::quy, Split::train);
  cased.add("a", "b");
  cased.add("A", "b");
  for (const auto& x : dedup(cased)) EXPECT_TRUE(x.kept());
}

TEST(Dedup, RepeatedTenTimes) {
  Corpus c(lang::es, lang::aym, Split::train);
  for (int i = 0; i < 10; ++i) c.add("uka", "aka");
  const auto r = apply_filters(c, {});
  EXPECT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(std::count_if(r.decisions.begin(), r.decisions.end(),
                          [](const auto& d) { return d.reason == DropReason::duplicate; }),
            9);
}

TEST(NumericMismatch, Examples) {
  EXPECT_DOUBLE_EQ(numeric_jaccard("en 1990 y 2005", "1990 2005 watapi"), 1.0);
  EXPECT_TRUE(numeric_mismatch_filter(SentencePair(0, "en 1990 y 2005", "1990 2005 watapi"), 0.5).kept());
  EXPECT_DOUBLE_EQ(numeric_jaccard("capítulo 7", "t'aqa"), 0.0);
  EXPECT_FALSE(numeric_mismatch_filter(SentencePair(0, "capítulo 7", "t'aqa"), 0.5).kept());
  EXPECT_TRUE(numeric_mismatch_filter(SentencePair(0, "hola", "napaykullayki"), 0.5).kept());
}

TEST(NumericMismatch, MultisetJaccard) {
  // {7, 7, 12} vs {7, 12}: intersection 2, union 3.
  EXPECT_NEAR(numeric_jaccard("7 7 12", "7x12"), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(numeric_jaccard("a1b22", "22 3"), 1.0 / 3.0, 1e-12);
}

TEST(Boilerplate, Examples) {
  auto d = boilerplate_filter(SentencePair(0, "mira aquí", "kaypi qhaway: https://example.org"), {"http://", "https://", "www."});
  EXPECT_EQ(d.reason, DropReason::boilerplate);
  d = boilerplate_filter(SentencePair(0, "— … !!", "imaynalla"), {"http://"});
  EXPECT_EQ(d.reason, DropReason::punctuation_only);
  EXPECT_TRUE(boilerplate_filter(SentencePair(0, "buenos días", "allin p'unchaw"), {"www."}).kept());
  EXPECT_EQ(boilerplate_filter(SentencePair(0, "ver WWW.Example.org", "qhaway"), {"www."}).reason,
            DropReason::boilerplate);
}

TEST(MaxLength, Examples) {
  EXPECT_FALSE(max_length_filter(SentencePair(0, words(250), "x"), 200).kept());
  EXPECT_TRUE(max_length_filter(SentencePair(0, words(200), words(200)), 200).kept());
  EXPECT_EQ(max_length_filter(SentencePair(0, words(3), words(201)), 200).reason, DropReason::too_long);
}

TEST(FilterConfig, Validation) {
  FilterConfig c;
  c.tau = 1.0;
  EXPECT_THROW(c.validate(), ContractError);
  c = {};
  c.max_len_tokens = 0;
  EXPECT_THROW(c.validate(), ContractError);
  c = {};
  c.numeric_jaccard_min = 1.5;
  EXPECT_THROW(c.validate(), ContractError);
}

Corpus clean_corpus(std::size_t n) {
  Corpus c(lang::es, lang::gn, Split::train);
  for (std::size_t i = 0; i < n; ++i) {
    c.add("oración número " + std::to_string(i) + " aquí",
          "ñe'ẽ " + std::to_string(i) + " ko'ápe");
  }
  return c;
}

TEST(ApplyFilters, AllCleanIsIdentity) {
  const Corpus c = clean_corpus(100);
  const auto r = apply_filters(c, {});
  EXPECT_EQ(r.kept, c);
  for (const auto& d : r.decisions) EXPECT_TRUE(d.kept());
}

TEST(ApplyFilters, FivePlantedViolations) {
  Corpus c(lang::es, lang::gn, Split::train);
  const Corpus clean = clean_corpus(95);
  std::map<std::size_t, DropReason> planted;
  std::size_t k = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    switch (i) {
      case 10: c.add("", "ñe'ẽ"); planted[i] = DropReason::empty; break;
      case 30: c.add(words(4, "hola"), words(11, "mba'e")); planted[i] = DropReason::length_ratio; break;
      case 50: c.add("ver https://example.org", "ehecha"); planted[i] = DropReason::boilerplate; break;
      case 70: c.add("año 1811", "ary 1812"); planted[i] = DropReason::numeric_mismatch; break;
      case 90: c.add(clean[3].src_text(), clean[3].tgt_text()); planted[i] = DropReason::duplicate; break;
      default: c.add(clean[k].src_text(), clean[k].tgt_text()); ++k;
    }
  }
  const auto r = apply_filters(c, {});
  EXPECT_EQ(r.kept.size(), 95u);
  ASSERT_EQ(r.decisions.size(), 100u);
  for (std::size_t i = 0; i < 100; ++i) {
    const auto it = planted.find(i);
    if (it == planted.end()) {
      EXPECT_TRUE(r.decisions[i].kept()) << i;
    } else {
      EXPECT_EQ(r.decisions[i].reason, it->second) << i;
    }
    EXPECT_EQ(r.decisions[i].pair_id, i);
  }
}

TEST(ApplyFilters, PunctuationOnlyAndTooLong) {
  Corpus c(lang::es, lang::quy, Split::train);
  c.add("¡¡!!", "...");
  c.add(words(201), words(201));
  const auto r = apply_filters(c, {});
  EXPECT_EQ(r.decisions[0].reason, DropReason::punctuation_only);
  EXPECT_EQ(r.decisions[1].reason, DropReason::too_long);
}

TEST(ApplyFilters, FirstFailingRuleWins) {
  Corpus c(lang::es, lang::quy, Split::train);
  // Fails boilerplate, numeric and length ratio; boilerplate comes first.
  c.add("www.x 1", "a b c d e f g h");
  const auto r = apply_filters(c, {});
  EXPECT_EQ(r.decisions[0].reason, DropReason::boilerplate);
  FilterConfig only_ratio;
  only_ratio.rules_enabled = {DropReason::length_ratio};
  EXPECT_EQ(apply_filters(c, only_ratio).decisions[0].reason, DropReason::length_ratio);
}

TEST(ApplyFilters, DictionaryPairsSkipLengthRatio) {
  Corpus c(lang::es, lang::quy, Split::train);
  c.push_back(SentencePair(0, "casa", "wasi", Provenance::dictionary));
  c.push_back(SentencePair(1, "la casa grande y vieja", "wasi", Provenance::dictionary));
  c.push_back(SentencePair(2, "la casa grande y vieja", "wasi", Provenance::curated));
  const auto r = apply_filters(c, {});
  EXPECT_TRUE(r.decisions[1].kept());
  EXPECT_EQ(r.decisions[2].reason, DropReason::length_ratio);
}

TEST(DecisionJson, Shape) {
  EXPECT_EQ(decision_json(FilterDecision::keep(3)).dump(),
            R"({"pair_id":3,"verdict":"keep","reason":null,"detail":""})");
  const auto d = length_ratio_decision(4, 10, 30, 2.5);
  const auto j = decision_json(d);
  EXPECT_EQ(j["verdict"], "drop");
  EXPECT_EQ(j["reason"], "length_ratio");
}

Corpus fuzz_corpus(std::uint32_t seed, std::size_t n) {
  testing::TextFuzzer fuzz(seed);
  Corpus c(lang::es, lang::quy, Split::train);
  for (std::size_t i = 0; i < n; ++i) {
    // Normalized text, as the filters see it in the pipeline; small
    // vocabulary so duplicates occur.
    std::string s = normalize_for_language(fuzz.next(), lang::es);
    std::string t = normalize_for_language(fuzz.next(), lang::quy);
    if (fuzz.rng()() % 5 == 0 && !c.empty()) {
      const auto& prev = c[fuzz.rng()() % c.size()];
      s = prev.src_text();
      t = prev.tgt_text();
    }
    c.add(s, t);
  }
  return c;
}

TEST(ApplyFiltersProperty, IdempotentConservingOrderPreserving) {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    const Corpus c = fuzz_corpus(seed, 100);
    const auto first = apply_filters(c, {});
    ASSERT_EQ(first.decisions.size(), c.size());
    const auto kept = std::count_if(first.decisions.begin(), first.decisions.end(),
                                    [](const auto& d) { return d.kept(); });
    ASSERT_EQ(static_cast<std::size_t>(kept), first.kept.size());
    for (std::size_t i = 1; i < first.kept.size(); ++i) {
      ASSERT_LT(first.kept[i - 1].id(), first.kept[i].id());
    }
    for (const auto& d : first.decisions) ASSERT_EQ(d.kept(), !d.reason.has_value());

    const auto second = apply_filters(first.kept, {});
    ASSERT_EQ(second.kept, first.kept);
  }
}

}  // namespace
}  // namespace andes
