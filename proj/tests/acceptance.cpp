// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Tolerances and time limits are fixed here, not tunable.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "andes/andes.hpp"
#include "test_util.hpp"

namespace {

using namespace andes;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

struct Criterion {
  std::string name;
  double time_limit_s;  // <= 0: no limit
  std::function<Outcome()> check;
};

// --- normalization goldens --------------------------------------------------

Outcome normalization_goldens() {
  struct Golden {
    const char* lang;
    const char* in;
    const char* out;
  };
  static const Golden goldens[] = {
      {"quy", "ch aypiqa", "chaypiqa"}, {"quy", "sin ch i", "sinchi"},
      {"quy", "uma ll iqniy", "umalliqniy"}, {"quy", "ch u", "chu"},
      {"aym", "jach 'a", "jach'a"},     {"aym", "t 'äw", "t'äw"},
      {"aym", "qilqt 'am", "qilqt'am"}, {"gn", "c h", "ch"},
      {"gn", "m b", "mb"},              {"gn", "n g", "ng"},
  };
  Outcome o;
  for (const auto& g : goldens) {
    const std::string got = normalize_for_language(g.in, g.lang);
    if (got != g.out) o.fail(std::string(g.lang) + " \"" + g.in + "\" -> \"" + got + "\"");
  }
  if (o.ok) o.detail = std::to_string(std::size(goldens)) + " goldens";
  return o;
}

// --- idempotence --------------------------------------------------------------

constexpr int kStringsPerLanguage = 1000;

Outcome idempotence_suite() {
  Outcome o;
  std::size_t checked = 0;
  std::uint32_t seed = 100;
  for (const char* lang : {"gn", "quy", "aym", "es"}) {
    andes::testing::TextFuzzer fuzz(seed++);
    Corpus corpus(lang::es, LangCode(lang == std::string("es") ? "quy" : lang), Split::train);
    for (int i = 0; i < kStringsPerLanguage; ++i) {
      const std::string s = fuzz.next();
      const std::string once = normalize_for_language(s, lang);
      if (normalize_for_language(once, lang) != once) o.fail(std::string(lang) + " not idempotent");
      ++checked;
      std::string src = fuzz.next();
      std::erase(src, '\n');
      corpus.add(normalize_for_language(src, lang::es), once);
    }
    const auto first = apply_filters(corpus, {});
    const auto second = apply_filters(first.kept, {});
    if (second.kept.size() != first.kept.size()) {
      o.fail(std::string(lang) + ": second filter pass dropped " +
             std::to_string(first.kept.size() - second.kept.size()));
    }
  }
  if (o.ok) o.detail = std::to_string(checked) + " strings, 4 languages";
  return o;
}

// --- length ratio ---------------------------------------------------------------

Outcome length_ratio_boundary() {
  constexpr double tau = 2.5;
  Outcome o;
  if (!length_ratio_decision(0, 10, 25, tau).kept()) o.fail("ratio 2.5 dropped");
  if (!length_ratio_decision(0, 1'000'000'000, 2'500'000'000, tau).kept()) o.fail("ratio 2.5 dropped");
  if (!length_ratio_decision(0, 5, 2, tau).kept()) o.fail("ratio 0.4 dropped");
  if (!length_ratio_decision(0, 2'500'000'000, 1'000'000'000, tau).kept()) o.fail("ratio 0.4 dropped");
  // 2'500'000'001 / 1'000'000'000 = 2.5 + 1e-9 exactly.
  if (length_ratio_decision(0, 1'000'000'000, 2'500'000'001, tau).kept()) o.fail("ratio 2.5+1e-9 kept");
  if (o.ok) o.detail = "2.5 keep, 0.4 keep, 2.5+1e-9 drop";
  return o;
}

// --- chrF++ -------------------------------------------------------------------

constexpr double kChrfTolerance = 0.01;

Outcome chrf_oracle() {
  Outcome o;
  std::ifstream in(std::string(ANDES_TEST_DATA_DIR) + "/chrf_fixtures.json");
  if (!in) {
    o.fail("fixture file missing");
    return o;
  }
  const auto doc = nlohmann::json::parse(in);
  const auto& cases = doc.at("sentences");
  if (cases.size() < 50) o.fail("fewer than 50 fixture pairs");
  std::vector<std::string> hyps, refs;
  double worst = 0;
  for (const auto& c : cases) {
    hyps.push_back(c.at("hyp"));
    refs.push_back(c.at("ref"));
    const double got = sentence_chrf_pp(hyps.back(), refs.back());
    worst = std::max(worst, std::abs(got - c.at("chrf_pp").get<double>()));
  }
  const double corpus = corpus_chrf_pp(hyps, refs);
  const double corpus_err = std::abs(corpus - doc.at("corpus").at("chrf_pp").get<double>());
  if (worst > kChrfTolerance) o.fail("sentence deviation " + std::to_string(worst));
  if (corpus_err > kChrfTolerance) o.fail("corpus deviation " + std::to_string(corpus_err));
  if (o.ok) {
    std::ostringstream os;
    os << cases.size() << " pairs, max |diff| sentence " << worst << ", corpus " << corpus_err;
    o.detail = os.str();
  }
  return o;
}

// --- augmentation -------------------------------------------------------------

Corpus sized(std::size_t n, Provenance prov, const LangCode& tgt, Split split = Split::train) {
  Corpus c(lang::es, tgt, split);
  for (std::size_t i = 0; i < n; ++i) c.add("s", "t", prov);
  return c;
}

Outcome augmentation_counts() {
  Outcome o;
  const auto aym = merge_augmented(sized(6531, Provenance::curated, lang::aym),
                                   sized(29000, Provenance::synthetic, lang::aym), std::nullopt);
  if (aym.size() != 35531) o.fail("aym total " + std::to_string(aym.size()));
  const auto gn = merge_augmented(sized(26032, Provenance::curated, lang::gn),
                                  sized(27051, Provenance::synthetic, lang::gn), 1);
  if (gn.size() != 53083) o.fail("gn total " + std::to_string(gn.size()));
  try {
    merge_augmented(sized(996, Provenance::curated, lang::aym, Split::dev),
                    sized(10, Provenance::synthetic, lang::aym), std::nullopt);
    o.fail("dev merge accepted");
  } catch (const ContractError&) {
  }
  if (o.ok) o.detail = "35531, 53083, dev rejected";
  return o;
}

// --- stats --------------------------------------------------------------------

Outcome stats_formulas() {
  Outcome o;
  auto expect = [&](const std::string& what, const std::string& got, const std::string& want) {
    if (got != want) o.fail(what + " = " + got + ", expected " + want);
  };
  Corpus raw(lang::es, lang::aym, Split::train);
  for (int i = 0; i < 100; ++i) raw.add("a", "b");
  Corpus kept = raw.empty_like();
  for (const auto& p : raw) {
    if (p.id() >= 5) kept.push_back(p);
  }
  expect("drop% 100/95", compute_stats(raw, kept).drop_pct_str(), "5.00");
  expect("drop% 6531/6092", make_stats(6531, 6092, 1, 1).drop_pct_str(), "6.72");

  Corpus two(lang::es, lang::quy, Split::dev);
  two.add("a a a a a a a a a a", "b b b b b b b b");
  two.add("a a a a a a a a a a a a a a a a a a a a", "b b b b b b b b b b b b");
  const auto s = compute_stats(two, two);
  expect("avg src", s.avg_src_str(), "15.00");
  expect("avg tgt", s.avg_tgt_str(), "10.00");
  expect("tgt/src", s.ratio_str(), "0.67");
  expect("drop% raw=filtered", s.drop_pct_str(), "0.00");
  if (o.ok) o.detail = "drop 5.00 / 6.72, avg 15.00 / 10.00, ratio 0.67";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"normalization-goldens", 1.0, normalization_goldens},
      {"idempotence-suite", 30.0, idempotence_suite},
      {"length-ratio-boundary", 0, length_ratio_boundary},
      {"chrf-oracle-equivalence", 5.0, chrf_oracle},
      {"augmentation-counts", 0, augmentation_counts},
      {"stats-formulas", 0, stats_formulas},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.time_limit_s > 0 && secs >= c.time_limit_s) {
      o.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(c.time_limit_s) + " s");
    }
    std::printf("%s %-26s %.3fs  %s\n", o.ok ? "PASS" : "FAIL", c.name.c_str(), secs, o.detail.c_str());
    if (!o.ok) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
