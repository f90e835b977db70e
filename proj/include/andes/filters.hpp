#pragma once

// Sentence-pair noise filters. Each rule returns a FilterDecision; the
// combined pipeline evaluates them in a fixed order and attributes a drop to
// the first rule that fails.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "andes/corpus.hpp"
#include "andes/error.hpp"
#include "andes/unicode.hpp"

namespace andes {

/// Per-pair rules in evaluation order; dedup runs afterwards over survivors.
inline constexpr std::array<DropReason, 6> kPairRuleOrder = {
    DropReason::empty,       DropReason::punctuation_only, DropReason::boilerplate,
    DropReason::too_long,    DropReason::numeric_mismatch, DropReason::length_ratio};

struct FilterConfig {
  double tau = 2.5;
  std::size_t max_len_tokens = 200;
  double numeric_jaccard_min = 0.5;
  std::vector<std::string> url_markers = {"http://", "https://", "www."};
  std::vector<DropReason> rules_enabled = {
      DropReason::empty,       DropReason::punctuation_only, DropReason::boilerplate,
      DropReason::too_long,    DropReason::numeric_mismatch, DropReason::length_ratio,
      DropReason::duplicate};

  void validate() const {
    if (!(tau > 1.0)) throw ContractError("tau must be greater than 1");
    if (max_len_tokens < 1) throw ContractError("max_len_tokens must be at least 1");
    if (!(numeric_jaccard_min >= 0.0 && numeric_jaccard_min <= 1.0)) {
      throw ContractError("numeric_jaccard_min must lie in [0, 1]");
    }
    std::set<DropReason> seen;
    for (auto r : rules_enabled) {
      if (!seen.insert(r).second) {
        throw ContractError("filter rule '" + std::string(to_string(r)) + "' listed twice");
      }
    }
  }

  bool enabled(DropReason r) const {
    return std::find(rules_enabled.begin(), rules_enabled.end(), r) != rules_enabled.end();
  }
};

/// Length-ratio test on token counts: keep iff 1/tau <= tgt/src <= tau, both
/// bounds inclusive. Evaluated as src <= tau*tgt and tgt <= tau*src so exact
/// boundary ratios are not lost to division rounding.
inline FilterDecision length_ratio_decision(std::size_t pair_id, std::size_t src_len,
                                            std::size_t tgt_len, double tau) {
  if (src_len == 0 || tgt_len == 0) {
    return FilterDecision::drop(pair_id, DropReason::empty, "zero-length side");
  }
  const auto s = static_cast<double>(src_len);
  const auto t = static_cast<double>(tgt_len);
  if (t <= tau * s && s <= tau * t) return FilterDecision::keep(pair_id);
  return FilterDecision::drop(pair_id, DropReason::length_ratio,
                              "tgt/src = " + std::to_string(tgt_len) + "/" +
                                  std::to_string(src_len) + " outside [1/" +
                                  std::to_string(tau) + ", " + std::to_string(tau) + "]");
}

inline FilterDecision length_ratio_filter(const SentencePair& pair, double tau) {
  return length_ratio_decision(pair.id(), pair.src_len(), pair.tgt_len(), tau);
}

/// Maximal runs of decimal digits, as a multiset.
inline std::map<std::string, std::size_t> digit_runs(std::string_view text) {
  std::map<std::string, std::size_t> runs;
  std::u32string run;
  auto flush = [&] {
    if (!run.empty()) ++runs[unicode::encode(run)];
    run.clear();
  };
  for (char32_t c : unicode::decode(text)) {
    if (unicode::is_digit(c)) {
      run.push_back(c);
    } else {
      flush();
    }
  }
  flush();
  return runs;
}

/// Multiset Jaccard |S ∩ T| / |S ∪ T| of digit runs; 1 when both are empty.
inline double numeric_jaccard(std::string_view src, std::string_view tgt) {
  const auto s = digit_runs(src);
  const auto t = digit_runs(tgt);
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (const auto& [run, n] : s) {
    auto it = t.find(run);
    const std::size_t m = it == t.end() ? 0 : it->second;
    inter += std::min(n, m);
    uni += std::max(n, m);
  }
  for (const auto& [run, m] : t) {
    if (!s.contains(run)) uni += m;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

inline FilterDecision numeric_mismatch_filter(const SentencePair& pair, double min_jaccard) {
  const double j = numeric_jaccard(pair.src_text(), pair.tgt_text());
  if (j < min_jaccard) {
    return FilterDecision::drop(pair.id(), DropReason::numeric_mismatch,
                                "digit-run jaccard " + std::to_string(j));
  }
  return FilterDecision::keep(pair.id());
}

namespace detail {

inline bool has_alphanumeric(std::string_view text) {
  const auto cps = unicode::decode(text);
  return std::any_of(cps.begin(), cps.end(), unicode::is_alphanumeric);
}

inline const std::string* find_marker(std::string_view text,
                                      const std::vector<std::string>& markers) {
  const std::string lowered = unicode::ascii_lower(text);
  for (const auto& m : markers) {
    if (!m.empty() && lowered.find(unicode::ascii_lower(m)) != std::string::npos) return &m;
  }
  return nullptr;
}

inline FilterDecision empty_rule(const SentencePair& pair) {
  if (pair.src_len() == 0 || pair.tgt_len() == 0) {
    return FilterDecision::drop(pair.id(), DropReason::empty,
                                pair.src_len() == 0 ? "empty source" : "empty target");
  }
  return FilterDecision::keep(pair.id());
}

inline FilterDecision punctuation_rule(const SentencePair& pair) {
  for (const auto* side : {&pair.src_text(), &pair.tgt_text()}) {
    if (!has_alphanumeric(*side)) {
      return FilterDecision::drop(pair.id(), DropReason::punctuation_only,
                                  side == &pair.src_text() ? "source has no letters or digits"
                                                           : "target has no letters or digits");
    }
  }
  return FilterDecision::keep(pair.id());
}

inline FilterDecision boilerplate_rule(const SentencePair& pair,
                                       const std::vector<std::string>& markers) {
  for (const auto* side : {&pair.src_text(), &pair.tgt_text()}) {
    if (const auto* m = find_marker(*side, markers)) {
      return FilterDecision::drop(pair.id(), DropReason::boilerplate,
                                  std::string(side == &pair.src_text() ? "source" : "target") +
                                      " contains '" + *m + "'");
    }
  }
  return FilterDecision::keep(pair.id());
}

}  // namespace detail

/// Empty sides, punctuation-only sides and URL markers (case-insensitive),
/// checked in that order.
inline FilterDecision boilerplate_filter(const SentencePair& pair,
                                         const std::vector<std::string>& url_markers) {
  if (auto d = detail::empty_rule(pair); !d.kept()) return d;
  if (auto d = detail::punctuation_rule(pair); !d.kept()) return d;
  return detail::boilerplate_rule(pair, url_markers);
}

/// Inclusive upper bound on either side's token count.
inline FilterDecision max_length_filter(const SentencePair& pair, std::size_t max_len) {
  if (pair.src_len() > max_len || pair.tgt_len() > max_len) {
    return FilterDecision::drop(pair.id(), DropReason::too_long,
                                "lengths " + std::to_string(pair.src_len()) + "/" +
                                    std::to_string(pair.tgt_len()) + " exceed " +
                                    std::to_string(max_len));
  }
  return FilterDecision::keep(pair.id());
}

/// Keeps the first occurrence of every exact (src, tgt) pair.
inline std::vector<FilterDecision> dedup(const Corpus& corpus) {
  std::vector<FilterDecision> out;
  out.reserve(corpus.size());
  std::map<std::pair<std::string_view, std::string_view>, std::size_t> first_seen;
  for (const auto& pair : corpus) {
    auto [it, inserted] =
        first_seen.try_emplace({pair.src_text(), pair.tgt_text()}, pair.id());
    if (inserted) {
      out.push_back(FilterDecision::keep(pair.id()));
    } else {
      out.push_back(FilterDecision::drop(pair.id(), DropReason::duplicate,
                                         "duplicate of pair " + std::to_string(it->second)));
    }
  }
  return out;
}

/// Per-pair rules in a fixed order. Dictionary pairs are exempt from the
/// length-ratio rule.
inline FilterDecision evaluate_pair(const SentencePair& pair, const FilterConfig& config) {
  for (DropReason rule : kPairRuleOrder) {
    if (!config.enabled(rule)) continue;
    FilterDecision d = FilterDecision::keep(pair.id());
    switch (rule) {
      case DropReason::empty:
        d = detail::empty_rule(pair);
        break;
      case DropReason::punctuation_only:
        d = detail::punctuation_rule(pair);
        break;
      case DropReason::boilerplate:
        d = detail::boilerplate_rule(pair, config.url_markers);
        break;
      case DropReason::too_long:
        d = max_length_filter(pair, config.max_len_tokens);
        break;
      case DropReason::numeric_mismatch:
        d = numeric_mismatch_filter(pair, config.numeric_jaccard_min);
        break;
      case DropReason::length_ratio:
        if (pair.provenance() != Provenance::dictionary) {
          d = length_ratio_filter(pair, config.tau);
        }
        break;
      case DropReason::duplicate:
        break;
    }
    if (!d.kept()) return d;
  }
  return FilterDecision::keep(pair.id());
}

struct FilterResult {
  Corpus kept;
  /// One entry per input pair, in input order.
  std::vector<FilterDecision> decisions;
};

inline FilterResult apply_filters(const Corpus& corpus, const FilterConfig& config) {
  config.validate();
  std::vector<FilterDecision> decisions;
  decisions.reserve(corpus.size());
  Corpus survivors = corpus.empty_like();
  for (const auto& pair : corpus) {
    decisions.push_back(evaluate_pair(pair, config));
    if (decisions.back().kept()) survivors.push_back(pair);
  }
  if (!config.enabled(DropReason::duplicate)) return {std::move(survivors), std::move(decisions)};

  const auto dup = dedup(survivors);
  Corpus kept = corpus.empty_like();
  std::size_t d = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!decisions[i].kept()) continue;
    if (dup[d].kept()) {
      kept.push_back(corpus[i]);
    } else {
      decisions[i] = dup[d];
    }
    ++d;
  }
  return {std::move(kept), std::move(decisions)};
}

/// One decision-log record: {pair_id, verdict, reason, detail}; reason is
/// null for kept pairs.
inline nlohmann::ordered_json decision_json(const FilterDecision& d) {
  return {{"pair_id", d.pair_id},
          {"verdict", d.kept() ? "keep" : "drop"},
          {"reason", d.reason ? nlohmann::ordered_json(std::string(to_string(*d.reason)))
                              : nlohmann::ordered_json(nullptr)},
          {"detail", d.detail}};
}

}  // namespace andes
