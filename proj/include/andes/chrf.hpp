#pragma once

// chrF++: character n-gram F-beta (orders 1..char_order) combined with word
// n-grams (orders 1..word_order). Sentence and corpus scores follow the
// observable behaviour of sacrebleu's CHRF(word_order=2):
//   * character n-grams are taken over the text with all whitespace removed;
//   * words are whitespace tokens with one leading or trailing ASCII
//     punctuation mark split off;
//   * precision and recall are averaged over the orders where both the
//     hypothesis and the reference have n-grams ("effective order");
//   * corpus scores pool the per-order counts over all segments.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "andes/corpus.hpp"
#include "andes/error.hpp"
#include "andes/normalize.hpp"
#include "andes/unicode.hpp"

namespace andes {

struct ChrfConfig {
  int char_order = 6;
  int word_order = 2;
  double beta = 2.0;
  /// Stand-in precision/recall for orders with no n-grams; only affects the
  /// score when eps_smoothing is on.
  double eps = 1e-16;
  /// Average per-order F scores with eps smoothing (chrF++.py, Moses, NLTK)
  /// instead of the effective-order average.
  bool eps_smoothing = false;

  void validate() const {
    if (char_order < 1) throw ContractError("char_order must be at least 1");
    if (word_order < 0) throw ContractError("word_order must be non-negative");
    if (!(beta > 0)) throw ContractError("beta must be positive");
  }

  int orders() const { return char_order + word_order; }
};

/// Counts for one n-gram order. hyp_total is zero whenever the reference has
/// no n-grams of this order, so matched <= min(hyp_total, ref_total).
struct NgramStats {
  enum class Unit { character, word };

  Unit unit = Unit::character;
  int order = 1;
  std::size_t matched = 0;
  std::size_t hyp_total = 0;
  std::size_t ref_total = 0;

  friend bool operator==(const NgramStats&, const NgramStats&) = default;
};

/// Character orders first, then word orders.
using ChrfStatistics = std::vector<NgramStats>;

namespace detail {

using NgramCounts = std::unordered_map<std::u32string, std::size_t>;

inline constexpr std::u32string_view kAsciiPunctuation = U"!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

inline bool is_ascii_punct(char32_t c) {
  return kAsciiPunctuation.find(c) != std::u32string_view::npos;
}

inline std::vector<std::u32string> split_python(const std::u32string& text) {
  std::vector<std::u32string> out;
  std::u32string current;
  for (char32_t c : text) {
    if (unicode::is_python_space(c)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

/// Word tokens with a single trailing (else leading) punctuation mark split
/// off. "(hi)" becomes "(hi" and ")".
inline std::vector<std::u32string> chrf_words(const std::u32string& text) {
  std::vector<std::u32string> out;
  for (auto& w : split_python(text)) {
    if (w.size() == 1) {
      out.push_back(std::move(w));
    } else if (is_ascii_punct(w.back())) {
      out.push_back(w.substr(0, w.size() - 1));
      out.push_back(w.substr(w.size() - 1));
    } else if (is_ascii_punct(w.front())) {
      out.push_back(w.substr(0, 1));
      out.push_back(w.substr(1));
    } else {
      out.push_back(std::move(w));
    }
  }
  return out;
}

inline std::vector<NgramCounts> char_ngrams(const std::u32string& text, int max_order) {
  std::u32string stripped;
  stripped.reserve(text.size());
  for (char32_t c : text) {
    if (!unicode::is_python_space(c)) stripped.push_back(c);
  }
  std::vector<NgramCounts> out(static_cast<std::size_t>(max_order));
  for (int n = 1; n <= max_order; ++n) {
    const auto len = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i + len <= stripped.size(); ++i) {
      ++out[len - 1][stripped.substr(i, len)];
    }
  }
  return out;
}

inline NgramCounts word_ngrams(const std::vector<std::u32string>& words, int n) {
  NgramCounts out;
  const auto len = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + len <= words.size(); ++i) {
    std::u32string key = words[i];
    for (std::size_t k = 1; k < len; ++k) {
      key.push_back(U' ');
      key += words[i + k];
    }
    ++out[key];
  }
  return out;
}

inline std::vector<NgramCounts> all_ngrams(std::string_view text, const ChrfConfig& config) {
  const std::u32string cps = unicode::decode(text);
  auto out = char_ngrams(cps, config.char_order);
  if (config.word_order > 0) {
    const auto words = chrf_words(cps);
    for (int n = 1; n <= config.word_order; ++n) out.push_back(word_ngrams(words, n));
  }
  return out;
}

inline NgramStats match(const NgramCounts& hyp, const NgramCounts& ref) {
  NgramStats s;
  std::size_t hyp_count = 0;
  for (const auto& [gram, count] : hyp) {
    hyp_count += count;
    if (auto it = ref.find(gram); it != ref.end()) s.matched += std::min(count, it->second);
  }
  s.hyp_total = ref.empty() ? 0 : hyp_count;
  for (const auto& [gram, count] : ref) s.ref_total += count;
  return s;
}

}  // namespace detail

/// Per-order counts for one hypothesis/reference segment.
inline ChrfStatistics chrf_segment_statistics(std::string_view hypothesis,
                                              std::string_view reference,
                                              const ChrfConfig& config = {}) {
  config.validate();
  const auto hyp = detail::all_ngrams(hypothesis, config);
  const auto ref = detail::all_ngrams(reference, config);
  ChrfStatistics stats;
  stats.reserve(hyp.size());
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    NgramStats s = detail::match(hyp[i], ref[i]);
    const bool word = static_cast<int>(i) >= config.char_order;
    s.unit = word ? NgramStats::Unit::word : NgramStats::Unit::character;
    s.order = word ? static_cast<int>(i) - config.char_order + 1 : static_cast<int>(i) + 1;
    stats.push_back(s);
  }
  return stats;
}

inline void accumulate(ChrfStatistics& total, const ChrfStatistics& segment) {
  if (total.empty()) {
    total = segment;
    return;
  }
  for (std::size_t i = 0; i < total.size(); ++i) {
    total[i].matched += segment[i].matched;
    total[i].hyp_total += segment[i].hyp_total;
    total[i].ref_total += segment[i].ref_total;
  }
}

/// F-beta on a 0..100 scale from (possibly pooled) per-order counts.
inline double chrf_score(const ChrfStatistics& stats, const ChrfConfig& config = {}) {
  const double factor = config.beta * config.beta;
  double eps_score = 0.0;
  double avg_prec = 0.0;
  double avg_rec = 0.0;
  int effective_order = 0;
  for (const auto& s : stats) {
    const double prec = s.hyp_total > 0 ? static_cast<double>(s.matched) / s.hyp_total : config.eps;
    const double rec = s.ref_total > 0 ? static_cast<double>(s.matched) / s.ref_total : config.eps;
    const double denom = factor * prec + rec;
    eps_score += denom > 0 ? (1 + factor) * prec * rec / denom : config.eps;
    if (s.hyp_total > 0 && s.ref_total > 0) {
      avg_prec += prec;
      avg_rec += rec;
      ++effective_order;
    }
  }
  if (config.eps_smoothing) {
    return stats.empty() ? 0.0 : 100 * eps_score / static_cast<double>(stats.size());
  }
  if (effective_order == 0) return 0.0;
  avg_prec /= effective_order;
  avg_rec /= effective_order;
  if (avg_prec + avg_rec == 0.0) return 0.0;
  return 100 * ((1 + factor) * avg_prec * avg_rec) / (factor * avg_prec + avg_rec);
}

inline double sentence_chrf_pp(std::string_view hypothesis, std::string_view reference,
                               const ChrfConfig& config = {}) {
  return chrf_score(chrf_segment_statistics(hypothesis, reference, config), config);
}

/// Pooled per-order counts over a whole test set.
inline ChrfStatistics corpus_chrf_statistics(std::span<const std::string> hypotheses,
                                             std::span<const std::string> references,
                                             const ChrfConfig& config = {}) {
  if (hypotheses.size() != references.size()) {
    throw DataError("hypothesis/reference count mismatch: " + std::to_string(hypotheses.size()) +
                    " vs " + std::to_string(references.size()));
  }
  if (hypotheses.empty()) throw ContractError("cannot score an empty test set");
  ChrfStatistics total;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    accumulate(total, chrf_segment_statistics(hypotheses[i], references[i], config));
  }
  return total;
}

inline double corpus_chrf_pp(std::span<const std::string> hypotheses,
                             std::span<const std::string> references,
                             const ChrfConfig& config = {}) {
  return chrf_score(corpus_chrf_statistics(hypotheses, references, config), config);
}

/// Normalizes hypotheses and references for the target language, then scores.
inline double score_with_normalization(std::span<const std::string> hypotheses,
                                       std::span<const std::string> references,
                                       const LangCode& lang, const ChrfConfig& config = {}) {
  if (hypotheses.size() != references.size()) {
    throw DataError("hypothesis/reference count mismatch: " + std::to_string(hypotheses.size()) +
                    " vs " + std::to_string(references.size()));
  }
  std::vector<std::string> hyp;
  std::vector<std::string> ref;
  hyp.reserve(hypotheses.size());
  ref.reserve(references.size());
  for (const auto& h : hypotheses) hyp.push_back(normalize_for_language(h, lang));
  for (const auto& r : references) ref.push_back(normalize_for_language(r, lang));
  return corpus_chrf_pp(hyp, ref, config);
}

/// Per-order breakdown: [{unit, order, matched, hyp_total, ref_total}, ...].
inline nlohmann::ordered_json chrf_statistics_json(const ChrfStatistics& stats) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& s : stats) {
    out.push_back({{"unit", s.unit == NgramStats::Unit::word ? "word" : "char"},
                   {"order", s.order},
                   {"matched", s.matched},
                   {"hyp_total", s.hyp_total},
                   {"ref_total", s.ref_total}});
  }
  return out;
}

}  // namespace andes
