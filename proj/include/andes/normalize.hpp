#pragma once

// Deterministic text normalization: a shared base pass (Unicode form,
// apostrophe canonicalization, whitespace) followed by per-language
// orthographic rules that repair spacing artifacts in Guarani, Quechua and
// Aymara text.

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "andes/corpus.hpp"
#include "andes/error.hpp"
#include "andes/unicode.hpp"

namespace andes {

/// One rewrite performed by a normalization step.
struct RuleApplication {
  std::string rule_id;
  std::string before;
  std::string after;

  friend bool operator==(const RuleApplication&, const RuleApplication&) = default;
};

using Trace = std::vector<RuleApplication>;

/// Trace record as written by `normalize --trace`.
inline nlohmann::ordered_json rule_application_json(const RuleApplication& r, std::size_t line) {
  return {{"rule_id", r.rule_id}, {"before", r.before}, {"after", r.after}, {"line", line}};
}

namespace rules {
inline constexpr std::string_view apostrophe = "base.apostrophe";
inline constexpr std::string_view unicode_form = "base.unicode_form";
inline constexpr std::string_view lowercase = "base.lowercase";
inline constexpr std::string_view whitespace = "base.whitespace";
inline constexpr std::string_view symbol = "base.symbol";

inline constexpr std::string_view gn_digraph = "gn.digraph";
inline constexpr std::string_view quy_three_token = "quy.ii";
inline constexpr std::string_view quy_chll_vowel = "quy.i";
inline constexpr std::string_view quy_ch_single_vowel = "quy.iii";
inline constexpr std::string_view quy_single_letter = "quy.iv";
inline constexpr std::string_view aym_apostrophe_join = "aym.apostrophe";

inline constexpr std::array<std::string_view, 6> orthographic = {
    gn_digraph, quy_three_token, quy_chll_vowel, quy_ch_single_vowel, quy_single_letter,
    aym_apostrophe_join};
}  // namespace rules

/// Upper bound on passes over the orthographic rules.
inline constexpr int kMaxRulePasses = 10;

struct NormalizerConfig {
  LangCode language;
  unicode::Form unicode_form = unicode::Form::NFKC;
  bool lowercase = false;
  bool strip_symbols = false;
  /// Code points or sequences exempt from symbol removal.
  std::vector<std::u32string> preserve_set;
  /// Orthographic rules, applied in this order on every pass.
  std::vector<std::string> enabled_rules;

  void validate() const {
    for (std::size_t i = 0; i < enabled_rules.size(); ++i) {
      const auto& id = enabled_rules[i];
      if (std::find(rules::orthographic.begin(), rules::orthographic.end(), id) ==
          rules::orthographic.end()) {
        throw ContractError("unknown normalization rule '" + id + "'");
      }
      if (std::find(enabled_rules.begin(), enabled_rules.begin() + static_cast<long>(i), id) !=
          enabled_rules.begin() + static_cast<long>(i)) {
        throw ContractError("normalization rule '" + id + "' listed twice");
      }
    }
    if (strip_symbols && preserve_set.empty()) {
      throw ContractError("symbol removal requires a nonempty preserve set");
    }
  }

  static NormalizerConfig for_language(const LangCode& lang);
};

namespace detail {

inline bool is_apostrophe_variant(char32_t c) {
  return c == U'’' || c == U'ʼ' || c == U'´' || c == U'`';
}

inline std::string map_apostrophes(std::string_view text, Trace* trace) {
  std::u32string cps = unicode::decode(text);
  bool changed = false;
  for (char32_t& c : cps) {
    if (is_apostrophe_variant(c)) {
      if (trace) trace->push_back({std::string(rules::apostrophe), unicode::encode(c), "'"});
      c = U'\'';
      changed = true;
    }
  }
  return changed ? unicode::encode(cps) : std::string(text);
}

inline std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending = false;
  for (char32_t c : unicode::decode(text)) {
    if (unicode::is_space(c)) {
      pending = true;
      continue;
    }
    if (pending && !out.empty()) out.push_back(' ');
    pending = false;
    unicode::append_utf8(out, c);
  }
  return out;
}

inline std::string strip_symbols(std::string_view text, const std::vector<std::u32string>& keep,
                                 Trace* trace) {
  const std::u32string cps = unicode::decode(text);
  std::u32string out;
  out.reserve(cps.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    const auto preserved = std::find_if(keep.begin(), keep.end(), [&](const std::u32string& seq) {
      return !seq.empty() && std::u32string_view(cps).substr(i).starts_with(seq);
    });
    if (preserved != keep.end()) {
      out += *preserved;
      i += preserved->size();
      continue;
    }
    const char32_t c = cps[i++];
    if (unicode::is_letter(c) || unicode::is_digit(c) || unicode::is_mark(c) ||
        unicode::is_space(c)) {
      out.push_back(c);
    } else if (trace) {
      trace->push_back({std::string(rules::symbol), unicode::encode(c), ""});
    }
  }
  return unicode::encode(out);
}

inline void record_if_changed(Trace* trace, std::string_view rule, const std::string& before,
                              const std::string& after) {
  if (trace && before != after) trace->push_back({std::string(rule), before, after});
}

}  // namespace detail

/// Unicode form, apostrophe variants to U+0027, optional lowercasing and
/// symbol removal, then whitespace runs collapsed to one space and trimmed.
inline std::string normalize_base(std::string_view text, const NormalizerConfig& config,
                                  Trace* trace = nullptr) {
  std::string s = detail::map_apostrophes(text, trace);

  std::string formed = unicode::normalize_form(s, config.unicode_form);
  detail::record_if_changed(trace, rules::unicode_form, s, formed);
  s = std::move(formed);

  if (config.lowercase) {
    std::string lowered = unicode::normalize_form(unicode::to_lower(s), config.unicode_form);
    detail::record_if_changed(trace, rules::lowercase, s, lowered);
    s = std::move(lowered);
  }
  // Compatibility decompositions can surface new apostrophe variants (U+1FEF).
  s = detail::map_apostrophes(s, trace);

  if (config.strip_symbols) {
    std::string stripped = detail::strip_symbols(s, config.preserve_set, trace);
    if (stripped != s) {
      // Removing a symbol can bring a base letter next to a combining mark.
      s = detail::map_apostrophes(unicode::normalize_form(stripped, config.unicode_form), trace);
    }
  }

  std::string collapsed = detail::collapse_whitespace(s);
  detail::record_if_changed(trace, rules::whitespace, s, collapsed);
  return collapsed;
}

namespace detail {

using Tokens = std::vector<std::string>;

inline bool is_quechua_vowel(char32_t c) {
  switch (c) {
    case U'a': case U'e': case U'i': case U'o': case U'u':
    case U'A': case U'E': case U'I': case U'O': case U'U':
      return true;
    default:
      return false;
  }
}

inline bool is_guarani_vowel(char32_t c) {
  static constexpr std::u32string_view vowels = U"aeiouyáéíóúýãẽĩõũỹ";
  return vowels.find(c) != std::u32string_view::npos;
}

inline bool is_alphabetic_token(std::string_view token) {
  const auto cps = unicode::decode(token);
  return !cps.empty() && unicode::is_letter(cps.front()) &&
         std::all_of(cps.begin(), cps.end(),
                     [](char32_t c) { return unicode::is_letter(c) || unicode::is_mark(c); });
}

inline char32_t first_cp(std::string_view token) {
  const auto cps = unicode::decode(token);
  return cps.empty() ? U'\0' : cps.front();
}

inline char32_t last_cp(std::string_view token) {
  const auto cps = unicode::decode(token);
  return cps.empty() ? U'\0' : cps.back();
}

inline bool is_single_letter(std::string_view token) {
  const auto cps = unicode::decode(token);
  return cps.size() == 1 && unicode::is_letter(cps.front());
}

inline bool is_chll(std::string_view token) {
  const std::string t = unicode::ascii_lower(token);
  return t == "ch" || t == "ll";
}

inline bool is_vowel_initial_alphabetic(std::string_view token) {
  return is_alphabetic_token(token) && is_quechua_vowel(first_cp(token));
}

/// Replaces tokens[at, at+count) with their concatenation.
inline void merge_tokens(Tokens& tokens, std::size_t at, std::size_t count, std::string_view rule,
                         Trace* trace) {
  Tokens span(tokens.begin() + static_cast<long>(at),
              tokens.begin() + static_cast<long>(at + count));
  std::string merged;
  for (const auto& t : span) merged += t;
  if (trace) trace->push_back({std::string(rule), unicode::join_spaces(span), merged});
  tokens[at] = std::move(merged);
  tokens.erase(tokens.begin() + static_cast<long>(at + 1),
               tokens.begin() + static_cast<long>(at + count));
}

// Guarani: "c h" -> "ch", "m b" -> "mb", "n g" -> "ng". The first letter must
// stand alone as a token; when the second letter also stands alone, a
// following vowel-initial fragment is part of the same word and is joined too.
inline bool guarani_digraphs(Tokens& tokens, Trace* trace) {
  static constexpr std::array<std::pair<std::string_view, char32_t>, 3> digraphs = {
      {{"c", U'h'}, {"m", U'b'}, {"n", U'g'}}};
  bool changed = false;
  std::size_t i = 0;
  while (i + 1 < tokens.size()) {
    const auto hit = std::find_if(digraphs.begin(), digraphs.end(),
                                  [&](const auto& d) { return tokens[i] == d.first; });
    if (hit == digraphs.end() || first_cp(tokens[i + 1]) != hit->second) {
      ++i;
      continue;
    }
    std::size_t count = 2;
    if (unicode::decode(tokens[i + 1]).size() == 1 && i + 2 < tokens.size() &&
        is_guarani_vowel(first_cp(tokens[i + 2]))) {
      count = 3;
    }
    merge_tokens(tokens, i, count, rules::gn_digraph, trace);
    changed = true;
    ++i;
  }
  return changed;
}

// Quechua (ii): A ch|ll B, A alphabetic, B vowel-initial alphabetic.
inline bool quechua_three_token(Tokens& tokens, Trace* trace) {
  bool changed = false;
  std::size_t i = 0;
  while (i + 2 < tokens.size()) {
    if (is_alphabetic_token(tokens[i]) && is_chll(tokens[i + 1]) &&
        is_vowel_initial_alphabetic(tokens[i + 2])) {
      merge_tokens(tokens, i, 3, rules::quy_three_token, trace);
      changed = true;
    } else {
      ++i;
    }
  }
  return changed;
}

// Quechua (i): ch|ll followed by a vowel-initial fragment; a preceding
// vowel-final alphabetic token joins as well.
inline bool quechua_chll_vowel(Tokens& tokens, Trace* trace) {
  bool changed = false;
  std::size_t i = 0;
  while (i + 1 < tokens.size()) {
    if (is_chll(tokens[i]) && is_vowel_initial_alphabetic(tokens[i + 1])) {
      if (i > 0 && is_alphabetic_token(tokens[i - 1]) && is_quechua_vowel(last_cp(tokens[i - 1]))) {
        merge_tokens(tokens, i - 1, 3, rules::quy_chll_vowel, trace);
      } else {
        merge_tokens(tokens, i, 2, rules::quy_chll_vowel, trace);
      }
      changed = true;
    } else {
      ++i;
    }
  }
  return changed;
}

// Quechua (iii): "ch" + a single vowel.
inline bool quechua_ch_single_vowel(Tokens& tokens, Trace* trace) {
  bool changed = false;
  std::size_t i = 0;
  while (i + 1 < tokens.size()) {
    const auto next = unicode::decode(tokens[i + 1]);
    if (unicode::ascii_lower(tokens[i]) == "ch" && next.size() == 1 &&
        is_quechua_vowel(next.front())) {
      merge_tokens(tokens, i, 2, rules::quy_ch_single_vowel, trace);
      changed = true;
    } else {
      ++i;
    }
  }
  return changed;
}

/// Phonotactic gate for single-letter merges: no run of three consonants and
/// no doubled vowel anywhere in the candidate word.
inline bool quechua_word_shape_ok(std::string_view word) {
  const auto cps = unicode::decode(word);
  int consonant_run = 0;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (is_quechua_vowel(c)) {
      consonant_run = 0;
      if (i > 0 && is_quechua_vowel(cps[i - 1]) &&
          (c | 0x20) == (cps[i - 1] | 0x20)) {
        return false;
      }
    } else if (unicode::is_letter(c)) {
      if (++consonant_run >= 3) return false;
    } else {
      consonant_run = 0;
    }
  }
  return true;
}

// Quechua (iv): a lone letter joins its left neighbour when the result passes
// the word-shape gate.
inline bool quechua_single_letter(Tokens& tokens, Trace* trace) {
  bool changed = false;
  std::size_t i = 1;
  while (i < tokens.size()) {
    if (is_single_letter(tokens[i]) && unicode::is_letter(last_cp(tokens[i - 1])) &&
        quechua_word_shape_ok(tokens[i - 1] + tokens[i])) {
      merge_tokens(tokens, i - 1, 2, rules::quy_single_letter, trace);
      changed = true;
    } else {
      ++i;
    }
  }
  return changed;
}

// Aymara: letter, optional space, apostrophe, optional space, letter; the
// spaces around the apostrophe are dropped.
inline bool aymara_apostrophe_join(std::string& text, Trace* trace) {
  const std::u32string cps = unicode::decode(text);
  std::u32string out;
  out.reserve(cps.size());
  bool changed = false;
  std::size_t i = 0;
  while (i < cps.size()) {
    if (cps[i] != U'\'') {
      out.push_back(cps[i++]);
      continue;
    }
    std::size_t left_end = out.size();
    while (left_end > 0 && out[left_end - 1] == U' ') --left_end;
    std::size_t right = i + 1;
    while (right < cps.size() && cps[right] == U' ') ++right;
    const bool left_letter = left_end > 0 && (unicode::is_letter(out[left_end - 1]) ||
                                              unicode::is_mark(out[left_end - 1]));
    const bool right_letter = right < cps.size() && unicode::is_letter(cps[right]);
    const bool spaced = left_end != out.size() || right != i + 1;
    if (left_letter && right_letter && spaced) {
      if (trace) {
        std::u32string before = out.substr(left_end - 1);
        before.append(cps, i, right - i + 1);
        std::u32string after{out[left_end - 1], U'\'', cps[right]};
        trace->push_back({std::string(rules::aym_apostrophe_join), unicode::encode(before),
                          unicode::encode(after)});
      }
      out.resize(left_end);
      out.push_back(U'\'');
      i = right;
      changed = true;
    } else {
      out.push_back(cps[i++]);
    }
  }
  if (changed) text = unicode::encode(out);
  return changed;
}

inline bool apply_rule(std::string_view id, std::string& text, Trace* trace) {
  if (id == rules::aym_apostrophe_join) return aymara_apostrophe_join(text, trace);
  Tokens tokens = unicode::split_spaces(text);
  bool changed = false;
  if (id == rules::gn_digraph) {
    changed = guarani_digraphs(tokens, trace);
  } else if (id == rules::quy_three_token) {
    changed = quechua_three_token(tokens, trace);
  } else if (id == rules::quy_chll_vowel) {
    changed = quechua_chll_vowel(tokens, trace);
  } else if (id == rules::quy_ch_single_vowel) {
    changed = quechua_ch_single_vowel(tokens, trace);
  } else if (id == rules::quy_single_letter) {
    changed = quechua_single_letter(tokens, trace);
  } else {
    throw ContractError("unknown normalization rule '" + std::string(id) + "'");
  }
  if (changed) text = unicode::join_spaces(tokens);
  return changed;
}

inline std::string apply_rules(std::string text, const std::vector<std::string>& enabled,
                               Trace* trace) {
  for (int pass = 0; pass < kMaxRulePasses; ++pass) {
    bool changed = false;
    for (const auto& id : enabled) changed |= apply_rule(id, text, trace);
    if (!changed) break;
  }
  return text;
}

}  // namespace detail

/// Base pass followed by the configured orthographic rules. Merges can put
/// characters side by side that the Unicode form composes (Hangul jamo, for
/// one), so the whole pipeline is re-run until the text is stable.
inline std::string normalize(std::string_view text, const NormalizerConfig& config,
                             Trace* trace = nullptr) {
  config.validate();
  std::string current(text);
  for (int round = 0; round < kMaxRulePasses; ++round) {
    std::string next =
        detail::apply_rules(normalize_base(current, config, trace), config.enabled_rules, trace);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

inline NormalizerConfig NormalizerConfig::for_language(const LangCode& lang) {
  NormalizerConfig config;
  config.language = lang;
  if (lang == lang::gn) {
    config.lowercase = true;
    config.strip_symbols = true;
    config.preserve_set = {U"ã", U"ẽ", U"ĩ", U"õ", U"ũ", U"ỹ", U"g̃", U"ñ", U"̃",
                           U"'",  U".", U",", U";", U":", U"?", U"!", U"¿", U"¡",
                           U"\"", U"-"};
    config.enabled_rules = {std::string(rules::gn_digraph)};
  } else if (lang == lang::quy) {
    config.enabled_rules = {std::string(rules::quy_three_token),
                            std::string(rules::quy_chll_vowel),
                            std::string(rules::quy_ch_single_vowel),
                            std::string(rules::quy_single_letter)};
  } else if (lang == lang::aym) {
    config.enabled_rules = {std::string(rules::aym_apostrophe_join)};
  } else if (lang != lang::es) {
    throw UnknownLanguageError(lang.str());
  }
  return config;
}

inline std::string normalize_guarani(std::string_view text, Trace* trace = nullptr) {
  return normalize(text, NormalizerConfig::for_language(lang::gn), trace);
}

inline std::string normalize_quechua(std::string_view text, Trace* trace = nullptr) {
  return normalize(text, NormalizerConfig::for_language(lang::quy), trace);
}

inline std::string normalize_aymara(std::string_view text, Trace* trace = nullptr) {
  return normalize(text, NormalizerConfig::for_language(lang::aym), trace);
}

/// Dispatches on the language code; Spanish gets the base pass only.
inline std::string normalize_for_language(std::string_view text, const LangCode& lang,
                                          Trace* trace = nullptr) {
  return normalize(text, NormalizerConfig::for_language(lang), trace);
}

inline std::string normalize_for_language(std::string_view text, std::string_view lang,
                                          Trace* trace = nullptr) {
  return normalize_for_language(text, LangCode(std::string(lang)), trace);
}

}  // namespace andes
