#pragma once

// JSON configuration sections shared by the `filter` command and the
// pipeline config file.

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "andes/corpus.hpp"
#include "andes/error.hpp"
#include "andes/filters.hpp"
#include "andes/normalize.hpp"

namespace andes::cli {

using nlohmann::json;

inline void reject_unknown_keys(const json& section, std::string_view where,
                                const std::vector<std::string>& allowed) {
  if (!section.is_object()) throw ContractError(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : section.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ContractError("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T get_as(const json& section, const char* key, std::string_view where) {
  try {
    return section.at(key).get<T>();
  } catch (const json::exception&) {
    throw ContractError("invalid value for '" + std::string(key) + "' in " + std::string(where));
  }
}

inline std::vector<DropReason> parse_rule_list(const std::vector<std::string>& names) {
  std::vector<DropReason> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(parse_drop_reason(n));
  return out;
}

/// "filter" section: {tau, max_len_tokens, numeric_jaccard_min, url_markers,
/// rules_enabled}. Missing keys keep their defaults.
inline FilterConfig filter_config_from_json(const json& section, FilterConfig config = {}) {
  constexpr std::string_view where = "filter config";
  reject_unknown_keys(section, where,
                      {"tau", "max_len_tokens", "numeric_jaccard_min", "url_markers",
                       "rules_enabled"});
  if (section.contains("tau")) config.tau = get_as<double>(section, "tau", where);
  if (section.contains("max_len_tokens")) {
    config.max_len_tokens = get_as<std::size_t>(section, "max_len_tokens", where);
  }
  if (section.contains("numeric_jaccard_min")) {
    config.numeric_jaccard_min = get_as<double>(section, "numeric_jaccard_min", where);
  }
  if (section.contains("url_markers")) {
    config.url_markers = get_as<std::vector<std::string>>(section, "url_markers", where);
  }
  if (section.contains("rules_enabled")) {
    config.rules_enabled =
        parse_rule_list(get_as<std::vector<std::string>>(section, "rules_enabled", where));
  }
  config.validate();
  return config;
}

inline unicode::Form parse_unicode_form(std::string_view s) {
  if (s == "NFKC") return unicode::Form::NFKC;
  if (s == "NFC") return unicode::Form::NFC;
  throw ContractError("unknown Unicode form '" + std::string(s) + "' (expected NFKC or NFC)");
}

/// "normalize" section: {unicode_form}. Everything else comes from the
/// language's built-in configuration.
inline NormalizerConfig normalizer_config_from_json(const json& section, const LangCode& lang) {
  constexpr std::string_view where = "normalize config";
  NormalizerConfig config = NormalizerConfig::for_language(lang);
  reject_unknown_keys(section, where, {"unicode_form"});
  if (section.contains("unicode_form")) {
    config.unicode_form = parse_unicode_form(get_as<std::string>(section, "unicode_form", where));
  }
  config.validate();
  return config;
}

}  // namespace andes::cli
