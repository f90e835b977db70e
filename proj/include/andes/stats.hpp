#pragma once

// Corpus summary statistics: raw/valid counts, drop percentage, average
// token lengths and the target/source length ratio, plus JSON and
// plain-text table rendering.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "andes/corpus.hpp"
#include "andes/error.hpp"

namespace andes {

/// Formats num/den to two decimals, rounding half up, using integer
/// arithmetic only. den must be positive.
inline std::string fixed2(std::uint64_t num, std::uint64_t den) {
  const std::uint64_t hundredths = (200 * num + den) / (2 * den);
  std::string frac = std::to_string(hundredths % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return std::to_string(hundredths / 100) + "." + frac;
}

struct CorpusStats {
  std::size_t total = 0;
  std::size_t valid = 0;
  double drop_pct = 0.0;
  double avg_src_len = 0.0;
  double avg_tgt_len = 0.0;
  double tgt_src_ratio = 0.0;
  /// Token sums over valid pairs; the averages are these divided by valid.
  std::size_t src_tokens = 0;
  std::size_t tgt_tokens = 0;

  std::string drop_pct_str() const {
    return total == 0 ? "0.00" : fixed2(100 * (total - valid), total);
  }
  std::string avg_src_str() const { return valid == 0 ? "0.00" : fixed2(src_tokens, valid); }
  std::string avg_tgt_str() const { return valid == 0 ? "0.00" : fixed2(tgt_tokens, valid); }
  std::string ratio_str() const {
    return src_tokens == 0 ? "0.00" : fixed2(tgt_tokens, src_tokens);
  }
};

inline CorpusStats make_stats(std::size_t total, std::size_t valid, std::size_t src_tokens,
                              std::size_t tgt_tokens) {
  if (valid > total) {
    throw DataError("valid count " + std::to_string(valid) + " exceeds total " +
                    std::to_string(total));
  }
  CorpusStats s;
  s.total = total;
  s.valid = valid;
  s.src_tokens = src_tokens;
  s.tgt_tokens = tgt_tokens;
  if (total > 0) {
    s.drop_pct = 100.0 * static_cast<double>(total - valid) / static_cast<double>(total);
  }
  if (valid > 0) {
    s.avg_src_len = static_cast<double>(src_tokens) / static_cast<double>(valid);
    s.avg_tgt_len = static_cast<double>(tgt_tokens) / static_cast<double>(valid);
  }
  if (src_tokens > 0) {
    s.tgt_src_ratio = static_cast<double>(tgt_tokens) / static_cast<double>(src_tokens);
  }
  return s;
}

/// Statistics for a raw corpus and the subsequence of it that survived
/// filtering. Averages are taken over the filtered pairs.
inline CorpusStats compute_stats(const Corpus& raw, const Corpus& filtered) {
  std::size_t r = 0;
  std::size_t src_tokens = 0;
  std::size_t tgt_tokens = 0;
  for (const auto& pair : filtered) {
    while (r < raw.size() && raw[r].id() < pair.id()) ++r;
    if (r == raw.size() || raw[r].id() != pair.id()) {
      throw DataError("filtered corpus is not a subsequence of the raw corpus (pair id " +
                      std::to_string(pair.id()) + ")");
    }
    ++r;
    src_tokens += pair.src_len();
    tgt_tokens += pair.tgt_len();
  }
  return make_stats(raw.size(), filtered.size(), src_tokens, tgt_tokens);
}

/// Row key of a statistics report.
struct StatsKey {
  std::string language;
  std::string setting;
  std::string split;
};

using StatsTable = std::vector<std::pair<StatsKey, CorpusStats>>;

/// {language: {setting: {split: {total, valid, drop_pct, avg_src_len,
/// avg_tgt_len, tgt_src_ratio}}}} with reals rounded to two decimals.
inline nlohmann::ordered_json stats_json(const StatsTable& table) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [key, s] : table) {
    doc[key.language][key.setting][key.split] = {
        {"total", s.total},
        {"valid", s.valid},
        {"drop_pct", std::stod(s.drop_pct_str())},
        {"avg_src_len", std::stod(s.avg_src_str())},
        {"avg_tgt_len", std::stod(s.avg_tgt_str())},
        {"tgt_src_ratio", std::stod(s.ratio_str())},
    };
  }
  return doc;
}

/// Aligned plain-text table. Language and setting labels are printed only on
/// the first row of their group.
inline std::string stats_table_text(const StatsTable& table) {
  if (table.empty()) return {};
  const std::vector<std::string> header = {"Lang",  "Setting", "Split",   "Total",  "Valid",
                                           "Drop%", "AvgSrc",  "AvgTgt", "Tgt/Src"};
  std::vector<std::vector<std::string>> rows;
  const StatsKey* prev = nullptr;
  for (const auto& [key, s] : table) {
    const bool same_lang = prev && prev->language == key.language;
    const bool same_setting = same_lang && prev->setting == key.setting;
    rows.push_back({same_lang ? "" : key.language, same_setting ? "" : key.setting, key.split,
                    std::to_string(s.total), std::to_string(s.valid), s.drop_pct_str(),
                    s.avg_src_str(), s.avg_tgt_str(), s.ratio_str()});
    prev = &key;
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << "  ";
      // Text columns left-aligned, numbers right-aligned.
      if (c < 3) {
        os << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      } else {
        os << std::right << std::setw(static_cast<int>(width[c])) << row[c];
      }
    }
    os << '\n';
  };
  emit(header);
  std::size_t rule = 0;
  for (auto w : width) rule += w;
  os << std::string(rule + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& row : rows) emit(row);
  return os.str();
}

}  // namespace andes
