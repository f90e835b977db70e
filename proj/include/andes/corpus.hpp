#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "andes/error.hpp"
#include "andes/unicode.hpp"

namespace andes {

/// Short lowercase language identifier ("es", "aym", "gn", "quy", ...).
class LangCode {
 public:
  LangCode() = default;

  explicit LangCode(std::string code) : code_(std::move(code)) {
    if (code_.empty()) throw ContractError("language code must be nonempty");
    for (char ch : code_) {
      if (ch < 'a' || ch > 'z') {
        throw ContractError("language code '" + code_ +
                            "' must consist of lowercase ASCII letters");
      }
    }
  }

  const std::string& str() const { return code_; }

  friend bool operator==(const LangCode&, const LangCode&) = default;
  friend auto operator<=>(const LangCode&, const LangCode&) = default;

 private:
  std::string code_;
};

namespace lang {
inline const LangCode es{"es"};
inline const LangCode aym{"aym"};
inline const LangCode gn{"gn"};
inline const LangCode quy{"quy"};
}  // namespace lang

enum class Provenance { curated, synthetic, dictionary };
enum class Split { train, dev, test };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::curated: return "curated";
    case Provenance::synthetic: return "synthetic";
    case Provenance::dictionary: return "dictionary";
  }
  return "?";
}

inline std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "?";
}

inline Split parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "dev") return Split::dev;
  if (s == "test") return Split::test;
  throw ContractError("unknown split '" + std::string(s) + "' (expected train, dev or test)");
}

/// One aligned sentence pair. Token lengths are derived from the texts and
/// recomputed on every text change; provenance is fixed at construction.
class SentencePair {
 public:
  SentencePair(std::size_t id, std::string src, std::string tgt,
               Provenance provenance = Provenance::curated)
      : id_(id), provenance_(provenance) {
    set_src_text(std::move(src));
    set_tgt_text(std::move(tgt));
  }

  std::size_t id() const { return id_; }
  const std::string& src_text() const { return src_; }
  const std::string& tgt_text() const { return tgt_; }
  Provenance provenance() const { return provenance_; }
  std::size_t src_len() const { return src_len_; }
  std::size_t tgt_len() const { return tgt_len_; }

  void set_src_text(std::string text) {
    check_single_line(text);
    src_len_ = unicode::count_tokens(text);
    src_ = std::move(text);
  }

  void set_tgt_text(std::string text) {
    check_single_line(text);
    tgt_len_ = unicode::count_tokens(text);
    tgt_ = std::move(text);
  }

  /// Same texts and provenance under a different ordinal.
  SentencePair with_id(std::size_t id) const {
    SentencePair copy = *this;
    copy.id_ = id;
    return copy;
  }

  friend bool operator==(const SentencePair&, const SentencePair&) = default;

 private:
  static void check_single_line(const std::string& text) {
    if (text.find_first_of("\r\n") != std::string::npos) {
      throw DataError("sentence text contains a line break");
    }
  }

  std::size_t id_;
  std::string src_;
  std::string tgt_;
  Provenance provenance_;
  std::size_t src_len_ = 0;
  std::size_t tgt_len_ = 0;
};

/// Ordered pairs for one language direction and split. Pair ids are unique
/// and strictly increasing in sequence order.
class Corpus {
 public:
  Corpus(LangCode src_lang, LangCode tgt_lang, Split split)
      : src_lang_(std::move(src_lang)), tgt_lang_(std::move(tgt_lang)), split_(split) {
    if (src_lang_ == tgt_lang_) {
      throw ContractError("source and target language are both '" + src_lang_.str() + "'");
    }
  }

  const LangCode& src_lang() const { return src_lang_; }
  const LangCode& tgt_lang() const { return tgt_lang_; }
  Split split() const { return split_; }
  const std::vector<SentencePair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  const SentencePair& operator[](std::size_t i) const { return pairs_[i]; }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  std::size_t next_id() const { return pairs_.empty() ? 0 : pairs_.back().id() + 1; }

  void push_back(SentencePair pair) {
    if (!pairs_.empty() && pair.id() <= pairs_.back().id()) {
      throw ContractError("pair id " + std::to_string(pair.id()) +
                          " does not follow id " + std::to_string(pairs_.back().id()));
    }
    pairs_.push_back(std::move(pair));
  }

  /// Appends a pair with the next free id.
  const SentencePair& add(std::string src, std::string tgt,
                          Provenance provenance = Provenance::curated) {
    pairs_.emplace_back(next_id(), std::move(src), std::move(tgt), provenance);
    return pairs_.back();
  }

  /// Same languages and split, no pairs.
  Corpus empty_like() const { return Corpus(src_lang_, tgt_lang_, split_); }

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  LangCode src_lang_;
  LangCode tgt_lang_;
  Split split_;
  std::vector<SentencePair> pairs_;
};

enum class Verdict { keep, drop };

enum class DropReason {
  empty,
  length_ratio,
  duplicate,
  numeric_mismatch,
  boilerplate,
  punctuation_only,
  too_long,
};

inline std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::empty: return "empty";
    case DropReason::length_ratio: return "length_ratio";
    case DropReason::duplicate: return "duplicate";
    case DropReason::numeric_mismatch: return "numeric_mismatch";
    case DropReason::boilerplate: return "boilerplate";
    case DropReason::punctuation_only: return "punctuation_only";
    case DropReason::too_long: return "too_long";
  }
  return "?";
}

inline DropReason parse_drop_reason(std::string_view s) {
  for (auto r : {DropReason::empty, DropReason::length_ratio, DropReason::duplicate,
                 DropReason::numeric_mismatch, DropReason::boilerplate,
                 DropReason::punctuation_only, DropReason::too_long}) {
    if (to_string(r) == s) return r;
  }
  throw ContractError("unknown filter rule '" + std::string(s) + "'");
}

/// Keep/drop verdict for one pair. A kept pair has no reason; a dropped pair
/// has exactly one.
struct FilterDecision {
  std::size_t pair_id = 0;
  Verdict verdict = Verdict::keep;
  std::optional<DropReason> reason;
  std::string detail;

  static FilterDecision keep(std::size_t id) { return {id, Verdict::keep, std::nullopt, {}}; }
  static FilterDecision drop(std::size_t id, DropReason reason, std::string detail = {}) {
    return {id, Verdict::drop, reason, std::move(detail)};
  }

  bool kept() const { return verdict == Verdict::keep; }

  friend bool operator==(const FilterDecision&, const FilterDecision&) = default;
};

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return bytes;
}

}  // namespace detail

/// Reads a UTF-8 file as one sentence per line. Carriage returns are
/// stripped, empty lines are kept, and a trailing newline does not start an
/// extra line.
inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::string bytes = detail::read_file(path);
  if (auto bad = unicode::find_invalid_utf8(bytes)) {
    const auto line = 1 + std::count(bytes.begin(), bytes.begin() + static_cast<long>(*bad), '\n');
    throw DataError("invalid UTF-8 in '" + path.string() + "' at byte offset " +
                    std::to_string(*bad) + " (line " + std::to_string(line) + ")");
  }
  std::erase(bytes, '\r');
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < bytes.size()) {
    std::size_t end = bytes.find('\n', start);
    if (end == std::string::npos) end = bytes.size();
    lines.emplace_back(bytes, start, end - start);
    start = end + 1;
  }
  return lines;
}

/// Writes one line per entry, each terminated by a single LF.
inline void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& line : lines) out << line << '\n';
  out.flush();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

inline Corpus load_corpus(const std::filesystem::path& src_path,
                          const std::filesystem::path& tgt_path, const LangCode& src_lang,
                          const LangCode& tgt_lang, Split split) {
  Corpus corpus(src_lang, tgt_lang, split);
  auto src = read_lines(src_path);
  auto tgt = read_lines(tgt_path);
  if (src.size() != tgt.size()) {
    throw DataError("line count mismatch: '" + src_path.string() + "' has " +
                    std::to_string(src.size()) + " lines, '" + tgt_path.string() + "' has " +
                    std::to_string(tgt.size()));
  }
  for (std::size_t i = 0; i < src.size(); ++i) {
    corpus.add(std::move(src[i]), std::move(tgt[i]), Provenance::curated);
  }
  return corpus;
}

inline void write_corpus(const Corpus& corpus, const std::filesystem::path& src_path,
                         const std::filesystem::path& tgt_path) {
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  src.reserve(corpus.size());
  tgt.reserve(corpus.size());
  for (const auto& pair : corpus) {
    src.push_back(pair.src_text());
    tgt.push_back(pair.tgt_text());
  }
  write_lines(src_path, src);
  write_lines(tgt_path, tgt);
}

}  // namespace andes
