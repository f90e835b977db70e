#pragma once

// Synthetic data: forward translation through a pluggable backend, merging
// synthetic pairs into a training split, and appending bilingual dictionary
// entries as short pairs. Nothing here can add pairs to a dev or test split.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "andes/corpus.hpp"
#include "andes/error.hpp"
#include "andes/normalize.hpp"
#include "andes/unicode.hpp"

namespace andes {

/// A machine translation system. translate() must return exactly one output
/// per input, in input order.
class TranslationBackend {
 public:
  virtual ~TranslationBackend() = default;
  virtual std::string name() const = 0;
  virtual std::vector<std::string> translate(std::span<const std::string> texts,
                                             const LangCode& src, const LangCode& tgt) = 0;
};

/// Deterministic stand-in for a real MT model. Every token is rewritten
/// through a fixed letter substitution (a seeded permutation of a-z, applied
/// case-preservingly); other characters pass through. The mapping is a
/// bijection, so invert() recovers the input exactly.
class MockBackend final : public TranslationBackend {
 public:
  static constexpr std::uint32_t kDefaultSeed = 20230;

  explicit MockBackend(std::uint32_t seed = kDefaultSeed) {
    std::iota(forward_.begin(), forward_.end(), 0);
    std::mt19937 rng(seed);
    // Fisher-Yates with explicit modulo draws; std::shuffle's output is
    // implementation-defined and the codebook must be portable.
    for (std::size_t i = forward_.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(forward_[i], forward_[j]);
    }
    for (std::size_t i = 0; i < forward_.size(); ++i) inverse_[forward_[i]] = static_cast<int>(i);
  }

  std::string name() const override { return "mock"; }

  std::vector<std::string> translate(std::span<const std::string> texts, const LangCode&,
                                     const LangCode&) override {
    std::vector<std::string> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(substitute(t, forward_));
    return out;
  }

  std::string invert(std::string_view text) const { return substitute(text, inverse_); }

 private:
  static std::string substitute(std::string_view text, const std::array<int, 26>& table) {
    std::string out(text);
    for (char& ch : out) {
      if (ch >= 'a' && ch <= 'z') {
        ch = static_cast<char>('a' + table[static_cast<std::size_t>(ch - 'a')]);
      } else if (ch >= 'A' && ch <= 'Z') {
        ch = static_cast<char>('A' + table[static_cast<std::size_t>(ch - 'A')]);
      }
    }
    return out;
  }

  std::array<int, 26> forward_{};
  std::array<int, 26> inverse_{};
};

inline std::unique_ptr<MockBackend> mock_backend(std::uint32_t seed = MockBackend::kDefaultSeed) {
  return std::make_unique<MockBackend>(seed);
}

/// Forward-translates pivot sentences into a synthetic training corpus.
/// Batches are sent in order; a failing batch is reported by index.
inline Corpus generate_synthetic(std::span<const std::string> pivot_texts,
                                 TranslationBackend& backend, const LangCode& src,
                                 const LangCode& tgt, std::size_t batch_size = 64) {
  if (pivot_texts.empty()) throw ContractError("no pivot sentences to translate");
  if (batch_size == 0) throw ContractError("batch size must be positive");
  Corpus out(src, tgt, Split::train);
  for (std::size_t start = 0, batch = 0; start < pivot_texts.size();
       start += batch_size, ++batch) {
    const auto chunk = pivot_texts.subspan(start, std::min(batch_size, pivot_texts.size() - start));
    std::vector<std::string> translated;
    try {
      translated = backend.translate(chunk, src, tgt);
    } catch (const std::exception& e) {
      throw BackendError("backend '" + backend.name() + "' failed on batch " +
                         std::to_string(batch) + ": " + e.what());
    }
    if (translated.size() != chunk.size()) {
      throw BackendError("backend '" + backend.name() + "' returned " +
                         std::to_string(translated.size()) + " outputs for " +
                         std::to_string(chunk.size()) + " inputs in batch " +
                         std::to_string(batch));
    }
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      out.add(chunk[i], std::move(translated[i]), Provenance::synthetic);
    }
  }
  return out;
}

namespace detail {

inline void require_train(const Corpus& c, std::string_view what) {
  if (c.split() != Split::train) {
    throw ContractError(std::string(what) + " is a " + std::string(to_string(c.split())) +
                        " corpus; augmentation only applies to the train split");
  }
}

/// Unbiased draw from [0, bound) by rejection on a 64-bit engine.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace detail

/// Curated pairs followed by synthetic pairs, optionally shuffled with a
/// seed. Ids are reassigned 0..n-1 in output order; provenance is kept.
inline Corpus merge_augmented(const Corpus& curated, const Corpus& synthetic,
                              std::optional<std::uint64_t> shuffle_seed = std::nullopt) {
  detail::require_train(curated, "curated");
  detail::require_train(synthetic, "synthetic");
  if (curated.src_lang() != synthetic.src_lang() || curated.tgt_lang() != synthetic.tgt_lang()) {
    throw ContractError("cannot merge " + synthetic.src_lang().str() + "-" +
                        synthetic.tgt_lang().str() + " data into a " + curated.src_lang().str() +
                        "-" + curated.tgt_lang().str() + " corpus");
  }
  std::vector<const SentencePair*> order;
  order.reserve(curated.size() + synthetic.size());
  for (const auto& p : curated) order.push_back(&p);
  for (const auto& p : synthetic) order.push_back(&p);
  if (shuffle_seed) {
    std::mt19937_64 rng(*shuffle_seed);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[detail::bounded(rng, i)]);
    }
  }
  Corpus out = curated.empty_like();
  for (std::size_t i = 0; i < order.size(); ++i) out.push_back(order[i]->with_id(i));
  return out;
}

struct DictionaryEntry {
  std::string src_term;
  std::string tgt_term;

  DictionaryEntry(std::string src, std::string tgt)
      : src_term(std::move(src)), tgt_term(std::move(tgt)) {
    const auto base = NormalizerConfig::for_language(lang::es);
    if (normalize_base(src_term, base).empty() || normalize_base(tgt_term, base).empty()) {
      throw DataError("dictionary entry has an empty side");
    }
  }

  friend bool operator==(const DictionaryEntry&, const DictionaryEntry&) = default;
};

/// Two-column UTF-8 TSV, no header. Blank lines are skipped.
inline std::vector<DictionaryEntry> load_dictionary(const std::filesystem::path& path) {
  std::vector<DictionaryEntry> entries;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw DataError("'" + path.string() + "' line " + std::to_string(i + 1) +
                      ": expected two tab-separated columns");
    }
    try {
      entries.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    } catch (const DataError& e) {
      throw DataError("'" + path.string() + "' line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return entries;
}

/// Appends each entry as a dictionary pair, skipping entries already present
/// as dictionary pairs.
inline Corpus append_dictionary(const Corpus& corpus, std::span<const DictionaryEntry> entries) {
  detail::require_train(corpus, "target");
  Corpus out = corpus;
  std::set<std::pair<std::string, std::string>> present;
  for (const auto& p : corpus) {
    if (p.provenance() == Provenance::dictionary) present.emplace(p.src_text(), p.tgt_text());
  }
  for (const auto& e : entries) {
    if (present.emplace(e.src_term, e.tgt_term).second) {
      out.add(e.src_term, e.tgt_term, Provenance::dictionary);
    }
  }
  return out;
}

/// Number of pairs per provenance class, indexed by Provenance.
inline std::array<std::size_t, 3> provenance_counts(const Corpus& corpus) {
  std::array<std::size_t, 3> counts{};
  for (const auto& p : corpus) ++counts[static_cast<std::size_t>(p.provenance())];
  return counts;
}

}  // namespace andes
