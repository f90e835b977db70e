// End-to-end run: normalize -> filter -> (augment) -> stats, driven by a
// JSON config. Every stage writes its artifacts before the next one starts,
// and manifest.json records what ran, including on failure.
//
// Config keys (paths are relative to the config file):
//
//   src_lang, tgt_lang, split          language pair and split ("train", ...)
//   setting                            row label for the stats table
//   input.src, input.tgt               raw parallel files
//   output_dir                         where artifacts go
//   normalize.unicode_form             "NFKC" (default) or "NFC"
//   normalize.trace                    write trace.jsonl
//   filter.*                           see FilterConfig
//   augment.synthetic.src/.tgt         pre-translated synthetic pairs, or
//   augment.pivot                      pivot sentences to forward-translate
//   augment.backend                    "mock" or "http"
//   augment.endpoint, .batch_size      http backend settings
//   augment.dictionary                 two-column TSV
//   augment.seed                       shuffle seed for the merged corpus

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <unicode/uversion.h>

#include "andes/andes.hpp"
#include "andes/http_backend.hpp"
#include "cli.hpp"
#include "config.hpp"

namespace andes::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct SyntheticSource {
  std::optional<fs::path> src, tgt, pivot;
  std::string backend = "mock";
  std::string endpoint;
  std::optional<std::size_t> batch_size;
};

struct Augment {
  std::optional<SyntheticSource> synthetic;
  std::optional<fs::path> dictionary;
  std::optional<std::uint64_t> seed;
};

struct Pipeline {
  LangCode src_lang;
  LangCode tgt_lang;
  Split split = Split::train;
  std::string setting = "curated";
  fs::path input_src, input_tgt;
  fs::path output_dir;
  NormalizerConfig src_norm, tgt_norm;
  bool trace = false;
  FilterConfig filter;
  std::optional<Augment> augment;
  json canonical;  // config after overrides, for hashing
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void require_file(const fs::path& p, const std::string& key) {
  if (!fs::is_regular_file(p)) {
    throw IoError("config key '" + key + "' refers to missing file '" + p.string() + "'");
  }
}

Pipeline parse_pipeline(const fs::path& config_path, const PipelineOverrides& overrides) {
  json doc;
  {
    std::ifstream in(config_path);
    if (!in) throw IoError("cannot read config '" + config_path.string() + "'");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw DataError("config '" + config_path.string() + "' is not valid JSON: " + e.what());
    }
  }
  constexpr std::string_view where = "pipeline config";
  reject_unknown_keys(doc, where,
                      {"src_lang", "tgt_lang", "split", "setting", "input", "output_dir",
                       "normalize", "filter", "augment"});
  if (overrides.output_dir) doc["output_dir"] = fs::absolute(*overrides.output_dir).string();
  if (overrides.tau) doc["filter"]["tau"] = *overrides.tau;
  if (overrides.seed && doc.contains("augment")) doc["augment"]["seed"] = *overrides.seed;

  const fs::path base = config_path.parent_path();
  Pipeline p;
  p.src_lang = LangCode(doc.value("src_lang", std::string("es")));
  p.tgt_lang = LangCode(get_as<std::string>(doc, "tgt_lang", where));
  p.split = parse_split(doc.value("split", std::string("train")));
  p.setting = doc.value("setting", std::string("curated"));

  const json& input = doc.at("input");
  reject_unknown_keys(input, "input", {"src", "tgt"});
  p.input_src = resolve(base, get_as<std::string>(input, "src", "input"));
  p.input_tgt = resolve(base, get_as<std::string>(input, "tgt", "input"));
  p.output_dir = resolve(base, get_as<std::string>(doc, "output_dir", where));

  json norm = doc.value("normalize", json::object());
  p.trace = norm.value("trace", false);
  norm.erase("trace");
  p.src_norm = normalizer_config_from_json(norm, p.src_lang);
  p.tgt_norm = normalizer_config_from_json(norm, p.tgt_lang);
  p.filter = filter_config_from_json(doc.value("filter", json::object()));

  if (doc.contains("augment")) {
    const json& a = doc.at("augment");
    reject_unknown_keys(a, "augment",
                        {"synthetic", "pivot", "backend", "endpoint", "batch_size", "dictionary",
                         "seed"});
    if (p.split != Split::train) {
      throw ContractError("augment is only allowed for the train split, config has '" +
                          std::string(to_string(p.split)) + "'");
    }
    Augment aug;
    if (a.contains("synthetic") || a.contains("pivot")) {
      SyntheticSource s;
      if (a.contains("synthetic")) {
        const json& syn = a.at("synthetic");
        reject_unknown_keys(syn, "augment.synthetic", {"src", "tgt"});
        s.src = resolve(base, get_as<std::string>(syn, "src", "augment.synthetic"));
        s.tgt = resolve(base, get_as<std::string>(syn, "tgt", "augment.synthetic"));
      }
      if (a.contains("pivot")) {
        if (s.src) throw ContractError("augment: give either 'synthetic' or 'pivot', not both");
        s.pivot = resolve(base, get_as<std::string>(a, "pivot", "augment"));
      }
      s.backend = a.value("backend", std::string("mock"));
      if (s.backend != "mock" && s.backend != "http") {
        throw ContractError("unknown backend '" + s.backend + "' (expected mock or http)");
      }
      s.endpoint = a.value("endpoint", std::string());
      if (a.contains("batch_size")) s.batch_size = get_as<std::size_t>(a, "batch_size", "augment");
      aug.synthetic = s;
    }
    if (a.contains("dictionary")) {
      aug.dictionary = resolve(base, get_as<std::string>(a, "dictionary", "augment"));
    }
    if (a.contains("seed")) aug.seed = get_as<std::uint64_t>(a, "seed", "augment");
    p.augment = aug;
  }

  require_file(p.input_src, "input.src");
  require_file(p.input_tgt, "input.tgt");
  if (p.augment) {
    if (p.augment->synthetic) {
      const auto& s = *p.augment->synthetic;
      if (s.src) require_file(*s.src, "augment.synthetic.src");
      if (s.tgt) require_file(*s.tgt, "augment.synthetic.tgt");
      if (s.pivot) require_file(*s.pivot, "augment.pivot");
    }
    if (p.augment->dictionary) require_file(*p.augment->dictionary, "augment.dictionary");
  }
  p.canonical = doc;
  return p;
}

Corpus normalize_corpus(const Corpus& raw, const NormalizerConfig& src_config,
                        const NormalizerConfig& tgt_config,
                        std::vector<ordered_json>* trace_records) {
  Corpus out = raw.empty_like();
  for (const auto& pair : raw) {
    Trace src_trace;
    Trace tgt_trace;
    const bool tracing = trace_records != nullptr;
    out.push_back(SentencePair(pair.id(),
                               normalize(pair.src_text(), src_config, tracing ? &src_trace : nullptr),
                               normalize(pair.tgt_text(), tgt_config, tracing ? &tgt_trace : nullptr),
                               pair.provenance()));
    if (tracing) {
      for (const auto& r : src_trace) {
        auto rec = rule_application_json(r, pair.id() + 1);
        rec["side"] = "src";
        trace_records->push_back(std::move(rec));
      }
      for (const auto& r : tgt_trace) {
        auto rec = rule_application_json(r, pair.id() + 1);
        rec["side"] = "tgt";
        trace_records->push_back(std::move(rec));
      }
    }
  }
  return out;
}

void write_jsonl(const fs::path& path, const std::vector<ordered_json>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& r : records) out << r.dump() << '\n';
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const ordered_json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

ordered_json decision_summary(const std::vector<FilterDecision>& decisions) {
  std::map<std::string, std::size_t> by_reason;
  for (const auto& d : decisions) {
    if (d.reason) ++by_reason[std::string(to_string(*d.reason))];
  }
  ordered_json out = ordered_json::object();
  for (const auto& [reason, n] : by_reason) out[reason] = n;
  return out;
}

std::string file_name(const std::string& stem, const LangCode& lang) {
  return stem + "." + lang.str();
}

}  // namespace

void run_pipeline(const fs::path& config_path, const PipelineOverrides& overrides,
                  std::ostream& out) {
  const Pipeline p = parse_pipeline(config_path, overrides);
  fs::create_directories(p.output_dir);

  ordered_json manifest = {
      {"tool", "andes"},
      {"version", kVersion},
      {"icu_version", U_ICU_VERSION},
      {"unicode_version", U_UNICODE_VERSION},
      {"config_sha256", sha256_hex(p.canonical.dump())},
      {"created_at", utc_timestamp()},
      {"status", "running"},
      {"stages", ordered_json::array()}};
  auto& stages = manifest["stages"];
  const fs::path manifest_path = p.output_dir / "manifest.json";
  auto out_path = [&](const std::string& name) { return p.output_dir / name; };

  try {
    // normalize
    const Corpus raw = load_corpus(p.input_src, p.input_tgt, p.src_lang, p.tgt_lang, p.split);
    std::vector<ordered_json> trace;
    const Corpus normalized =
        normalize_corpus(raw, p.src_norm, p.tgt_norm, p.trace ? &trace : nullptr);
    ordered_json norm_outputs = {file_name("normalized", p.src_lang),
                                 file_name("normalized", p.tgt_lang)};
    write_corpus(normalized, out_path(norm_outputs[0]), out_path(norm_outputs[1]));
    if (p.trace) {
      write_jsonl(out_path("trace.jsonl"), trace);
      norm_outputs.push_back("trace.jsonl");
    }
    stages.push_back({{"stage", "normalize"},
                      {"input_pairs", raw.size()},
                      {"output_pairs", normalized.size()},
                      {"rule_applications", trace.size()},
                      {"outputs", norm_outputs}});

    // filter
    const FilterResult filtered = apply_filters(normalized, p.filter);
    write_corpus(filtered.kept, out_path(file_name("filtered", p.src_lang)),
                 out_path(file_name("filtered", p.tgt_lang)));
    {
      std::vector<ordered_json> log;
      for (const auto& d : filtered.decisions) log.push_back(decision_json(d));
      write_jsonl(out_path("decisions.jsonl"), log);
    }
    stages.push_back({{"stage", "filter"},
                      {"input_pairs", normalized.size()},
                      {"kept", filtered.kept.size()},
                      {"dropped", normalized.size() - filtered.kept.size()},
                      {"drop_reasons", decision_summary(filtered.decisions)},
                      {"outputs",
                       {file_name("filtered", p.src_lang), file_name("filtered", p.tgt_lang),
                        "decisions.jsonl"}}});

    StatsTable table = {{StatsKey{p.tgt_lang.str(), p.setting, std::string(to_string(p.split))},
                         compute_stats(raw, filtered.kept)}};

    // augment
    if (p.augment) {
      const Augment& a = *p.augment;
      Corpus merged = filtered.kept;
      std::size_t synthetic_raw = 0;
      ordered_json record = {{"stage", "augment"}};
      ordered_json outputs = {file_name("train", p.src_lang), file_name("train", p.tgt_lang)};
      if (a.synthetic) {
        const auto& s = *a.synthetic;
        Corpus synthetic(p.src_lang, p.tgt_lang, Split::train);
        if (s.pivot) {
          std::unique_ptr<TranslationBackend> backend;
          std::size_t batch = s.batch_size.value_or(32);
          if (s.backend == "mock") {
            backend = mock_backend();
          } else if (s.backend == "http") {
            HttpBackendConfig hc;
            if (auto env = HttpBackendConfig::from_env()) hc = *env;
            if (!s.endpoint.empty()) hc.endpoint = s.endpoint;
            if (hc.endpoint.empty()) {
              throw ContractError("http backend needs augment.endpoint or " +
                                  std::string(kEndpointEnv));
            }
            if (s.batch_size) hc.batch_size = *s.batch_size;
            batch = hc.batch_size;
            backend = std::make_unique<HttpBackend>(hc);
          } else {
            throw ContractError("unknown backend '" + s.backend + "'");
          }
          synthetic = generate_synthetic(read_lines(*s.pivot), *backend, p.src_lang, p.tgt_lang,
                                         batch);
        } else {
          for (const auto& pair : load_corpus(*s.src, *s.tgt, p.src_lang, p.tgt_lang,
                                              Split::train)) {
            synthetic.add(pair.src_text(), pair.tgt_text(), Provenance::synthetic);
          }
        }
        synthetic_raw = synthetic.size();
        const FilterResult syn_filtered =
            apply_filters(normalize_corpus(synthetic, p.src_norm, p.tgt_norm, nullptr), p.filter);
        {
          std::vector<ordered_json> log;
          for (const auto& d : syn_filtered.decisions) log.push_back(decision_json(d));
          write_jsonl(out_path("synthetic_decisions.jsonl"), log);
          outputs.push_back("synthetic_decisions.jsonl");
        }
        merged = merge_augmented(filtered.kept, syn_filtered.kept, a.seed);
        record["synthetic_raw"] = synthetic_raw;
        record["synthetic_kept"] = syn_filtered.kept.size();
      }
      std::size_t dictionary_added = 0;
      if (a.dictionary) {
        std::vector<DictionaryEntry> entries;
        for (const auto& e : load_dictionary(*a.dictionary)) {
          entries.emplace_back(normalize(e.src_term, p.src_norm), normalize(e.tgt_term, p.tgt_norm));
        }
        const std::size_t before = merged.size();
        merged = append_dictionary(merged, entries);
        dictionary_added = merged.size() - before;
      }
      write_corpus(merged, out_path(outputs[0]), out_path(outputs[1]));
      const auto counts = provenance_counts(merged);
      record["curated"] = counts[0];
      record["synthetic"] = counts[1];
      record["dictionary"] = counts[2];
      record["total"] = merged.size();
      record["outputs"] = outputs;
      stages.push_back(record);

      std::size_t src_tokens = 0;
      std::size_t tgt_tokens = 0;
      for (const auto& pair : merged) {
        src_tokens += pair.src_len();
        tgt_tokens += pair.tgt_len();
      }
      table.push_back({StatsKey{p.tgt_lang.str(), p.setting + "+synthetic",
                                std::string(to_string(p.split))},
                       make_stats(raw.size() + synthetic_raw + dictionary_added, merged.size(),
                                  src_tokens, tgt_tokens)});
    }

    // stats
    write_json(out_path("stats.json"), stats_json(table));
    out << stats_table_text(table);
    stages.push_back({{"stage", "stats"}, {"rows", table.size()}, {"outputs", {"stats.json"}}});
    manifest["status"] = "ok";
    write_json(manifest_path, manifest);
  } catch (const std::exception& e) {
    manifest["status"] = "failed";
    manifest["error"] = e.what();
    try {
      write_json(manifest_path, manifest);
    } catch (const std::exception&) {
      // The original failure is the one worth reporting.
    }
    throw;
  }
}

}  // namespace andes::cli
