#include "cli.hpp"

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "andes/andes.hpp"
#include "andes/http_backend.hpp"
#include "config.hpp"

namespace andes::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Refuses to write over one of the command's inputs.
void check_not_input(const fs::path& output, const std::vector<fs::path>& inputs) {
  std::error_code ec;
  for (const auto& in : inputs) {
    if (fs::exists(output, ec) && fs::equivalent(output, in, ec)) {
      throw ContractError("output '" + output.string() + "' would overwrite input '" +
                          in.string() + "'");
    }
  }
}

void write_jsonl(const fs::path& path, const std::vector<nlohmann::ordered_json>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& r : records) out << r.dump() << '\n';
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::string format4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

// ---------------------------------------------------------------- normalize

struct NormalizeArgs {
  std::string lang;
  std::string src_lang = "es";
  std::string unicode_form;
  fs::path input, output;
  fs::path src, tgt, out_src, out_tgt;
  fs::path trace;
};

void add_trace(std::vector<nlohmann::ordered_json>& records, const Trace& trace, std::size_t line,
               const char* side) {
  for (const auto& r : trace) {
    auto rec = rule_application_json(r, line);
    if (side) rec["side"] = side;
    records.push_back(std::move(rec));
  }
}

int cmd_normalize(const NormalizeArgs& a, std::ostream& out) {
  const LangCode lang(a.lang);
  NormalizerConfig config = NormalizerConfig::for_language(lang);
  if (!a.unicode_form.empty()) config.unicode_form = parse_unicode_form(a.unicode_form);
  const bool single = !a.input.empty();
  if (single == !a.src.empty()) {
    throw ContractError("give either --input/--output or --src/--tgt/--out-src/--out-tgt");
  }
  const bool tracing = !a.trace.empty();
  std::vector<nlohmann::ordered_json> trace_records;

  if (single) {
    if (a.output.empty()) throw ContractError("--output is required with --input");
    check_not_input(a.output, {a.input});
    auto lines = read_lines(a.input);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      Trace trace;
      lines[i] = normalize(lines[i], config, tracing ? &trace : nullptr);
      add_trace(trace_records, trace, i + 1, nullptr);
    }
    write_lines(a.output, lines);
    out << "normalized " << lines.size() << " lines (" << lang.str() << ")\n";
  } else {
    if (a.tgt.empty() || a.out_src.empty() || a.out_tgt.empty()) {
      throw ContractError("--src, --tgt, --out-src and --out-tgt go together");
    }
    check_not_input(a.out_src, {a.src, a.tgt});
    check_not_input(a.out_tgt, {a.src, a.tgt});
    const LangCode src_lang(a.src_lang);
    NormalizerConfig src_config = NormalizerConfig::for_language(src_lang);
    src_config.unicode_form = config.unicode_form;
    const Corpus raw = load_corpus(a.src, a.tgt, src_lang, lang, Split::train);
    Corpus normalized = raw.empty_like();
    for (const auto& p : raw) {
      Trace src_trace;
      Trace tgt_trace;
      normalized.push_back(SentencePair(
          p.id(), normalize(p.src_text(), src_config, tracing ? &src_trace : nullptr),
          normalize(p.tgt_text(), config, tracing ? &tgt_trace : nullptr), p.provenance()));
      add_trace(trace_records, src_trace, p.id() + 1, "src");
      add_trace(trace_records, tgt_trace, p.id() + 1, "tgt");
    }
    write_corpus(normalized, a.out_src, a.out_tgt);
    out << "normalized " << normalized.size() << " pairs (" << src_lang.str() << "-"
        << lang.str() << ")\n";
  }
  if (tracing) write_jsonl(a.trace, trace_records);
  return kOk;
}

// ------------------------------------------------------------------- filter

struct FilterArgs {
  fs::path src, tgt, out_src, out_tgt, log, config;
  std::string src_lang = "es";
  std::string tgt_lang;
  std::string split = "train";
  std::optional<double> tau;
  std::optional<std::size_t> max_len;
  std::optional<double> numeric_min;
  std::vector<std::string> rules;
};

std::string summary_line(std::size_t kept, std::size_t dropped) {
  const CorpusStats s = make_stats(kept + dropped, kept, 0, 0);
  return "kept " + std::to_string(kept) + " / dropped " + std::to_string(dropped) + " (" +
         s.drop_pct_str() + "%)";
}

int cmd_filter(const FilterArgs& a, std::ostream& out) {
  FilterConfig config;
  if (!a.config.empty()) {
    const json doc = read_json_file(a.config);
    config = filter_config_from_json(doc.contains("filter") ? doc.at("filter") : doc);
  }
  if (a.tau) config.tau = *a.tau;
  if (a.max_len) config.max_len_tokens = *a.max_len;
  if (a.numeric_min) config.numeric_jaccard_min = *a.numeric_min;
  if (!a.rules.empty()) config.rules_enabled = parse_rule_list(a.rules);
  config.validate();

  check_not_input(a.out_src, {a.src, a.tgt});
  check_not_input(a.out_tgt, {a.src, a.tgt});
  const Corpus corpus = load_corpus(a.src, a.tgt, LangCode(a.src_lang), LangCode(a.tgt_lang),
                                    parse_split(a.split));
  const FilterResult result = apply_filters(corpus, config);
  write_corpus(result.kept, a.out_src, a.out_tgt);
  if (!a.log.empty()) {
    std::vector<nlohmann::ordered_json> records;
    records.reserve(result.decisions.size());
    for (const auto& d : result.decisions) records.push_back(decision_json(d));
    write_jsonl(a.log, records);
  }
  out << summary_line(result.kept.size(), corpus.size() - result.kept.size()) << '\n';
  return kOk;
}

// -------------------------------------------------------------------- stats

struct StatsArgs {
  fs::path raw_src, raw_tgt, filtered_src, filtered_tgt, decisions, json_out;
  std::string src_lang = "es";
  std::string tgt_lang;
  std::string split = "train";
  std::string setting = "curated";
};

/// Rebuilds the filtered corpus with the raw corpus' pair ids, either from a
/// decision log or by matching texts in order.
Corpus align_filtered(const Corpus& raw, const Corpus& filtered, const fs::path& decisions) {
  Corpus aligned = raw.empty_like();
  if (!decisions.empty()) {
    std::vector<std::size_t> kept_ids;
    for (const auto& line : read_lines(decisions)) {
      if (line.empty()) continue;
      try {
        const json rec = json::parse(line);
        if (rec.at("verdict") == "keep") kept_ids.push_back(rec.at("pair_id").get<std::size_t>());
      } catch (const json::exception& e) {
        throw DataError("bad decision record in '" + decisions.string() + "': " + e.what());
      }
    }
    if (kept_ids.size() != filtered.size()) {
      throw DataError("decision log keeps " + std::to_string(kept_ids.size()) +
                      " pairs but the filtered corpus has " + std::to_string(filtered.size()));
    }
    for (std::size_t i = 0; i < filtered.size(); ++i) {
      aligned.push_back(filtered[i].with_id(kept_ids[i]));
    }
    return aligned;
  }
  std::size_t r = 0;
  for (const auto& p : filtered) {
    while (r < raw.size() &&
           (raw[r].src_text() != p.src_text() || raw[r].tgt_text() != p.tgt_text())) {
      ++r;
    }
    if (r == raw.size()) {
      throw DataError("filtered corpus is not a subsequence of the raw corpus (pass --decisions "
                      "when the filtered texts were normalized)");
    }
    aligned.push_back(p.with_id(raw[r].id()));
    ++r;
  }
  return aligned;
}

int cmd_stats(const StatsArgs& a, std::ostream& out) {
  const LangCode src(a.src_lang);
  const LangCode tgt(a.tgt_lang);
  const Split split = parse_split(a.split);
  const Corpus raw = load_corpus(a.raw_src, a.raw_tgt, src, tgt, split);
  const Corpus filtered = load_corpus(a.filtered_src, a.filtered_tgt, src, tgt, split);
  if (filtered.size() > raw.size()) {
    throw DataError("filtered corpus (" + std::to_string(filtered.size()) +
                    " pairs) is larger than the raw corpus (" + std::to_string(raw.size()) + ")");
  }
  const CorpusStats stats = compute_stats(raw, align_filtered(raw, filtered, a.decisions));
  const StatsTable table = {{StatsKey{tgt.str(), a.setting, a.split}, stats}};
  out << stats_table_text(table);
  if (!a.json_out.empty()) {
    std::ofstream f(a.json_out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + a.json_out.string() + "'");
    f << stats_json(table).dump(2) << '\n';
  }
  return kOk;
}

// ------------------------------------------------------------------ augment

struct AugmentArgs {
  fs::path src, tgt, synthetic_src, synthetic_tgt, pivot, dict, out_src, out_tgt;
  std::string src_lang = "es";
  std::string tgt_lang;
  std::string split = "train";
  std::string backend = "mock";
  std::string endpoint;
  std::size_t batch_size = 0;  // 0: backend default
  std::optional<std::uint64_t> seed;
};

constexpr std::size_t kDefaultBatchSize = 32;

std::unique_ptr<TranslationBackend> make_backend(const std::string& kind,
                                                 const std::string& endpoint,
                                                 std::size_t batch_size) {
  if (kind == "mock") return mock_backend();
  if (kind == "http") {
    HttpBackendConfig config;
    if (auto env = HttpBackendConfig::from_env()) config = *env;
    if (!endpoint.empty()) config.endpoint = endpoint;
    if (config.endpoint.empty()) {
      throw ContractError("http backend needs --endpoint or " + std::string(kEndpointEnv));
    }
    if (batch_size) config.batch_size = batch_size;
    return std::make_unique<HttpBackend>(config);
  }
  throw ContractError("unknown backend '" + kind + "' (expected mock or http)");
}

int cmd_augment(const AugmentArgs& a, std::ostream& out) {
  const LangCode src(a.src_lang);
  const LangCode tgt(a.tgt_lang);
  const Split split = parse_split(a.split);
  if (split != Split::train) {
    throw ContractError("synthetic and dictionary data are added only to the train split, not " +
                        a.split);
  }
  const bool have_synthetic = !a.synthetic_src.empty() || !a.synthetic_tgt.empty();
  if (have_synthetic && !a.pivot.empty()) {
    throw ContractError("give either --synthetic-src/--synthetic-tgt or --pivot, not both");
  }
  if (!have_synthetic && a.pivot.empty() && a.dict.empty()) {
    throw ContractError("nothing to add: give synthetic files, --pivot or --dict");
  }
  for (const auto& o : {a.out_src, a.out_tgt}) {
    check_not_input(o, {a.src, a.tgt, a.synthetic_src, a.synthetic_tgt, a.pivot, a.dict});
  }

  const Corpus curated = load_corpus(a.src, a.tgt, src, tgt, split);
  Corpus merged = curated;
  if (have_synthetic) {
    if (a.synthetic_src.empty() || a.synthetic_tgt.empty()) {
      throw ContractError("--synthetic-src and --synthetic-tgt go together");
    }
    Corpus synthetic(src, tgt, Split::train);
    for (const auto& p : load_corpus(a.synthetic_src, a.synthetic_tgt, src, tgt, Split::train)) {
      synthetic.add(p.src_text(), p.tgt_text(), Provenance::synthetic);
    }
    merged = merge_augmented(curated, synthetic, a.seed);
  } else if (!a.pivot.empty()) {
    const auto pivot = read_lines(a.pivot);
    auto backend = make_backend(a.backend, a.endpoint, a.batch_size);
    std::size_t batch = a.batch_size ? a.batch_size : kDefaultBatchSize;
    if (const auto* http = dynamic_cast<const HttpBackend*>(backend.get())) batch = http->batch_size();
    merged = merge_augmented(curated, generate_synthetic(pivot, *backend, src, tgt, batch),
                             a.seed);
  }
  if (!a.dict.empty()) {
    const auto entries = load_dictionary(a.dict);
    merged = append_dictionary(merged, entries);
  }
  write_corpus(merged, a.out_src, a.out_tgt);

  const auto counts = provenance_counts(merged);
  out << "curated=" << counts[0] << " synthetic=" << counts[1];
  if (!a.dict.empty()) out << " dictionary=" << counts[2];
  out << " total=" << merged.size() << '\n';
  return kOk;
}

// -------------------------------------------------------------------- score

struct ScoreArgs {
  fs::path hyp, ref;
  std::string normalize_lang;
  bool json_out = false;
  bool sentence = false;
  ChrfConfig chrf;
};

int cmd_score(const ScoreArgs& a, std::ostream& out) {
  a.chrf.validate();
  auto hyps = read_lines(a.hyp);
  auto refs = read_lines(a.ref);
  if (hyps.size() != refs.size()) {
    throw DataError("line count mismatch: " + std::to_string(hyps.size()) + " hypotheses vs " +
                    std::to_string(refs.size()) + " references");
  }
  if (!a.normalize_lang.empty()) {
    const LangCode lang(a.normalize_lang);
    for (auto& h : hyps) h = normalize_for_language(h, lang);
    for (auto& r : refs) r = normalize_for_language(r, lang);
  }
  const ChrfStatistics stats = corpus_chrf_statistics(hyps, refs, a.chrf);
  const double score = chrf_score(stats, a.chrf);
  if (a.sentence) {
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      out << format4(sentence_chrf_pp(hyps[i], refs[i], a.chrf)) << '\n';
    }
  }
  out << format4(score) << '\n';
  if (a.json_out) {
    nlohmann::ordered_json doc = {
        {"score", score},
        {"segments", hyps.size()},
        {"normalize_lang", a.normalize_lang.empty() ? nlohmann::ordered_json(nullptr)
                                                    : nlohmann::ordered_json(a.normalize_lang)},
        {"char_order", a.chrf.char_order},
        {"word_order", a.chrf.word_order},
        {"beta", a.chrf.beta},
        {"orders", chrf_statistics_json(stats)}};
    out << doc.dump(2) << '\n';
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Parallel-corpus preprocessing, filtering, augmentation and chrF++ scoring",
               "andes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  NormalizeArgs norm;
  auto* normalize_cmd = app.add_subcommand("normalize", "Normalize text for a language");
  normalize_cmd->add_option("--lang", norm.lang, "Language of the text (target side)")
      ->required();
  normalize_cmd->add_option("--src-lang", norm.src_lang, "Source-side language")
      ->capture_default_str();
  normalize_cmd->add_option("--input", norm.input, "Single file to normalize")->check(CLI::ExistingFile);
  normalize_cmd->add_option("--output", norm.output, "Output for --input");
  normalize_cmd->add_option("--src", norm.src, "Source file")->check(CLI::ExistingFile);
  normalize_cmd->add_option("--tgt", norm.tgt, "Target file")->check(CLI::ExistingFile);
  normalize_cmd->add_option("--out-src", norm.out_src);
  normalize_cmd->add_option("--out-tgt", norm.out_tgt);
  normalize_cmd->add_option("--unicode-form", norm.unicode_form, "NFKC (default) or NFC");
  normalize_cmd->add_option("--trace", norm.trace, "Write rule applications as JSON Lines");

  FilterArgs filt;
  auto* filter_cmd = app.add_subcommand("filter", "Filter noisy sentence pairs");
  filter_cmd->add_option("--src", filt.src)->required()->check(CLI::ExistingFile);
  filter_cmd->add_option("--tgt", filt.tgt)->required()->check(CLI::ExistingFile);
  filter_cmd->add_option("--src-lang", filt.src_lang)->capture_default_str();
  filter_cmd->add_option("--tgt-lang", filt.tgt_lang)->required();
  filter_cmd->add_option("--split", filt.split)->capture_default_str();
  filter_cmd->add_option("--out-src", filt.out_src)->required();
  filter_cmd->add_option("--out-tgt", filt.out_tgt)->required();
  filter_cmd->add_option("--log", filt.log, "Decision log (JSON Lines)");
  filter_cmd->add_option("--config", filt.config, "JSON file with a \"filter\" section")
      ->check(CLI::ExistingFile);
  filter_cmd->add_option("--tau", filt.tau, "Length-ratio bound");
  filter_cmd->add_option("--max-len", filt.max_len, "Maximum tokens per side");
  filter_cmd->add_option("--numeric-min", filt.numeric_min, "Minimum digit-run Jaccard");
  filter_cmd->add_option("--rules", filt.rules, "Enabled rules")->delimiter(',');

  StatsArgs st;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics table and JSON report");
  stats_cmd->add_option("--raw-src", st.raw_src)->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--raw-tgt", st.raw_tgt)->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--filtered-src", st.filtered_src)->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--filtered-tgt", st.filtered_tgt)->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--decisions", st.decisions, "Decision log mapping filtered lines to raw ids")
      ->check(CLI::ExistingFile);
  stats_cmd->add_option("--src-lang", st.src_lang)->capture_default_str();
  stats_cmd->add_option("--tgt-lang", st.tgt_lang)->required();
  stats_cmd->add_option("--split", st.split)->capture_default_str();
  stats_cmd->add_option("--setting", st.setting, "Row label, e.g. curated")->capture_default_str();
  stats_cmd->add_option("--json", st.json_out, "Write the JSON report here");

  AugmentArgs aug;
  auto* augment_cmd = app.add_subcommand("augment", "Add synthetic and dictionary pairs");
  augment_cmd->add_option("--src", aug.src)->required()->check(CLI::ExistingFile);
  augment_cmd->add_option("--tgt", aug.tgt)->required()->check(CLI::ExistingFile);
  augment_cmd->add_option("--src-lang", aug.src_lang)->capture_default_str();
  augment_cmd->add_option("--tgt-lang", aug.tgt_lang)->required();
  augment_cmd->add_option("--split", aug.split)->capture_default_str();
  augment_cmd->add_option("--synthetic-src", aug.synthetic_src)->check(CLI::ExistingFile);
  augment_cmd->add_option("--synthetic-tgt", aug.synthetic_tgt)->check(CLI::ExistingFile);
  augment_cmd->add_option("--pivot", aug.pivot, "Pivot sentences to forward-translate")
      ->check(CLI::ExistingFile);
  augment_cmd->add_option("--backend", aug.backend, "mock or http")->capture_default_str();
  augment_cmd->add_option("--endpoint", aug.endpoint, "http backend URL");
  augment_cmd->add_option("--batch-size", aug.batch_size,
                          "Sentences per backend request (default 32, or ANDES_MT_BATCH_SIZE)");
  augment_cmd->add_option("--dict", aug.dict, "Dictionary TSV")->check(CLI::ExistingFile);
  augment_cmd->add_option("--seed", aug.seed, "Shuffle seed");
  augment_cmd->add_option("--out-src", aug.out_src)->required();
  augment_cmd->add_option("--out-tgt", aug.out_tgt)->required();

  ScoreArgs sc;
  auto* score_cmd = app.add_subcommand("score", "chrF++ of hypotheses against references");
  score_cmd->add_option("--hyp", sc.hyp)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--ref", sc.ref)->required()->check(CLI::ExistingFile);
  score_cmd->add_option("--normalize-lang", sc.normalize_lang,
                        "Normalize both sides for this language first");
  score_cmd->add_flag("--json", sc.json_out, "Also print per-order statistics as JSON");
  score_cmd->add_flag("--sentence", sc.sentence, "Also print one score per segment");
  score_cmd->add_option("--char-order", sc.chrf.char_order)->capture_default_str();
  score_cmd->add_option("--word-order", sc.chrf.word_order)->capture_default_str();
  score_cmd->add_option("--beta", sc.chrf.beta)->capture_default_str();

  fs::path pipeline_config;
  PipelineOverrides overrides;
  std::optional<std::string> override_dir;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run normalize, filter, augment and stats");
  pipeline_cmd->add_option("config", pipeline_config, "Pipeline JSON config")->required();
  pipeline_cmd->add_option("--output-dir", override_dir, "Overrides output_dir");
  pipeline_cmd->add_option("--seed", overrides.seed, "Overrides augment.seed");
  pipeline_cmd->add_option("--tau", overrides.tau, "Overrides filter.tau");

  std::vector<char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(const_cast<char*>(s.c_str()));
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  }

  try {
    if (normalize_cmd->parsed()) return cmd_normalize(norm, out);
    if (filter_cmd->parsed()) return cmd_filter(filt, out);
    if (stats_cmd->parsed()) return cmd_stats(st, out);
    if (augment_cmd->parsed()) return cmd_augment(aug, out);
    if (score_cmd->parsed()) return cmd_score(sc, out);
    if (pipeline_cmd->parsed()) {
      if (override_dir) overrides.output_dir = *override_dir;
      run_pipeline(pipeline_config, overrides, out);
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace andes::cli
