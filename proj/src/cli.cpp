#include "secaudit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "secaudit/adapters.hpp"
#include "secaudit/config.hpp"
#include "secaudit/contam.hpp"
#include "secaudit/corpus.hpp"
#include "secaudit/cvss.hpp"
#include "secaudit/evalrun.hpp"
#include "secaudit/report.hpp"
#include "secaudit/secprofile.hpp"
#include "secaudit/taxonomy.hpp"
#include "secaudit/text.hpp"

namespace secaudit::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::optional<fs::path> config_file;
  int jobs = 0;
  bool dry_run = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> cache_dir;
};

std::string hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input: " + path.string());
  text::Hasher128 hasher;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    hasher.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  }
  return text::to_hex(hasher.digest());
}

ordered_json make_manifest(const std::string& command, const config::Config& cfg,
                           const std::vector<fs::path>& inputs) {
  ordered_json manifest;
  manifest["tool"] = "secaudit";
  manifest["version"] = std::string(kVersion);
  manifest["command"] = command;
  manifest["config"] = ordered_json::parse(config::config_snapshot_json(cfg));
  ordered_json in = ordered_json::object();
  for (const auto& p : inputs) in[p.string()] = hash_file(p);
  manifest["inputs"] = std::move(in);
  return manifest;
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output: " + path.string());
  out << content;
}

corpus::CorpusFormat parse_format_flag(const std::string& name) {
  auto f = corpus::parse_corpus_format(name);
  if (!f) throw ConfigError("unknown corpus format: " + name);
  return *f;
}

config::Config effective_config(const GlobalOptions& global) {
  config::Config cfg = config::load_config(global.config_file);
  if (global.seed) cfg.seed = *global.seed;
  if (global.cache_dir) cfg.cache_dir = *global.cache_dir;
  config::validate(cfg);
  return cfg;
}

void apply_jobs(const GlobalOptions& global) {
  if (global.jobs > 0) omp_set_num_threads(global.jobs);
}

int finish_dry_run(const ordered_json& manifest) {
  std::cout << manifest.dump(2) << "\n";
  return 0;
}

// ---- profile ----------------------------------------------------------------

struct ProfileArgs {
  std::string corpus_path;
  std::string format = "messages";
  std::string bank_path;
  std::string excluded_path;
  int threshold = 0;  // 0 = from config
  bool no_lang_filter = false;
  bool no_identifier_threshold = false;
  bool classify = false;
  bool classify_all = false;
  std::string out_dir = ".";
};

int run_profile(const GlobalOptions& global, const ProfileArgs& args) {
  config::Config cfg = effective_config(global);
  if (args.threshold > 0) cfg.thresholds.keyword_threshold = args.threshold;
  apply_jobs(global);

  auto manifest = make_manifest("profile", cfg,
                                {args.corpus_path, args.bank_path, args.excluded_path});
  if (global.dry_run) return finish_dry_run(manifest);

  auto bank = secprofile::load_keyword_bank(args.bank_path, args.excluded_path);
  auto loaded = corpus::load_corpus(args.corpus_path, parse_format_flag(args.format));

  // Prompt extraction and the language filter decide which samples reach
  // the keyword stage; the raw prompt goes to the language adapter.
  std::vector<corpus::Sample> retained;
  std::vector<std::string> prompts;
  std::size_t prompt_errors = 0;
  for (auto& s : loaded.samples) {
    try {
      prompts.push_back(corpus::extract_prompt_text(s));
      retained.push_back(std::move(s));
    } catch (const std::exception&) {
      ++prompt_errors;
    }
  }

  std::size_t excluded_by_language = 0;
  if (!args.no_lang_filter) {
    auto langid = adapters::make_langid(cfg.adapters.langid);
    std::vector<corpus::Sample> kept;
    std::vector<std::string> kept_prompts;
    const std::size_t batch = 64;
    for (std::size_t start = 0; start < prompts.size(); start += batch) {
      std::size_t count = std::min(batch, prompts.size() - start);
      auto labels = langid->detect(std::span<const std::string>(prompts).subspan(start, count));
      for (std::size_t k = 0; k < count; ++k) {
        auto& sample = retained[start + k];
        sample.language = labels[k].tag;
        sample.detector_confidence = labels[k].confidence;
        if (labels[k].tag == "en") {
          kept.push_back(std::move(sample));
          kept_prompts.push_back(std::move(prompts[start + k]));
        } else {
          ++excluded_by_language;
        }
      }
    }
    retained = std::move(kept);
    prompts = std::move(kept_prompts);
  }

  secprofile::ClassifyOptions options;
  options.threshold = cfg.thresholds.keyword_threshold;
  options.count_identifiers = !args.no_identifier_threshold;
  secprofile::IdentifierPatternSet patterns;
  auto hits = secprofile::classify_all(retained, bank, patterns, options);

  auto profile = retained.empty() ? secprofile::DatasetProfile{}
                                  : secprofile::dataset_stats(hits, retained.size());
  profile.source = loaded.source;

  // Optional stage 2 over flagged (or all retained) prompts.
  std::vector<adapters::CategoryLabel> labels;
  std::optional<taxonomy::CategoryDistribution> distribution;
  if (args.classify || args.classify_all) {
    auto classifier = adapters::make_classifier(cfg.adapters.classifier);
    std::vector<std::string> ids;
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < retained.size(); ++i) {
      if (args.classify_all || hits[i].flagged) {
        ids.push_back(retained[i].id);
        texts.push_back(prompts[i]);
      }
    }
    labels = taxonomy::classify_category(*classifier, ids, texts);
    distribution = taxonomy::aggregate_distribution(labels);
  }

  ordered_json out;
  out["schema_version"] = 1;
  out["source"] = profile.source;
  out["total_loaded"] = loaded.samples.size();
  out["load_errors"] = loaded.errors.size();
  out["prompt_errors"] = prompt_errors;
  out["excluded_by_language"] = excluded_by_language;
  out["dataset_size"] = retained.size();
  out["threshold"] = options.threshold;
  out["count_identifiers"] = options.count_identifiers;
  out["bank_version"] = bank.version;
  out["bank_size"] = bank.keywords.size();
  out["excluded_phrases"] = bank.excluded.size();
  out["hits"] = profile.hits;
  out["pct_dataset"] = profile.pct_dataset;
  out["avg_matches"] = profile.avg_matches;
  out["avg_density"] = profile.avg_density;
  out["empty_flagged_warning"] = profile.empty_flagged_warning;
  if (distribution) {
    ordered_json dist;
    dist["total"] = distribution->total;
    ordered_json counts = ordered_json::array();
    ordered_json fractions = ordered_json::array();
    for (std::size_t i = 0; i < distribution->counts.size(); ++i) {
      counts.push_back(distribution->counts[i]);
      fractions.push_back(distribution->fractions[i]);
    }
    dist["counts"] = std::move(counts);
    dist["fractions"] = std::move(fractions);
    out["category_distribution"] = std::move(dist);
  }

  std::string hits_jsonl;
  std::unordered_map<std::string, int> label_by_id;
  for (const auto& l : labels) label_by_id[l.sample_id] = l.category_id;
  for (const auto& h : hits) {
    if (!h.flagged) continue;
    ordered_json line;
    line["sample_id"] = h.sample_id;
    line["counted_matches"] = h.counted_matches;
    line["total_matches"] = h.total_matches;
    line["density"] = h.density;
    line["flagged"] = h.flagged;
    ordered_json matched = ordered_json::array();
    for (const auto& m : h.matched) {
      matched.push_back({{"phrase", m.phrase}, {"count", m.count}});
    }
    line["matched"] = std::move(matched);
    if (auto it = label_by_id.find(h.sample_id); it != label_by_id.end()) {
      line["category_id"] = it->second;
    }
    hits_jsonl += line.dump();
    hits_jsonl += '\n';
  }

  fs::path out_dir = args.out_dir;
  write_file(out_dir / "profile.json", out.dump(2) + "\n");
  write_file(out_dir / "hits.jsonl", hits_jsonl);
  write_file(out_dir / "run.manifest.json", manifest.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---- contam -------------------------------------------------------------------

struct ContamArgs {
  std::vector<std::string> benchmark_paths;
  std::vector<std::string> corpus_paths;
  std::string format = "messages";
  std::string layers = "em,ng,es,llm";
  std::string out = "report.json";
  std::string findings_out;
  std::string markdown_out;
};

contam::LayerSelection parse_layers(const std::string& spec) {
  contam::LayerSelection sel{false, false, false, false};
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    std::string name = spec.substr(pos, comma == std::string::npos ? spec.size() - pos
                                                                   : comma - pos);
    if (name == "em") sel.em = true;
    else if (name == "ng") sel.ng = true;
    else if (name == "es") sel.es = true;
    else if (name == "llm" || name == "llm_es") sel.llm = true;
    else if (!name.empty()) throw ConfigError("unknown layer: " + name);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (!sel.em && !sel.ng && !sel.es && !sel.llm) throw ConfigError("no layers selected");
  return sel;
}

std::vector<fs::path> expand_benchmarks(const std::vector<std::string>& paths) {
  std::vector<fs::path> files;
  for (const auto& p : paths) {
    fs::path path(p);
    if (fs::is_directory(path)) {
      std::vector<fs::path> dir_files;
      for (const auto& e : fs::directory_iterator(path)) {
        if (e.path().extension() == ".jsonl") dir_files.push_back(e.path());
      }
      std::sort(dir_files.begin(), dir_files.end());
      files.insert(files.end(), dir_files.begin(), dir_files.end());
    } else {
      files.push_back(path);
    }
  }
  if (files.empty()) throw ConfigError("no benchmark files found");
  return files;
}

int run_contam(const GlobalOptions& global, const ContamArgs& args) {
  config::Config cfg = effective_config(global);
  apply_jobs(global);

  auto benchmark_files = expand_benchmarks(args.benchmark_paths);
  std::vector<fs::path> inputs = benchmark_files;
  for (const auto& c : args.corpus_paths) inputs.emplace_back(c);
  auto manifest = make_manifest("contam", cfg, inputs);
  if (global.dry_run) return finish_dry_run(manifest);

  std::vector<corpus::Benchmark> benchmarks;
  for (const auto& f : benchmark_files) benchmarks.push_back(corpus::load_benchmark(f));

  std::vector<corpus::Corpus> corpora;
  for (const auto& c : args.corpus_paths) {
    corpora.push_back(corpus::load_corpus(c, parse_format_flag(args.format)));
  }

  contam::PipelineConfig pipeline_config;
  pipeline_config.ngram_n = cfg.thresholds.ngram_n;
  pipeline_config.ng_flag_fraction = cfg.thresholds.ng_flag_fraction;
  pipeline_config.es_band_lo = cfg.thresholds.es_band_lo;
  pipeline_config.es_flag_threshold = cfg.thresholds.es_flag_threshold;
  pipeline_config.es_band_hi = cfg.thresholds.es_band_hi;
  pipeline_config.layers = parse_layers(args.layers);

  std::unique_ptr<adapters::EmbedAdapter> embedder;
  std::unique_ptr<adapters::ModelClient> judge;
  std::optional<adapters::EmbeddingCache> cache;
  contam::PipelineAdapters pipeline_adapters;
  if (pipeline_config.layers.es || pipeline_config.layers.llm) {
    embedder = adapters::make_embedder(cfg.adapters.embed);
    cache.emplace(cfg.cache_dir, embedder->id());
    pipeline_adapters.embedder = embedder.get();
    pipeline_adapters.cache = &*cache;
  }
  if (pipeline_config.layers.llm) {
    judge = adapters::make_model(cfg.adapters.judge);
    pipeline_adapters.judge = judge.get();
  }

  std::vector<contam::CorpusInput> corpus_inputs;
  corpus_inputs.reserve(corpora.size());
  for (const auto& c : corpora) {
    corpus_inputs.push_back({c.source, c.samples});
  }

  auto result = contam::run_pipeline(benchmarks, corpus_inputs, pipeline_config,
                                     pipeline_adapters);

  fs::path out_path = args.out;
  write_file(out_path, report::render(result.report, report::Format::json));
  fs::path findings_path = args.findings_out.empty()
                               ? out_path.parent_path() / "findings.jsonl"
                               : fs::path(args.findings_out);
  write_file(findings_path, report::render_findings_jsonl(result.findings));
  if (!args.markdown_out.empty()) {
    write_file(args.markdown_out, report::render(result.report, report::Format::markdown));
  }
  write_file(out_path.parent_path() / "run.manifest.json", manifest.dump(2) + "\n");
  return 0;
}

// ---- eval ---------------------------------------------------------------------

struct EvalArgs {
  std::string benchmark_path;
  std::string kind;
  int trials = 0;          // 0 = from config
  double temperature = -1; // <0 = from config
  int max_tokens = 0;      // 0 = from config
  int shots = 0;
  std::string shots_file;
  std::string system_prompt;
  std::string out_dir = ".";
};

std::string resolve_system_prompt(const std::string& value) {
  if (fs::exists(value)) {
    std::ifstream in(value);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  fs::path data_dir = "data/system_prompts";
  if (const char* env = std::getenv("SECAUDIT_DATA_DIR")) {
    data_dir = fs::path(env) / "system_prompts";
  }
  fs::path named = data_dir / (value + ".txt");
  if (fs::exists(named)) {
    std::ifstream in(named);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  throw ConfigError("system prompt not found: " + value);
}

int run_eval(const GlobalOptions& global, const EvalArgs& args) {
  config::Config cfg = effective_config(global);
  apply_jobs(global);

  auto kind = evalrun::parse_task_kind(args.kind);
  if (!kind) throw ConfigError("unknown eval kind: " + args.kind);

  std::vector<fs::path> inputs{args.benchmark_path};
  if (!args.shots_file.empty()) inputs.emplace_back(args.shots_file);
  auto manifest = make_manifest("eval", cfg, inputs);
  if (global.dry_run) return finish_dry_run(manifest);

  auto benchmark = corpus::load_benchmark(args.benchmark_path);
  if (benchmark.items.empty()) throw std::runtime_error("benchmark has no valid items");

  std::vector<corpus::BenchmarkItem> shots;
  if (args.shots > 0) {
    if (args.shots_file.empty()) throw ConfigError("--shots requires --shots-file");
    auto shot_bench = corpus::load_benchmark(args.shots_file);
    shots = std::move(shot_bench.items);
  }

  evalrun::PromptSpec spec;
  spec.kind = *kind;
  spec.n_shot = args.shots;
  if (!args.system_prompt.empty()) spec.system_prompt = resolve_system_prompt(args.system_prompt);
  spec.decoding.temperature = args.temperature >= 0 ? args.temperature : cfg.trials.temperature;
  spec.decoding.max_tokens =
      args.max_tokens > 0
          ? args.max_tokens
          : (*kind == evalrun::TaskKind::vsp ? cfg.trials.vsp_max_tokens : cfg.trials.max_tokens);
  spec.decoding.seed = cfg.seed;

  int trials = args.trials > 0 ? args.trials : cfg.trials.trials;
  auto client = adapters::make_model(cfg.adapters.model);
  auto trial_results = evalrun::run_trials(*client, benchmark, spec, trials, shots);
  auto scorer = *kind == evalrun::TaskKind::vsp ? evalrun::Scorer::vsp : evalrun::Scorer::accuracy;
  auto agg = evalrun::aggregate(trial_results, scorer, benchmark);

  ordered_json out;
  out["schema_version"] = 1;
  out["benchmark_id"] = benchmark.id;
  out["kind"] = std::string(evalrun::task_kind_name(*kind));
  out["n_trials"] = agg.n_trials;
  out["temperature"] = spec.decoding.temperature;
  out["max_tokens"] = spec.decoding.max_tokens;
  out["n_shot"] = spec.n_shot;
  out["mean"] = agg.mean;
  out["stddev"] = agg.stddev;
  out["per_trial"] = agg.per_trial;
  out["extraction_error_rate"] = agg.extraction_error_rate;

  std::string trials_jsonl;
  for (const auto& trial : trial_results) {
    for (std::size_t i = 0; i < trial.items.size(); ++i) {
      const auto& item = trial.items[i];
      ordered_json line;
      line["trial"] = trial.trial;
      line["item_id"] = benchmark.items[i].item_id;
      line["raw_output"] = item.raw_output;
      if (item.extracted) line["extracted"] = *item.extracted;
      if (item.error) line["error"] = *item.error;
      line["correct"] = item.correct;
      trials_jsonl += line.dump();
      trials_jsonl += '\n';
    }
  }

  fs::path out_dir = args.out_dir;
  write_file(out_dir / "eval.json", out.dump(2) + "\n");
  write_file(out_dir / "trials.jsonl", trials_jsonl);
  write_file(out_dir / "run.manifest.json", manifest.dump(2) + "\n");
  std::cout << out.dump(2) << "\n";
  return 0;
}

// ---- cvss score ----------------------------------------------------------------

struct CvssScoreArgs {
  std::string pred_path;
  std::string gold_path;
  std::string out;  // empty = stdout only
};

int run_cvss_score(const GlobalOptions& global, const CvssScoreArgs& args) {
  config::Config cfg = effective_config(global);
  auto manifest = make_manifest("cvss score", cfg, {args.pred_path, args.gold_path});
  if (global.dry_run) return finish_dry_run(manifest);

  auto read_lines = [](const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    std::vector<ordered_json> lines;
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      lines.push_back(ordered_json::parse(line));
    }
    return lines;
  };

  auto preds_json = read_lines(args.pred_path);
  auto golds_json = read_lines(args.gold_path);
  if (preds_json.size() != golds_json.size()) {
    throw std::runtime_error("pred/gold line counts differ");
  }

  std::vector<std::optional<cvss::CvssVector>> preds;
  std::vector<cvss::CvssVector> golds;
  for (std::size_t i = 0; i < preds_json.size(); ++i) {
    std::string pred_text = preds_json[i].contains("output")
                                ? preds_json[i].at("output").get<std::string>()
                                : preds_json[i].value("vector", std::string{});
    preds.push_back(cvss::parse_cvss_vector(pred_text));
    std::string gold_text = golds_json[i].contains("vector")
                                ? golds_json[i].at("vector").get<std::string>()
                                : golds_json[i].value("answer_key", std::string{});
    auto gold = cvss::parse_cvss_vector(gold_text);
    if (!gold) {
      throw std::runtime_error("gold line " + std::to_string(i + 1) +
                               " is not a valid CVSS v3.1 vector");
    }
    golds.push_back(*gold);
  }

  auto result = cvss::vsp_score(preds, golds);
  ordered_json out;
  out["schema_version"] = 1;
  out["n"] = result.items.size();
  out["mad"] = result.mad;
  out["cvss_score"] = result.cvss_score;
  ordered_json items = ordered_json::array();
  for (const auto& item : result.items) {
    items.push_back({{"deviation", item.deviation}, {"malformed", item.malformed}});
  }
  out["items"] = std::move(items);

  std::string text = out.dump(2) + "\n";
  if (!args.out.empty()) write_file(args.out, text);
  std::cout << text;
  return 0;
}

// ---- report --------------------------------------------------------------------

struct ReportArgs {
  std::string in;
  std::string format = "markdown";
  std::string out;  // empty = stdout
};

int run_report(const ReportArgs& args) {
  std::ifstream in(args.in);
  if (!in) throw std::runtime_error("cannot open report: " + args.in);
  std::string content(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>{});
  auto parsed = report::parse_report(content);
  auto format = report::parse_format(args.format);
  if (!format) throw ConfigError("unknown format: " + args.format);
  std::string rendered = report::render(parsed, *format);
  if (!args.out.empty()) {
    write_file(args.out, rendered);
  } else {
    std::cout << rendered;
  }
  return 0;
}

void print_error(std::string_view type, std::string_view message) {
  ordered_json err;
  err["error"] = {{"type", std::string(type)}, {"message", std::string(message)}};
  std::cerr << err.dump() << "\n";
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"secaudit: training-data auditing and evaluation toolkit"};
  app.require_subcommand(1);

  GlobalOptions global;
  std::string config_path;
  std::uint64_t seed_flag = 0;
  std::string cache_dir_flag;
  app.add_option("--config", config_path, "Config file (JSON)");
  app.add_option("--jobs", global.jobs, "Worker threads (0 = library default)");
  app.add_flag("--dry-run", global.dry_run, "Validate config and inputs, write nothing");
  auto* seed_opt = app.add_option("--seed", seed_flag, "Base seed recorded in the manifest");
  auto* cache_opt = app.add_option("--cache-dir", cache_dir_flag, "Embedding cache directory");

  ProfileArgs profile_args;
  auto* profile = app.add_subcommand("profile", "Stage-1 keyword profile of a corpus");
  profile->add_option("--corpus", profile_args.corpus_path, "Corpus JSONL")->required();
  profile->add_option("--format", profile_args.format, "messages | prompt-only");
  profile->add_option("--bank", profile_args.bank_path, "Keyword bank file")->required();
  profile->add_option("--excluded", profile_args.excluded_path, "Excluded phrases file")
      ->required();
  profile->add_option("--threshold", profile_args.threshold, "Keyword threshold (default 1)");
  profile->add_flag("--no-lang-filter", profile_args.no_lang_filter,
                    "Skip the language filter");
  profile->add_flag("--no-identifier-threshold", profile_args.no_identifier_threshold,
                    "Identifier matches do not count toward the threshold");
  profile->add_flag("--classify", profile_args.classify,
                    "Stage-2 taxonomy classification of flagged prompts");
  profile->add_flag("--classify-all", profile_args.classify_all,
                    "Stage-2 classification of every retained prompt");
  profile->add_option("--out", profile_args.out_dir, "Output directory");

  ContamArgs contam_args;
  auto* contam_cmd = app.add_subcommand("contam", "Layered contamination detection");
  contam_cmd->add_option("--benchmarks", contam_args.benchmark_paths,
                         "Benchmark JSONL files or directories")
      ->required();
  contam_cmd->add_option("--corpus", contam_args.corpus_paths, "Corpus JSONL files")->required();
  contam_cmd->add_option("--format", contam_args.format, "messages | prompt-only");
  contam_cmd->add_option("--layers", contam_args.layers, "Comma list: em,ng,es,llm");
  contam_cmd->add_option("--out", contam_args.out, "Report JSON path");
  contam_cmd->add_option("--findings", contam_args.findings_out, "Findings JSONL path");
  contam_cmd->add_option("--markdown", contam_args.markdown_out, "Also render a Markdown table");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Run a benchmark against a model endpoint");
  eval_cmd->add_option("--benchmark", eval_args.benchmark_path, "Benchmark JSONL")->required();
  eval_cmd->add_option("--kind", eval_args.kind, "mcqa | rcm | vsp")->required();
  eval_cmd->add_option("--trials", eval_args.trials, "Trial count (default 10)");
  eval_cmd->add_option("--temperature", eval_args.temperature, "Decoding temperature");
  eval_cmd->add_option("--max-tokens", eval_args.max_tokens, "Generation budget");
  eval_cmd->add_option("--shots", eval_args.shots, "Few-shot example count");
  eval_cmd->add_option("--shots-file", eval_args.shots_file, "Solved examples JSONL");
  eval_cmd->add_option("--system-prompt", eval_args.system_prompt,
                       "System prompt asset name or file");
  eval_cmd->add_option("--out", eval_args.out_dir, "Output directory");

  CvssScoreArgs cvss_args;
  auto* cvss_cmd = app.add_subcommand("cvss", "CVSS utilities");
  cvss_cmd->require_subcommand(1);
  auto* score_cmd = cvss_cmd->add_subcommand("score", "Score predictions against gold vectors");
  score_cmd->add_option("--pred", cvss_args.pred_path, "Predictions JSONL")->required();
  score_cmd->add_option("--gold", cvss_args.gold_path, "Gold vectors JSONL")->required();
  score_cmd->add_option("--out", cvss_args.out, "Write the result JSON here too");

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Re-render a contamination report");
  report_cmd->add_option("--in", report_args.in, "Report JSON")->required();
  report_cmd->add_option("--format", report_args.format, "json | csv | markdown");
  report_cmd->add_option("--out", report_args.out, "Output file (default stdout)");

  std::vector<const char*> argv;
  argv.push_back("secaudit");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (!config_path.empty()) global.config_file = config_path;
  if (seed_opt->count() > 0) global.seed = seed_flag;
  if (cache_opt->count() > 0) global.cache_dir = cache_dir_flag;

  try {
    if (profile->parsed()) return run_profile(global, profile_args);
    if (contam_cmd->parsed()) return run_contam(global, contam_args);
    if (eval_cmd->parsed()) return run_eval(global, eval_args);
    if (cvss_cmd->parsed() && score_cmd->parsed()) return run_cvss_score(global, cvss_args);
    if (report_cmd->parsed()) return run_report(report_args);
    print_error("usage", "no subcommand selected");
    return 2;
  } catch (const ConfigError& e) {
    print_error("config", e.what());
    return 3;
  } catch (const adapters::AdapterError& e) {
    print_error("adapter", e.what());
    return 3;
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return 1;
  }
}

}  // namespace secaudit::cli
