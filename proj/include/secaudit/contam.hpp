#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "secaudit/adapters.hpp"
#include "secaudit/corpus.hpp"
#include "secaudit/text.hpp"

namespace secaudit::contam {

// Normalized, lowercased view of one side of a comparison. Tokens are the
// whitespace-split words of text.
struct Doc {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
};

Doc prepare_doc(std::string id, std::string_view raw_text);
// Prompt side of every sample, in order; parallel. Samples whose prompt
// cannot be extracted become empty docs (they can never match).
std::vector<Doc> prepare_docs(std::span<const corpus::Sample> samples);

// ---- exact match -----------------------------------------------------------

struct EmMatch {
  std::uint32_t doc = 0;
  bool contained_only = false;  // matched as substring, not whole-prompt equal
};

// Matches when the item text equals the doc text or appears inside it as a
// whole-token contiguous substring. Results sorted by doc index.
std::vector<EmMatch> exact_match(const Doc& item, std::span<const Doc> corpus);

// ---- n-gram overlap ---------------------------------------------------------

struct NgramIndex {
  struct Posting {
    text::Hash128 fp;
    std::uint32_t doc = 0;
    std::uint32_t pos = 0;
  };

  int n = 8;
  std::vector<Posting> postings;           // sorted by (fp, doc, pos)
  std::vector<std::uint32_t> token_counts; // per doc
  std::vector<std::string> doc_ids;

  std::size_t size() const { return postings.size(); }
};

NgramIndex build_ngram_index(std::span<const Doc> corpus, int n = 8);

struct DocCoverage {
  std::uint32_t doc = 0;
  double coverage = 0.0;  // covered item-token positions / item token count
};

struct NgramOverlap {
  double coverage = 0.0;  // best per-doc coverage
  bool flagged = false;   // coverage > flag_fraction for some doc (strict)
  std::vector<DocCoverage> flagged_docs;  // ascending doc index
};

// Items with fewer than n tokens are never flagged. Coverage counts the
// union of item positions covered by n-grams shared with a single doc.
NgramOverlap ngram_overlap(std::span<const std::string> item_tokens, const NgramIndex& index,
                           double flag_fraction = 0.5);

// ---- embedding similarity ----------------------------------------------------

struct EmbeddingStore {
  int dim = 0;
  std::vector<std::string> ids;
  std::vector<double> data;   // row-major, ids.size() x dim
  std::vector<double> norms;  // precomputed L2 norms
  std::string provenance;     // adapter identity + version

  std::size_t size() const { return ids.size(); }
  std::span<const double> vec(std::size_t i) const {
    return {data.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
};

// Embeds every doc through the adapter (optionally via the disk cache).
// Rejects NaN/Inf components and zero-norm vectors, naming the doc id.
EmbeddingStore build_embedding_store(adapters::EmbedAdapter& embedder, std::span<const Doc> docs,
                                     const adapters::EmbeddingCache* cache = nullptr);

double cosine(std::span<const double> a, std::span<const double> b);

struct Candidate {
  std::uint32_t index = 0;
  double cosine = 0.0;
};

// All store entries with lo <= cosine <= hi, descending cosine (ties by
// ascending index). Entries above hi belong to the exact-match layer.
// Throws on a zero-norm query.
std::vector<Candidate> semantic_candidates(std::span<const double> query,
                                           const EmbeddingStore& store, double lo = 0.75,
                                           double hi = 0.95);

struct SemanticFindings {
  std::vector<Candidate> flagged;     // cosine >= threshold
  std::vector<Candidate> borderline;  // [lo, threshold): evidence only
};

SemanticFindings flag_semantic(std::span<const Candidate> candidates,
                               double es_threshold = 0.8);

// ---- LLM judge -----------------------------------------------------------------

enum class JudgeVerdict { true_overlap, false_positive, judge_error };

struct JudgeOutcome {
  JudgeVerdict verdict = JudgeVerdict::judge_error;
  std::string rationale;
};

std::string build_judge_prompt(std::string_view item_text, std::string_view sample_text);

// Deterministic prompt, temperature 0; unparseable output retried once and
// then recorded as judge_error.
JudgeOutcome llm_judge(std::string_view item_text, std::string_view sample_text,
                       adapters::ModelClient& judge);

// ---- pipeline -------------------------------------------------------------------

enum class Layer { em, ng, es, llm_es };

std::string_view layer_name(Layer layer);

struct LayerSelection {
  bool em = true;
  bool ng = true;
  bool es = true;
  bool llm = true;
};

struct PipelineConfig {
  int ngram_n = 8;
  double ng_flag_fraction = 0.5;
  double es_band_lo = 0.75;
  double es_flag_threshold = 0.8;
  double es_band_hi = 0.95;
  LayerSelection layers;
};

struct ContaminationFinding {
  std::string benchmark_id;
  std::string corpus_id;
  std::string item_id;
  std::string sample_id;
  Layer layer = Layer::em;
  double score = 0.0;  // EM 1.0, NG coverage, ES/LLM-ES cosine
  std::string evidence;

  friend bool operator==(const ContaminationFinding&, const ContaminationFinding&) = default;
};

struct LayerCell {
  bool enabled = false;
  std::uint32_t flagged_items = 0;
  double pct = 0.0;  // flagged_items / benchmark_size * 100
  std::optional<std::string> error;

  friend bool operator==(const LayerCell&, const LayerCell&) = default;
};

struct ReportRow {
  std::string benchmark_id;
  std::string corpus_id;
  std::uint32_t benchmark_size = 0;
  LayerCell em, ng, es, llm_es;
  std::uint32_t es_borderline_pairs = 0;  // [lo, threshold) evidence, not counted
  std::uint32_t judge_error_pairs = 0;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ReportConfigSnapshot {
  int ngram_n = 8;
  double ng_flag_fraction = 0.5;
  double es_band_lo = 0.75;
  double es_flag_threshold = 0.8;
  double es_band_hi = 0.95;
  std::vector<std::string> layers;  // enabled layer names, canonical order
  std::string embed_provenance;
  std::string judge_identity;

  friend bool operator==(const ReportConfigSnapshot&, const ReportConfigSnapshot&) = default;
};

struct ContaminationReport {
  int schema_version = 1;
  ReportConfigSnapshot config;
  std::vector<ReportRow> rows;  // sorted by (benchmark_id, corpus_id)

  friend bool operator==(const ContaminationReport&, const ContaminationReport&) = default;
};

struct CorpusInput {
  std::string corpus_id;
  std::span<const corpus::Sample> samples;
};

struct PipelineAdapters {
  adapters::EmbedAdapter* embedder = nullptr;     // required for ES / LLM-ES
  adapters::ModelClient* judge = nullptr;         // required for LLM-ES
  const adapters::EmbeddingCache* cache = nullptr;
};

struct PipelineResult {
  ContaminationReport report;
  std::vector<ContaminationFinding> findings;  // canonical order
};

// Layers are computed independently per (benchmark x corpus); a hard layer
// failure turns into an error marker on that cell, not a run failure.
// Output is byte-stable across runs and worker counts.
PipelineResult run_pipeline(std::span<const corpus::Benchmark> benchmarks,
                            std::span<const CorpusInput> corpora, const PipelineConfig& config,
                            const PipelineAdapters& adapters);

}  // namespace secaudit::contam
