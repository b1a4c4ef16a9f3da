#include "secaudit/contam.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include <omp.h>

namespace secaudit::contam {

Doc prepare_doc(std::string id, std::string_view raw_text) {
  Doc d;
  d.id = std::move(id);
  d.text = text::lowercase(text::normalize(raw_text));
  d.tokens = text::tokenize(d.text);
  return d;
}

std::vector<Doc> prepare_docs(std::span<const corpus::Sample> samples) {
  std::vector<Doc> docs(samples.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(samples.size()); ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    std::string prompt;
    try {
      prompt = corpus::extract_prompt_text(s);
    } catch (const std::exception&) {
      prompt.clear();  // assistant-only: nothing to match against
    }
    docs[static_cast<std::size_t>(i)] = prepare_doc(s.id, prompt);
  }
  return docs;
}

// ---- exact match -----------------------------------------------------------

namespace {

bool token_aligned_contains(const std::string& haystack, const std::string& needle) {
  if (needle.empty()) return false;
  std::size_t pos = 0;
  while ((pos = haystack.find(needle, pos)) != std::string::npos) {
    bool left_ok = pos == 0 || haystack[pos - 1] == ' ';
    std::size_t end = pos + needle.size();
    bool right_ok = end == haystack.size() || haystack[end] == ' ';
    if (left_ok && right_ok) return true;
    ++pos;
  }
  return false;
}

}  // namespace

std::vector<EmMatch> exact_match(const Doc& item, std::span<const Doc> corpus) {
  std::vector<EmMatch> out;
  if (item.text.empty()) return out;
  for (std::uint32_t d = 0; d < corpus.size(); ++d) {
    const auto& doc = corpus[d];
    if (doc.text == item.text) {
      out.push_back({d, false});
    } else if (doc.text.size() > item.text.size() &&
               token_aligned_contains(doc.text, item.text)) {
      out.push_back({d, true});
    }
  }
  return out;
}

// ---- n-gram overlap ----------------------------------------------------------

namespace {

text::Hash128 combine(text::Hash128 acc, const text::Hash128& h) {
  auto mix = [](std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
  };
  acc.hi = mix(acc.hi ^ (h.hi + 0x9e3779b97f4a7c15ULL));
  acc.lo = mix(acc.lo + (h.lo ^ 0xc2b2ae3d27d4eb4fULL));
  return acc;
}

std::vector<text::Hash128> token_hashes(std::span<const std::string> tokens) {
  std::vector<text::Hash128> out(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) out[i] = text::hash128(tokens[i]);
  return out;
}

std::vector<text::Hash128> window_fingerprints(std::span<const text::Hash128> hashes, int n) {
  std::vector<text::Hash128> out;
  if (hashes.size() < static_cast<std::size_t>(n)) return out;
  out.reserve(hashes.size() - static_cast<std::size_t>(n) + 1);
  for (std::size_t k = 0; k + static_cast<std::size_t>(n) <= hashes.size(); ++k) {
    text::Hash128 acc{0x8c2f7d4b1e5a3960ULL, static_cast<std::uint64_t>(n)};
    for (int j = 0; j < n; ++j) acc = combine(acc, hashes[k + static_cast<std::size_t>(j)]);
    out.push_back(acc);
  }
  return out;
}

}  // namespace

NgramIndex build_ngram_index(std::span<const Doc> corpus, int n) {
  if (n < 2) throw std::invalid_argument("ngram n must be >= 2");
  NgramIndex index;
  index.n = n;
  index.token_counts.resize(corpus.size());
  index.doc_ids.resize(corpus.size());

  std::vector<std::size_t> offsets(corpus.size() + 1, 0);
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    index.token_counts[d] = static_cast<std::uint32_t>(corpus[d].tokens.size());
    index.doc_ids[d] = corpus[d].id;
    std::size_t windows =
        corpus[d].tokens.size() >= static_cast<std::size_t>(n)
            ? corpus[d].tokens.size() - static_cast<std::size_t>(n) + 1
            : 0;
    offsets[d + 1] = offsets[d] + windows;
  }
  index.postings.resize(offsets.back());

#pragma omp parallel for schedule(dynamic, 32)
  for (std::int64_t d = 0; d < static_cast<std::int64_t>(corpus.size()); ++d) {
    const auto& doc = corpus[static_cast<std::size_t>(d)];
    auto hashes = token_hashes(doc.tokens);
    auto fps = window_fingerprints(hashes, n);
    std::size_t base = offsets[static_cast<std::size_t>(d)];
    for (std::size_t k = 0; k < fps.size(); ++k) {
      index.postings[base + k] = {fps[k], static_cast<std::uint32_t>(d),
                                  static_cast<std::uint32_t>(k)};
    }
  }

  std::sort(index.postings.begin(), index.postings.end(),
            [](const NgramIndex::Posting& a, const NgramIndex::Posting& b) {
              if (a.fp != b.fp) return a.fp < b.fp;
              if (a.doc != b.doc) return a.doc < b.doc;
              return a.pos < b.pos;
            });
  return index;
}

NgramOverlap ngram_overlap(std::span<const std::string> item_tokens, const NgramIndex& index,
                           double flag_fraction) {
  NgramOverlap result;
  const int n = index.n;
  const std::size_t T = item_tokens.size();
  if (T < static_cast<std::size_t>(n)) return result;

  auto hashes = token_hashes(item_tokens);
  auto fps = window_fingerprints(hashes, n);

  // doc -> covered item positions; std::map keeps doc order deterministic.
  std::map<std::uint32_t, std::vector<bool>> covered;
  for (std::size_t k = 0; k < fps.size(); ++k) {
    const text::Hash128& fp = fps[k];
    auto lo = std::lower_bound(index.postings.begin(), index.postings.end(), fp,
                               [](const NgramIndex::Posting& p, const text::Hash128& key) {
                                 return p.fp < key;
                               });
    for (auto it = lo; it != index.postings.end() && it->fp == fp; ++it) {
      auto& bits = covered[it->doc];
      if (bits.empty()) bits.assign(T, false);
      for (int j = 0; j < n; ++j) bits[k + static_cast<std::size_t>(j)] = true;
    }
  }

  for (const auto& [doc, bits] : covered) {
    std::size_t c = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
    double cov = static_cast<double>(c) / static_cast<double>(T);
    result.coverage = std::max(result.coverage, cov);
    if (cov > flag_fraction) {
      result.flagged = true;
      result.flagged_docs.push_back({doc, cov});
    }
  }
  return result;
}

// ---- embedding similarity -------------------------------------------------------

EmbeddingStore build_embedding_store(adapters::EmbedAdapter& embedder, std::span<const Doc> docs,
                                     const adapters::EmbeddingCache* cache) {
  std::vector<std::string> texts;
  texts.reserve(docs.size());
  for (const auto& d : docs) texts.push_back(d.text);

  auto vectors = adapters::embed_cached(embedder, texts, cache);

  EmbeddingStore store;
  store.provenance = embedder.id();
  store.ids.reserve(docs.size());
  for (const auto& d : docs) store.ids.push_back(d.id);

  if (vectors.empty()) return store;
  store.dim = static_cast<int>(vectors.front().size());
  store.data.reserve(vectors.size() * vectors.front().size());
  store.norms.resize(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const auto& v = vectors[i];
    if (static_cast<int>(v.size()) != store.dim) {
      throw adapters::AdapterError("embedding dim mismatch for sample " + docs[i].id);
    }
    double sumsq = 0.0;
    for (double x : v) {
      if (!std::isfinite(x)) {
        throw adapters::AdapterError("non-finite embedding component for sample " + docs[i].id);
      }
      sumsq += x * x;
    }
    if (sumsq == 0.0) {
      throw adapters::AdapterError("zero-norm embedding for sample " + docs[i].id);
    }
    store.norms[i] = std::sqrt(sumsq);
    store.data.insert(store.data.end(), v.begin(), v.end());
  }
  return store;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine: zero-norm vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<Candidate> semantic_candidates(std::span<const double> query,
                                           const EmbeddingStore& store, double lo, double hi) {
  if (store.size() == 0) return {};
  if (static_cast<int>(query.size()) != store.dim) {
    throw std::invalid_argument("semantic_candidates: query dim mismatch");
  }
  double qn = 0.0;
  for (double x : query) qn += x * x;
  if (qn == 0.0) throw std::invalid_argument("semantic_candidates: query vector has zero norm");

  std::vector<double> cos(store.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(store.size()); ++i) {
    cos[static_cast<std::size_t>(i)] = cosine(query, store.vec(static_cast<std::size_t>(i)));
  }

  std::vector<Candidate> out;
  for (std::size_t i = 0; i < store.size(); ++i) {
    if (cos[i] >= lo && cos[i] <= hi) out.push_back({static_cast<std::uint32_t>(i), cos[i]});
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.cosine != b.cosine) return a.cosine > b.cosine;
    return a.index < b.index;
  });
  return out;
}

SemanticFindings flag_semantic(std::span<const Candidate> candidates, double es_threshold) {
  SemanticFindings out;
  for (const auto& c : candidates) {
    if (c.cosine >= es_threshold) {
      out.flagged.push_back(c);
    } else {
      out.borderline.push_back(c);
    }
  }
  return out;
}

// ---- LLM judge -----------------------------------------------------------------

std::string build_judge_prompt(std::string_view item_text, std::string_view sample_text) {
  std::string prompt;
  prompt.reserve(item_text.size() + sample_text.size() + 512);
  prompt +=
      "You are auditing possible benchmark contamination.\n"
      "Compare the two texts below.\n"
      "\n"
      "Text A (benchmark item):\n"
      "<<<A>>>\n";
  prompt += item_text;
  prompt +=
      "\n<<<END>>>\n"
      "\n"
      "Text B (training sample):\n"
      "<<<B>>>\n";
  prompt += sample_text;
  prompt +=
      "\n<<<END>>>\n"
      "\n"
      "Classify the pair: TRUE_OVERLAP when Text B is a true semantic overlap of "
      "Text A (a paraphrase or near-duplicate), FALSE_POSITIVE when the pair merely "
      "shares topic or vocabulary.\n"
      "Give a one-sentence rationale, then end your reply with exactly one line:\n"
      "VERDICT: TRUE_OVERLAP\n"
      "or\n"
      "VERDICT: FALSE_POSITIVE";
  return prompt;
}

namespace {

std::optional<JudgeVerdict> parse_verdict(std::string_view output) {
  // Last VERDICT: line wins.
  std::optional<JudgeVerdict> verdict;
  std::size_t pos = 0;
  while (pos <= output.size()) {
    std::size_t eol = output.find('\n', pos);
    std::string_view line = output.substr(pos, eol == std::string_view::npos ? output.size() - pos
                                                                             : eol - pos);
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b != std::string_view::npos) {
      line = line.substr(b);
      if (line.rfind("VERDICT:", 0) == 0) {
        std::string_view rest = line.substr(8);
        std::size_t rb = rest.find_first_not_of(" \t");
        if (rb != std::string_view::npos) {
          rest = rest.substr(rb);
          std::size_t re = rest.find_last_not_of(" \t\r.");
          rest = rest.substr(0, re == std::string_view::npos ? 0 : re + 1);
          if (rest == "TRUE_OVERLAP") verdict = JudgeVerdict::true_overlap;
          else if (rest == "FALSE_POSITIVE") verdict = JudgeVerdict::false_positive;
        }
      }
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return verdict;
}

}  // namespace

JudgeOutcome llm_judge(std::string_view item_text, std::string_view sample_text,
                       adapters::ModelClient& judge) {
  adapters::ChatRequest request;
  request.messages = {{"user", build_judge_prompt(item_text, sample_text)}};
  request.temperature = 0.0;
  request.max_tokens = 256;

  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string output = judge.complete(request);
    if (auto verdict = parse_verdict(output)) {
      return {*verdict, std::move(output)};
    }
  }
  return {JudgeVerdict::judge_error, "unparseable judge output after retry"};
}

// ---- pipeline --------------------------------------------------------------------

std::string_view layer_name(Layer layer) {
  switch (layer) {
    case Layer::em: return "em";
    case Layer::ng: return "ng";
    case Layer::es: return "es";
    case Layer::llm_es: return "llm_es";
  }
  return "?";
}

namespace {

double pct_of(std::uint32_t flagged, std::uint32_t size) {
  return size == 0 ? 0.0 : 100.0 * static_cast<double>(flagged) / static_cast<double>(size);
}

struct CellWork {
  LayerCell cell;
  std::vector<ContaminationFinding> findings;
};

}  // namespace

PipelineResult run_pipeline(std::span<const corpus::Benchmark> benchmarks,
                            std::span<const CorpusInput> corpora, const PipelineConfig& config,
                            const PipelineAdapters& adapters) {
  PipelineResult result;
  auto& snap = result.report.config;
  snap.ngram_n = config.ngram_n;
  snap.ng_flag_fraction = config.ng_flag_fraction;
  snap.es_band_lo = config.es_band_lo;
  snap.es_flag_threshold = config.es_flag_threshold;
  snap.es_band_hi = config.es_band_hi;
  if (config.layers.em) snap.layers.emplace_back("em");
  if (config.layers.ng) snap.layers.emplace_back("ng");
  if (config.layers.es) snap.layers.emplace_back("es");
  if (config.layers.llm) snap.layers.emplace_back("llm_es");
  if ((config.layers.es || config.layers.llm) && adapters.embedder) {
    snap.embed_provenance = adapters.embedder->id();
  }
  if (config.layers.llm && adapters.judge) {
    snap.judge_identity = adapters.judge->id();
  }

  for (const auto& corpus_input : corpora) {
    auto docs = prepare_docs(corpus_input.samples);

    std::optional<NgramIndex> index;
    if (config.layers.ng) index.emplace(build_ngram_index(docs, config.ngram_n));

    std::optional<EmbeddingStore> store;
    std::optional<std::string> store_error;
    if (config.layers.es || config.layers.llm) {
      if (!adapters.embedder) {
        store_error = "embed adapter not configured";
      } else {
        try {
          store.emplace(build_embedding_store(*adapters.embedder, docs, adapters.cache));
        } catch (const std::exception& e) {
          store_error = e.what();
        }
      }
    }

    for (const auto& benchmark : benchmarks) {
      ReportRow row;
      row.benchmark_id = benchmark.id;
      row.corpus_id = corpus_input.corpus_id;
      row.benchmark_size = static_cast<std::uint32_t>(benchmark.items.size());

      std::vector<Doc> item_docs(benchmark.items.size());
#pragma omp parallel for schedule(dynamic, 16)
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(benchmark.items.size()); ++i) {
        const auto& item = benchmark.items[static_cast<std::size_t>(i)];
        item_docs[static_cast<std::size_t>(i)] = prepare_doc(item.item_id, item.text);
      }

      auto emit = [&](std::vector<CellWork>& works) {
        for (auto& w : works) {
          for (auto& f : w.findings) result.findings.push_back(std::move(f));
        }
      };

      if (config.layers.em) {
        row.em.enabled = true;
        std::vector<CellWork> per_item(item_docs.size());
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(item_docs.size()); ++i) {
          auto& w = per_item[static_cast<std::size_t>(i)];
          const auto& item_doc = item_docs[static_cast<std::size_t>(i)];
          auto matches = exact_match(item_doc, docs);
          for (const auto& m : matches) {
            w.findings.push_back({benchmark.id, corpus_input.corpus_id, item_doc.id,
                                  docs[m.doc].id, Layer::em, 1.0,
                                  m.contained_only ? "contained" : "equal"});
          }
          w.cell.flagged_items = matches.empty() ? 0 : 1;
        }
        for (const auto& w : per_item) row.em.flagged_items += w.cell.flagged_items;
        row.em.pct = pct_of(row.em.flagged_items, row.benchmark_size);
        emit(per_item);
      }

      if (config.layers.ng) {
        row.ng.enabled = true;
        std::vector<CellWork> per_item(item_docs.size());
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(item_docs.size()); ++i) {
          auto& w = per_item[static_cast<std::size_t>(i)];
          const auto& item_doc = item_docs[static_cast<std::size_t>(i)];
          auto overlap = ngram_overlap(item_doc.tokens, *index, config.ng_flag_fraction);
          for (const auto& d : overlap.flagged_docs) {
            w.findings.push_back({benchmark.id, corpus_input.corpus_id, item_doc.id,
                                  index->doc_ids[d.doc], Layer::ng, d.coverage,
                                  "token_alignment"});
          }
          w.cell.flagged_items = overlap.flagged ? 1 : 0;
        }
        for (const auto& w : per_item) row.ng.flagged_items += w.cell.flagged_items;
        row.ng.pct = pct_of(row.ng.flagged_items, row.benchmark_size);
        emit(per_item);
      }

      std::vector<std::vector<Candidate>> es_flagged_per_item;
      if (config.layers.es || config.layers.llm) {
        row.es.enabled = config.layers.es;
        if (store_error) {
          row.es.error = store_error;
          if (config.layers.llm) row.llm_es.error = store_error;
        } else {
          try {
            std::vector<std::string> item_texts;
            item_texts.reserve(item_docs.size());
            for (const auto& d : item_docs) item_texts.push_back(d.text);
            auto item_vecs =
                adapters::embed_cached(*adapters.embedder, item_texts, adapters.cache);

            es_flagged_per_item.resize(item_docs.size());
            std::vector<CellWork> per_item(item_docs.size());
            std::vector<std::string> item_errors(item_docs.size());
            for (std::size_t i = 0; i < item_docs.size(); ++i) {
              try {
                auto candidates = semantic_candidates(item_vecs[i], *store, config.es_band_lo,
                                                      config.es_band_hi);
                auto split = flag_semantic(candidates, config.es_flag_threshold);
                auto& w = per_item[i];
                for (const auto& c : split.flagged) {
                  w.findings.push_back({benchmark.id, corpus_input.corpus_id, item_docs[i].id,
                                        store->ids[c.index], Layer::es, c.cosine, "cosine"});
                }
                row.es_borderline_pairs += static_cast<std::uint32_t>(split.borderline.size());
                w.cell.flagged_items = split.flagged.empty() ? 0 : 1;
                es_flagged_per_item[i] = std::move(split.flagged);
              } catch (const std::exception& e) {
                item_errors[i] = std::string("item ") + item_docs[i].id + ": " + e.what();
              }
            }
            for (const auto& err : item_errors) {
              if (!err.empty()) {
                row.es.error = err;  // first failing item names itself
                break;
              }
            }
            if (config.layers.es && !row.es.error) {
              for (const auto& w : per_item) row.es.flagged_items += w.cell.flagged_items;
              row.es.pct = pct_of(row.es.flagged_items, row.benchmark_size);
              emit(per_item);
            }
          } catch (const std::exception& e) {
            row.es.error = e.what();
            if (config.layers.llm) row.llm_es.error = e.what();
          }
        }
      }

      if (config.layers.llm) {
        row.llm_es.enabled = true;
        if (!row.llm_es.error) {
          if (!adapters.judge) {
            row.llm_es.error = "judge adapter not configured";
          } else {
            // Judge calls run in canonical pair order; only ES findings are judged.
            for (std::size_t i = 0; i < es_flagged_per_item.size(); ++i) {
              bool item_flagged = false;
              for (const auto& c : es_flagged_per_item[i]) {
                const std::string& sample_text = docs[c.index].text;
                JudgeOutcome outcome;
                try {
                  outcome = llm_judge(item_docs[i].text, sample_text, *adapters.judge);
                } catch (const std::exception& e) {
                  outcome = {JudgeVerdict::judge_error, std::string("judge failure: ") + e.what()};
                }
                if (outcome.verdict == JudgeVerdict::true_overlap) {
                  item_flagged = true;
                  result.findings.push_back({benchmark.id, corpus_input.corpus_id,
                                             item_docs[i].id, store->ids[c.index], Layer::llm_es,
                                             c.cosine, outcome.rationale});
                } else if (outcome.verdict == JudgeVerdict::judge_error) {
                  ++row.judge_error_pairs;
                }
              }
              if (item_flagged) ++row.llm_es.flagged_items;
            }
            row.llm_es.pct = pct_of(row.llm_es.flagged_items, row.benchmark_size);
          }
        }
      }

      result.report.rows.push_back(std::move(row));
    }
  }

  std::sort(result.report.rows.begin(), result.report.rows.end(),
            [](const ReportRow& a, const ReportRow& b) {
              if (a.benchmark_id != b.benchmark_id) return a.benchmark_id < b.benchmark_id;
              return a.corpus_id < b.corpus_id;
            });

  auto layer_rank = [](Layer l) { return static_cast<int>(l); };
  std::sort(result.findings.begin(), result.findings.end(),
            [&](const ContaminationFinding& a, const ContaminationFinding& b) {
              if (a.benchmark_id != b.benchmark_id) return a.benchmark_id < b.benchmark_id;
              if (a.corpus_id != b.corpus_id) return a.corpus_id < b.corpus_id;
              if (a.item_id != b.item_id) return a.item_id < b.item_id;
              if (layer_rank(a.layer) != layer_rank(b.layer)) {
                return layer_rank(a.layer) < layer_rank(b.layer);
              }
              return a.sample_id < b.sample_id;
            });

  return result;
}

}  // namespace secaudit::contam
