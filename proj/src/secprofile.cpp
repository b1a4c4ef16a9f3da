#include "secaudit/secprofile.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <omp.h>

#include "secaudit/text.hpp"

namespace secaudit::secprofile {

namespace {

bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }

std::vector<std::string> read_phrase_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open keyword file: " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    std::size_t b = 0;
    while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
    if (b > 0) line.erase(0, b);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

void validate_bank(const KeywordBank& bank) {
  std::unordered_set<std::string> seen;
  for (const auto& p : bank.keywords) {
    if (p != text::lowercase(p)) {
      throw std::runtime_error("keyword bank phrase not lowercase: \"" + p + "\"");
    }
    if (!seen.insert(p).second) {
      throw std::runtime_error("duplicate keyword bank phrase: \"" + p + "\"");
    }
  }
  std::unordered_set<std::string> excl_seen;
  for (const auto& p : bank.excluded) {
    if (!seen.count(p)) {
      throw std::runtime_error("excluded phrase not in keyword bank: \"" + p + "\"");
    }
    if (!excl_seen.insert(p).second) {
      throw std::runtime_error("duplicate excluded phrase: \"" + p + "\"");
    }
  }
}

// Bank compiled for token-run matching: phrase words in match_key form,
// bucketed by first word.
struct CompiledBank {
  std::vector<std::vector<std::string>> phrase_words;  // bank order
  std::vector<bool> excluded;
  std::unordered_map<std::string, std::vector<std::uint32_t>> by_first;
};

CompiledBank compile(const KeywordBank& bank) {
  if (bank.keywords.empty()) throw std::runtime_error("keyword bank is empty");
  validate_bank(bank);
  CompiledBank cb;
  cb.phrase_words.reserve(bank.keywords.size());
  std::unordered_set<std::string> excluded(bank.excluded.begin(), bank.excluded.end());
  for (std::uint32_t idx = 0; idx < bank.keywords.size(); ++idx) {
    const auto& phrase = bank.keywords[idx];
    // Phrases go through the same normalization as the scanned text, so a
    // bank entry like "mitre att&ck" lines up with normalized prompts.
    std::string norm = text::normalize(phrase);
    std::vector<std::string> words;
    for (const auto& w : text::tokenize_views(norm)) words.push_back(text::match_key(w));
    if (words.empty()) throw std::runtime_error("blank phrase in keyword bank");
    cb.by_first[words.front()].push_back(idx);
    cb.phrase_words.push_back(std::move(words));
    cb.excluded.push_back(excluded.count(phrase) > 0);
  }
  return cb;
}

struct ScanResult {
  std::vector<int> phrase_counts;           // bank order
  std::vector<bool> covered;                // per token position
};

ScanResult scan_keywords(std::span<const std::string> keys, const CompiledBank& cb) {
  ScanResult r;
  r.phrase_counts.assign(cb.phrase_words.size(), 0);
  r.covered.assign(keys.size(), false);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    auto it = cb.by_first.find(keys[i]);
    if (it == cb.by_first.end()) continue;
    for (std::uint32_t idx : it->second) {
      const auto& words = cb.phrase_words[idx];
      if (i + words.size() > keys.size()) continue;
      bool ok = true;
      for (std::size_t k = 1; k < words.size(); ++k) {
        if (keys[i + k] != words[k]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      ++r.phrase_counts[idx];
      for (std::size_t k = 0; k < words.size(); ++k) r.covered[i + k] = true;
    }
  }
  return r;
}

// ---- identifier scanners -------------------------------------------------

bool boundary_before(std::string_view text, std::size_t pos) {
  return pos == 0 || !is_alnum(static_cast<unsigned char>(text[pos - 1]));
}

bool boundary_after(std::string_view text, std::size_t end) {
  return end >= text.size() || !is_alnum(static_cast<unsigned char>(text[end]));
}

bool eq_ci(char a, char b) {
  return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
}

std::size_t digits_from(std::string_view text, std::size_t pos) {
  std::size_t n = 0;
  while (pos + n < text.size() && std::isdigit(static_cast<unsigned char>(text[pos + n]))) ++n;
  return n;
}

// CVE-YYYY-NNNN+ / CWE-N+
std::size_t match_dashed_id(std::string_view text, std::size_t pos, std::string_view word,
                            std::size_t min_first, std::size_t exact_first) {
  if (pos + word.size() >= text.size()) return 0;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (!eq_ci(text[pos + k], word[k])) return 0;
  }
  std::size_t p = pos + word.size();
  if (text[p] != '-') return 0;
  ++p;
  std::size_t d1 = digits_from(text, p);
  if (exact_first > 0) {
    if (d1 != 4) return 0;  // CVE year group
    p += 4;
    if (p >= text.size() || text[p] != '-') return 0;
    ++p;
    std::size_t d2 = digits_from(text, p);
    if (d2 < min_first) return 0;
    p += d2;
  } else {
    if (d1 < 1) return 0;
    p += d1;
  }
  if (!boundary_after(text, p)) return 0;
  return p - pos;
}

// T#### with optional .### sub-technique
std::size_t match_attack(std::string_view text, std::size_t pos) {
  if (!eq_ci(text[pos], 'T')) return 0;
  std::size_t p = pos + 1;
  if (digits_from(text, p) < 4) return 0;
  if (p + 4 < text.size() && std::isdigit(static_cast<unsigned char>(text[p + 4]))) return 0;
  p += 4;
  std::size_t end = p;
  if (p + 3 < text.size() && text[p] == '.' && digits_from(text, p + 1) >= 3) {
    if (!(p + 4 < text.size() && std::isdigit(static_cast<unsigned char>(text[p + 4])))) {
      end = p + 4;
    }
  }
  if (!boundary_after(text, end)) return 0;
  return end - pos;
}

// SP 800-53 control families.
const char* const kNistFamilies[] = {"AC", "AT", "AU", "CA", "CM", "CP", "IA",
                                     "IR", "MA", "MP", "PE", "PL", "PM", "PS",
                                     "PT", "RA", "SA", "SC", "SI", "SR"};

std::size_t match_nist(std::string_view text, std::size_t pos) {
  if (pos + 3 >= text.size() + 1) return 0;
  for (const char* fam : kNistFamilies) {
    if (pos + 2 < text.size() && eq_ci(text[pos], fam[0]) && eq_ci(text[pos + 1], fam[1]) &&
        text[pos + 2] == '-') {
      std::size_t d = digits_from(text, pos + 3);
      if (d == 0) continue;
      std::size_t end = pos + 3 + d;
      if (!boundary_after(text, end)) continue;
      return end - pos;
    }
  }
  return 0;
}

}  // namespace

KeywordBank load_keyword_bank(const std::filesystem::path& keywords_path,
                              const std::filesystem::path& excluded_path,
                              std::string version) {
  KeywordBank bank;
  bank.keywords = read_phrase_file(keywords_path);
  bank.excluded = read_phrase_file(excluded_path);
  bank.version = std::move(version);
  validate_bank(bank);
  return bank;
}

KeywordBank make_bank(std::vector<std::string> keywords, std::vector<std::string> excluded,
                      std::string version) {
  KeywordBank bank{std::move(keywords), std::move(excluded), std::move(version)};
  validate_bank(bank);
  return bank;
}

std::vector<PhraseCount> match_keywords(std::string_view normalized_text,
                                        const KeywordBank& bank) {
  CompiledBank cb = compile(bank);
  auto spans = text::tokenize_spans(normalized_text);
  std::vector<std::string> keys;
  keys.reserve(spans.size());
  for (const auto& s : spans) keys.push_back(text::match_key(s.token));
  ScanResult r = scan_keywords(keys, cb);
  std::vector<PhraseCount> out;
  for (std::size_t idx = 0; idx < r.phrase_counts.size(); ++idx) {
    if (r.phrase_counts[idx] > 0) {
      out.push_back({bank.keywords[idx], r.phrase_counts[idx]});
    }
  }
  return out;
}

std::vector<IdentifierMatch> match_identifiers(std::string_view text,
                                               const IdentifierPatternSet& patterns) {
  std::vector<IdentifierMatch> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!boundary_before(text, i)) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    const char* name = nullptr;
    if (patterns.cve && (len = match_dashed_id(text, i, "CVE", 4, 4)) > 0) {
      name = "cve";
    } else if (patterns.cwe && (len = match_dashed_id(text, i, "CWE", 1, 0)) > 0) {
      name = "cwe";
    } else if (patterns.attack_technique && (len = match_attack(text, i)) > 0) {
      name = "attack_technique";
    } else if (patterns.nist_control && (len = match_nist(text, i)) > 0) {
      name = "nist_control";
    }
    if (name) {
      out.push_back({name, std::string(text.substr(i, len)), i});
      i += len;
    } else {
      ++i;
    }
  }
  return out;
}

namespace {

KeywordHit classify_one(const corpus::Sample& sample, const CompiledBank& cb,
                        const KeywordBank& bank, const IdentifierPatternSet& patterns,
                        const ClassifyOptions& options) {
  KeywordHit hit;
  hit.sample_id = sample.id;

  std::string prompt = corpus::extract_prompt_text(sample);
  std::string norm = text::normalize(prompt);
  auto spans = text::tokenize_spans(norm);
  std::vector<std::string> keys;
  keys.reserve(spans.size());
  for (const auto& s : spans) keys.push_back(text::match_key(s.token));

  ScanResult scan = scan_keywords(keys, cb);
  auto ids = match_identifiers(norm, patterns);

  // Identifier character spans map back onto token positions for density.
  std::size_t tok = 0;
  for (const auto& m : ids) {
    while (tok < spans.size() && spans[tok].end <= m.pos) ++tok;
    std::size_t t = tok;
    std::size_t m_end = m.pos + m.matched.size();
    while (t < spans.size() && spans[t].begin < m_end) {
      scan.covered[t] = true;
      ++t;
    }
  }

  int keyword_total = 0;
  int keyword_counted = 0;
  for (std::size_t idx = 0; idx < scan.phrase_counts.size(); ++idx) {
    int c = scan.phrase_counts[idx];
    if (c == 0) continue;
    keyword_total += c;
    if (!cb.excluded[idx]) keyword_counted += c;
    hit.matched.push_back({bank.keywords[idx], c});
  }

  std::unordered_map<std::string, int> id_counts;
  for (const auto& m : ids) ++id_counts[m.pattern];
  for (const char* name : {"cve", "cwe", "attack_technique", "nist_control"}) {
    auto it = id_counts.find(name);
    if (it != id_counts.end()) hit.matched.push_back({name, it->second});
  }
  int id_total = static_cast<int>(ids.size());

  hit.total_matches = keyword_total + id_total;
  hit.counted_matches = keyword_counted + (options.count_identifiers ? id_total : 0);
  std::size_t covered = static_cast<std::size_t>(
      std::count(scan.covered.begin(), scan.covered.end(), true));
  hit.density = spans.empty() ? 0.0
                              : static_cast<double>(covered) / static_cast<double>(spans.size());
  hit.flagged = hit.counted_matches >= options.threshold;
  return hit;
}

}  // namespace

KeywordHit classify_security(const corpus::Sample& sample, const KeywordBank& bank,
                             const IdentifierPatternSet& patterns,
                             const ClassifyOptions& options) {
  if (options.threshold < 1) throw std::invalid_argument("threshold must be >= 1");
  CompiledBank cb = compile(bank);
  return classify_one(sample, cb, bank, patterns, options);
}

std::vector<KeywordHit> classify_all(std::span<const corpus::Sample> samples,
                                     const KeywordBank& bank,
                                     const IdentifierPatternSet& patterns,
                                     const ClassifyOptions& options) {
  if (options.threshold < 1) throw std::invalid_argument("threshold must be >= 1");
  CompiledBank cb = compile(bank);
  std::vector<KeywordHit> out(samples.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(samples.size()); ++i) {
    try {
      out[static_cast<std::size_t>(i)] =
          classify_one(samples[static_cast<std::size_t>(i)], cb, bank, patterns, options);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

DatasetProfile dataset_stats(std::span<const KeywordHit> hits, std::size_t dataset_size) {
  if (dataset_size == 0) throw std::invalid_argument("dataset_size must be positive");
  DatasetProfile p;
  p.dataset_size = dataset_size;
  double sum_matches = 0.0;
  double sum_density = 0.0;
  for (const auto& h : hits) {
    if (!h.flagged) continue;
    ++p.hits;
    sum_matches += static_cast<double>(h.total_matches);
    sum_density += h.density;
  }
  if (p.hits > dataset_size) throw std::invalid_argument("more flagged hits than dataset_size");
  p.pct_dataset = static_cast<double>(p.hits) / static_cast<double>(dataset_size);
  if (p.hits == 0) {
    p.empty_flagged_warning = true;
  } else {
    p.avg_matches = sum_matches / static_cast<double>(p.hits);
    p.avg_density = sum_density / static_cast<double>(p.hits);
  }
  return p;
}

}  // namespace secaudit::secprofile
