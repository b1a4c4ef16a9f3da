#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "secaudit/corpus.hpp"

namespace secaudit::secprofile {

struct KeywordBank {
  std::vector<std::string> keywords;  // lowercase phrases
  std::vector<std::string> excluded;  // subset of keywords, not counted toward the threshold
  std::string version;
};

// One phrase per line, '#' comments, UTF-8. Validates: lowercase, no
// duplicates, excluded subset of keywords.
KeywordBank load_keyword_bank(const std::filesystem::path& keywords_path,
                              const std::filesystem::path& excluded_path,
                              std::string version = "file");
KeywordBank make_bank(std::vector<std::string> keywords, std::vector<std::string> excluded,
                      std::string version = "inline");

struct IdentifierPatternSet {
  bool cve = true;
  bool cwe = true;
  bool attack_technique = true;  // T#### with optional .### sub-technique
  bool nist_control = true;      // SP 800-53 family prefixes only
};

struct PhraseCount {
  std::string phrase;  // bank phrase or pattern name
  int count = 0;

  friend bool operator==(const PhraseCount&, const PhraseCount&) = default;
};

struct IdentifierMatch {
  std::string pattern;  // cve | cwe | attack_technique | nist_control
  std::string matched;
  std::size_t pos = 0;  // char offset in the scanned text
};

// Case-insensitive, word-boundary counts of bank phrases over normalized
// text; multi-word phrases match contiguous token runs. Results in bank
// order, zero-count phrases omitted. Throws on an empty bank.
std::vector<PhraseCount> match_keywords(std::string_view normalized_text,
                                        const KeywordBank& bank);

// Non-overlapping structured-identifier matches, left to right.
std::vector<IdentifierMatch> match_identifiers(std::string_view text,
                                               const IdentifierPatternSet& patterns);

struct KeywordHit {
  std::string sample_id;
  std::vector<PhraseCount> matched;  // phrases then patterns, deterministic order
  int counted_matches = 0;           // excludes excluded phrases
  int total_matches = 0;             // includes them
  double density = 0.0;              // matched-token fraction of the prompt
  bool flagged = false;
};

struct ClassifyOptions {
  int threshold = 1;
  bool count_identifiers = true;  // identifiers contribute to the threshold
};

KeywordHit classify_security(const corpus::Sample& sample, const KeywordBank& bank,
                             const IdentifierPatternSet& patterns, const ClassifyOptions& options);

// Parallel batch classification; result order matches input order exactly,
// independent of the worker count.
std::vector<KeywordHit> classify_all(std::span<const corpus::Sample> samples,
                                     const KeywordBank& bank,
                                     const IdentifierPatternSet& patterns,
                                     const ClassifyOptions& options);

struct DatasetProfile {
  std::string source;
  std::size_t dataset_size = 0;
  std::size_t hits = 0;          // flagged samples
  double pct_dataset = 0.0;      // hits / dataset_size
  double avg_matches = 0.0;      // over flagged samples only
  double avg_density = 0.0;      // over flagged samples only
  bool empty_flagged_warning = false;
};

// Throws when dataset_size is zero.
DatasetProfile dataset_stats(std::span<const KeywordHit> hits, std::size_t dataset_size);

}  // namespace secaudit::secprofile
