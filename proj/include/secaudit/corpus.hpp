#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace secaudit::corpus {

enum class Role { system, user, assistant };

std::string_view role_name(Role r);
std::optional<Role> parse_role(std::string_view name);

struct Message {
  Role role = Role::user;
  std::string content;
};

// One corpus record. Immutable after construction; safe to share across
// workers.
struct Sample {
  std::string id;
  std::string source;
  std::vector<Message> messages;
  std::optional<std::string> language;        // ISO-639-1 tag when detected
  std::optional<double> detector_confidence;  // [0,1]
};

enum class CorpusFormat { jsonl_messages, jsonl_prompt_only };

std::optional<CorpusFormat> parse_corpus_format(std::string_view name);

struct RecordError {
  std::size_t line = 0;  // 1-based line number
  std::string message;
};

struct LoadStats {
  std::size_t lines = 0;  // non-blank lines seen
  std::size_t yielded = 0;
  std::size_t errored = 0;
};

using SampleCallback = std::function<void(Sample&&)>;
using ErrorCallback = std::function<void(const RecordError&)>;

// Streams samples in file order; malformed lines go to on_error with their
// line number and the stream continues. lines == yielded + errored.
LoadStats for_each_sample(const std::filesystem::path& path, CorpusFormat format,
                          const SampleCallback& on_sample, const ErrorCallback& on_error);

struct Corpus {
  std::string source;  // first sample's source, or the file stem
  std::vector<Sample> samples;
  std::vector<RecordError> errors;
  LoadStats stats;
};

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);

// Newline-joined system+user contents in order; assistant turns excluded.
// Throws std::runtime_error when the sample has no non-assistant content.
std::string extract_prompt_text(const Sample& sample);

struct NormalizedText {
  std::string text;
  std::vector<std::string> steps;

  friend bool operator==(const NormalizedText&, const NormalizedText&) = default;
};

NormalizedText normalize_text(std::string_view raw);

enum class ItemKind { mcqa, short_answer, cvss };

std::string_view item_kind_name(ItemKind k);
std::optional<ItemKind> parse_item_kind(std::string_view name);

struct Choice {
  std::string label;
  std::string text;
};

struct BenchmarkItem {
  std::string benchmark_id;
  std::string item_id;
  std::string text;
  ItemKind kind = ItemKind::mcqa;
  std::vector<Choice> choices;             // mcqa only
  std::optional<std::string> answer_key;   // letter / CWE id / CVSS vector
};

struct Benchmark {
  std::string id;
  std::vector<BenchmarkItem> items;
  std::vector<RecordError> errors;
};

// JSON-Lines, one BenchmarkItem per line. Invalid items are reported and
// skipped. The benchmark id defaults to the file stem when absent.
Benchmark load_benchmark(const std::filesystem::path& path);

}  // namespace secaudit::corpus

#include "secaudit/adapters.hpp"

namespace secaudit::corpus {

// Top language tag + confidence from the adapter. Throws on empty text.
adapters::LanguageLabel detect_language(adapters::LangIdAdapter& adapter, std::string_view text);

}  // namespace secaudit::corpus
