#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "secaudit/adapters.hpp"
#include "secaudit/corpus.hpp"

namespace secaudit::evalrun {

enum class TaskKind { mcqa, rcm, vsp };

std::string_view task_kind_name(TaskKind k);
std::optional<TaskKind> parse_task_kind(std::string_view name);

struct Decoding {
  double temperature = 0.3;
  int max_tokens = 512;
  std::uint64_t seed = 0;  // per-trial request seed = seed + trial index
};

struct PromptSpec {
  TaskKind kind = TaskKind::mcqa;
  int n_shot = 0;
  std::optional<std::string> system_prompt;
  Decoding decoding;
};

// Zero-shot renders the plain instruction + question + lettered choices;
// shots are prepended as solved blocks in the same format.
std::string build_mcqa_prompt(const corpus::BenchmarkItem& item, int n_shot = 0,
                              std::span<const corpus::BenchmarkItem> shots = {});

std::string build_rcm_prompt(const corpus::BenchmarkItem& item);

std::string build_vsp_prompt(const corpus::BenchmarkItem& item);

// Last `Answer: X` occurrence with X among labels; tolerates surrounding
// whitespace and trailing punctuation. nullopt = extraction error.
std::optional<std::string> extract_mcqa_answer(std::string_view output,
                                               std::span<const std::string> labels);

// Last non-empty line must carry a CWE id; normalized to upper-case CWE-N.
std::optional<std::string> extract_cwe(std::string_view output);

struct ItemResult {
  std::string raw_output;
  std::optional<std::string> extracted;  // letter / CWE id / canonical vector
  std::optional<std::string> error;      // request or extraction error
  bool correct = false;                  // mcqa/rcm; vsp scored via deviations
};

struct TrialResult {
  int trial = 0;
  std::vector<ItemResult> items;  // benchmark order
};

// Each trial queries every item once with the spec decoding; failed requests
// are retried per policy then recorded as item errors (scored incorrect).
// Reproducible byte-for-byte with a deterministic client.
std::vector<TrialResult> run_trials(adapters::ModelClient& client,
                                    const corpus::Benchmark& benchmark, const PromptSpec& spec,
                                    int trials = 10,
                                    std::span<const corpus::BenchmarkItem> shots = {},
                                    adapters::RetryPolicy retry = {});

enum class Scorer { accuracy, vsp };

struct AggregateResult {
  double mean = 0.0;
  double stddev = 0.0;  // population, over trial-level scores
  int n_trials = 0;
  std::vector<double> per_trial;
  double extraction_error_rate = 0.0;  // errored item-queries / total item-queries
};

AggregateResult aggregate(std::span<const TrialResult> trials, Scorer scorer,
                          const corpus::Benchmark& benchmark);

}  // namespace secaudit::evalrun
