#include "secaudit/evalrun.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "secaudit/cvss.hpp"

namespace secaudit::evalrun {

std::string_view task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::mcqa: return "mcqa";
    case TaskKind::rcm: return "rcm";
    case TaskKind::vsp: return "vsp";
  }
  return "?";
}

std::optional<TaskKind> parse_task_kind(std::string_view name) {
  if (name == "mcqa") return TaskKind::mcqa;
  if (name == "rcm") return TaskKind::rcm;
  if (name == "vsp") return TaskKind::vsp;
  return std::nullopt;
}

namespace {

const char* number_word(std::size_t n) {
  switch (n) {
    case 2: return "two";
    case 3: return "three";
    case 4: return "four";
    case 5: return "five";
    case 6: return "six";
    case 7: return "seven";
    case 8: return "eight";
    case 9: return "nine";
    case 10: return "ten";
    default: return nullptr;
  }
}

// "(A, B, C and D)" and "A, B, C, or D" from the item's labels.
std::string label_list(std::span<const corpus::Choice> choices, const char* last_join) {
  std::string out;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    if (i > 0) {
      if (i + 1 == choices.size()) {
        out += last_join;
      } else {
        out += ", ";
      }
    }
    out += choices[i].label;
  }
  return out;
}

std::string mcqa_instruction(const corpus::BenchmarkItem& item) {
  std::string count;
  if (const char* word = number_word(item.choices.size())) {
    count = word;
  } else {
    count = std::to_string(item.choices.size());
  }
  std::string out = "Given the following question and " + count + " candidate answers (" +
                    label_list(item.choices, " and ") +
                    "), choose the best answer. Your response should be of the following "
                    "format: 'Answer: $LETTER' (without quotes) where LETTER is one of " +
                    label_list(item.choices, ", or ") + ".";
  return out;
}

std::string render_question(const corpus::BenchmarkItem& item) {
  std::string out = item.text;
  for (const auto& c : item.choices) {
    out += "\n";
    out += c.label;
    out += ". ";
    out += c.text;
  }
  return out;
}

}  // namespace

std::string build_mcqa_prompt(const corpus::BenchmarkItem& item, int n_shot,
                              std::span<const corpus::BenchmarkItem> shots) {
  if (item.kind != corpus::ItemKind::mcqa) {
    throw std::invalid_argument("build_mcqa_prompt: item kind must be mcqa");
  }
  if (n_shot < 0 || static_cast<std::size_t>(n_shot) > shots.size()) {
    throw std::invalid_argument("build_mcqa_prompt: not enough shot examples");
  }
  std::string prompt = mcqa_instruction(item);
  for (int s = 0; s < n_shot; ++s) {
    const auto& shot = shots[static_cast<std::size_t>(s)];
    if (!shot.answer_key) throw std::invalid_argument("shot example lacks answer_key");
    prompt += "\n\n";
    prompt += render_question(shot);
    prompt += "\nAnswer: ";
    prompt += *shot.answer_key;
  }
  prompt += n_shot > 0 ? "\n\n" : "\n";
  prompt += render_question(item);
  return prompt;
}

std::string build_rcm_prompt(const corpus::BenchmarkItem& item) {
  if (item.text.empty()) throw std::invalid_argument("build_rcm_prompt: missing description");
  return "Analyze the following CVE description and map it to the appropriate CWE. "
         "Provide a brief justification for your choice. Ensure the last line of your "
         "response contains only the CWE ID.\nCVE Description: " +
         item.text;
}

std::string build_vsp_prompt(const corpus::BenchmarkItem& item) {
  if (item.text.empty()) throw std::invalid_argument("build_vsp_prompt: missing description");
  return "From the following CVE description, determine the CVSS v3.1 vector string for "
         "each CVSS base metric: AV, AC, PR, UI, S, C, I, and A. Valid options for each "
         "metric are as follows:\n"
         "\n"
         "- Attack Vector (AV): Network (N), Adjacent (A), Local (L), Physical (P)\n"
         "- Attack Complexity (AC): Low (L), High (H)\n"
         "- Privileges Required (PR): None (N), Low (L), High (H)\n"
         "- User Interaction (UI): None (N), Required (R)\n"
         "- Scope (S): Unchanged (U), Changed (C)\n"
         "- Confidentiality (C): None (N), Low (L), High (H)\n"
         "- Integrity (I): None (N), Low (L), High (H)\n"
         "- Availability (A): None (N), Low (L), High (H)\n"
         "\n"
         "Provide your answer as a CVSS v3.1 vector string. Ensure your final answer "
         "contains only the CVSS v3 Vector String in the following example format:\n"
         "\n"
         "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H\n"
         "\n"
         "CVE Description: " +
         item.text;
}

std::optional<std::string> extract_mcqa_answer(std::string_view output,
                                               std::span<const std::string> labels) {
  if (labels.empty()) throw std::invalid_argument("extract_mcqa_answer: labels must be non-empty");
  std::optional<std::string> found;
  constexpr std::string_view kPattern = "Answer";
  std::size_t pos = 0;
  while ((pos = output.find(kPattern, pos)) != std::string_view::npos) {
    std::size_t p = pos + kPattern.size();
    while (p < output.size() && (output[p] == ' ' || output[p] == '\t')) ++p;
    if (p >= output.size() || output[p] != ':') {
      ++pos;
      continue;
    }
    ++p;
    while (p < output.size() && (output[p] == ' ' || output[p] == '\t')) ++p;
    // Candidate letter run ends at whitespace or punctuation.
    std::size_t end = p;
    while (end < output.size() && std::isalnum(static_cast<unsigned char>(output[end]))) ++end;
    std::string_view letter = output.substr(p, end - p);
    for (const auto& label : labels) {
      if (letter == label) {
        found = label;
        break;
      }
    }
    pos = pos + kPattern.size();
  }
  return found;
}

std::optional<std::string> extract_cwe(std::string_view output) {
  // Last non-empty line.
  std::size_t end = output.size();
  while (true) {
    while (end > 0 && (output[end - 1] == '\n' || output[end - 1] == '\r')) --end;
    if (end == 0) return std::nullopt;
    std::size_t begin = output.rfind('\n', end - 1);
    begin = begin == std::string_view::npos ? 0 : begin + 1;
    std::string_view line = output.substr(begin, end - begin);
    bool blank = std::all_of(line.begin(), line.end(),
                             [](unsigned char c) { return std::isspace(c) != 0; });
    if (!blank) {
      // Find a CWE-N pattern anywhere in the line; last one wins.
      std::optional<std::string> found;
      for (std::size_t i = 0; i + 4 < line.size(); ++i) {
        if ((line[i] == 'C' || line[i] == 'c') &&
            (std::toupper(static_cast<unsigned char>(line[i + 1])) == 'W') &&
            (std::toupper(static_cast<unsigned char>(line[i + 2])) == 'E') &&
            line[i + 3] == '-' && std::isdigit(static_cast<unsigned char>(line[i + 4]))) {
          std::size_t d = i + 4;
          while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
          found = "CWE-" + std::string(line.substr(i + 4, d - i - 4));
          i = d - 1;
        }
      }
      return found;
    }
    end = begin;
    if (begin == 0) return std::nullopt;
  }
}

namespace {

std::string build_prompt(const corpus::BenchmarkItem& item, const PromptSpec& spec,
                         std::span<const corpus::BenchmarkItem> shots) {
  switch (spec.kind) {
    case TaskKind::mcqa: return build_mcqa_prompt(item, spec.n_shot, shots);
    case TaskKind::rcm: return build_rcm_prompt(item);
    case TaskKind::vsp: return build_vsp_prompt(item);
  }
  throw std::invalid_argument("unknown task kind");
}

std::string normalize_cwe(std::string_view id) {
  // CWE-079 and cwe-79 both mean CWE-79.
  auto dash = id.find('-');
  if (dash == std::string_view::npos) return std::string(id);
  std::string_view digits = id.substr(dash + 1);
  std::size_t lead = 0;
  while (lead + 1 < digits.size() && digits[lead] == '0') ++lead;
  return "CWE-" + std::string(digits.substr(lead));
}

void score_item(ItemResult& r, const corpus::BenchmarkItem& item, TaskKind kind) {
  switch (kind) {
    case TaskKind::mcqa: {
      std::vector<std::string> labels;
      labels.reserve(item.choices.size());
      for (const auto& c : item.choices) labels.push_back(c.label);
      auto letter = extract_mcqa_answer(r.raw_output, labels);
      if (!letter) {
        r.error = "extraction error: no Answer pattern";
        return;
      }
      r.extracted = letter;
      r.correct = item.answer_key && *letter == *item.answer_key;
      return;
    }
    case TaskKind::rcm: {
      auto cwe = extract_cwe(r.raw_output);
      if (!cwe) {
        r.error = "extraction error: last line has no CWE id";
        return;
      }
      r.extracted = cwe;
      r.correct = item.answer_key && normalize_cwe(*cwe) == normalize_cwe(*item.answer_key);
      return;
    }
    case TaskKind::vsp: {
      auto vec = cvss::parse_cvss_vector(r.raw_output);
      if (!vec) {
        r.error = "extraction error: malformed CVSS vector";
        return;
      }
      r.extracted = vec->to_string();
      if (item.answer_key) {
        auto gold = cvss::parse_cvss_vector(*item.answer_key);
        r.correct = gold && *vec == *gold;
      }
      return;
    }
  }
}

}  // namespace

std::vector<TrialResult> run_trials(adapters::ModelClient& client,
                                    const corpus::Benchmark& benchmark, const PromptSpec& spec,
                                    int trials, std::span<const corpus::BenchmarkItem> shots,
                                    adapters::RetryPolicy retry) {
  if (benchmark.items.empty()) throw std::invalid_argument("run_trials: empty benchmark");
  if (trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");

  // Prompts are pure in the item, so build them once.
  std::vector<std::string> prompts;
  prompts.reserve(benchmark.items.size());
  for (const auto& item : benchmark.items) prompts.push_back(build_prompt(item, spec, shots));

  std::vector<TrialResult> results;
  results.reserve(static_cast<std::size_t>(trials));
  const bool parallel_items = client.thread_safe();

  for (int t = 0; t < trials; ++t) {
    TrialResult trial;
    trial.trial = t;
    trial.items.resize(benchmark.items.size());

    auto run_item = [&](std::size_t i) {
      adapters::ChatRequest request;
      if (spec.system_prompt) request.messages.push_back({"system", *spec.system_prompt});
      request.messages.push_back({"user", prompts[i]});
      request.temperature = spec.decoding.temperature;
      request.max_tokens = spec.decoding.max_tokens;
      request.seed = spec.decoding.seed + static_cast<std::uint64_t>(t);

      ItemResult& r = trial.items[i];
      std::string last_error;
      for (int attempt = 0; attempt < std::max(1, retry.attempts); ++attempt) {
        try {
          r.raw_output = client.complete(request);
          last_error.clear();
          break;
        } catch (const std::exception& e) {
          last_error = e.what();
        }
      }
      if (!last_error.empty()) {
        r.error = "request error: " + last_error;
        return;
      }
      score_item(r, benchmark.items[i], spec.kind);
    };

    if (parallel_items) {
#pragma omp parallel for schedule(dynamic, 4)
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(benchmark.items.size()); ++i) {
        run_item(static_cast<std::size_t>(i));
      }
    } else {
      for (std::size_t i = 0; i < benchmark.items.size(); ++i) run_item(i);
    }
    results.push_back(std::move(trial));
  }
  return results;
}

AggregateResult aggregate(std::span<const TrialResult> trials, Scorer scorer,
                          const corpus::Benchmark& benchmark) {
  if (trials.empty()) throw std::invalid_argument("aggregate: no trials");
  AggregateResult agg;
  agg.n_trials = static_cast<int>(trials.size());

  std::size_t errored = 0;
  std::size_t queries = 0;
  for (const auto& trial : trials) {
    double score = 0.0;
    if (scorer == Scorer::accuracy) {
      std::size_t correct = 0;
      for (const auto& item : trial.items) {
        if (item.correct) ++correct;
      }
      score = trial.items.empty()
                  ? 0.0
                  : static_cast<double>(correct) / static_cast<double>(trial.items.size());
    } else {
      std::vector<std::optional<cvss::CvssVector>> preds;
      std::vector<cvss::CvssVector> golds;
      preds.reserve(trial.items.size());
      for (std::size_t i = 0; i < trial.items.size(); ++i) {
        const auto& key = benchmark.items[i].answer_key;
        if (!key) throw std::invalid_argument("vsp scoring requires gold vectors");
        auto gold = cvss::parse_cvss_vector(*key);
        if (!gold) throw std::invalid_argument("invalid gold CVSS vector");
        golds.push_back(*gold);
        preds.push_back(trial.items[i].extracted ? cvss::parse_cvss_vector(*trial.items[i].extracted)
                                                 : std::nullopt);
      }
      score = cvss::vsp_score(preds, golds).cvss_score;
    }
    agg.per_trial.push_back(score);
    for (const auto& item : trial.items) {
      ++queries;
      if (item.error) ++errored;
    }
  }

  double sum = 0.0;
  for (double s : agg.per_trial) sum += s;
  agg.mean = sum / static_cast<double>(agg.per_trial.size());
  double varsum = 0.0;
  for (double s : agg.per_trial) varsum += (s - agg.mean) * (s - agg.mean);
  agg.stddev = std::sqrt(varsum / static_cast<double>(agg.per_trial.size()));
  agg.extraction_error_rate =
      queries == 0 ? 0.0 : static_cast<double>(errored) / static_cast<double>(queries);
  return agg;
}

}  // namespace secaudit::evalrun
