#include "secaudit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "secaudit/cvss.hpp"
#include "secaudit/text.hpp"

namespace secaudit::corpus {

using nlohmann::json;

std::string_view role_name(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "?";
}

std::optional<Role> parse_role(std::string_view name) {
  if (name == "system") return Role::system;
  if (name == "user") return Role::user;
  if (name == "assistant") return Role::assistant;
  return std::nullopt;
}

std::optional<CorpusFormat> parse_corpus_format(std::string_view name) {
  if (name == "json-lines-messages" || name == "jsonl-messages" || name == "messages") {
    return CorpusFormat::jsonl_messages;
  }
  if (name == "json-lines-prompt-only" || name == "jsonl-prompt-only" || name == "prompt-only") {
    return CorpusFormat::jsonl_prompt_only;
  }
  return std::nullopt;
}

namespace {

bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string require_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw std::runtime_error(std::string("missing field \"") + key + "\"");
  if (!it->is_string()) throw std::runtime_error(std::string("field \"") + key + "\" must be a string");
  return it->get<std::string>();
}

Sample parse_record(const json& obj, CorpusFormat format,
                    std::unordered_set<std::string>& seen_ids) {
  Sample s;
  s.id = require_string(obj, "id");
  if (s.id.empty()) throw std::runtime_error("empty id");
  s.source = require_string(obj, "source");
  std::string key = s.source + "\x1f" + s.id;
  if (!seen_ids.insert(key).second) {
    throw std::runtime_error("duplicate id \"" + s.id + "\" in source \"" + s.source + "\"");
  }

  if (format == CorpusFormat::jsonl_prompt_only) {
    std::string prompt = require_string(obj, "prompt");
    s.messages.push_back({Role::user, std::move(prompt)});
    return s;
  }

  auto it = obj.find("messages");
  if (it == obj.end() || !it->is_array()) throw std::runtime_error("missing field \"messages\"");
  for (const auto& m : *it) {
    if (!m.is_object()) throw std::runtime_error("message must be an object");
    std::string role_str = require_string(m, "role");
    auto role = parse_role(role_str);
    if (!role) throw std::runtime_error("unknown role \"" + role_str + "\"");
    std::string content = require_string(m, "content");
    s.messages.push_back({*role, std::move(content)});
  }
  if (s.messages.empty()) throw std::runtime_error("messages must be non-empty");
  return s;
}

}  // namespace

LoadStats for_each_sample(const std::filesystem::path& path, CorpusFormat format,
                          const SampleCallback& on_sample, const ErrorCallback& on_error) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path.string());

  LoadStats stats;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    ++stats.lines;
    try {
      json obj = json::parse(line);
      if (!obj.is_object()) throw std::runtime_error("line is not a JSON object");
      Sample s = parse_record(obj, format, seen_ids);
      ++stats.yielded;
      on_sample(std::move(s));
    } catch (const std::exception& e) {
      ++stats.errored;
      on_error({line_no, e.what()});
    }
  }
  return stats;
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  Corpus c;
  c.stats = for_each_sample(
      path, format,
      [&](Sample&& s) { c.samples.push_back(std::move(s)); },
      [&](const RecordError& e) { c.errors.push_back(e); });
  c.source = c.samples.empty() ? path.stem().string() : c.samples.front().source;
  return c;
}

std::string extract_prompt_text(const Sample& sample) {
  std::string out;
  bool any = false;
  for (const auto& m : sample.messages) {
    if (m.role == Role::assistant) continue;
    if (any) out.push_back('\n');
    out += m.content;
    any = true;
  }
  if (!any) {
    throw std::runtime_error("sample \"" + sample.id + "\" has no non-assistant messages");
  }
  return out;
}

NormalizedText normalize_text(std::string_view raw) {
  NormalizedText out;
  out.text = text::normalize(raw);
  out.steps = {"url_removal", "email_removal", "special_chars", "whitespace"};
  return out;
}

std::string_view item_kind_name(ItemKind k) {
  switch (k) {
    case ItemKind::mcqa: return "mcqa";
    case ItemKind::short_answer: return "short_answer";
    case ItemKind::cvss: return "cvss";
  }
  return "?";
}

std::optional<ItemKind> parse_item_kind(std::string_view name) {
  if (name == "mcqa") return ItemKind::mcqa;
  if (name == "short_answer") return ItemKind::short_answer;
  if (name == "cvss") return ItemKind::cvss;
  return std::nullopt;
}

namespace {

BenchmarkItem parse_item(const json& obj, const std::string& default_benchmark_id) {
  BenchmarkItem item;
  item.benchmark_id =
      obj.contains("benchmark_id") ? require_string(obj, "benchmark_id") : default_benchmark_id;
  item.item_id = require_string(obj, "item_id");
  item.text = require_string(obj, "text");
  std::string kind_str = require_string(obj, "kind");
  auto kind = parse_item_kind(kind_str);
  if (!kind) throw std::runtime_error("unknown kind \"" + kind_str + "\"");
  item.kind = *kind;

  if (auto it = obj.find("choices"); it != obj.end()) {
    if (!it->is_array()) throw std::runtime_error("choices must be an array");
    for (const auto& c : *it) {
      item.choices.push_back({require_string(c, "label"), require_string(c, "text")});
    }
  }
  if (auto it = obj.find("answer_key"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw std::runtime_error("answer_key must be a string");
    item.answer_key = it->get<std::string>();
  }

  if (item.kind == ItemKind::mcqa) {
    if (item.choices.size() < 2) throw std::runtime_error("mcqa item needs >= 2 choices");
    if (item.answer_key) {
      bool found = std::any_of(item.choices.begin(), item.choices.end(),
                               [&](const Choice& c) { return c.label == *item.answer_key; });
      if (!found) throw std::runtime_error("answer_key not among choice labels");
    }
  } else if (item.kind == ItemKind::cvss) {
    if (item.answer_key) {
      if (!cvss::parse_cvss_vector(*item.answer_key)) {
        throw std::runtime_error("answer_key is not a valid CVSS v3.1 vector");
      }
    }
  }
  return item;
}

}  // namespace

adapters::LanguageLabel detect_language(adapters::LangIdAdapter& adapter, std::string_view text) {
  if (text.empty()) throw std::invalid_argument("detect_language: empty text");
  std::vector<std::string> batch{std::string(text)};
  auto labels = adapter.detect(batch);
  if (labels.size() != 1) throw adapters::AdapterError("langid: label count mismatch");
  return labels.front();
}

Benchmark load_benchmark(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open benchmark file: " + path.string());

  Benchmark b;
  b.id = path.stem().string();
  std::string line;
  std::size_t line_no = 0;
  bool id_fixed = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      json obj = json::parse(line);
      if (!obj.is_object()) throw std::runtime_error("line is not a JSON object");
      BenchmarkItem item = parse_item(obj, b.id);
      if (!id_fixed) {
        b.id = item.benchmark_id;
        id_fixed = true;
      } else if (item.benchmark_id != b.id) {
        throw std::runtime_error("mixed benchmark_id values in one file");
      }
      b.items.push_back(std::move(item));
    } catch (const std::exception& e) {
      b.errors.push_back({line_no, e.what()});
    }
  }
  return b;
}

}  // namespace secaudit::corpus
