#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace secaudit::adapters {

struct RetryPolicy {
  int attempts = 3;       // total tries
  int backoff_ms = 200;   // doubled per retry
};

struct AdapterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LanguageLabel {
  std::string tag;          // ISO-639-1
  double confidence = 0.0;  // [0,1]
};

class LangIdAdapter {
 public:
  virtual ~LangIdAdapter() = default;
  virtual std::vector<LanguageLabel> detect(std::span<const std::string> texts) = 0;
  virtual std::string id() const = 0;
};

struct CategoryLabel {
  std::string sample_id;
  int category_id = 0;       // 1..10
  double confidence = 0.0;   // [0,1]
};

class ClassifierAdapter {
 public:
  virtual ~ClassifierAdapter() = default;
  // One label per text, order preserved; sample_id left empty (caller fills).
  virtual std::vector<CategoryLabel> classify(std::span<const std::string> texts) = 0;
  virtual std::string id() const = 0;
};

class EmbedAdapter {
 public:
  virtual ~EmbedAdapter() = default;
  virtual std::vector<std::vector<double>> embed(std::span<const std::string> texts) = 0;
  virtual int dim() const = 0;
  virtual std::string id() const = 0;  // adapter identity + version, cache key part
};

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 256;
  std::optional<std::uint64_t> seed;
};

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
  virtual std::string id() const = 0;
  // Whether complete() may be called from several threads at once.
  virtual bool thread_safe() const { return false; }
};

// ---- deterministic stubs ----------------------------------------------

// Always returns one fixed label.
class ConstantLangId final : public LangIdAdapter {
 public:
  explicit ConstantLangId(std::string tag = "en", double confidence = 1.0);
  std::vector<LanguageLabel> detect(std::span<const std::string> texts) override;
  std::string id() const override;

 private:
  LanguageLabel label_;
};

// First substring rule that matches wins; falls back to a default label.
class RuleLangId final : public LangIdAdapter {
 public:
  struct Rule {
    std::string contains;
    LanguageLabel label;
  };
  RuleLangId(std::vector<Rule> rules, LanguageLabel fallback);
  std::vector<LanguageLabel> detect(std::span<const std::string> texts) override;
  std::string id() const override;

 private:
  std::vector<Rule> rules_;
  LanguageLabel fallback_;
};

// Keyword-table classifier over the ten taxonomy categories; the table is
// seeded from the category subtopics so the pipeline runs offline.
class RuleClassifier final : public ClassifierAdapter {
 public:
  RuleClassifier();  // built-in table
  struct Rule {
    std::string contains;  // lowercase
    int category_id;
  };
  explicit RuleClassifier(std::vector<Rule> rules, int fallback_category = 1);
  std::vector<CategoryLabel> classify(std::span<const std::string> texts) override;
  std::string id() const override;

 private:
  std::vector<Rule> rules_;
  int fallback_ = 1;
};

// Token-hashing bag-of-words embedding; same text always maps to the same
// vector. Good enough geometry for retrieval tests and offline runs.
class HashEmbedder final : public EmbedAdapter {
 public:
  explicit HashEmbedder(int dim = 256);
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
  int dim() const override;
  std::string id() const override;

 private:
  int dim_;
};

// Fixed text -> vector table, for hand-computed cosine fixtures.
class FixedEmbedder final : public EmbedAdapter {
 public:
  FixedEmbedder(int dim, std::vector<std::pair<std::string, std::vector<double>>> table);
  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override;
  int dim() const override;
  std::string id() const override;

 private:
  int dim_;
  std::vector<std::pair<std::string, std::vector<double>>> table_;
};

// Scriptable chat stub: ordered rules matched against the last user message
// (and optionally the request seed); first hit wins.
class ScriptedModelClient final : public ModelClient {
 public:
  struct Rule {
    std::optional<std::string> contains;    // substring of the last user message
    std::optional<std::uint64_t> seed;      // exact request seed
    std::string respond;
  };
  ScriptedModelClient(std::vector<Rule> rules, std::string fallback, std::string name = "mock");
  static ScriptedModelClient from_script_file(const std::filesystem::path& path);
  std::string complete(const ChatRequest& request) override;
  std::string id() const override;
  bool thread_safe() const override { return true; }

 private:
  std::vector<Rule> rules_;
  std::string fallback_;
  std::string name_;
};

// In-process hook client for tests.
class CallbackModelClient final : public ModelClient {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;
  explicit CallbackModelClient(Fn fn, std::string name = "callback", bool safe = true);
  std::string complete(const ChatRequest& request) override;
  std::string id() const override;
  bool thread_safe() const override { return safe_; }

 private:
  Fn fn_;
  std::string name_;
  bool safe_;
};

// ---- HTTP adapters ------------------------------------------------------
// Wire formats:
//   langid/classifier/embed: POST {"texts":[...]}
//     -> {"labels":[{"tag","confidence"}]} / {"labels":[{"category_id","confidence"}]}
//     -> {"vectors":[[...]], "dim":D, "model":"name"}
//   model/judge: POST {"messages":[{role,content}...],"temperature":T,
//                      "max_tokens":M,"seed":S?} -> {"text": "..."}

std::unique_ptr<LangIdAdapter> make_http_langid(const std::string& url, RetryPolicy policy = {});
std::unique_ptr<ClassifierAdapter> make_http_classifier(const std::string& url,
                                                        RetryPolicy policy = {});
std::unique_ptr<EmbedAdapter> make_http_embedder(const std::string& url, RetryPolicy policy = {});
std::unique_ptr<ModelClient> make_http_model(const std::string& url, RetryPolicy policy = {});

// ---- URL-scheme factories ------------------------------------------------
// "http(s)://..." -> HTTP adapter; "stub:..." -> built-in stub;
// "mock:<script.json>" -> scripted model client. Unknown scheme throws.

std::unique_ptr<LangIdAdapter> make_langid(const std::string& url, RetryPolicy policy = {});
std::unique_ptr<ClassifierAdapter> make_classifier(const std::string& url,
                                                   RetryPolicy policy = {});
std::unique_ptr<EmbedAdapter> make_embedder(const std::string& url, RetryPolicy policy = {});
std::unique_ptr<ModelClient> make_model(const std::string& url, RetryPolicy policy = {});

// Disk cache for embeddings, keyed by (adapter id, text hash).
class EmbeddingCache {
 public:
  EmbeddingCache(std::filesystem::path root, std::string adapter_id);
  std::optional<std::vector<double>> get(std::string_view text) const;
  void put(std::string_view text, std::span<const double> vec) const;

 private:
  std::filesystem::path dir_;
};

// Embeds through the cache; misses go to the adapter in deterministic batches.
std::vector<std::vector<double>> embed_cached(EmbedAdapter& adapter,
                                              std::span<const std::string> texts,
                                              const EmbeddingCache* cache,
                                              std::size_t batch_size = 64);

}  // namespace secaudit::adapters
