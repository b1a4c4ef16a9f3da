#include "secaudit/adapters.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "secaudit/text.hpp"

namespace secaudit::adapters {

using nlohmann::json;

// ---- stubs ---------------------------------------------------------------

ConstantLangId::ConstantLangId(std::string tag, double confidence)
    : label_{std::move(tag), confidence} {}

std::vector<LanguageLabel> ConstantLangId::detect(std::span<const std::string> texts) {
  return std::vector<LanguageLabel>(texts.size(), label_);
}

std::string ConstantLangId::id() const { return "stub:langid:" + label_.tag; }

RuleLangId::RuleLangId(std::vector<Rule> rules, LanguageLabel fallback)
    : rules_(std::move(rules)), fallback_(std::move(fallback)) {}

std::vector<LanguageLabel> RuleLangId::detect(std::span<const std::string> texts) {
  std::vector<LanguageLabel> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    const Rule* hit = nullptr;
    for (const auto& r : rules_) {
      if (t.find(r.contains) != std::string::npos) {
        hit = &r;
        break;
      }
    }
    out.push_back(hit ? hit->label : fallback_);
  }
  return out;
}

std::string RuleLangId::id() const { return "stub:langid:rules"; }

namespace {

std::vector<RuleClassifier::Rule> builtin_classifier_rules() {
  // Seeded from the taxonomy subtopics; first match wins.
  return {
      {"prompt injection", 10}, {"adversarial", 10},    {"deepfake", 10},
      {"quantum", 10},          {"nation-state", 10},
      {"phishing", 9},          {"social engineering", 9}, {"pretexting", 9},
      {"insider threat", 9},    {"awareness training", 9},
      {"encryption", 8},        {"decryption", 8},       {"cryptograph", 8},
      {"pki", 8},               {"key management", 8},   {"tls", 8},
      {"hashing", 8},           {"cipher", 8},
      {"threat intelligence", 7}, {"threat hunting", 7}, {"malware", 7},
      {"ransomware", 7},        {"incident response", 7}, {"forensic", 7},
      {"apt", 7},               {"ioc", 7},              {"mitre", 7},
      {"siem", 6},              {"soar", 6},             {"soc ", 6},
      {"log management", 6},    {"detection engineering", 6},
      {"zero trust", 5},        {"authentication", 5},   {"authorization", 5},
      {"mfa", 5},               {"sso", 5},              {"rbac", 5},
      {"privileged access", 5},
      {"cloud", 4},             {"iam", 4},              {"data loss", 4},
      {"dlp", 4},
      {"sql injection", 3},     {"cross-site scripting", 3}, {"xss", 3},
      {"devsecops", 3},         {"api security", 3},     {"penetration test", 3},
      {"vulnerability", 3},     {"sbom", 3},             {"supply chain", 3},
      {"secure coding", 3},     {"buffer overflow", 3},  {"stack overflow", 3},
      {"firewall", 2},          {"vpn", 2},              {"wireless", 2},
      {"endpoint", 2},          {"iot", 2},              {"ics", 2},
      {"network security", 2},
      {"compliance", 1},        {"gdpr", 1},             {"hipaa", 1},
      {"iso 27001", 1},         {"nist", 1},             {"governance", 1},
      {"risk management", 1},   {"security policy", 1},  {"audit", 1},
  };
}

}  // namespace

RuleClassifier::RuleClassifier() : rules_(builtin_classifier_rules()) {}

RuleClassifier::RuleClassifier(std::vector<Rule> rules, int fallback_category)
    : rules_(std::move(rules)), fallback_(fallback_category) {}

std::vector<CategoryLabel> RuleClassifier::classify(std::span<const std::string> texts) {
  std::vector<CategoryLabel> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    std::string lower = text::lowercase(t);
    CategoryLabel label;
    label.category_id = fallback_;
    label.confidence = 0.30;
    for (const auto& r : rules_) {
      if (lower.find(r.contains) != std::string::npos) {
        label.category_id = r.category_id;
        label.confidence = 0.90;
        break;
      }
    }
    out.push_back(label);
  }
  return out;
}

std::string RuleClassifier::id() const { return "stub:classifier:rules"; }

HashEmbedder::HashEmbedder(int dim) : dim_(dim) {
  if (dim_ <= 0) throw std::invalid_argument("HashEmbedder dim must be positive");
}

std::vector<std::vector<double>> HashEmbedder::embed(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    std::vector<double> v(static_cast<std::size_t>(dim_), 0.0);
    std::string lower = text::lowercase(text::normalize(t));
    for (const auto& tok : text::tokenize_views(lower)) {
      auto h = text::hash128(tok);
      std::size_t slot = static_cast<std::size_t>(h.lo % static_cast<std::uint64_t>(dim_));
      double sign = (h.hi & 1) ? 1.0 : -1.0;
      v[slot] += sign;
    }
    out.push_back(std::move(v));
  }
  return out;
}

int HashEmbedder::dim() const { return dim_; }

std::string HashEmbedder::id() const { return "stub:embed:hash:dim=" + std::to_string(dim_) + ":v1"; }

FixedEmbedder::FixedEmbedder(int dim, std::vector<std::pair<std::string, std::vector<double>>> table)
    : dim_(dim), table_(std::move(table)) {}

std::vector<std::vector<double>> FixedEmbedder::embed(std::span<const std::string> texts) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = std::find_if(table_.begin(), table_.end(),
                           [&](const auto& e) { return e.first == t; });
    if (it == table_.end()) throw AdapterError("FixedEmbedder: no vector for text: " + t);
    out.push_back(it->second);
  }
  return out;
}

int FixedEmbedder::dim() const { return dim_; }

std::string FixedEmbedder::id() const { return "stub:embed:fixed:dim=" + std::to_string(dim_); }

ScriptedModelClient::ScriptedModelClient(std::vector<Rule> rules, std::string fallback,
                                         std::string name)
    : rules_(std::move(rules)), fallback_(std::move(fallback)), name_(std::move(name)) {}

ScriptedModelClient ScriptedModelClient::from_script_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw AdapterError("cannot open model script: " + path.string());
  json doc = json::parse(in);
  std::vector<Rule> rules;
  for (const auto& r : doc.value("rules", json::array())) {
    Rule rule;
    if (r.contains("contains")) rule.contains = r.at("contains").get<std::string>();
    if (r.contains("seed")) rule.seed = r.at("seed").get<std::uint64_t>();
    rule.respond = r.at("respond").get<std::string>();
    rules.push_back(std::move(rule));
  }
  return ScriptedModelClient(std::move(rules), doc.value("default", std::string{}),
                             doc.value("name", std::string{"mock:"} + path.stem().string()));
}

std::string ScriptedModelClient::complete(const ChatRequest& request) {
  std::string_view last_user;
  for (const auto& m : request.messages) {
    if (m.role == "user") last_user = m.content;
  }
  for (const auto& r : rules_) {
    if (r.seed && (!request.seed || *request.seed != *r.seed)) continue;
    if (r.contains && last_user.find(*r.contains) == std::string_view::npos) continue;
    return r.respond;
  }
  return fallback_;
}

std::string ScriptedModelClient::id() const { return name_; }

CallbackModelClient::CallbackModelClient(Fn fn, std::string name, bool safe)
    : fn_(std::move(fn)), name_(std::move(name)), safe_(safe) {}

std::string CallbackModelClient::complete(const ChatRequest& request) { return fn_(request); }

std::string CallbackModelClient::id() const { return name_; }

// ---- HTTP ------------------------------------------------------------------

namespace {

struct UrlParts {
  std::string base;  // scheme://host[:port]
  std::string path;  // /... (default "/")
};

UrlParts split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw AdapterError("bad adapter url: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

json post_json(const std::string& url, const json& payload, const RetryPolicy& policy) {
  UrlParts parts = split_url(url);
  httplib::Client client(parts.base);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(120, 0);

  int backoff = policy.backoff_ms;
  std::string last_error;
  for (int attempt = 0; attempt < std::max(1, policy.attempts); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
      backoff *= 2;
    }
    auto res = client.Post(parts.path, payload.dump(), "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error: HTTP " + std::to_string(res->status);
      continue;  // retryable
    }
    if (res->status != 200) {
      throw AdapterError("adapter " + url + " returned HTTP " + std::to_string(res->status));
    }
    try {
      return json::parse(res->body);
    } catch (const std::exception& e) {
      throw AdapterError("adapter " + url + " returned invalid JSON: " + e.what());
    }
  }
  throw AdapterError("adapter " + url + " failed after retries: " + last_error);
}

class HttpLangId final : public LangIdAdapter {
 public:
  HttpLangId(std::string url, RetryPolicy policy) : url_(std::move(url)), policy_(policy) {}

  std::vector<LanguageLabel> detect(std::span<const std::string> texts) override {
    json payload{{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
    json res = post_json(url_, payload, policy_);
    std::vector<LanguageLabel> out;
    for (const auto& l : res.at("labels")) {
      out.push_back({l.at("tag").get<std::string>(), l.at("confidence").get<double>()});
    }
    if (out.size() != texts.size()) throw AdapterError("langid: label count mismatch");
    return out;
  }

  std::string id() const override { return "http:" + url_; }

 private:
  std::string url_;
  RetryPolicy policy_;
};

class HttpClassifier final : public ClassifierAdapter {
 public:
  HttpClassifier(std::string url, RetryPolicy policy) : url_(std::move(url)), policy_(policy) {}

  std::vector<CategoryLabel> classify(std::span<const std::string> texts) override {
    json payload{{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
    json res = post_json(url_, payload, policy_);
    std::vector<CategoryLabel> out;
    for (const auto& l : res.at("labels")) {
      CategoryLabel label;
      label.category_id = l.at("category_id").get<int>();
      label.confidence = l.at("confidence").get<double>();
      if (label.category_id < 1 || label.category_id > 10) {
        throw AdapterError("classifier: category_id outside 1..10");
      }
      out.push_back(std::move(label));
    }
    if (out.size() != texts.size()) throw AdapterError("classifier: label count mismatch");
    return out;
  }

  std::string id() const override { return "http:" + url_; }

 private:
  std::string url_;
  RetryPolicy policy_;
};

class HttpEmbedder final : public EmbedAdapter {
 public:
  HttpEmbedder(std::string url, RetryPolicy policy) : url_(std::move(url)), policy_(policy) {}

  std::vector<std::vector<double>> embed(std::span<const std::string> texts) override {
    json payload{{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
    json res = post_json(url_, payload, policy_);
    int dim = res.at("dim").get<int>();
    if (dim_ == 0) {
      dim_ = dim;
      model_ = res.value("model", std::string{"unknown"});
    } else if (dim != dim_) {
      throw AdapterError("embed: dim mismatch across batches");
    }
    std::vector<std::vector<double>> out;
    for (const auto& v : res.at("vectors")) {
      auto vec = v.get<std::vector<double>>();
      if (static_cast<int>(vec.size()) != dim_) throw AdapterError("embed: vector length != dim");
      out.push_back(std::move(vec));
    }
    if (out.size() != texts.size()) throw AdapterError("embed: vector count mismatch");
    return out;
  }

  int dim() const override { return dim_; }

  std::string id() const override {
    return "http:" + url_ + (model_.empty() ? "" : ":" + model_);
  }

 private:
  std::string url_;
  RetryPolicy policy_;
  int dim_ = 0;
  std::string model_;
};

class HttpModelClient final : public ModelClient {
 public:
  HttpModelClient(std::string url, RetryPolicy policy) : url_(std::move(url)), policy_(policy) {}

  std::string complete(const ChatRequest& request) override {
    json messages = json::array();
    for (const auto& m : request.messages) {
      messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    json payload{{"messages", messages},
                 {"temperature", request.temperature},
                 {"max_tokens", request.max_tokens}};
    if (request.seed) payload["seed"] = *request.seed;
    json res = post_json(url_, payload, policy_);
    return res.at("text").get<std::string>();
  }

  std::string id() const override { return "http:" + url_; }

 private:
  std::string url_;
  RetryPolicy policy_;
};

// Offline judge: extracts the two texts from the judge prompt sentinels and
// votes TRUE_OVERLAP when their token Jaccard similarity reaches 0.5.
class JaccardJudgeClient final : public ModelClient {
 public:
  std::string complete(const ChatRequest& request) override {
    std::string_view prompt;
    for (const auto& m : request.messages) {
      if (m.role == "user") prompt = m.content;
    }
    auto section = [&](std::string_view open) -> std::string_view {
      auto b = prompt.find(open);
      if (b == std::string_view::npos) return {};
      b += open.size();
      auto e = prompt.find("<<<END>>>", b);
      if (e == std::string_view::npos) return {};
      return prompt.substr(b, e - b);
    };
    std::string_view a = section("<<<A>>>\n");
    std::string_view b = section("<<<B>>>\n");
    double jac = jaccard(a, b);
    std::string verdict = jac >= 0.5 ? "TRUE_OVERLAP" : "FALSE_POSITIVE";
    return "Token overlap " + std::to_string(jac) + ".\nVERDICT: " + verdict;
  }

  std::string id() const override { return "stub:judge:jaccard:v1"; }
  bool thread_safe() const override { return true; }

 private:
  static double jaccard(std::string_view a, std::string_view b) {
    auto keys = [](std::string_view s) {
      std::unordered_set<std::string> out;
      for (const auto& t : text::tokenize_views(text::lowercase(s))) out.insert(text::match_key(t));
      out.erase("");
      return out;
    };
    auto sa = keys(a);
    auto sb = keys(b);
    if (sa.empty() && sb.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& k : sa) inter += sb.count(k);
    std::size_t uni = sa.size() + sb.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
  }
};

bool has_prefix(const std::string& s, std::string_view prefix) {
  return s.rfind(prefix, 0) == 0;
}

}  // namespace

std::unique_ptr<LangIdAdapter> make_http_langid(const std::string& url, RetryPolicy policy) {
  return std::make_unique<HttpLangId>(url, policy);
}
std::unique_ptr<ClassifierAdapter> make_http_classifier(const std::string& url,
                                                        RetryPolicy policy) {
  return std::make_unique<HttpClassifier>(url, policy);
}
std::unique_ptr<EmbedAdapter> make_http_embedder(const std::string& url, RetryPolicy policy) {
  return std::make_unique<HttpEmbedder>(url, policy);
}
std::unique_ptr<ModelClient> make_http_model(const std::string& url, RetryPolicy policy) {
  return std::make_unique<HttpModelClient>(url, policy);
}

std::unique_ptr<LangIdAdapter> make_langid(const std::string& url, RetryPolicy policy) {
  if (url.empty()) throw AdapterError("langid adapter not configured (adapters.langid.url)");
  if (has_prefix(url, "http://") || has_prefix(url, "https://")) {
    return make_http_langid(url, policy);
  }
  if (url == "stub:en") return std::make_unique<ConstantLangId>("en", 1.0);
  if (has_prefix(url, "stub:constant:")) {
    return std::make_unique<ConstantLangId>(url.substr(14), 1.0);
  }
  throw AdapterError("unknown langid adapter: " + url);
}

std::unique_ptr<ClassifierAdapter> make_classifier(const std::string& url, RetryPolicy policy) {
  if (url.empty()) throw AdapterError("classifier adapter not configured (adapters.classifier.url)");
  if (has_prefix(url, "http://") || has_prefix(url, "https://")) {
    return make_http_classifier(url, policy);
  }
  if (url == "stub:rules") return std::make_unique<RuleClassifier>();
  throw AdapterError("unknown classifier adapter: " + url);
}

std::unique_ptr<EmbedAdapter> make_embedder(const std::string& url, RetryPolicy policy) {
  if (url.empty()) throw AdapterError("embed adapter not configured (adapters.embed.url)");
  if (has_prefix(url, "http://") || has_prefix(url, "https://")) {
    return make_http_embedder(url, policy);
  }
  if (url == "stub:hash") return std::make_unique<HashEmbedder>();
  if (has_prefix(url, "stub:hash:dim=")) {
    return std::make_unique<HashEmbedder>(std::stoi(url.substr(14)));
  }
  throw AdapterError("unknown embed adapter: " + url);
}

std::unique_ptr<ModelClient> make_model(const std::string& url, RetryPolicy policy) {
  if (url.empty()) throw AdapterError("model adapter not configured (adapters.model.url)");
  if (has_prefix(url, "http://") || has_prefix(url, "https://")) {
    return make_http_model(url, policy);
  }
  if (url == "stub:judge") return std::make_unique<JaccardJudgeClient>();
  if (has_prefix(url, "mock:")) {
    return std::make_unique<ScriptedModelClient>(
        ScriptedModelClient::from_script_file(url.substr(5)));
  }
  throw AdapterError("unknown model adapter: " + url);
}

// ---- embedding cache -------------------------------------------------------

namespace {

std::string sanitize(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '=' &&
        c != '.') {
      c = '_';
    }
  }
  return out;
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::filesystem::path root, std::string adapter_id)
    : dir_(root / "embeddings" / sanitize(adapter_id)) {
  std::filesystem::create_directories(dir_);
}

std::optional<std::vector<double>> EmbeddingCache::get(std::string_view text) const {
  auto path = dir_ / (text::to_hex(text::hash128(text)) + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    json doc = json::parse(in);
    return doc.get<std::vector<double>>();
  } catch (const std::exception&) {
    return std::nullopt;  // corrupt entries are recomputed
  }
}

void EmbeddingCache::put(std::string_view text, std::span<const double> vec) const {
  auto path = dir_ / (text::to_hex(text::hash128(text)) + ".json");
  std::ofstream out(path, std::ios::trunc);
  out << json(std::vector<double>(vec.begin(), vec.end())).dump();
}

std::vector<std::vector<double>> embed_cached(EmbedAdapter& adapter,
                                              std::span<const std::string> texts,
                                              const EmbeddingCache* cache,
                                              std::size_t batch_size) {
  std::vector<std::vector<double>> out(texts.size());
  std::vector<std::size_t> misses;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (cache) {
      if (auto hit = cache->get(texts[i])) {
        out[i] = std::move(*hit);
        continue;
      }
    }
    misses.push_back(i);
  }
  for (std::size_t start = 0; start < misses.size(); start += batch_size) {
    std::size_t count = std::min(batch_size, misses.size() - start);
    std::vector<std::string> batch;
    batch.reserve(count);
    for (std::size_t k = 0; k < count; ++k) batch.push_back(texts[misses[start + k]]);
    auto vecs = adapter.embed(batch);
    if (vecs.size() != count) throw AdapterError("embed: vector count mismatch");
    for (std::size_t k = 0; k < count; ++k) {
      if (cache) cache->put(batch[k], vecs[k]);
      out[misses[start + k]] = std::move(vecs[k]);
    }
  }
  return out;
}

}  // namespace secaudit::adapters
