#include "secaudit/config.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace secaudit::config {

using ordered_json = nlohmann::ordered_json;

namespace {

void apply_file(Config& cfg, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config file: " + file.string());
  ordered_json doc = ordered_json::parse(in);

  if (auto a = doc.find("adapters"); a != doc.end()) {
    auto url = [&](const char* key, std::string& target) {
      if (auto it = a->find(key); it != a->end()) {
        target = it->at("url").get<std::string>();
      }
    };
    url("langid", cfg.adapters.langid);
    url("classifier", cfg.adapters.classifier);
    url("embed", cfg.adapters.embed);
    url("judge", cfg.adapters.judge);
    url("model", cfg.adapters.model);
  }
  if (auto t = doc.find("thresholds"); t != doc.end()) {
    cfg.thresholds.keyword_threshold = t->value("keyword_threshold", cfg.thresholds.keyword_threshold);
    cfg.thresholds.ngram_n = t->value("ngram_n", cfg.thresholds.ngram_n);
    cfg.thresholds.ng_flag_fraction = t->value("ng_flag_fraction", cfg.thresholds.ng_flag_fraction);
    cfg.thresholds.es_band_lo = t->value("es_band_lo", cfg.thresholds.es_band_lo);
    cfg.thresholds.es_flag_threshold =
        t->value("es_flag_threshold", cfg.thresholds.es_flag_threshold);
    cfg.thresholds.es_band_hi = t->value("es_band_hi", cfg.thresholds.es_band_hi);
  }
  if (auto t = doc.find("trials"); t != doc.end()) {
    cfg.trials.trials = t->value("trials", cfg.trials.trials);
    cfg.trials.temperature = t->value("temperature", cfg.trials.temperature);
    cfg.trials.max_tokens = t->value("max_tokens", cfg.trials.max_tokens);
    cfg.trials.vsp_max_tokens = t->value("vsp_max_tokens", cfg.trials.vsp_max_tokens);
  }
  cfg.seed = doc.value("seed", cfg.seed);
  cfg.cache_dir = doc.value("cache_dir", cfg.cache_dir);
}

void apply_env(Config& cfg) {
  auto env_str = [](const char* name, std::string& target) {
    if (const char* v = std::getenv(name)) target = v;
  };
  auto env_int = [](const char* name, int& target) {
    if (const char* v = std::getenv(name)) target = std::stoi(v);
  };
  auto env_double = [](const char* name, double& target) {
    if (const char* v = std::getenv(name)) target = std::stod(v);
  };
  env_str("SECAUDIT_ADAPTERS_LANGID_URL", cfg.adapters.langid);
  env_str("SECAUDIT_ADAPTERS_CLASSIFIER_URL", cfg.adapters.classifier);
  env_str("SECAUDIT_ADAPTERS_EMBED_URL", cfg.adapters.embed);
  env_str("SECAUDIT_ADAPTERS_JUDGE_URL", cfg.adapters.judge);
  env_str("SECAUDIT_ADAPTERS_MODEL_URL", cfg.adapters.model);
  env_int("SECAUDIT_THRESHOLDS_KEYWORD_THRESHOLD", cfg.thresholds.keyword_threshold);
  env_int("SECAUDIT_THRESHOLDS_NGRAM_N", cfg.thresholds.ngram_n);
  env_double("SECAUDIT_THRESHOLDS_NG_FLAG_FRACTION", cfg.thresholds.ng_flag_fraction);
  env_double("SECAUDIT_THRESHOLDS_ES_BAND_LO", cfg.thresholds.es_band_lo);
  env_double("SECAUDIT_THRESHOLDS_ES_FLAG_THRESHOLD", cfg.thresholds.es_flag_threshold);
  env_double("SECAUDIT_THRESHOLDS_ES_BAND_HI", cfg.thresholds.es_band_hi);
  env_int("SECAUDIT_TRIALS_TRIALS", cfg.trials.trials);
  env_double("SECAUDIT_TRIALS_TEMPERATURE", cfg.trials.temperature);
  env_int("SECAUDIT_TRIALS_MAX_TOKENS", cfg.trials.max_tokens);
  env_int("SECAUDIT_TRIALS_VSP_MAX_TOKENS", cfg.trials.vsp_max_tokens);
  if (const char* v = std::getenv("SECAUDIT_SEED")) cfg.seed = std::stoull(v);
  env_str("SECAUDIT_CACHE_DIR", cfg.cache_dir);
}

}  // namespace

Config load_config(const std::optional<std::filesystem::path>& file) {
  Config cfg;
  if (file) apply_file(cfg, *file);
  apply_env(cfg);
  validate(cfg);
  return cfg;
}

void validate(const Config& cfg) {
  const auto& t = cfg.thresholds;
  if (t.keyword_threshold < 1) throw std::runtime_error("config: keyword_threshold must be >= 1");
  if (t.ngram_n < 2) throw std::runtime_error("config: ngram_n must be >= 2");
  if (!(t.ng_flag_fraction > 0.0 && t.ng_flag_fraction < 1.0)) {
    throw std::runtime_error("config: ng_flag_fraction must be in (0, 1)");
  }
  if (!(0.0 < t.es_band_lo && t.es_band_lo <= t.es_flag_threshold &&
        t.es_flag_threshold <= t.es_band_hi && t.es_band_hi <= 1.0)) {
    throw std::runtime_error("config: require 0 < es_band_lo <= es_flag_threshold <= es_band_hi <= 1");
  }
  if (cfg.trials.trials < 1) throw std::runtime_error("config: trials must be >= 1");
  if (cfg.trials.temperature < 0.0) throw std::runtime_error("config: temperature must be >= 0");
  if (cfg.trials.max_tokens < 1 || cfg.trials.vsp_max_tokens < 1) {
    throw std::runtime_error("config: max_tokens must be >= 1");
  }
}

std::string config_snapshot_json(const Config& cfg) {
  ordered_json j;
  j["adapters"] = {
      {"langid", {{"url", cfg.adapters.langid}}},
      {"classifier", {{"url", cfg.adapters.classifier}}},
      {"embed", {{"url", cfg.adapters.embed}}},
      {"judge", {{"url", cfg.adapters.judge}}},
      {"model", {{"url", cfg.adapters.model}}},
  };
  j["thresholds"] = {
      {"keyword_threshold", cfg.thresholds.keyword_threshold},
      {"ngram_n", cfg.thresholds.ngram_n},
      {"ng_flag_fraction", cfg.thresholds.ng_flag_fraction},
      {"es_band_lo", cfg.thresholds.es_band_lo},
      {"es_flag_threshold", cfg.thresholds.es_flag_threshold},
      {"es_band_hi", cfg.thresholds.es_band_hi},
  };
  j["trials"] = {
      {"trials", cfg.trials.trials},
      {"temperature", cfg.trials.temperature},
      {"max_tokens", cfg.trials.max_tokens},
      {"vsp_max_tokens", cfg.trials.vsp_max_tokens},
  };
  j["seed"] = cfg.seed;
  j["cache_dir"] = cfg.cache_dir;
  return j.dump();
}

}  // namespace secaudit::config
