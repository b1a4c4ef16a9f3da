#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace secaudit::config {

struct AdapterUrls {
  std::string langid = "stub:en";
  std::string classifier = "stub:rules";
  std::string embed = "stub:hash";
  std::string judge = "stub:judge";
  std::string model;  // required by eval; "mock:<script.json>" for offline runs
};

struct Thresholds {
  int keyword_threshold = 1;
  int ngram_n = 8;
  double ng_flag_fraction = 0.5;
  double es_band_lo = 0.75;
  double es_flag_threshold = 0.8;
  double es_band_hi = 0.95;
};

struct TrialSettings {
  int trials = 10;
  double temperature = 0.3;
  int max_tokens = 512;       // mcqa / rcm
  int vsp_max_tokens = 1000;  // vsp needs room for per-metric reasoning
};

struct Config {
  AdapterUrls adapters;
  Thresholds thresholds;
  TrialSettings trials;
  std::uint64_t seed = 0;
  std::string cache_dir = "cache";
};

// Precedence: flags (applied by the CLI) > SECAUDIT_* environment > file >
// defaults. Throws on unreadable/invalid files and invariant violations.
Config load_config(const std::optional<std::filesystem::path>& file);

void validate(const Config& cfg);

// Deterministic JSON snapshot, embedded in manifests and reports.
std::string config_snapshot_json(const Config& cfg);

}  // namespace secaudit::config
