#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "secaudit/adapters.hpp"

namespace secaudit::taxonomy {

struct TaxonomyCategory {
  int id = 0;  // 1..10
  std::string name;
  std::vector<std::string> subtopics;

  friend bool operator==(const TaxonomyCategory&, const TaxonomyCategory&) = default;
};

inline constexpr int kCategoryCount = 10;

// The ten-category cybersecurity taxonomy, compiled in.
const std::vector<TaxonomyCategory>& builtin_taxonomy();

// Loads the taxonomy from its JSON data file; format:
// [{"id":1,"name":"...","subtopics":["..."]}, ...]
std::vector<TaxonomyCategory> load_taxonomy(const std::filesystem::path& path);

// label confidence below this is reported as low-confidence, never dropped
inline constexpr double kLowConfidence = 0.5;

// Batched pass-through to the classifier adapter; one label per text in
// input order, sample ids attached. Rejects out-of-range category ids.
std::vector<adapters::CategoryLabel> classify_category(
    adapters::ClassifierAdapter& classifier, std::span<const std::string> sample_ids,
    std::span<const std::string> texts, std::size_t batch_size = 64);

struct CategoryDistribution {
  std::array<std::size_t, kCategoryCount> counts{};
  std::array<double, kCategoryCount> fractions{};
  std::size_t total = 0;
};

CategoryDistribution aggregate_distribution(std::span<const adapters::CategoryLabel> labels);

}  // namespace secaudit::taxonomy
