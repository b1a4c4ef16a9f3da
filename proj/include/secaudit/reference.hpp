#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "secaudit/contam.hpp"
#include "secaudit/secprofile.hpp"

// Serial reference implementations. Deliberately naive: every phrase tested
// at every token position, all-pairs sliding-window comparison, exhaustive
// cosine scan. They are the ground truth the parallel kernels are checked
// against, and the baseline side of the benchmark target. Keep them simple;
// do not "optimize" them toward the production code paths.
namespace secaudit::reference {

// Naive keyword scan over normalized text.
std::vector<secprofile::PhraseCount> match_keywords_naive(std::string_view normalized_text,
                                                          const secprofile::KeywordBank& bank);

// All-pairs n-gram overlap: compares token windows by value, no index.
contam::NgramOverlap ngram_overlap_naive(std::span<const std::string> item_tokens,
                                         std::span<const contam::Doc> corpus, int n,
                                         double flag_fraction);

// Exhaustive cosine scan over the store, same band semantics as
// contam::semantic_candidates.
std::vector<contam::Candidate> semantic_candidates_naive(std::span<const double> query,
                                                         const contam::EmbeddingStore& store,
                                                         double lo, double hi);

}  // namespace secaudit::reference
