#include "secaudit/reference.hpp"

#include <algorithm>
#include <map>

#include "secaudit/text.hpp"

namespace secaudit::reference {

std::vector<secprofile::PhraseCount> match_keywords_naive(std::string_view normalized_text,
                                                          const secprofile::KeywordBank& bank) {
  if (bank.keywords.empty()) throw std::runtime_error("keyword bank is empty");
  std::vector<std::string> keys;
  for (const auto& tok : text::tokenize_views(normalized_text)) {
    keys.push_back(text::match_key(tok));
  }

  std::vector<secprofile::PhraseCount> out;
  for (const auto& phrase : bank.keywords) {
    std::string norm = text::normalize(phrase);
    std::vector<std::string> words;
    for (const auto& w : text::tokenize_views(norm)) words.push_back(text::match_key(w));
    int count = 0;
    for (std::size_t i = 0; i + words.size() <= keys.size(); ++i) {
      bool hit = true;
      for (std::size_t k = 0; k < words.size(); ++k) {
        if (keys[i + k] != words[k]) {
          hit = false;
          break;
        }
      }
      if (hit) ++count;
    }
    if (count > 0) out.push_back({phrase, count});
  }
  return out;
}

contam::NgramOverlap ngram_overlap_naive(std::span<const std::string> item_tokens,
                                         std::span<const contam::Doc> corpus, int n,
                                         double flag_fraction) {
  contam::NgramOverlap result;
  const std::size_t T = item_tokens.size();
  if (T < static_cast<std::size_t>(n)) return result;

  for (std::uint32_t d = 0; d < corpus.size(); ++d) {
    const auto& doc_tokens = corpus[d].tokens;
    if (doc_tokens.size() < static_cast<std::size_t>(n)) continue;
    std::vector<bool> covered(T, false);
    bool any = false;
    for (std::size_t k = 0; k + static_cast<std::size_t>(n) <= T; ++k) {
      for (std::size_t j = 0; j + static_cast<std::size_t>(n) <= doc_tokens.size(); ++j) {
        bool equal = true;
        for (int m = 0; m < n; ++m) {
          if (item_tokens[k + static_cast<std::size_t>(m)] !=
              doc_tokens[j + static_cast<std::size_t>(m)]) {
            equal = false;
            break;
          }
        }
        if (equal) {
          any = true;
          for (int m = 0; m < n; ++m) covered[k + static_cast<std::size_t>(m)] = true;
          break;  // one occurrence suffices to cover this window
        }
      }
    }
    if (!any) continue;
    std::size_t c = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));
    double cov = static_cast<double>(c) / static_cast<double>(T);
    result.coverage = std::max(result.coverage, cov);
    if (cov > flag_fraction) {
      result.flagged = true;
      result.flagged_docs.push_back({d, cov});
    }
  }
  return result;
}

std::vector<contam::Candidate> semantic_candidates_naive(std::span<const double> query,
                                                         const contam::EmbeddingStore& store,
                                                         double lo, double hi) {
  std::vector<contam::Candidate> out;
  for (std::size_t i = 0; i < store.size(); ++i) {
    double c = contam::cosine(query, store.vec(i));
    if (c >= lo && c <= hi) out.push_back({static_cast<std::uint32_t>(i), c});
  }
  std::sort(out.begin(), out.end(), [](const contam::Candidate& a, const contam::Candidate& b) {
    if (a.cosine != b.cosine) return a.cosine > b.cosine;
    return a.index < b.index;
  });
  return out;
}

}  // namespace secaudit::reference
