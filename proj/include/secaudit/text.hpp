#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace secaudit::text {

// Deterministic text normalization:
//   1. whitespace-delimited chunks containing a URL (http(s):// anywhere,
//      or "www." at a token boundary) or an e-mail address are dropped,
//   2. characters outside [A-Za-z0-9] and basic punctuation .,:;?!'-/ map
//      to space,
//   3. whitespace runs collapse to single spaces, edges trimmed.
// Idempotent. Casing is preserved; consumers lowercase as needed.
std::string normalize(std::string_view raw);

std::string lowercase(std::string_view s);

// Whitespace-split tokens.
std::vector<std::string> tokenize(std::string_view s);
std::vector<std::string_view> tokenize_views(std::string_view s);

struct TokenSpan {
  std::string_view token;
  std::size_t begin = 0;  // char offset of first byte
  std::size_t end = 0;    // one past last byte
};
std::vector<TokenSpan> tokenize_spans(std::string_view s);

// Comparison form of a token for keyword matching: edge punctuation
// stripped, lowercased. Interior punctuation (zero-day, 11200-9.1) stays.
std::string match_key(std::string_view token);

bool is_basic_punct(char c);

struct Hash128 {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;
  friend bool operator==(const Hash128&, const Hash128&) = default;
  friend auto operator<=>(const Hash128&, const Hash128&) = default;
};

// Streaming 128-bit content hash (non-cryptographic, stable across runs
// and platforms). Used for n-gram fingerprints, cache keys and manifests.
class Hasher128 {
 public:
  void update(std::string_view bytes);
  void update_byte(unsigned char b);
  Hash128 digest() const;

 private:
  std::uint64_t a_ = 0xcbf29ce484222325ULL;
  std::uint64_t b_ = 0x9e3779b97f4a7c15ULL;
  std::uint64_t len_ = 0;
};

Hash128 hash128(std::string_view bytes);
std::string to_hex(const Hash128& h);

}  // namespace secaudit::text
