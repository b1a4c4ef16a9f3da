#include "secaudit/text.hpp"

#include <algorithm>
#include <cctype>

namespace secaudit::text {

namespace {

bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }
bool is_space(unsigned char c) { return std::isspace(c) != 0; }

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view lit) {
  if (pos + lit.size() > s.size()) return false;
  for (std::size_t i = 0; i < lit.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != lit[i]) return false;
  }
  return true;
}

bool contains_url(std::string_view chunk) {
  for (std::size_t i = 0; i < chunk.size(); ++i) {
    if (starts_with_ci(chunk, i, "http://") || starts_with_ci(chunk, i, "https://")) return true;
    // "www." counts only at a token boundary, so that e.g. "awww.ok"
    // survives and normalization stays idempotent.
    if (starts_with_ci(chunk, i, "www.") &&
        (i == 0 || !is_alnum(static_cast<unsigned char>(chunk[i - 1])))) {
      return true;
    }
  }
  return false;
}

bool is_local_char(unsigned char c) {
  return is_alnum(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '\'' || c == '-';
}

// RFC-lite: <local>@<label>(.<label>)+ with an alphabetic TLD of length >= 2.
bool contains_email(std::string_view chunk) {
  for (std::size_t q = 1; q + 1 < chunk.size(); ++q) {
    if (chunk[q] != '@') continue;
    if (!is_local_char(static_cast<unsigned char>(chunk[q - 1]))) continue;
    std::size_t d = q + 1;
    std::size_t end = d;
    while (end < chunk.size()) {
      unsigned char c = static_cast<unsigned char>(chunk[end]);
      if (is_alnum(c) || c == '.' || c == '-') {
        ++end;
      } else {
        break;
      }
    }
    std::string_view domain = chunk.substr(d, end - d);
    while (!domain.empty() && (domain.back() == '.' || domain.back() == '-')) {
      domain.remove_suffix(1);
    }
    auto dot = domain.rfind('.');
    if (dot == std::string_view::npos || dot + 1 >= domain.size()) continue;
    std::string_view tld = domain.substr(dot + 1);
    if (tld.size() < 2) continue;
    bool alpha = std::all_of(tld.begin(), tld.end(), [](unsigned char c) {
      return std::isalpha(c) != 0;
    });
    if (alpha) return true;
  }
  return false;
}

}  // namespace

bool is_basic_punct(char c) {
  switch (c) {
    case '.': case ',': case ':': case ';': case '?':
    case '!': case '\'': case '-': case '/':
      return true;
    default:
      return false;
  }
}

std::string normalize(std::string_view raw) {
  std::string kept;
  kept.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && is_space(static_cast<unsigned char>(raw[i]))) ++i;
    std::size_t start = i;
    while (i < raw.size() && !is_space(static_cast<unsigned char>(raw[i]))) ++i;
    if (i == start) continue;
    std::string_view chunk = raw.substr(start, i - start);
    if (contains_url(chunk) || contains_email(chunk)) continue;
    if (!kept.empty()) kept.push_back(' ');
    kept.append(chunk);
  }

  std::string out;
  out.reserve(kept.size());
  bool pending_space = false;
  for (char ch : kept) {
    unsigned char c = static_cast<unsigned char>(ch);
    bool allowed = is_alnum(c) || is_basic_punct(ch);
    if (!allowed || is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(ch);
  }
  return out;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  for (auto v : tokenize_views(s)) out.emplace_back(v);
  return out;
}

std::vector<std::string_view> tokenize_views(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_space(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<TokenSpan> tokenize_spans(std::string_view s) {
  std::vector<TokenSpan> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t start = i;
    while (i < s.size() && !is_space(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back({s.substr(start, i - start), start, i});
  }
  return out;
}

std::string match_key(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && !is_alnum(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && !is_alnum(static_cast<unsigned char>(token[e - 1]))) --e;
  return lowercase(token.substr(b, e - b));
}

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

void Hasher128::update_byte(unsigned char b) {
  a_ = (a_ ^ b) * 0x100000001b3ULL;
  b_ = (b_ ^ b) * 0xc6a4a7935bd1e995ULL;
  b_ = (b_ << 29) | (b_ >> 35);
  ++len_;
}

void Hasher128::update(std::string_view bytes) {
  for (char c : bytes) update_byte(static_cast<unsigned char>(c));
}

Hash128 Hasher128::digest() const {
  std::uint64_t h1 = mix64(a_ ^ len_);
  std::uint64_t h2 = mix64(b_ + 0x9e3779b97f4a7c15ULL * len_);
  return {mix64(h1 + h2), mix64(h2 ^ h1)};
}

Hash128 hash128(std::string_view bytes) {
  Hasher128 h;
  h.update(bytes);
  return h.digest();
}

std::string to_hex(const Hash128& h) {
  static const char* digits = "0123456789abcdef";
  std::string out(32, '0');
  std::uint64_t parts[2] = {h.hi, h.lo};
  for (int p = 0; p < 2; ++p) {
    for (int i = 0; i < 16; ++i) {
      out[p * 16 + i] = digits[(parts[p] >> (60 - 4 * i)) & 0xf];
    }
  }
  return out;
}

}  // namespace secaudit::text
