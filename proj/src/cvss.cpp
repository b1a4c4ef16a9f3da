#include "secaudit/cvss.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace secaudit::cvss {

namespace {

char letter(AttackVector v) {
  switch (v) {
    case AttackVector::network: return 'N';
    case AttackVector::adjacent: return 'A';
    case AttackVector::local: return 'L';
    case AttackVector::physical: return 'P';
  }
  return '?';
}
char letter(AttackComplexity v) { return v == AttackComplexity::low ? 'L' : 'H'; }
char letter(PrivilegesRequired v) {
  switch (v) {
    case PrivilegesRequired::none: return 'N';
    case PrivilegesRequired::low: return 'L';
    case PrivilegesRequired::high: return 'H';
  }
  return '?';
}
char letter(UserInteraction v) { return v == UserInteraction::none ? 'N' : 'R'; }
char letter(Scope v) { return v == Scope::unchanged ? 'U' : 'C'; }
char letter(ImpactLevel v) {
  switch (v) {
    case ImpactLevel::none: return 'N';
    case ImpactLevel::low: return 'L';
    case ImpactLevel::high: return 'H';
  }
  return '?';
}

bool set_av(CvssVector& v, char c) {
  switch (c) {
    case 'N': v.av = AttackVector::network; return true;
    case 'A': v.av = AttackVector::adjacent; return true;
    case 'L': v.av = AttackVector::local; return true;
    case 'P': v.av = AttackVector::physical; return true;
  }
  return false;
}
bool set_ac(CvssVector& v, char c) {
  if (c == 'L') { v.ac = AttackComplexity::low; return true; }
  if (c == 'H') { v.ac = AttackComplexity::high; return true; }
  return false;
}
bool set_pr(CvssVector& v, char c) {
  switch (c) {
    case 'N': v.pr = PrivilegesRequired::none; return true;
    case 'L': v.pr = PrivilegesRequired::low; return true;
    case 'H': v.pr = PrivilegesRequired::high; return true;
  }
  return false;
}
bool set_ui(CvssVector& v, char c) {
  if (c == 'N') { v.ui = UserInteraction::none; return true; }
  if (c == 'R') { v.ui = UserInteraction::required; return true; }
  return false;
}
bool set_s(CvssVector& v, char c) {
  if (c == 'U') { v.s = Scope::unchanged; return true; }
  if (c == 'C') { v.s = Scope::changed; return true; }
  return false;
}
bool set_impact(ImpactLevel& f, char c) {
  switch (c) {
    case 'N': f = ImpactLevel::none; return true;
    case 'L': f = ImpactLevel::low; return true;
    case 'H': f = ImpactLevel::high; return true;
  }
  return false;
}

constexpr std::string_view kPrefix = "CVSS:3.1/";

bool vector_char(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || c == ':' || c == '.' || c == '/';
}

std::optional<CvssVector> parse_candidate(std::string_view body) {
  // body: upper-cased "AV:N/AC:L/..." field run, any order.
  CvssVector v;
  bool seen[8] = {};
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto slash = body.find('/', pos);
    std::string_view field = body.substr(pos, slash == std::string_view::npos ? body.size() - pos
                                                                              : slash - pos);
    pos = slash == std::string_view::npos ? body.size() : slash + 1;
    if (field.empty()) return std::nullopt;
    auto colon = field.find(':');
    if (colon == std::string_view::npos || colon + 2 != field.size()) return std::nullopt;
    std::string_view key = field.substr(0, colon);
    char val = field[colon + 1];
    int idx = -1;
    bool ok = false;
    if (key == "AV") { idx = 0; ok = set_av(v, val); }
    else if (key == "AC") { idx = 1; ok = set_ac(v, val); }
    else if (key == "PR") { idx = 2; ok = set_pr(v, val); }
    else if (key == "UI") { idx = 3; ok = set_ui(v, val); }
    else if (key == "S") { idx = 4; ok = set_s(v, val); }
    else if (key == "C") { idx = 5; ok = set_impact(v.c, val); }
    else if (key == "I") { idx = 6; ok = set_impact(v.i, val); }
    else if (key == "A") { idx = 7; ok = set_impact(v.a, val); }
    else return std::nullopt;  // non-base metric or junk key
    if (!ok || seen[idx]) return std::nullopt;
    seen[idx] = true;
  }
  for (bool s : seen) {
    if (!s) return std::nullopt;
  }
  return v;
}

}  // namespace

std::string CvssVector::to_string() const {
  std::string out = "CVSS:3.1/AV:";
  out += letter(av);
  out += "/AC:"; out += letter(ac);
  out += "/PR:"; out += letter(pr);
  out += "/UI:"; out += letter(ui);
  out += "/S:"; out += letter(s);
  out += "/C:"; out += letter(c);
  out += "/I:"; out += letter(i);
  out += "/A:"; out += letter(a);
  return out;
}

std::optional<CvssVector> parse_cvss_vector(std::string_view model_output) {
  // Locate the last prefix occurrence, case-insensitively.
  std::size_t start = std::string_view::npos;
  for (std::size_t i = 0; i + kPrefix.size() <= model_output.size(); ++i) {
    bool hit = true;
    for (std::size_t j = 0; j < kPrefix.size(); ++j) {
      if (std::toupper(static_cast<unsigned char>(model_output[i + j])) != kPrefix[j]) {
        hit = false;
        break;
      }
    }
    if (hit) start = i;
  }
  if (start == std::string_view::npos) return std::nullopt;

  std::size_t end = start + kPrefix.size();
  while (end < model_output.size() && vector_char(model_output[end])) ++end;
  std::string candidate(model_output.substr(start + kPrefix.size(), end - start - kPrefix.size()));
  std::transform(candidate.begin(), candidate.end(), candidate.begin(), [](unsigned char c) {
    return static_cast<char>(std::toupper(c));
  });
  // Trailing sentence punctuation that got swept into the char run.
  while (!candidate.empty() &&
         !std::isalnum(static_cast<unsigned char>(candidate.back()))) {
    candidate.pop_back();
  }
  return parse_candidate(candidate);
}

namespace {

double av_weight(AttackVector v) {
  switch (v) {
    case AttackVector::network: return 0.85;
    case AttackVector::adjacent: return 0.62;
    case AttackVector::local: return 0.55;
    case AttackVector::physical: return 0.20;
  }
  return 0.0;
}
double ac_weight(AttackComplexity v) { return v == AttackComplexity::low ? 0.77 : 0.44; }
double pr_weight(PrivilegesRequired v, Scope s) {
  switch (v) {
    case PrivilegesRequired::none: return 0.85;
    case PrivilegesRequired::low: return s == Scope::changed ? 0.68 : 0.62;
    case PrivilegesRequired::high: return s == Scope::changed ? 0.50 : 0.27;
  }
  return 0.0;
}
double ui_weight(UserInteraction v) { return v == UserInteraction::none ? 0.85 : 0.62; }
double cia_weight(ImpactLevel v) {
  switch (v) {
    case ImpactLevel::none: return 0.0;
    case ImpactLevel::low: return 0.22;
    case ImpactLevel::high: return 0.56;
  }
  return 0.0;
}

// v3.1 Roundup: one decimal, ties absorbed at the 1e-5 digit.
double roundup(double x) {
  long long n = std::llround(x * 100000.0);
  if (n % 10000 == 0) return static_cast<double>(n) / 100000.0;
  return static_cast<double>(n / 10000 + 1) / 10.0;
}

}  // namespace

double cvss_base_score(const CvssVector& v) {
  const double c = cia_weight(v.c);
  const double i = cia_weight(v.i);
  const double a = cia_weight(v.a);
  const double iss = 1.0 - (1.0 - c) * (1.0 - i) * (1.0 - a);
  double impact;
  if (v.s == Scope::unchanged) {
    impact = 6.42 * iss;
  } else {
    impact = 7.52 * (iss - 0.029) - 3.25 * std::pow(iss - 0.02, 15.0);
  }
  if (impact <= 0.0) return 0.0;
  const double exploitability =
      8.22 * av_weight(v.av) * ac_weight(v.ac) * pr_weight(v.pr, v.s) * ui_weight(v.ui);
  if (v.s == Scope::unchanged) {
    return roundup(std::min(impact + exploitability, 10.0));
  }
  return roundup(std::min(1.08 * (impact + exploitability), 10.0));
}

std::vector<CvssVector> all_base_vectors() {
  using AV = AttackVector;
  using AC = AttackComplexity;
  using PR = PrivilegesRequired;
  using UI = UserInteraction;
  using IL = ImpactLevel;
  static constexpr std::array<AV, 4> avs{AV::network, AV::adjacent, AV::local, AV::physical};
  static constexpr std::array<AC, 2> acs{AC::low, AC::high};
  static constexpr std::array<PR, 3> prs{PR::none, PR::low, PR::high};
  static constexpr std::array<UI, 2> uis{UI::none, UI::required};
  static constexpr std::array<Scope, 2> ss{Scope::unchanged, Scope::changed};
  static constexpr std::array<IL, 3> ils{IL::none, IL::low, IL::high};

  std::vector<CvssVector> out;
  out.reserve(2592);
  for (auto av : avs)
    for (auto ac : acs)
      for (auto pr : prs)
        for (auto ui : uis)
          for (auto s : ss)
            for (auto c : ils)
              for (auto i : ils)
                for (auto a : ils) out.push_back({av, ac, pr, ui, s, c, i, a});
  return out;
}

VspResult vsp_score(const std::vector<std::optional<CvssVector>>& predictions,
                    const std::vector<CvssVector>& golds) {
  if (predictions.size() != golds.size()) {
    throw std::invalid_argument("vsp_score: prediction/gold length mismatch");
  }
  if (predictions.empty()) {
    throw std::invalid_argument("vsp_score: empty input");
  }
  VspResult result;
  result.items.reserve(predictions.size());
  long long sum_tenths = 0;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    VspItem item;
    if (!predictions[k].has_value()) {
      item.malformed = true;
      item.deviation = 10.0;
      sum_tenths += 100;
    } else {
      // Base scores are exact tenths; integer arithmetic keeps deviations exact.
      long long p = std::llround(cvss_base_score(*predictions[k]) * 10.0);
      long long g = std::llround(cvss_base_score(golds[k]) * 10.0);
      long long d = std::llabs(p - g);
      item.deviation = static_cast<double>(d) / 10.0;
      sum_tenths += d;
    }
    result.items.push_back(item);
  }
  const double n = static_cast<double>(predictions.size());
  result.mad = static_cast<double>(sum_tenths) / (10.0 * n);
  result.cvss_score = (100.0 * n - static_cast<double>(sum_tenths)) / (100.0 * n);
  return result;
}

}  // namespace secaudit::cvss
