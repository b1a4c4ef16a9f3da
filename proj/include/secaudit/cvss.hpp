#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace secaudit::cvss {

enum class AttackVector { network, adjacent, local, physical };
enum class AttackComplexity { low, high };
enum class PrivilegesRequired { none, low, high };
enum class UserInteraction { none, required };
enum class Scope { unchanged, changed };
enum class ImpactLevel { none, low, high };

// The eight v3.1 Base metrics. Temporal/Environmental groups are out of
// scope and rejected by the parser.
struct CvssVector {
  AttackVector av = AttackVector::network;
  AttackComplexity ac = AttackComplexity::low;
  PrivilegesRequired pr = PrivilegesRequired::none;
  UserInteraction ui = UserInteraction::none;
  Scope s = Scope::unchanged;
  ImpactLevel c = ImpactLevel::none;
  ImpactLevel i = ImpactLevel::none;
  ImpactLevel a = ImpactLevel::none;

  // Canonical form: CVSS:3.1/AV:x/AC:x/PR:x/UI:x/S:x/C:x/I:x/A:x
  std::string to_string() const;

  friend bool operator==(const CvssVector&, const CvssVector&) = default;
};

// Extracts the last vector string from a model completion. Accepts the
// metrics in any order and a case-insensitive prefix; duplicate fields,
// illegal values, missing base metrics or non-base metrics make the
// candidate malformed (nullopt).
std::optional<CvssVector> parse_cvss_vector(std::string_view model_output);

// v3.1 base score in [0.0, 10.0], always a multiple of 0.1.
double cvss_base_score(const CvssVector& v);

// All 2592 valid base vectors, canonical enumeration order
// (AV outermost, then AC, PR, UI, S, C, I, A).
std::vector<CvssVector> all_base_vectors();

struct VspItem {
  bool malformed = false;
  double deviation = 0.0;  // |base(pred) - base(gold)|, 10.0 when malformed
};

struct VspResult {
  std::vector<VspItem> items;
  double mad = 0.0;
  double cvss_score = 0.0;  // 1 - mad/10
};

// Per-item deviations are exact (tenths arithmetic); malformed predictions
// take the maximum deviation of 10.0.
VspResult vsp_score(const std::vector<std::optional<CvssVector>>& predictions,
                    const std::vector<CvssVector>& golds);

}  // namespace secaudit::cvss
