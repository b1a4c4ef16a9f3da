#pragma once

#include <string>
#include <string_view>

#include "secaudit/contam.hpp"

namespace secaudit::report {

enum class Severity { none, light, red, dark };

std::string_view severity_name(Severity s);

// Table-coloring buckets: 0 -> none, (0,2] -> light, (2,50] -> red,
// >50 -> dark. Throws on pct outside [0,100].
Severity severity_color(double pct);

enum class Format { json, csv, markdown };

std::optional<Format> parse_format(std::string_view name);

// Deterministic renderings of a contamination report. JSON round-trips
// through parse_report; CSV has one row per (benchmark, corpus, layer);
// Markdown cells carry textual severity markers.
std::string render(const contam::ContaminationReport& report, Format format);

contam::ContaminationReport parse_report(std::string_view json_text);

// Findings as JSON-Lines, canonical order preserved.
std::string render_findings_jsonl(std::span<const contam::ContaminationFinding> findings);

}  // namespace secaudit::report
