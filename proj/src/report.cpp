#include "secaudit/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace secaudit::report {

using ordered_json = nlohmann::ordered_json;

std::string_view severity_name(Severity s) {
  switch (s) {
    case Severity::none: return "none";
    case Severity::light: return "light";
    case Severity::red: return "red";
    case Severity::dark: return "dark";
  }
  return "?";
}

Severity severity_color(double pct) {
  if (!(pct >= 0.0 && pct <= 100.0)) {
    throw std::invalid_argument("severity_color: pct outside [0, 100]");
  }
  if (pct == 0.0) return Severity::none;
  if (pct <= 2.0) return Severity::light;
  if (pct <= 50.0) return Severity::red;
  return Severity::dark;
}

std::optional<Format> parse_format(std::string_view name) {
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  if (name == "markdown" || name == "md") return Format::markdown;
  return std::nullopt;
}

namespace {

ordered_json cell_to_json(const contam::LayerCell& cell) {
  ordered_json j;
  j["enabled"] = cell.enabled;
  j["flagged_items"] = cell.flagged_items;
  j["pct"] = cell.pct;
  j["severity"] = std::string(severity_name(severity_color(cell.pct)));
  if (cell.error) j["error"] = *cell.error;
  return j;
}

contam::LayerCell cell_from_json(const ordered_json& j) {
  contam::LayerCell cell;
  cell.enabled = j.at("enabled").get<bool>();
  cell.flagged_items = j.at("flagged_items").get<std::uint32_t>();
  cell.pct = j.at("pct").get<double>();
  if (j.contains("error")) cell.error = j.at("error").get<std::string>();
  return cell;
}

const char* const kLayerKeys[] = {"em", "ng", "es", "llm_es"};

ordered_json report_to_json(const contam::ContaminationReport& report) {
  ordered_json j;
  j["schema_version"] = report.schema_version;
  ordered_json cfg;
  cfg["ngram_n"] = report.config.ngram_n;
  cfg["ng_flag_fraction"] = report.config.ng_flag_fraction;
  cfg["es_band_lo"] = report.config.es_band_lo;
  cfg["es_flag_threshold"] = report.config.es_flag_threshold;
  cfg["es_band_hi"] = report.config.es_band_hi;
  cfg["layers"] = report.config.layers;
  cfg["embed_provenance"] = report.config.embed_provenance;
  cfg["judge_identity"] = report.config.judge_identity;
  j["config"] = std::move(cfg);
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json r;
    r["benchmark_id"] = row.benchmark_id;
    r["corpus_id"] = row.corpus_id;
    r["benchmark_size"] = row.benchmark_size;
    r["em"] = cell_to_json(row.em);
    r["ng"] = cell_to_json(row.ng);
    r["es"] = cell_to_json(row.es);
    r["llm_es"] = cell_to_json(row.llm_es);
    r["es_borderline_pairs"] = row.es_borderline_pairs;
    r["judge_error_pairs"] = row.judge_error_pairs;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

std::string csv_quote(std::string_view field) {
  bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string format_pct(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", pct);
  return buf;
}

std::string render_csv(const contam::ContaminationReport& report) {
  std::string out = "benchmark_id,corpus_id,layer,flagged_items,pct,severity\n";
  for (const auto& row : report.rows) {
    const contam::LayerCell* cells[] = {&row.em, &row.ng, &row.es, &row.llm_es};
    for (int layer = 0; layer < 4; ++layer) {
      const auto& cell = *cells[layer];
      if (!cell.enabled) continue;
      out += csv_quote(row.benchmark_id);
      out += ',';
      out += csv_quote(row.corpus_id);
      out += ',';
      out += kLayerKeys[layer];
      out += ',';
      out += std::to_string(cell.flagged_items);
      out += ',';
      out += format_pct(cell.pct);
      out += ',';
      out += cell.error ? "error" : severity_name(severity_color(cell.pct));
      out += '\n';
    }
  }
  return out;
}

std::string markdown_cell(const contam::LayerCell& cell) {
  if (!cell.enabled) return "—";
  if (cell.error) return "error";
  std::string out = format_pct(cell.pct) + "%";
  Severity s = severity_color(cell.pct);
  if (s != Severity::none) {
    out += " [";
    out += severity_name(s);
    out += "]";
  }
  return out;
}

std::string render_markdown(const contam::ContaminationReport& report) {
  std::ostringstream out;
  out << "# Contamination report\n\n";
  out << "Layers: ";
  for (std::size_t i = 0; i < report.config.layers.size(); ++i) {
    if (i > 0) out << ", ";
    out << report.config.layers[i];
  }
  out << ". Cell markers: [light] >0% and <=2%, [red] >2% and <=50%, [dark] >50%.\n\n";
  out << "| Benchmark | Corpus | EM | NG | ES | LLM-ES |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& row : report.rows) {
    out << "| " << row.benchmark_id << " | " << row.corpus_id << " | "
        << markdown_cell(row.em) << " | " << markdown_cell(row.ng) << " | "
        << markdown_cell(row.es) << " | " << markdown_cell(row.llm_es) << " |\n";
  }
  return out.str();
}

}  // namespace

std::string render(const contam::ContaminationReport& report, Format format) {
  switch (format) {
    case Format::json: return report_to_json(report).dump(2) + "\n";
    case Format::csv: return render_csv(report);
    case Format::markdown: return render_markdown(report);
  }
  throw std::invalid_argument("render: unknown format");
}

contam::ContaminationReport parse_report(std::string_view json_text) {
  ordered_json j = ordered_json::parse(json_text);
  contam::ContaminationReport report;
  report.schema_version = j.at("schema_version").get<int>();
  const auto& cfg = j.at("config");
  report.config.ngram_n = cfg.at("ngram_n").get<int>();
  report.config.ng_flag_fraction = cfg.at("ng_flag_fraction").get<double>();
  report.config.es_band_lo = cfg.at("es_band_lo").get<double>();
  report.config.es_flag_threshold = cfg.at("es_flag_threshold").get<double>();
  report.config.es_band_hi = cfg.at("es_band_hi").get<double>();
  report.config.layers = cfg.at("layers").get<std::vector<std::string>>();
  report.config.embed_provenance = cfg.at("embed_provenance").get<std::string>();
  report.config.judge_identity = cfg.at("judge_identity").get<std::string>();
  for (const auto& r : j.at("rows")) {
    contam::ReportRow row;
    row.benchmark_id = r.at("benchmark_id").get<std::string>();
    row.corpus_id = r.at("corpus_id").get<std::string>();
    row.benchmark_size = r.at("benchmark_size").get<std::uint32_t>();
    row.em = cell_from_json(r.at("em"));
    row.ng = cell_from_json(r.at("ng"));
    row.es = cell_from_json(r.at("es"));
    row.llm_es = cell_from_json(r.at("llm_es"));
    row.es_borderline_pairs = r.at("es_borderline_pairs").get<std::uint32_t>();
    row.judge_error_pairs = r.at("judge_error_pairs").get<std::uint32_t>();
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string render_findings_jsonl(std::span<const contam::ContaminationFinding> findings) {
  std::string out;
  for (const auto& f : findings) {
    ordered_json j;
    j["benchmark_id"] = f.benchmark_id;
    j["corpus_id"] = f.corpus_id;
    j["item_id"] = f.item_id;
    j["sample_id"] = f.sample_id;
    j["layer"] = std::string(contam::layer_name(f.layer));
    j["score"] = f.score;
    j["evidence"] = f.evidence;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace secaudit::report
