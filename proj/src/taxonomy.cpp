#include "secaudit/taxonomy.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace secaudit::taxonomy {

using nlohmann::json;

const std::vector<TaxonomyCategory>& builtin_taxonomy() {
  static const std::vector<TaxonomyCategory> categories = {
      {1,
       "Governance, Risk, and Compliance (GRC)",
       {"Risk Management & Security Strategy",
        "Compliance and Regulations (e.g., GDPR, HIPAA)",
        "Security Frameworks (e.g., NIST CSF, ISO 27001)",
        "Security Policies & Architecture"}},
      {2,
       "Network, Infrastructure, and Endpoint Security",
       {"Perimeter and Network Security (Firewalls, VPNs, Wireless)",
        "Endpoint Protection & MDM", "IoT and OT/ICS Security", "Mobile Security"}},
      {3,
       "Application and Software Security",
       {"Secure Software Development (DevSecOps)", "Application & API Security",
        "Vulnerability Management & Penetration Testing",
        "Software Supply Chain Security (SBOM, third-party risk)"}},
      {4,
       "Cloud and Data Security",
       {"Cloud Security Architecture & Tools", "Identity and Access Management (IAM, PAM)",
        "Data Loss Prevention & Privacy (DLP, encryption)",
        "Cloud Compliance & Shared Responsibility Model"}},
      {5,
       "Identity, Access, and Zero Trust",
       {"Authentication & Authorization (MFA, SSO, RBAC)", "Identity Governance & Lifecycle",
        "Zero Trust Architecture", "Privileged Access Controls"}},
      {6,
       "Security Operations and Monitoring (SecOps)",
       {"SIEM, SOC, and Log Management", "Security Automation & SOAR", "Detection Engineering",
        "Operational Resilience & Monitoring"}},
      {7,
       "Threat Intelligence and Incident Response",
       {"Threat Detection, Analysis & Hunting", "Threat Intelligence Platforms & IOCs",
        "Advanced Persistent Threats (APTs)", "Malware Techniques",
        "Incident Response, Recovery & Digital Forensics"}},
      {8,
       "Cryptography and Secure Communications",
       {"Cryptographic Algorithms & PKI", "Key Management", "Post-Quantum Cryptography",
        "Secure Protocols and Encryption Practices"}},
      {9,
       "Security Awareness and Human Risk",
       {"Social Engineering Techniques (Phishing, Pretexting)", "Insider Threat Management",
        "Security Awareness Training", "Behavioral Risk Analysis"}},
      {10,
       "Emerging Technologies and Future Threats",
       {"AI/ML & LLM Security (adversarial ML, prompt injection)", "Quantum Security Threats",
        "Deepfakes & Synthetic Media", "Nation-State Threats and Geopolitical Risk"}},
  };
  return categories;
}

std::vector<TaxonomyCategory> load_taxonomy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open taxonomy file: " + path.string());
  json doc = json::parse(in);
  if (!doc.is_array()) throw std::runtime_error("taxonomy file must be a JSON array");
  std::vector<TaxonomyCategory> out;
  for (const auto& c : doc) {
    TaxonomyCategory cat;
    cat.id = c.at("id").get<int>();
    cat.name = c.at("name").get<std::string>();
    cat.subtopics = c.at("subtopics").get<std::vector<std::string>>();
    out.push_back(std::move(cat));
  }
  if (out.size() != kCategoryCount) {
    throw std::runtime_error("taxonomy must have exactly 10 categories");
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].id != static_cast<int>(i) + 1) {
      throw std::runtime_error("taxonomy category ids must be 1..10 in order");
    }
  }
  return out;
}

std::vector<adapters::CategoryLabel> classify_category(
    adapters::ClassifierAdapter& classifier, std::span<const std::string> sample_ids,
    std::span<const std::string> texts, std::size_t batch_size) {
  if (sample_ids.size() != texts.size()) {
    throw std::invalid_argument("classify_category: id/text length mismatch");
  }
  std::vector<adapters::CategoryLabel> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += batch_size) {
    std::size_t count = std::min(batch_size, texts.size() - start);
    auto labels = classifier.classify(texts.subspan(start, count));
    if (labels.size() != count) {
      throw adapters::AdapterError("classifier returned wrong label count");
    }
    for (std::size_t k = 0; k < count; ++k) {
      if (labels[k].category_id < 1 || labels[k].category_id > kCategoryCount) {
        throw adapters::AdapterError("classifier label outside 1..10");
      }
      labels[k].sample_id = sample_ids[start + k];
      out.push_back(std::move(labels[k]));
    }
  }
  return out;
}

CategoryDistribution aggregate_distribution(std::span<const adapters::CategoryLabel> labels) {
  CategoryDistribution dist;
  for (const auto& l : labels) {
    if (l.category_id < 1 || l.category_id > kCategoryCount) {
      throw std::invalid_argument("label category_id outside 1..10");
    }
    ++dist.counts[static_cast<std::size_t>(l.category_id - 1)];
    ++dist.total;
  }
  if (dist.total > 0) {
    for (std::size_t i = 0; i < dist.counts.size(); ++i) {
      dist.fractions[i] =
          static_cast<double>(dist.counts[i]) / static_cast<double>(dist.total);
    }
  }
  return dist;
}

}  // namespace secaudit::taxonomy
