#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "clickguard/detector.hpp"
#include "clickguard/pipeline.hpp"

namespace clickguard::report {

struct SiteReport {
  std::string id;
  std::string location;
  std::array<std::uint32_t, features::kFeatureCount> raw{};
  features::Vec weighted{};
  bool oversized = false;
  double score = 0.0;
  detector::Label verdict = detector::Label::Benign;
  bool operator==(const SiteReport&) const = default;
};

struct PackageReport {
  std::string path;
  std::string package_id;
  std::string status;        // analyzed | skipped | timeout | error
  std::string gate_verdict;  // analyze | skip
  std::string gate_reason;
  std::vector<std::string> ad_views;
  std::vector<SiteReport> sites;
  std::string verdict;       // fraud | benign | skip | timeout | error
  std::vector<std::string> fraud_locations;
  std::string error;
  double millis = 0.0;
  std::optional<bool> labeled_fraud;
  bool operator==(const PackageReport&) const = default;
};

struct Summary {
  std::size_t packages = 0, analyzed = 0, skipped = 0, timeouts = 0, errors = 0;
  std::size_t sites = 0, fraud_sites = 0, fraud_packages = 0;
  std::optional<detector::Metrics> site_metrics;  // only with labels
  std::optional<detector::Metrics> app_metrics;
  bool operator==(const Summary&) const = default;
};

struct ScanReport {
  std::string model_digest;
  double threshold = 0.0;
  std::vector<PackageReport> packages;  // sorted by package id, then path
  Summary summary;
  bool operator==(const ScanReport&) const = default;
};

// Scores every site with the model at `threshold`. `labels` maps package
// path to fraud label; packages missing from it stay unlabeled.
ScanReport build_report(const std::vector<pipeline::PackageResult>& results,
                        const detector::VaeModel& model, double threshold,
                        const std::vector<std::pair<std::string, bool>>& labels = {});

bool has_fraud(const ScanReport& r);

nlohmann::json to_json(const ScanReport& r);
ScanReport from_json(const nlohmann::json& j);
// JSON text with per-package timing zeroed, for byte-wise comparison.
std::string canonical_json(ScanReport r);
std::string to_table(const ScanReport& r);

}  // namespace clickguard::report
