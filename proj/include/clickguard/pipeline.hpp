#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "clickguard/catalog.hpp"
#include "clickguard/features.hpp"
#include "clickguard/gate.hpp"
#include "clickguard/slicer.hpp"

namespace clickguard::pipeline {

inline constexpr std::chrono::milliseconds kDefaultTimeout{300'000};

struct Options {
  ApiCatalog catalog = ApiCatalog::defaults();
  gate::GateConfig gate;
  slicer::SliceLimits limits;  // deadline is set per package from `timeout`
  std::chrono::milliseconds timeout = kDefaultTimeout;
  bool keep_ddgs = false;
};

enum class Status : std::uint8_t { Analyzed, Skipped, Timeout, Error };
std::string_view to_string(Status s);

struct SiteResult {
  slicer::ClickSite site;
  std::string location;  // "Class::method" of the dispatch
  features::FeatureVector features;
  slicer::Ddg axis_ddg;  // only with Options::keep_ddgs
  slicer::Ddg cond_ddg;
};

struct PackageResult {
  std::string path;
  std::string package_id;
  Status status = Status::Error;
  gate::GateDecision gate;
  std::vector<SiteResult> sites;
  std::string error;
  double millis = 0.0;
};

PackageResult analyze_text(std::string_view text, std::string path, const Options& opts);
PackageResult analyze_file(const std::filesystem::path& path, const Options& opts);

// Each package is analyzed independently by up to `jobs` workers; results
// come back in input order.
std::vector<PackageResult> analyze_files(const std::vector<std::filesystem::path>& paths,
                                         const Options& opts, unsigned jobs = 1);

// Expands directories to their *.ir files (recursive, sorted). Throws on a
// path that does not exist.
std::vector<std::filesystem::path> collect_ir_files(
    const std::vector<std::filesystem::path>& inputs);

// Raw vectors of every analyzed site, in result order.
std::vector<features::Vec> raw_vectors(const std::vector<PackageResult>& results);

}  // namespace clickguard::pipeline
