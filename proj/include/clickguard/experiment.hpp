#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "clickguard/detector.hpp"
#include "clickguard/pipeline.hpp"

namespace clickguard::experiment {

// Site vectors of a labeled corpus. A site inherits its package's label.
struct LabeledSet {
  std::vector<features::Vec> raw;
  std::vector<bool> fraud;
  std::vector<std::size_t> package_of;  // site -> index into packages
  std::vector<std::string> packages;    // manifest paths
  std::vector<bool> package_fraud;
  std::size_t failed_packages = 0;      // parse errors, timeouts
};

LabeledSet load_labeled(const std::filesystem::path& dir, const pipeline::Options& opts,
                        unsigned jobs = 1);
// Site vectors of every package in the directory (labels ignored).
std::vector<features::Vec> load_unlabeled(const std::filesystem::path& dir,
                                          const pipeline::Options& opts, unsigned jobs = 1);

struct Evaluation {
  detector::Metrics site;
  detector::Metrics app;
  double auc = 0.0;
  double best_f = 0.0;
  double threshold = 0.0;
};

Evaluation evaluate(const detector::VaeModel& model, const LabeledSet& set, double threshold);
// Youden-optimal threshold on the set.
double calibrate(const detector::VaeModel& model, const LabeledSet& set);

struct AblationEntry {
  features::FeatureMask mask;
  double auc = 0.0;
  double best_f = 0.0;
};

std::vector<features::FeatureMask> masks_of_size(std::size_t k);
// Trains one model per mask on the benign vectors and scores the set.
std::vector<AblationEntry> ablate(const std::vector<features::Vec>& benign_raw,
                                  const LabeledSet& set, const detector::TrainConfig& config,
                                  const std::vector<features::FeatureMask>& masks);

// The subset reported as near-optimal for the original classifier.
features::FeatureMask five_feature_subset();

}  // namespace clickguard::experiment
