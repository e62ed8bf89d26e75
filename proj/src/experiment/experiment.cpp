#include "clickguard/experiment.hpp"

#include <map>

#include "clickguard/corpus.hpp"

namespace clickguard::experiment {

LabeledSet load_labeled(const std::filesystem::path& dir, const pipeline::Options& opts,
                        unsigned jobs) {
  const auto labels = corpus::read_labels(dir);
  std::vector<std::filesystem::path> paths;
  for (const auto& l : labels) paths.push_back(dir / l.path);
  const auto results = pipeline::analyze_files(paths, opts, jobs);

  LabeledSet set;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    set.packages.push_back(labels[p].path);
    set.package_fraud.push_back(labels[p].fraud);
    const auto& r = results[p];
    if (r.status == pipeline::Status::Error || r.status == pipeline::Status::Timeout)
      ++set.failed_packages;
    for (const auto& s : r.sites) {
      set.raw.push_back(s.features.raw());
      set.fraud.push_back(labels[p].fraud);
      set.package_of.push_back(p);
    }
  }
  return set;
}

std::vector<features::Vec> load_unlabeled(const std::filesystem::path& dir,
                                          const pipeline::Options& opts, unsigned jobs) {
  return pipeline::raw_vectors(
      pipeline::analyze_files(pipeline::collect_ir_files({dir}), opts, jobs));
}

Evaluation evaluate(const detector::VaeModel& model, const LabeledSet& set, double threshold) {
  Evaluation ev;
  ev.threshold = threshold;
  const auto scores = detector::score_all_raw(model, set.raw);
  ev.site = detector::confusion(scores, set.fraud, threshold);
  ev.auc = detector::sweep_roc(scores, set.fraud).auc;
  ev.best_f = detector::best_f_score(scores, set.fraud);

  // A package is flagged when any of its sites is; packages without sites
  // are predicted benign.
  std::vector<detector::Label> app(set.packages.size(), detector::Label::Benign);
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (detector::label_for(scores[i], threshold) == detector::Label::Fraud)
      app[set.package_of[i]] = detector::Label::Fraud;
  ev.app = detector::confusion(app, set.package_fraud);
  return ev;
}

double calibrate(const detector::VaeModel& model, const LabeledSet& set) {
  const auto scores = detector::score_all_raw(model, set.raw);
  return detector::sweep_roc(scores, set.fraud).best_threshold;
}

std::vector<features::FeatureMask> masks_of_size(std::size_t k) {
  std::vector<features::FeatureMask> out;
  for (unsigned long bits = 1; bits < (1ul << features::kFeatureCount); ++bits) {
    features::FeatureMask m(bits);
    if (m.count() == k) out.push_back(m);
  }
  return out;
}

std::vector<AblationEntry> ablate(const std::vector<features::Vec>& benign_raw,
                                  const LabeledSet& set, const detector::TrainConfig& config,
                                  const std::vector<features::FeatureMask>& masks) {
  std::vector<AblationEntry> out;
  for (const auto& mask : masks) {
    const auto model = detector::train(benign_raw, config, mask);
    const auto scores = detector::score_all_raw(model, set.raw);
    out.push_back({mask, detector::sweep_roc(scores, set.fraud).auc,
                   detector::best_f_score(scores, set.fraud)});
  }
  return out;
}

features::FeatureMask five_feature_subset() {
  return features::parse_mask("AxisAPI,ViewSizeAPI,RandAxis,DDGSize,RandCondition");
}

}  // namespace clickguard::experiment
