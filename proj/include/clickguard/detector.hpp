#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "clickguard/features.hpp"
#include "clickguard/vae_kernels.hpp"

namespace clickguard::detector {

// The operating point reported for the original seed apps. Kept in every
// model file as a reference; verdicts use the calibrated threshold.
inline constexpr double kReferenceThreshold = 2.04;
inline constexpr std::size_t kMinTrainingVectors = 50;

struct TrainConfig {
  std::size_t hidden = 16;
  std::size_t latent = 3;
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  double beta = 1e-3;  // KL coefficient
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 1;
  bool parallel = true;  // OpenMP gradient kernel; results are identical

  static TrainConfig from_json(const nlohmann::json& j);
  static TrainConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
  // Canonical "key=value" rendering of every field that affects the model.
  std::string canonical() const;
  std::string digest() const;  // FNV-1a 64 of canonical(), hex
};

std::string fnv1a_hex(std::string_view text);

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VaeModel {
  vae::Dims dims;
  std::vector<double> params;
  TrainConfig config;
  features::NormalizationParams norm;
  features::FeatureMask mask = features::all_features();
  std::optional<double> threshold;
  double reference_threshold = kReferenceThreshold;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> epoch_losses;  // not serialized

  vae::Layout layout() const { return vae::Layout(dims); }
  // Raw counts -> masked, normalized, weighted vector fed to the network.
  features::Vec prepare(const features::Vec& raw) const;
};

// Fits normalization on the (masked) raw benign vectors and trains the VAE
// on their weighted form.
VaeModel train(std::span<const features::Vec> benign_raw, const TrainConfig& config,
               const features::FeatureMask& mask = features::all_features());

// Trains on already weighted vectors with the given normalization attached.
VaeModel train_weighted(std::span<const features::Vec> weighted,
                        const features::NormalizationParams& norm,
                        const TrainConfig& config,
                        const features::FeatureMask& mask = features::all_features());

// Reconstruction error (squared Euclidean) through the latent mean.
double score(const VaeModel& model, std::span<const double> weighted);
double score_raw(const VaeModel& model, const features::Vec& raw);
std::vector<double> score_all_raw(const VaeModel& model,
                                  std::span<const features::Vec> raws,
                                  bool parallel = true);

// Loss on the whole set with the noise fixed at zero (z = mean).
double evaluation_loss(const VaeModel& model, std::span<const features::Vec> weighted);

enum class Label : std::uint8_t { Benign, Fraud };
std::string_view to_string(Label l);

struct Verdict {
  std::string site_id;
  std::string location;  // "Class::method"
  double error = 0.0;
  Label label = Label::Benign;
  double threshold = 0.0;
};

// Fraud iff error > threshold.
Label label_for(double error, double threshold);
Verdict classify(const VaeModel& model, std::span<const double> weighted);

struct AppVerdict {
  Label label = Label::Benign;
  std::vector<std::string> fraud_locations;  // sorted, unique
};

AppVerdict aggregate_app_verdict(std::span<const Verdict> sites);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

struct RocResult {
  std::vector<RocPoint> points;  // from strictest to most permissive
  double auc = 0.0;
  double best_threshold = 0.0;  // Youden's J optimum
  double best_j = 0.0;
};

// ROC over every distinct score; thresholds sit halfway between adjacent
// distinct scores. Requires both classes.
RocResult sweep_roc(std::span<const double> scores, const std::vector<bool>& is_fraud);

struct Metrics {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  bool operator==(const Metrics&) const = default;
};

Metrics confusion(std::span<const double> scores, const std::vector<bool>& is_fraud,
                  double threshold);
Metrics confusion(std::span<const Label> predicted, const std::vector<bool>& is_fraud);
// Best F-score over all thresholds of the ROC sweep.
double best_f_score(std::span<const double> scores, const std::vector<bool>& is_fraud);

std::string serialize_model(const VaeModel& model);
// FNV-1a 64 of the serialized model, hex.
std::string model_digest(const VaeModel& model);
VaeModel parse_model(const std::string& text);
void save_model(const VaeModel& model, const std::string& path);
VaeModel load_model(const std::string& path);

}  // namespace clickguard::detector
