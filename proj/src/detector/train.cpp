#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "clickguard/detector.hpp"

namespace clickguard::detector {

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::runtime_error("train config must be a JSON object");
  TrainConfig c;
  for (const auto& [k, v] : j.items()) {
    if (k == "hidden") c.hidden = v.get<std::size_t>();
    else if (k == "latent") c.latent = v.get<std::size_t>();
    else if (k == "epochs") c.epochs = v.get<std::size_t>();
    else if (k == "batch_size") c.batch_size = v.get<std::size_t>();
    else if (k == "learning_rate") c.learning_rate = v.get<double>();
    else if (k == "beta") c.beta = v.get<double>();
    else if (k == "adam_beta1") c.adam_beta1 = v.get<double>();
    else if (k == "adam_beta2") c.adam_beta2 = v.get<double>();
    else if (k == "adam_epsilon") c.adam_epsilon = v.get<double>();
    else if (k == "seed") c.seed = v.get<std::uint64_t>();
    else if (k == "parallel") c.parallel = v.get<bool>();
    else throw std::runtime_error("unknown train config key '" + k + "'");
  }
  if (c.beta < 0) throw std::runtime_error("train config: beta must be >= 0");
  if (c.hidden == 0 || c.latent == 0 || c.batch_size == 0)
    throw std::runtime_error("train config: hidden, latent, batch_size must be > 0");
  return c;
}

TrainConfig TrainConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read train config '" + path + "'");
  return from_json(nlohmann::json::parse(in));
}

nlohmann::json TrainConfig::to_json() const {
  return {{"hidden", hidden},           {"latent", latent},
          {"epochs", epochs},           {"batch_size", batch_size},
          {"learning_rate", learning_rate}, {"beta", beta},
          {"adam_beta1", adam_beta1},   {"adam_beta2", adam_beta2},
          {"adam_epsilon", adam_epsilon}, {"seed", seed},
          {"parallel", parallel}};
}

std::string TrainConfig::canonical() const {
  auto j = to_json();
  j.erase("parallel");  // does not change the result
  std::string out;
  for (const auto& [k, v] : j.items()) {
    if (!out.empty()) out += ' ';
    out += k + "=" + v.dump();
  }
  return out;
}

std::string TrainConfig::digest() const { return fnv1a_hex(canonical()); }

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

features::Vec VaeModel::prepare(const features::Vec& raw) const {
  return features::apply_normalization(norm, features::apply_mask(raw, mask));
}

namespace {

void init_params(const vae::Layout& L, std::mt19937_64& rng, std::vector<double>& p) {
  p.assign(L.total, 0.0);
  auto glorot = [&](std::size_t off, std::size_t rows, std::size_t cols) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t i = 0; i < rows * cols; ++i) p[off + i] = dist(rng);
  };
  const auto& d = L.dims;
  glorot(L.enc_w, d.hidden, d.input);
  glorot(L.mu_w, d.latent, d.hidden);
  glorot(L.lv_w, d.latent, d.hidden);
  glorot(L.dec1_w, d.hidden, d.latent);
  glorot(L.dec2_w, d.input, d.hidden);
}

}  // namespace

double evaluation_loss(const VaeModel& model, std::span<const features::Vec> weighted) {
  const auto L = model.layout();
  std::vector<double> eps(weighted.size() * L.dims.latent, 0.0);
  std::vector<double> grad(L.total);
  return vae::loss_and_gradient_serial(L, model.params, {weighted, eps},
                                       model.config.beta, grad)
      .total;
}

VaeModel train_weighted(std::span<const features::Vec> weighted,
                        const features::NormalizationParams& norm,
                        const TrainConfig& config, const features::FeatureMask& mask) {
  if (weighted.size() < kMinTrainingVectors)
    throw TrainingError("need at least " + std::to_string(kMinTrainingVectors) +
                        " benign vectors, got " + std::to_string(weighted.size()));
  VaeModel model;
  model.dims = {features::kFeatureCount, config.hidden, config.latent};
  model.config = config;
  model.norm = norm;
  model.mask = mask;
  const vae::Layout L(model.dims);

  std::mt19937_64 rng(config.seed);
  init_params(L, rng, model.params);
  model.initial_loss = evaluation_loss(model, weighted);

  std::vector<double> m(L.total, 0.0), v(L.total, 0.0), grad(L.total);
  std::vector<std::size_t> order(weighted.size());
  std::iota(order.begin(), order.end(), 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<features::Vec> batch_x;
  std::vector<double> eps;
  std::size_t step = 0;
  const auto kernel = config.parallel ? vae::loss_and_gradient_parallel
                                      : vae::loss_and_gradient_serial;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto end = std::min(order.size(), start + config.batch_size);
      batch_x.clear();
      for (auto i = start; i < end; ++i) batch_x.push_back(weighted[order[i]]);
      eps.resize(batch_x.size() * L.dims.latent);
      for (auto& e : eps) e = normal(rng);

      const auto loss = kernel(L, model.params, {batch_x, eps}, config.beta, grad);
      if (!std::isfinite(loss.total))
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch));
      epoch_loss += loss.total;
      ++batches;

      ++step;
      const double bc1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(step));
      for (std::size_t k = 0; k < L.total; ++k) {
        m[k] = config.adam_beta1 * m[k] + (1.0 - config.adam_beta1) * grad[k];
        v[k] = config.adam_beta2 * v[k] + (1.0 - config.adam_beta2) * grad[k] * grad[k];
        model.params[k] -= config.learning_rate * (m[k] / bc1) /
                           (std::sqrt(v[k] / bc2) + config.adam_epsilon);
      }
    }
    model.epoch_losses.push_back(epoch_loss / static_cast<double>(batches));
  }
  model.final_loss = evaluation_loss(model, weighted);
  if (!std::isfinite(model.final_loss))
    throw TrainingError("non-finite loss at epoch " + std::to_string(config.epochs));
  return model;
}

VaeModel train(std::span<const features::Vec> benign_raw, const TrainConfig& config,
               const features::FeatureMask& mask) {
  if (benign_raw.size() < kMinTrainingVectors)
    throw TrainingError("need at least " + std::to_string(kMinTrainingVectors) +
                        " benign vectors, got " + std::to_string(benign_raw.size()));
  std::vector<features::Vec> masked;
  masked.reserve(benign_raw.size());
  for (const auto& r : benign_raw) masked.push_back(features::apply_mask(r, mask));
  const auto norm = features::fit_normalization(masked);
  std::vector<features::Vec> weighted;
  weighted.reserve(masked.size());
  for (const auto& r : masked) weighted.push_back(features::apply_normalization(norm, r));
  return train_weighted(weighted, norm, config, mask);
}

double score(const VaeModel& model, std::span<const double> weighted) {
  if (weighted.size() != features::kFeatureCount)
    throw std::invalid_argument("score: expected a " +
                                std::to_string(features::kFeatureCount) +
                                "-dimensional vector, got " +
                                std::to_string(weighted.size()));
  features::Vec x{};
  std::copy(weighted.begin(), weighted.end(), x.begin());
  return vae::reconstruction_error(model.layout(), model.params, x);
}

double score_raw(const VaeModel& model, const features::Vec& raw) {
  return vae::reconstruction_error(model.layout(), model.params, model.prepare(raw));
}

std::vector<double> score_all_raw(const VaeModel& model,
                                  std::span<const features::Vec> raws, bool parallel) {
  std::vector<features::Vec> xs;
  xs.reserve(raws.size());
  for (const auto& r : raws) xs.push_back(model.prepare(r));
  std::vector<double> out(xs.size());
  if (parallel)
    vae::score_parallel(model.layout(), model.params, xs, out);
  else
    vae::score_serial(model.layout(), model.params, xs, out);
  return out;
}

}  // namespace clickguard::detector
