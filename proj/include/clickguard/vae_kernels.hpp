#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "clickguard/features.hpp"

namespace clickguard::vae {

// input -> hidden (tanh) -> latent mean / log-variance heads;
// latent -> hidden (tanh) -> input (linear).
struct Dims {
  std::size_t input = features::kFeatureCount;
  std::size_t hidden = 16;
  std::size_t latent = 3;
  bool operator==(const Dims&) const = default;
};

// Offsets of each tensor inside the flat parameter vector. Weight matrices
// are row-major with shape (out, in).
struct Layout {
  explicit Layout(const Dims& d);

  Dims dims;
  std::size_t enc_w, enc_b;
  std::size_t mu_w, mu_b;
  std::size_t lv_w, lv_b;
  std::size_t dec1_w, dec1_b;
  std::size_t dec2_w, dec2_b;
  std::size_t total;
};

// Per-sample loss: ||decode(z) - x||^2 + beta * KL(q(z|x) || N(0, I)),
// z = mu + exp(lv / 2) * eps. The batch loss is the mean over samples.
struct Batch {
  std::span<const features::Vec> x;
  std::span<const double> eps;  // x.size() * latent standard normal draws
};

struct LossParts {
  double total = 0.0;
  double reconstruction = 0.0;
  double kl = 0.0;
};

// Serial reference: per-sample gradients accumulated in sample order.
LossParts loss_and_gradient_serial(const Layout& layout,
                                   std::span<const double> params,
                                   const Batch& batch, double beta,
                                   std::span<double> grad);

// OpenMP: per-sample gradients computed in parallel into private buffers,
// then reduced in sample order. Bit-identical to the serial kernel.
LossParts loss_and_gradient_parallel(const Layout& layout,
                                     std::span<const double> params,
                                     const Batch& batch, double beta,
                                     std::span<double> grad);

// Deterministic reconstruction through the latent mean.
features::Vec reconstruct(const Layout& layout, std::span<const double> params,
                          const features::Vec& x);
double reconstruction_error(const Layout& layout, std::span<const double> params,
                            const features::Vec& x);

void score_serial(const Layout& layout, std::span<const double> params,
                  std::span<const features::Vec> xs, std::span<double> out);
void score_parallel(const Layout& layout, std::span<const double> params,
                    std::span<const features::Vec> xs, std::span<double> out);

}  // namespace clickguard::vae
