#include "clickguard/vae_kernels.hpp"

#include <algorithm>
#include <cmath>

namespace clickguard::vae {

Layout::Layout(const Dims& d) : dims(d) {
  std::size_t off = 0;
  auto take = [&](std::size_t n) {
    const auto at = off;
    off += n;
    return at;
  };
  enc_w = take(d.hidden * d.input);
  enc_b = take(d.hidden);
  mu_w = take(d.latent * d.hidden);
  mu_b = take(d.latent);
  lv_w = take(d.latent * d.hidden);
  lv_b = take(d.latent);
  dec1_w = take(d.hidden * d.latent);
  dec1_b = take(d.hidden);
  dec2_w = take(d.input * d.hidden);
  dec2_b = take(d.input);
  total = off;
}

namespace {

// y = W x + b, W of shape (rows, cols).
void affine(const double* w, const double* b, const double* x, std::size_t rows,
            std::size_t cols, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = b[r];
    const double* wr = w + r * cols;
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] = acc;
  }
}

// dW += dy x^T, db += dy, dx = W^T dy (dx optional).
void affine_backward(const double* w, const double* x, const double* dy,
                     std::size_t rows, std::size_t cols, double* dw, double* db,
                     double* dx) {
  if (dx) std::fill(dx, dx + cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    db[r] += dy[r];
    double* dwr = dw + r * cols;
    const double* wr = w + r * cols;
    for (std::size_t c = 0; c < cols; ++c) {
      dwr[c] += dy[r] * x[c];
      if (dx) dx[c] += wr[c] * dy[r];
    }
  }
}

struct Scratch {
  explicit Scratch(const Dims& d)
      : h1(d.hidden), mu(d.latent), lv(d.latent), sd(d.latent), z(d.latent),
        h2(d.hidden), y(d.input), dy(d.input), dh2(d.hidden), dz(d.latent),
        dmu(d.latent), dlv(d.latent), dh1(d.hidden), tmp(d.hidden) {}
  std::vector<double> h1, mu, lv, sd, z, h2, y, dy, dh2, dz, dmu, dlv, dh1, tmp;
};

// Forward and backward for one sample; gradient written (not accumulated)
// into `grad`.
LossParts sample_loss_grad(const Layout& L, const double* p, const double* x,
                           const double* eps, double beta, double* grad,
                           Scratch& s) {
  const auto& d = L.dims;
  affine(p + L.enc_w, p + L.enc_b, x, d.hidden, d.input, s.h1.data());
  for (auto& v : s.h1) v = std::tanh(v);
  affine(p + L.mu_w, p + L.mu_b, s.h1.data(), d.latent, d.hidden, s.mu.data());
  affine(p + L.lv_w, p + L.lv_b, s.h1.data(), d.latent, d.hidden, s.lv.data());
  double kl = 0.0;
  for (std::size_t k = 0; k < d.latent; ++k) {
    s.sd[k] = std::exp(0.5 * s.lv[k]);
    s.z[k] = s.mu[k] + s.sd[k] * eps[k];
    kl += 0.5 * (s.mu[k] * s.mu[k] + s.sd[k] * s.sd[k] - s.lv[k] - 1.0);
  }
  affine(p + L.dec1_w, p + L.dec1_b, s.z.data(), d.hidden, d.latent, s.h2.data());
  for (auto& v : s.h2) v = std::tanh(v);
  affine(p + L.dec2_w, p + L.dec2_b, s.h2.data(), d.input, d.hidden, s.y.data());
  double rec = 0.0;
  for (std::size_t j = 0; j < d.input; ++j) {
    const double diff = s.y[j] - x[j];
    rec += diff * diff;
    s.dy[j] = 2.0 * diff;
  }

  std::fill(grad, grad + L.total, 0.0);
  affine_backward(p + L.dec2_w, s.h2.data(), s.dy.data(), d.input, d.hidden,
                  grad + L.dec2_w, grad + L.dec2_b, s.dh2.data());
  for (std::size_t h = 0; h < d.hidden; ++h)
    s.dh2[h] *= 1.0 - s.h2[h] * s.h2[h];
  affine_backward(p + L.dec1_w, s.z.data(), s.dh2.data(), d.hidden, d.latent,
                  grad + L.dec1_w, grad + L.dec1_b, s.dz.data());
  for (std::size_t k = 0; k < d.latent; ++k) {
    s.dmu[k] = s.dz[k] + beta * s.mu[k];
    s.dlv[k] = s.dz[k] * eps[k] * 0.5 * s.sd[k] +
               beta * 0.5 * (s.sd[k] * s.sd[k] - 1.0);
  }
  affine_backward(p + L.mu_w, s.h1.data(), s.dmu.data(), d.latent, d.hidden,
                  grad + L.mu_w, grad + L.mu_b, s.dh1.data());
  affine_backward(p + L.lv_w, s.h1.data(), s.dlv.data(), d.latent, d.hidden,
                  grad + L.lv_w, grad + L.lv_b, s.tmp.data());
  for (std::size_t h = 0; h < d.hidden; ++h)
    s.dh1[h] = (s.dh1[h] + s.tmp[h]) * (1.0 - s.h1[h] * s.h1[h]);
  affine_backward(p + L.enc_w, x, s.dh1.data(), d.hidden, d.input,
                  grad + L.enc_w, grad + L.enc_b, nullptr);

  return {rec + beta * kl, rec, kl};
}

LossParts reduce(const Layout& L, std::size_t n, const std::vector<LossParts>& parts,
                 const std::vector<double>& per_sample, std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  LossParts sum;
  for (std::size_t i = 0; i < n; ++i) {
    const double* g = per_sample.data() + i * L.total;
    for (std::size_t k = 0; k < L.total; ++k) grad[k] += g[k];
    sum.total += parts[i].total;
    sum.reconstruction += parts[i].reconstruction;
    sum.kl += parts[i].kl;
  }
  const double inv = n ? 1.0 / static_cast<double>(n) : 0.0;
  for (auto& g : grad) g *= inv;
  sum.total *= inv;
  sum.reconstruction *= inv;
  sum.kl *= inv;
  return sum;
}

}  // namespace

LossParts loss_and_gradient_serial(const Layout& layout,
                                   std::span<const double> params,
                                   const Batch& batch, double beta,
                                   std::span<double> grad) {
  const auto n = batch.x.size();
  std::vector<LossParts> parts(n);
  std::vector<double> per_sample(n * layout.total);
  Scratch scratch(layout.dims);
  for (std::size_t i = 0; i < n; ++i)
    parts[i] = sample_loss_grad(layout, params.data(), batch.x[i].data(),
                                batch.eps.data() + i * layout.dims.latent, beta,
                                per_sample.data() + i * layout.total, scratch);
  return reduce(layout, n, parts, per_sample, grad);
}

LossParts loss_and_gradient_parallel(const Layout& layout,
                                     std::span<const double> params,
                                     const Batch& batch, double beta,
                                     std::span<double> grad) {
  const auto n = static_cast<std::ptrdiff_t>(batch.x.size());
  std::vector<LossParts> parts(batch.x.size());
  std::vector<double> per_sample(batch.x.size() * layout.total);
#pragma omp parallel
  {
    Scratch scratch(layout.dims);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      parts[u] = sample_loss_grad(layout, params.data(), batch.x[u].data(),
                                  batch.eps.data() + u * layout.dims.latent, beta,
                                  per_sample.data() + u * layout.total, scratch);
    }
  }
  return reduce(layout, batch.x.size(), parts, per_sample, grad);
}

features::Vec reconstruct(const Layout& L, std::span<const double> params,
                          const features::Vec& x) {
  const auto& d = L.dims;
  const double* p = params.data();
  std::vector<double> h1(d.hidden), mu(d.latent), h2(d.hidden);
  affine(p + L.enc_w, p + L.enc_b, x.data(), d.hidden, d.input, h1.data());
  for (auto& v : h1) v = std::tanh(v);
  affine(p + L.mu_w, p + L.mu_b, h1.data(), d.latent, d.hidden, mu.data());
  affine(p + L.dec1_w, p + L.dec1_b, mu.data(), d.hidden, d.latent, h2.data());
  for (auto& v : h2) v = std::tanh(v);
  features::Vec y{};
  affine(p + L.dec2_w, p + L.dec2_b, h2.data(), d.input, d.hidden, y.data());
  return y;
}

double reconstruction_error(const Layout& layout, std::span<const double> params,
                            const features::Vec& x) {
  const auto y = reconstruct(layout, params, x);
  double err = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) err += (y[j] - x[j]) * (y[j] - x[j]);
  return err;
}

void score_serial(const Layout& layout, std::span<const double> params,
                  std::span<const features::Vec> xs, std::span<double> out) {
  for (std::size_t i = 0; i < xs.size(); ++i)
    out[i] = reconstruction_error(layout, params, xs[i]);
}

void score_parallel(const Layout& layout, std::span<const double> params,
                    std::span<const features::Vec> xs, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        reconstruction_error(layout, params, xs[static_cast<std::size_t>(i)]);
}

}  // namespace clickguard::vae
