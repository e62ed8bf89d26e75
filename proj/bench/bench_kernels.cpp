#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "clickguard/vae_kernels.hpp"

using namespace clickguard;

namespace {

struct Fixture {
  vae::Layout layout{vae::Dims{}};
  std::vector<double> params;
  std::vector<features::Vec> xs;
  std::vector<double> eps;
  std::vector<double> grad;

  explicit Fixture(std::size_t n) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal(0.0, 0.3);
    std::uniform_real_distribution<double> unit(0.0, 0.2);
    params.resize(layout.total);
    for (auto& p : params) p = normal(rng);
    xs.resize(n);
    for (auto& x : xs)
      for (auto& v : x) v = unit(rng);
    eps.resize(n * layout.dims.latent);
    for (auto& e : eps) e = normal(rng);
    grad.resize(layout.total);
  }
};

void BM_GradientSerial(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto l = vae::loss_and_gradient_serial(f.layout, f.params, {f.xs, f.eps}, 1e-3, f.grad);
    benchmark::DoNotOptimize(l);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GradientParallel(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto l = vae::loss_and_gradient_parallel(f.layout, f.params, {f.xs, f.eps}, 1e-3, f.grad);
    benchmark::DoNotOptimize(l);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScoreSerial(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.xs.size());
  for (auto _ : state) {
    vae::score_serial(f.layout, f.params, f.xs, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ScoreParallel(benchmark::State& state) {
  Fixture f(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.xs.size());
  for (auto _ : state) {
    vae::score_parallel(f.layout, f.params, f.xs, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_GradientSerial)->Arg(32)->Arg(512)->Arg(4096);
BENCHMARK(BM_GradientParallel)->Arg(32)->Arg(512)->Arg(4096);
BENCHMARK(BM_ScoreSerial)->Arg(512)->Arg(65536);
BENCHMARK(BM_ScoreParallel)->Arg(512)->Arg(65536);

BENCHMARK_MAIN();
