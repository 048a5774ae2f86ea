#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "fdne/bounds.hpp"
#include "fdne/distributions.hpp"
#include "fdne/divergences.hpp"
#include "fdne/network.hpp"
#include "fdne/quadrature.hpp"
#include "fdne/rng.hpp"
#include "fdne/training.hpp"

namespace {

fdne::DistributionPair gauss2d_pair() {
  using fdne::Marginal1D;
  fdne::ProductDistribution p({Marginal1D::trunc_gauss(0, 1, 0.1, 2.0),
                               Marginal1D::trunc_gauss(0, 1, -1.0, 0.0)});
  fdne::ProductDistribution q(
      {Marginal1D::uniform(0.1, 2.0), Marginal1D::uniform(-1.0, 0.0)});
  return {std::move(p), std::move(q)};
}

fdne::NetParams random_net(int k, int d, const fdne::ParamBounds& bounds, fdne::RngStream& rng) {
  fdne::NetParams p = fdne::NetParams::zeros(k, d);
  for (auto& v : p.W) v = rng.uniform(-bounds.a1, bounds.a1);
  for (auto& v : p.b) v = rng.uniform(-bounds.a1, bounds.a1);
  for (auto& v : p.beta) v = rng.uniform(-bounds.a2, bounds.a2);
  p.b0 = rng.uniform(-bounds.a3, bounds.a3);
  return p;
}

void ForwardPass(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  fdne::RngStream rng(1);
  const fdne::ParamBounds bounds(2.0, 1.0, 1.0);
  const auto net = random_net(k, 2, bounds, rng);
  const std::vector<double> x{0.7, -0.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdne::forward(net, bounds, x));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(ForwardPass)->RangeMultiplier(4)->Range(4, 256);

void ParameterGradient(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  fdne::RngStream rng(2);
  const fdne::ParamBounds bounds(2.0, 1.0, 1.0);
  const auto net = random_net(k, 2, bounds, rng);
  const std::vector<double> x{0.7, -0.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdne::grad_params(net, bounds, x));
  }
}
BENCHMARK(ParameterGradient)->RangeMultiplier(4)->Range(4, 64);

void TruncGaussSampling(benchmark::State& state) {
  const auto pair = gauss2d_pair();
  fdne::RngStream rng(3);
  const std::size_t batch = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pair.p.sample(rng, batch));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(TruncGaussSampling)->Range(64, 16384);

void AdaptiveQuadrature(benchmark::State& state) {
  const auto m = fdne::Marginal1D::trunc_gauss(0, 1, 0.1, 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdne::quadrature_1d(
        [&](double x) { return m.density(x) * std::log(m.density(x) * 1.9); }, 0.1, 2.0));
  }
}
BENCHMARK(AdaptiveQuadrature);

void GroundTruthKL(benchmark::State& state) {
  const auto pair = gauss2d_pair();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdne::ground_truth(fdne::DivergenceKind::KL, pair));
  }
}
BENCHMARK(GroundTruthKL);

void ProjectedAdamStep(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const auto pair = gauss2d_pair();
  fdne::RngStream rng(4);
  auto rng_x = rng.substream(1);
  auto rng_y = rng.substream(2);
  const auto xs = pair.p.sample(rng_x, static_cast<std::size_t>(batch));
  const auto ys = pair.q.sample(rng_y, static_cast<std::size_t>(batch));
  const fdne::ParamBounds bounds(4.0, 0.23, 1.15);
  auto net = random_net(10, 2, bounds, rng);
  auto adam = fdne::AdamState::zeros(10, 2);
  for (auto _ : state) {
    const auto og = fdne::objective_grad(fdne::DivergenceKind::KL, net, bounds, xs, ys);
    fdne::adam_step_inplace(adam, net, og.grad, 1e-3);
    fdne::project_inplace(net, bounds);
    benchmark::DoNotOptimize(net.b0);
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(ProjectedAdamStep)->Arg(10)->Arg(100)->Arg(1000);

void ExactObjectiveTensorGrid(benchmark::State& state) {
  const auto pair = gauss2d_pair();
  fdne::RngStream rng(5);
  const fdne::ParamBounds bounds(1.0, 1.0, 1.0);
  const auto net = random_net(8, 2, bounds, rng);
  const fdne::ScalarField g = [&](std::span<const double> x) {
    return fdne::forward(net, bounds, x);
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(fdne::exact_objective(fdne::DivergenceKind::KL, pair, g));
  }
}
BENCHMARK(ExactObjectiveTensorGrid);

}  // namespace

BENCHMARK_MAIN();
