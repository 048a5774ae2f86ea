#include "fdne/training.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "fdne/errors.hpp"

namespace fdne {
namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// Substream roles within one training run.
constexpr std::uint64_t kRoleSampleX = 1;
constexpr std::uint64_t kRoleSampleY = 2;
constexpr std::uint64_t kRoleInit = 3;
constexpr std::uint64_t kRoleShuffleX = 4;
constexpr std::uint64_t kRoleShuffleY = 5;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Forward pass with pre-truncation value exposed; writes hidden activations.
double forward_acts(const NetParams& p, std::span<const double> x, std::vector<double>& acts) {
  double out = p.b0;
  for (int i = 0; i < p.k; ++i) {
    double z = p.b[static_cast<std::size_t>(i)];
    for (int j = 0; j < p.d; ++j) z += p.w_at(i, j) * x[static_cast<std::size_t>(j)];
    const double s = sigmoid(z);
    acts[static_cast<std::size_t>(i)] = s;
    out += p.beta[static_cast<std::size_t>(i)] * s;
  }
  return out;
}

// grad += weight * d forward / d theta, reusing the activations.
void accumulate_grad(NetParams& grad, const NetParams& p, std::span<const double> x,
                     const std::vector<double>& acts, double weight) {
  grad.b0 += weight;
  for (int i = 0; i < p.k; ++i) {
    const double s = acts[static_cast<std::size_t>(i)];
    const double sp = s * (1.0 - s);
    const double beta_i = p.beta[static_cast<std::size_t>(i)];
    grad.beta[static_cast<std::size_t>(i)] += weight * s;
    grad.b[static_cast<std::size_t>(i)] += weight * beta_i * sp;
    for (int j = 0; j < p.d; ++j) {
      grad.w_at(i, j) += weight * beta_i * sp * x[static_cast<std::size_t>(j)];
    }
  }
}

void adam_update_group(std::vector<double>& m, std::vector<double>& v,
                       std::vector<double>& theta, const std::vector<double>& g, double lr,
                       double bc1, double bc2) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * g[i];
    v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * g[i] * g[i];
    theta[i] += lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kAdamEps);
  }
}

void validate(const TrainConfig& config) {
  if (config.n < 1) throw ConfigError("train: n must be >= 1");
  if (config.k < 1) throw ConfigError("train: k must be >= 1");
  if (config.epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (!(config.lr_initial > 0) || !(config.lr_late > 0)) {
    throw ConfigError("train: learning rates must be positive");
  }
  if (config.lr_switch_epoch < 0) throw ConfigError("train: lr_switch_epoch must be >= 0");
  if (config.effective_batch() > config.n) {
    throw ConfigError("train: batch size exceeds sample count");
  }
}

}  // namespace

int TrainConfig::effective_batch() const {
  if (batch_size > 0) return batch_size;
  return std::max(1, static_cast<int>(std::lround(static_cast<double>(n) * 1e-3)));
}

double lr_at(const TrainConfig& config, int epoch) {
  if (epoch < 0 || epoch >= config.epochs) throw ConfigError("lr_at: epoch out of range");
  return epoch < config.lr_switch_epoch ? config.lr_initial : config.lr_late;
}

AdamState AdamState::zeros(int k, int d) {
  return AdamState{NetParams::zeros(k, d), NetParams::zeros(k, d), 0};
}

ObjectiveGrad objective_grad(DivergenceKind kind, const NetParams& params,
                             const ParamBounds& bounds, const Points& batch_x,
                             const Points& batch_y) {
  if (batch_x.size() == 0 || batch_y.size() == 0) {
    throw DomainError("objective_grad: need non-empty batches");
  }
  if (kind == DivergenceKind::SqHellinger && !bounds.trunc) {
    throw MissingTruncation("objective_grad: Hellinger training needs a truncated class");
  }
  const double cut = bounds.trunc ? 1.0 - *bounds.trunc : 0.0;

  ObjectiveGrad out;
  out.grad = NetParams::zeros(params.k, params.d);
  std::vector<double> acts(static_cast<std::size_t>(params.k));

  const double wx = 1.0 / static_cast<double>(batch_x.size());
  double sum_gx = 0.0;
  for (std::size_t i = 0; i < batch_x.size(); ++i) {
    const auto x = batch_x[i];
    const double pre = forward_acts(params, x, acts);
    const bool saturated = bounds.trunc && pre > cut;
    sum_gx += saturated ? cut : pre;
    if (!saturated) accumulate_grad(out.grad, params, x, acts, wx);
  }

  const double wy = 1.0 / static_cast<double>(batch_y.size());
  double sum_gy = 0.0;
  for (std::size_t i = 0; i < batch_y.size(); ++i) {
    const auto y = batch_y[i];
    const double pre = forward_acts(params, y, acts);
    const bool saturated = bounds.trunc && pre > cut;
    const double gy = saturated ? cut : pre;
    if (kind == DivergenceKind::SqHellinger && gy >= 1.0) {
      throw DomainError("objective_grad: Hellinger evaluation reached the pole");
    }
    sum_gy += gamma(kind, gy);
    if (!saturated) accumulate_grad(out.grad, params, y, acts, -wy * gamma_prime(kind, gy));
  }

  out.value = sum_gx * wx - sum_gy * wy;
  return out;
}

void adam_step_inplace(AdamState& state, NetParams& params, const NetParams& grad, double lr) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
  adam_update_group(state.m.W, state.v.W, params.W, grad.W, lr, bc1, bc2);
  adam_update_group(state.m.b, state.v.b, params.b, grad.b, lr, bc1, bc2);
  adam_update_group(state.m.beta, state.v.beta, params.beta, grad.beta, lr, bc1, bc2);
  state.m.b0 = kAdamBeta1 * state.m.b0 + (1.0 - kAdamBeta1) * grad.b0;
  state.v.b0 = kAdamBeta2 * state.v.b0 + (1.0 - kAdamBeta2) * grad.b0 * grad.b0;
  params.b0 += lr * (state.m.b0 / bc1) / (std::sqrt(state.v.b0 / bc2) + kAdamEps);
}

std::pair<AdamState, NetParams> adam_step(AdamState state, NetParams params,
                                          const NetParams& grad, double lr) {
  adam_step_inplace(state, params, grad, lr);
  return {std::move(state), std::move(params)};
}

double net_objective(DivergenceKind kind, const NetParams& params, const ParamBounds& bounds,
                     const Points& x, const Points& y) {
  const double cut = bounds.trunc ? 1.0 - *bounds.trunc : 0.0;
  std::vector<double> acts(static_cast<std::size_t>(params.k));
  double sx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pre = forward_acts(params, x[i], acts);
    sx += (bounds.trunc && pre > cut) ? cut : pre;
  }
  double sy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double pre = forward_acts(params, y[i], acts);
    const double gy = (bounds.trunc && pre > cut) ? cut : pre;
    if (kind == DivergenceKind::SqHellinger && gy >= 1.0) {
      throw DomainError("net_objective: Hellinger evaluation reached the pole");
    }
    sy += gamma(kind, gy);
  }
  return sx / static_cast<double>(x.size()) - sy / static_cast<double>(y.size());
}

TrainResult train(const TrainConfig& config, const DistributionPair& pair) {
  validate(config);
  const ParamBounds bounds = expand_bounds(config.class_spec, config.k);
  if (config.kind == DivergenceKind::SqHellinger && !bounds.trunc) {
    throw ConfigError("train: Hellinger estimation needs a truncated class spec");
  }

  const auto t0 = std::chrono::steady_clock::now();
  RngStream root(config.seed, config.stream);
  auto rng_x = root.substream(kRoleSampleX);
  auto rng_y = root.substream(kRoleSampleY);
  auto rng_init = root.substream(kRoleInit);
  auto rng_shuffle_x = root.substream(kRoleShuffleX);
  auto rng_shuffle_y = root.substream(kRoleShuffleY);

  const auto n = static_cast<std::size_t>(config.n);
  const Points xs = pair.p.sample(rng_x, n);
  const Points ys = pair.q.sample(rng_y, n);

  NetParams params = init_params(config.k, pair.dims(), bounds, rng_init);
  project_inplace(params, bounds);
  AdamState adam = AdamState::zeros(config.k, pair.dims());

  const int batch = config.effective_batch();
  const auto steps_per_epoch = (n + static_cast<std::size_t>(batch) - 1) /
                               static_cast<std::size_t>(batch);

  std::vector<std::size_t> order_x(n), order_y(n);
  std::iota(order_x.begin(), order_x.end(), 0);
  std::iota(order_y.begin(), order_y.end(), 0);
  Points bx(pair.dims(), 0), by(pair.dims(), 0);

  TrainResult result;
  result.trajectory.reserve(static_cast<std::size_t>(config.epochs));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = lr_at(config, epoch);
    rng_shuffle_x.shuffle(order_x);
    rng_shuffle_y.shuffle(order_y);
    for (std::size_t step = 0; step < steps_per_epoch; ++step) {
      const std::size_t begin = step * static_cast<std::size_t>(batch);
      const std::size_t end = std::min(begin + static_cast<std::size_t>(batch), n);
      const std::size_t len = end - begin;
      bx.data.resize(len * static_cast<std::size_t>(pair.dims()));
      by.data.resize(len * static_cast<std::size_t>(pair.dims()));
      for (std::size_t i = 0; i < len; ++i) {
        const auto src_x = xs[order_x[begin + i]];
        const auto src_y = ys[order_y[begin + i]];
        std::copy(src_x.begin(), src_x.end(), bx.row(i).begin());
        std::copy(src_y.begin(), src_y.end(), by.row(i).begin());
      }
      const ObjectiveGrad og = objective_grad(config.kind, params, bounds, bx, by);
      adam_step_inplace(adam, params, og.grad, lr);
      project_inplace(params, bounds);
      if (config.step_hook) config.step_hook(params, bounds);
    }
    result.trajectory.push_back(net_objective(config.kind, params, bounds, xs, ys));
  }

  result.params = std::move(params);
  result.bounds = bounds;
  result.estimate = result.trajectory.back();
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace fdne
