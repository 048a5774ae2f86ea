#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fdne/distributions.hpp"
#include "fdne/divergences.hpp"
#include "fdne/network.hpp"

namespace fdne {

/// Called after every projected optimizer step (test instrumentation).
using StepHook = std::function<void(const NetParams&, const ParamBounds&)>;

struct TrainConfig {
  DivergenceKind kind = DivergenceKind::KL;
  NetworkClassSpec class_spec = NetworkClassSpec::ones();
  int k = 1;
  int n = 1;
  int epochs = 200;
  int batch_size = 0;  // 0: max(1, round(n * 1e-3))
  double lr_initial = 1e-2;
  double lr_late = 1e-3;
  int lr_switch_epoch = 100;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // replica stream within the seed
  StepHook step_hook;        // optional; must not mutate anything it sees

  int effective_batch() const;
};

/// Piecewise-constant learning rate: lr_initial before the switch epoch,
/// lr_late from it onward.
double lr_at(const TrainConfig& config, int epoch);

/// Adam moment accumulators, shaped like the parameters they track.
struct AdamState {
  NetParams m;
  NetParams v;
  long step = 0;

  static AdamState zeros(int k, int d);
};

/// Batch objective value and its parameter gradient:
///   value = mean_x g(x) - mean_y gamma(g(y))
///   grad  = mean_x grad g(x) - mean_y gamma'(g(y)) grad g(y)
struct ObjectiveGrad {
  double value = 0.0;
  NetParams grad;
};

ObjectiveGrad objective_grad(DivergenceKind kind, const NetParams& params,
                             const ParamBounds& bounds, const Points& batch_x,
                             const Points& batch_y);

/// One bias-corrected Adam ascent step (beta1=0.9, beta2=0.999, eps=1e-8).
/// The caller applies the box projection afterwards.
void adam_step_inplace(AdamState& state, NetParams& params, const NetParams& grad, double lr);
std::pair<AdamState, NetParams> adam_step(AdamState state, NetParams params,
                                          const NetParams& grad, double lr);

struct TrainResult {
  NetParams params;
  ParamBounds bounds;
  double estimate = 0.0;            // full-sample objective at the final params
  std::vector<double> trajectory;   // full-sample objective after each epoch
  double wall_time_s = 0.0;
};

/// Projected minibatch Adam ascent of the empirical objective.
TrainResult train(const TrainConfig& config, const DistributionPair& pair);

/// Full-sample objective for a network (same value as empirical_objective
/// over forward(params, bounds, .)).
double net_objective(DivergenceKind kind, const NetParams& params, const ParamBounds& bounds,
                     const Points& x, const Points& y);

}  // namespace fdne
