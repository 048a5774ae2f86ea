#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here deliberately avoids the library's own quadrature/gradient paths so the
// checks stay two-sided.

#include <cmath>
#include <numbers>
#include <vector>

#include "fdne/distributions.hpp"
#include "fdne/network.hpp"
#include "fdne/rng.hpp"

namespace testsup {

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf_erf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Analytic mean of a truncated normal via the phi/Phi ratio formula.
inline double trunc_normal_mean(double mu, double sigma, double lo, double hi) {
  const double a = (lo - mu) / sigma;
  const double b = (hi - mu) / sigma;
  const double z = normal_cdf_erf(b) - normal_cdf_erf(a);
  return mu + sigma * (normal_pdf(a) - normal_pdf(b)) / z;
}

/// 2-D benchmark pair: N(0, I_2) truncated to
/// [0.1, 2] x [-1, 0] against the uniform on the same box.
inline fdne::DistributionPair gauss2d_pair() {
  using fdne::Marginal1D;
  fdne::ProductDistribution p({Marginal1D::trunc_gauss(0.0, 1.0, 0.1, 2.0),
                               Marginal1D::trunc_gauss(0.0, 1.0, -1.0, 0.0)});
  fdne::ProductDistribution q(
      {Marginal1D::uniform(0.1, 2.0), Marginal1D::uniform(-1.0, 0.0)});
  return {std::move(p), std::move(q)};
}

/// d = 1: truncated N(0,1) on [0,1] vs Unif[0,1].
inline fdne::DistributionPair tg_vs_uniform_1d() {
  fdne::ProductDistribution p({fdne::Marginal1D::trunc_gauss(0.0, 1.0, 0.0, 1.0)});
  fdne::ProductDistribution q({fdne::Marginal1D::uniform(0.0, 1.0)});
  return {std::move(p), std::move(q)};
}

/// d = 1: two distinct truncated Gaussians on [0,1].
inline fdne::DistributionPair two_gaussians_1d() {
  fdne::ProductDistribution p({fdne::Marginal1D::trunc_gauss(0.0, 1.0, 0.0, 1.0)});
  fdne::ProductDistribution q({fdne::Marginal1D::trunc_gauss(0.5, 0.8, 0.0, 1.0)});
  return {std::move(p), std::move(q)};
}

/// d = 1: identical truncated Gaussians (every divergence is zero).
inline fdne::DistributionPair identical_pair_1d() {
  fdne::ProductDistribution p({fdne::Marginal1D::trunc_gauss(0.0, 1.0, 0.0, 1.0)});
  fdne::ProductDistribution q({fdne::Marginal1D::trunc_gauss(0.0, 1.0, 0.0, 1.0)});
  return {std::move(p), std::move(q)};
}

inline fdne::DistributionPair uniform_pair_1d() {
  fdne::ProductDistribution p({fdne::Marginal1D::uniform(0.0, 1.0)});
  fdne::ProductDistribution q({fdne::Marginal1D::uniform(0.0, 1.0)});
  return {std::move(p), std::move(q)};
}

/// Parameters drawn uniformly over the whole box (init_params stays near 0).
inline fdne::NetParams random_inbox_params(int k, int d, const fdne::ParamBounds& bounds,
                                           fdne::RngStream& rng) {
  fdne::NetParams p = fdne::NetParams::zeros(k, d);
  for (double& v : p.W) v = rng.uniform(-bounds.a1, bounds.a1);
  for (double& v : p.b) v = rng.uniform(-bounds.a1, bounds.a1);
  for (double& v : p.beta) v = rng.uniform(-bounds.a2, bounds.a2);
  p.b0 = rng.uniform(-bounds.a3, bounds.a3);
  return p;
}

inline std::vector<double> random_point_in(const fdne::BoxSupport& box, fdne::RngStream& rng) {
  std::vector<double> x(static_cast<std::size_t>(box.dims));
  for (int i = 0; i < box.dims; ++i) {
    x[static_cast<std::size_t>(i)] = rng.uniform(box.lo[i], box.hi[i]);
  }
  return x;
}

/// Flatten a NetParams-shaped record for finite-difference loops.
inline std::vector<double*> param_slots(fdne::NetParams& p) {
  std::vector<double*> slots;
  for (double& v : p.W) slots.push_back(&v);
  for (double& v : p.b) slots.push_back(&v);
  for (double& v : p.beta) slots.push_back(&v);
  slots.push_back(&p.b0);
  return slots;
}

inline std::vector<double> flatten(const fdne::NetParams& p) {
  std::vector<double> v;
  v.insert(v.end(), p.W.begin(), p.W.end());
  v.insert(v.end(), p.b.begin(), p.b.end());
  v.insert(v.end(), p.beta.begin(), p.beta.end());
  v.push_back(p.b0);
  return v;
}

}  // namespace testsup
