#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdne/rng.hpp"

namespace fdne {

/// One shallow network: g(x) = b0 + sum_i beta[i] * sigmoid(W[i] . x + b[i]).
struct NetParams {
  int k = 0;  // hidden neurons
  int d = 0;  // input dimension
  std::vector<double> W;     // k x d, row-major
  std::vector<double> b;     // k
  std::vector<double> beta;  // k
  double b0 = 0.0;

  static NetParams zeros(int k, int d);
  double& w_at(int i, int j) { return W[static_cast<std::size_t>(i) * d + j]; }
  double w_at(int i, int j) const { return W[static_cast<std::size_t>(i) * d + j]; }
};

/// Box constraints on the parameter groups, plus optional output truncation.
struct ParamBounds {
  double a1 = 0.0;  // |W_ij|, |b_i|
  double a2 = 0.0;  // |beta_i|
  double a3 = 0.0;  // |b0|
  std::optional<double> trunc;  // clip output to <= 1 - t; t in (0, 1)

  ParamBounds() = default;
  ParamBounds(double a1_, double a2_, double a3_, std::optional<double> t = std::nullopt);
};

/// Named parameter-bound schedules.
///   Generic(bounds)       -- bounds given directly
///   Star(c)               -- (sqrt(k) log k, 2c/k, c)
///   TruncatedStar(m, t)   -- Star(m) with output truncation t
///   Ones                  -- (1, 1, 1)
struct NetworkClassSpec {
  enum class Variant { Generic, Star, TruncatedStar, Ones };

  static NetworkClassSpec generic(ParamBounds bounds);
  static NetworkClassSpec star(double c);
  static NetworkClassSpec truncated_star(double m, double t);
  static NetworkClassSpec ones();

  Variant variant = Variant::Ones;
  ParamBounds bounds;  // Generic only
  double c = 0.0;      // Star scale / TruncatedStar m
  double t = 0.0;      // TruncatedStar truncation
};

/// Resolve a class spec at width k (Star variants need k >= 2 so log k > 0).
ParamBounds expand_bounds(const NetworkClassSpec& spec, double k);

double forward(const NetParams& params, const ParamBounds& bounds, std::span<const double> x);

/// Parameter gradient of forward at x, shaped like NetParams.
/// Zero everywhere when a truncated output is saturated.
NetParams grad_params(const NetParams& params, const ParamBounds& bounds,
                      std::span<const double> x);

/// Coordinate-wise clamp onto the parameter box; idempotent.
void project_inplace(NetParams& params, const ParamBounds& bounds);
NetParams project(NetParams params, const ParamBounds& bounds);

bool in_box(const NetParams& params, const ParamBounds& bounds);

/// Entries uniform on [-min(0.1, a_group), +min(0.1, a_group)].
NetParams init_params(int k, int d, const ParamBounds& bounds, RngStream& rng);

/// Checkpoint JSON: {k, d, a1, a2, a3, t?, W (row-major), b, beta, b0}.
std::string checkpoint_to_json(const NetParams& params, const ParamBounds& bounds);
std::pair<NetParams, ParamBounds> checkpoint_from_json(const std::string& text);

}  // namespace fdne
