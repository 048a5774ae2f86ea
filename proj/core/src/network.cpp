#include "fdne/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fdne/errors.hpp"

namespace fdne {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_abs(double v, double a) { return std::min(std::max(v, -a), a); }

void check_shapes(const NetParams& p) {
  if (p.k < 0 || p.d < 1) throw std::invalid_argument("NetParams: need k >= 0, d >= 1");
  const auto k = static_cast<std::size_t>(p.k);
  const auto d = static_cast<std::size_t>(p.d);
  if (p.W.size() != k * d || p.b.size() != k || p.beta.size() != k) {
    throw std::invalid_argument("NetParams: inconsistent shapes");
  }
}

}  // namespace

NetParams NetParams::zeros(int k, int d) {
  NetParams p;
  p.k = k;
  p.d = d;
  p.W.assign(static_cast<std::size_t>(k) * static_cast<std::size_t>(d), 0.0);
  p.b.assign(static_cast<std::size_t>(k), 0.0);
  p.beta.assign(static_cast<std::size_t>(k), 0.0);
  p.b0 = 0.0;
  return p;
}

ParamBounds::ParamBounds(double a1_, double a2_, double a3_, std::optional<double> t)
    : a1(a1_), a2(a2_), a3(a3_), trunc(t) {
  if (a1 < 0 || a2 < 0 || a3 < 0) {
    throw std::invalid_argument("ParamBounds: bounds must be nonnegative");
  }
  if (trunc && !(*trunc > 0.0 && *trunc < 1.0)) {
    throw std::invalid_argument("ParamBounds: truncation level must lie in (0, 1)");
  }
}

NetworkClassSpec NetworkClassSpec::generic(ParamBounds bounds) {
  NetworkClassSpec s;
  s.variant = Variant::Generic;
  s.bounds = bounds;
  return s;
}

NetworkClassSpec NetworkClassSpec::star(double c) {
  if (c < 0) throw InvalidSpec("NetworkClassSpec: Star needs c >= 0");
  NetworkClassSpec s;
  s.variant = Variant::Star;
  s.c = c;
  return s;
}

NetworkClassSpec NetworkClassSpec::truncated_star(double m, double t) {
  if (m < 0) throw InvalidSpec("NetworkClassSpec: TruncatedStar needs m >= 0");
  if (!(t > 0.0 && t < 1.0)) {
    throw InvalidSpec("NetworkClassSpec: TruncatedStar needs t in (0, 1)");
  }
  NetworkClassSpec s;
  s.variant = Variant::TruncatedStar;
  s.c = m;
  s.t = t;
  return s;
}

NetworkClassSpec NetworkClassSpec::ones() { return NetworkClassSpec{}; }

ParamBounds expand_bounds(const NetworkClassSpec& spec, double k) {
  switch (spec.variant) {
    case NetworkClassSpec::Variant::Generic: return spec.bounds;
    case NetworkClassSpec::Variant::Ones: return ParamBounds(1.0, 1.0, 1.0);
    case NetworkClassSpec::Variant::Star:
    case NetworkClassSpec::Variant::TruncatedStar: {
      if (!(k >= 2.0)) {
        throw InvalidSpec("expand_bounds: Star classes need k >= 2 (log k > 0)");
      }
      const double logk = std::log(k);
      ParamBounds b(std::sqrt(k) * logk, 2.0 * spec.c / k, spec.c);
      if (spec.variant == NetworkClassSpec::Variant::TruncatedStar) b.trunc = spec.t;
      return b;
    }
  }
  throw InvalidSpec("expand_bounds: unknown variant");
}

double forward(const NetParams& params, const ParamBounds& bounds, std::span<const double> x) {
  if (static_cast<int>(x.size()) != params.d) {
    throw std::invalid_argument("forward: input dimension mismatch");
  }
  double out = params.b0;
  for (int i = 0; i < params.k; ++i) {
    double z = params.b[static_cast<std::size_t>(i)];
    for (int j = 0; j < params.d; ++j) z += params.w_at(i, j) * x[static_cast<std::size_t>(j)];
    out += params.beta[static_cast<std::size_t>(i)] * sigmoid(z);
  }
  if (bounds.trunc) out = std::min(out, 1.0 - *bounds.trunc);
  return out;
}

NetParams grad_params(const NetParams& params, const ParamBounds& bounds,
                      std::span<const double> x) {
  if (static_cast<int>(x.size()) != params.d) {
    throw std::invalid_argument("grad_params: input dimension mismatch");
  }
  NetParams g = NetParams::zeros(params.k, params.d);
  if (bounds.trunc) {
    double pre = params.b0;
    for (int i = 0; i < params.k; ++i) {
      double z = params.b[static_cast<std::size_t>(i)];
      for (int j = 0; j < params.d; ++j) z += params.w_at(i, j) * x[static_cast<std::size_t>(j)];
      pre += params.beta[static_cast<std::size_t>(i)] * sigmoid(z);
    }
    if (pre > 1.0 - *bounds.trunc) return g;  // saturated: flat region
  }
  g.b0 = 1.0;
  for (int i = 0; i < params.k; ++i) {
    double z = params.b[static_cast<std::size_t>(i)];
    for (int j = 0; j < params.d; ++j) z += params.w_at(i, j) * x[static_cast<std::size_t>(j)];
    const double s = sigmoid(z);
    const double sp = s * (1.0 - s);
    const double beta_i = params.beta[static_cast<std::size_t>(i)];
    g.beta[static_cast<std::size_t>(i)] = s;
    g.b[static_cast<std::size_t>(i)] = beta_i * sp;
    for (int j = 0; j < params.d; ++j) {
      g.w_at(i, j) = beta_i * sp * x[static_cast<std::size_t>(j)];
    }
  }
  return g;
}

void project_inplace(NetParams& params, const ParamBounds& bounds) {
  for (double& v : params.W) v = clamp_abs(v, bounds.a1);
  for (double& v : params.b) v = clamp_abs(v, bounds.a1);
  for (double& v : params.beta) v = clamp_abs(v, bounds.a2);
  params.b0 = clamp_abs(params.b0, bounds.a3);
}

NetParams project(NetParams params, const ParamBounds& bounds) {
  project_inplace(params, bounds);
  return params;
}

bool in_box(const NetParams& params, const ParamBounds& bounds) {
  auto ok = [](double v, double a) { return std::fabs(v) <= a; };
  for (const double v : params.W) {
    if (!ok(v, bounds.a1)) return false;
  }
  for (const double v : params.b) {
    if (!ok(v, bounds.a1)) return false;
  }
  for (const double v : params.beta) {
    if (!ok(v, bounds.a2)) return false;
  }
  return ok(params.b0, bounds.a3);
}

NetParams init_params(int k, int d, const ParamBounds& bounds, RngStream& rng) {
  if (k < 1 || d < 1) throw std::invalid_argument("init_params: need k, d >= 1");
  NetParams p = NetParams::zeros(k, d);
  const double s1 = std::min(0.1, bounds.a1);
  const double s2 = std::min(0.1, bounds.a2);
  const double s3 = std::min(0.1, bounds.a3);
  for (double& v : p.W) v = rng.uniform(-s1, s1);
  for (double& v : p.b) v = rng.uniform(-s1, s1);
  for (double& v : p.beta) v = rng.uniform(-s2, s2);
  p.b0 = rng.uniform(-s3, s3);
  return p;
}

std::string checkpoint_to_json(const NetParams& params, const ParamBounds& bounds) {
  check_shapes(params);
  nlohmann::json j;
  j["k"] = params.k;
  j["d"] = params.d;
  j["a1"] = bounds.a1;
  j["a2"] = bounds.a2;
  j["a3"] = bounds.a3;
  if (bounds.trunc) j["t"] = *bounds.trunc;
  j["W"] = params.W;
  j["b"] = params.b;
  j["beta"] = params.beta;
  j["b0"] = params.b0;
  return j.dump();
}

std::pair<NetParams, ParamBounds> checkpoint_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: bad JSON: ") + e.what());
  }
  NetParams p;
  ParamBounds bounds;
  try {
    p.k = j.at("k").get<int>();
    p.d = j.at("d").get<int>();
    bounds.a1 = j.at("a1").get<double>();
    bounds.a2 = j.at("a2").get<double>();
    bounds.a3 = j.at("a3").get<double>();
    if (j.contains("t")) bounds.trunc = j.at("t").get<double>();
    p.W = j.at("W").get<std::vector<double>>();
    p.b = j.at("b").get<std::vector<double>>();
    p.beta = j.at("beta").get<std::vector<double>>();
    p.b0 = j.at("b0").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: missing or mistyped field: ") + e.what());
  }
  check_shapes(p);
  return {std::move(p), bounds};
}

}  // namespace fdne
