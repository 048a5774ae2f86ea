#include "fdne/divergences.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "fdne/errors.hpp"
#include "fdne/quadrature.hpp"
#include "fdne/rng.hpp"

namespace fdne {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kTensorGridPoints = 257;     // per axis, nests the 129 check grid
constexpr std::size_t kMonteCarloSamples = 1000000;

double tensor_grid_objective(DivergenceKind kind, const DistributionPair& pair,
                             const ScalarField& g, std::size_t points_per_axis) {
  const int d = pair.dims();
  std::vector<GridRule1D> rules;
  rules.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    rules.push_back(
        clenshaw_curtis(points_per_axis, pair.support().lo[i], pair.support().hi[i]));
  }

  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  std::vector<double> x(static_cast<std::size_t>(d));
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      w *= rules[static_cast<std::size_t>(i)].weights[idx[static_cast<std::size_t>(i)]];
      x[static_cast<std::size_t>(i)] =
          rules[static_cast<std::size_t>(i)].nodes[idx[static_cast<std::size_t>(i)]];
    }
    const double gx = g(x);
    if (kind == DivergenceKind::SqHellinger && gx >= 1.0) {
      throw DomainError("exact_objective: Hellinger requires sup g < 1");
    }
    const double p = std::exp(pair.p.log_density(x));
    const double q = std::exp(pair.q.log_density(x));
    total += w * (gx * p - gamma(kind, gx) * q);

    int i = 0;
    for (; i < d; ++i) {
      auto& j = idx[static_cast<std::size_t>(i)];
      if (++j < points_per_axis) break;
      j = 0;
    }
    if (i == d) break;
  }
  return total;
}

double monte_carlo_objective(DivergenceKind kind, const DistributionPair& pair,
                             const ScalarField& g, double* std_error) {
  RngStream rng(0x6d63696e74ull);  // fixed stream: the estimate is deterministic
  auto rng_x = rng.substream(1);
  auto rng_y = rng.substream(2);
  auto xs = pair.p.sample(rng_x, kMonteCarloSamples);
  auto ys = pair.q.sample(rng_y, kMonteCarloSamples);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t i = 0; i < kMonteCarloSamples; ++i) {
    const double gy = g(ys[i]);
    if (kind == DivergenceKind::SqHellinger && gy >= 1.0) {
      throw DomainError("exact_objective: Hellinger requires sup g < 1");
    }
    const double term = g(xs[i]) - gamma(kind, gy);
    sum += term;
    sumsq += term * term;
  }
  const double n = static_cast<double>(kMonteCarloSamples);
  const double mean = sum / n;
  if (std_error != nullptr) {
    const double var = std::max(0.0, sumsq / n - mean * mean);
    *std_error = std::sqrt(var / n);
  }
  return mean;
}

double coordinate_kl(const Marginal1D& p, const Marginal1D& q, double tol) {
  return quadrature_1d(
      [&](double x) { return p.density(x) * (p.log_density(x) - q.log_density(x)); }, p.lo(),
      p.hi(), tol);
}

}  // namespace

std::string_view to_string(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::KL: return "kl";
    case DivergenceKind::ChiSq: return "chisq";
    case DivergenceKind::SqHellinger: return "hellinger";
  }
  return "?";
}

DivergenceKind divergence_from_string(std::string_view s) {
  if (s == "kl") return DivergenceKind::KL;
  if (s == "chisq") return DivergenceKind::ChiSq;
  if (s == "hellinger") return DivergenceKind::SqHellinger;
  throw ConfigError("unknown divergence kind '" + std::string(s) +
                    "' (expected kl | chisq | hellinger)");
}

double gamma(DivergenceKind kind, double x) {
  switch (kind) {
    case DivergenceKind::KL: return std::expm1(x);
    case DivergenceKind::ChiSq: return x + 0.25 * x * x;
    case DivergenceKind::SqHellinger:
      if (x >= 1.0) throw DomainError("gamma: Hellinger measurement has a pole at x = 1");
      return x / (1.0 - x);
  }
  return 0.0;
}

double gamma_prime(DivergenceKind kind, double x) {
  switch (kind) {
    case DivergenceKind::KL: return std::exp(x);
    case DivergenceKind::ChiSq: return 1.0 + 0.5 * x;
    case DivergenceKind::SqHellinger: {
      if (x >= 1.0) throw DomainError("gamma_prime: Hellinger measurement has a pole at x = 1");
      const double u = 1.0 - x;
      return 1.0 / (u * u);
    }
  }
  return 0.0;
}

double witness(DivergenceKind kind, const DistributionPair& pair, std::span<const double> x) {
  if (!pair.support().contains(x)) {
    throw DomainError("witness: point outside the support box");
  }
  const double log_ratio = pair.p.log_density(x) - pair.q.log_density(x);
  switch (kind) {
    case DivergenceKind::KL: return log_ratio;
    case DivergenceKind::ChiSq: return 2.0 * std::expm1(log_ratio);
    case DivergenceKind::SqHellinger: return -std::expm1(-0.5 * log_ratio);
  }
  return 0.0;
}

GroundTruthReport ground_truth(DivergenceKind kind, const DistributionPair& pair, double tol) {
  const int d = pair.dims();
  double value = 0.0;
  switch (kind) {
    case DivergenceKind::KL: {
      for (int i = 0; i < d; ++i) value += coordinate_kl(pair.p.marginal(i), pair.q.marginal(i), tol);
      break;
    }
    case DivergenceKind::ChiSq: {
      // chi^2 + 1 factorizes across coordinates.
      double prod = 1.0;
      for (int i = 0; i < d; ++i) {
        const Marginal1D& p = pair.p.marginal(i);
        const Marginal1D& q = pair.q.marginal(i);
        prod *= quadrature_1d(
            [&](double x) {
              const double px = p.density(x);
              return px * px / q.density(x);
            },
            p.lo(), p.hi(), tol);
      }
      value = prod - 1.0;
      break;
    }
    case DivergenceKind::SqHellinger: {
      // H^2 = 2 - 2 * prod of per-coordinate Bhattacharyya integrals.
      double prod = 1.0;
      for (int i = 0; i < d; ++i) {
        const Marginal1D& p = pair.p.marginal(i);
        const Marginal1D& q = pair.q.marginal(i);
        prod *= quadrature_1d([&](double x) { return std::sqrt(p.density(x) * q.density(x)); },
                              p.lo(), p.hi(), tol);
      }
      value = 2.0 - 2.0 * prod;
      break;
    }
  }
  if (value < 0.0) {
    if (value < -1e-8) {
      throw NonConvergence("ground_truth: negative value beyond quadrature tolerance");
    }
    value = 0.0;
  }
  return GroundTruthReport{kind, value, tol};
}

double exact_objective(DivergenceKind kind, const DistributionPair& pair, const ScalarField& g,
                       double* mc_std_error) {
  if (mc_std_error != nullptr) *mc_std_error = 0.0;
  if (pair.dims() > 3) {
    return monte_carlo_objective(kind, pair, g, mc_std_error);
  }
  const double fine = tensor_grid_objective(kind, pair, g, kTensorGridPoints);
  const double coarse = tensor_grid_objective(kind, pair, g, (kTensorGridPoints - 1) / 2 + 1);
  if (std::fabs(fine - coarse) > 1e-7 * std::max(1.0, std::fabs(fine))) {
    throw NonConvergence("exact_objective: tensor grid failed the refinement check");
  }
  return fine;
}

double empirical_objective(DivergenceKind kind, const ScalarField& g, const Points& x,
                           const Points& y) {
  if (x.size() == 0 || y.size() == 0) {
    throw DomainError("empirical_objective: need non-empty samples");
  }
  double sx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += g(x[i]);
  double sy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double gy = g(y[i]);
    if (kind == DivergenceKind::SqHellinger && gy >= 1.0) {
      throw DomainError("empirical_objective: Hellinger requires g < 1 on Q samples");
    }
    sy += gamma(kind, gy);
  }
  return sx / static_cast<double>(x.size()) - sy / static_cast<double>(y.size());
}

}  // namespace fdne
