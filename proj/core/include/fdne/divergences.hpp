#pragma once

#include <functional>
#include <span>
#include <string_view>

#include "fdne/distributions.hpp"

namespace fdne {

enum class DivergenceKind { KL, ChiSq, SqHellinger };

std::string_view to_string(DivergenceKind kind);
DivergenceKind divergence_from_string(std::string_view s);  // "kl" | "chisq" | "hellinger"

/// Measurement function of the variational form:
///   KL: e^x - 1, chi^2: x + x^2/4, H^2: x/(1-x) (pole at x = 1).
double gamma(DivergenceKind kind, double x);
double gamma_prime(DivergenceKind kind, double x);

/// Optimal dual witness evaluated from log-density differences:
///   KL: log(dP/dQ), chi^2: 2(dP/dQ - 1), H^2: 1 - (dP/dQ)^{-1/2}.
double witness(DivergenceKind kind, const DistributionPair& pair, std::span<const double> x);

struct GroundTruthReport {
  DivergenceKind kind;
  double value;
  double quadrature_tol;
};

/// Exact divergence via per-coordinate quadrature on the factorized pair.
GroundTruthReport ground_truth(DivergenceKind kind, const DistributionPair& pair,
                               double tol = 1e-10);

using ScalarField = std::function<double(std::span<const double>)>;

/// E_P[g] - E_Q[gamma(g)] by tensor-grid quadrature (d <= 3) or, beyond that,
/// a fixed-seed 10^6-sample Monte Carlo estimate (std error via `mc_std_error`).
double exact_objective(DivergenceKind kind, const DistributionPair& pair, const ScalarField& g,
                       double* mc_std_error = nullptr);

/// Sample-mean version of the objective on given points.
double empirical_objective(DivergenceKind kind, const ScalarField& g, const Points& x,
                           const Points& y);

}  // namespace fdne
