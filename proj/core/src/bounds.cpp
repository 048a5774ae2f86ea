#include "fdne/bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fdne/errors.hpp"
#include "fdne/quadrature.hpp"

namespace fdne {
namespace {

// Largest k in [2, k_cap] with constraint(k) <= budget; constraint increasing.
template <typename F>
int truncate_to_constraint(int k_cap, double budget, F constraint) {
  if (constraint(2.0) > budget) return 0;
  int lo = 2, hi = k_cap;
  while (lo < hi) {
    const int mid = lo + (hi - lo + 1) / 2;
    if (constraint(static_cast<double>(mid)) <= budget) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

}  // namespace

double gamma_prime_sup(DivergenceKind kind, int k, const ParamBounds& bounds) {
  if (k < 1) throw std::invalid_argument("gamma_prime_sup: k must be >= 1");
  const double reach = static_cast<double>(k) * bounds.a2 + bounds.a3;  // sup |g|
  switch (kind) {
    case DivergenceKind::KL: return std::exp(reach);
    case DivergenceKind::ChiSq: return 0.5 * reach + 1.0;
    case DivergenceKind::SqHellinger: {
      if (!bounds.trunc) {
        throw MissingTruncation("gamma_prime_sup: Hellinger needs a truncation level");
      }
      return 1.0 / (*bounds.trunc * *bounds.trunc);
    }
  }
  return 0.0;
}

double BoundReport::tail(double delta) const {
  if (delta < 0) throw DomainError("tail: delta must be >= 0");
  if (delta == 0.0) return 2.0 * universal_C;
  if (V == 0.0) return 0.0;
  return 2.0 * universal_C * std::exp(-static_cast<double>(n) * delta * delta / V);
}

BoundReport estimation_constants(const BoundInputs& inputs) {
  if (inputs.n < 1 || inputs.k < 1) {
    throw std::invalid_argument("estimation_constants: need n >= 1 and k >= 1");
  }
  if (!(inputs.universal_C > 0)) {
    throw std::invalid_argument("estimation_constants: C must be positive");
  }
  BoundReport r;
  r.n = inputs.n;
  r.universal_C = inputs.universal_C;
  r.gamma_prime_sup_value = gamma_prime_sup(inputs.kind, inputs.k, inputs.bounds);
  const double k = static_cast<double>(inputs.k);
  r.R = 2.0 * (r.gamma_prime_sup_value + 1.0) * std::sqrt(k);
  r.V = 4.0 * inputs.universal_C * inputs.bounds.a2 * inputs.bounds.a2 * k * r.R * r.R;
  r.E = 4.0 * std::numbers::sqrt2 * std::pow(static_cast<double>(inputs.n), -0.5) *
        std::pow(k, 1.5) * inputs.bounds.a2 * (r.gamma_prime_sup_value + 1.0);
  return r;
}

double covering_bound(int k, double a2, double R, std::int64_t n, double eps) {
  if (!(eps > 0)) throw DomainError("covering_bound: eps must be positive");
  if (k < 1 || n < 1) throw std::invalid_argument("covering_bound: need k, n >= 1");
  const double kk = static_cast<double>(k);
  const double term = std::sqrt(kk) * a2 * R / (std::sqrt(static_cast<double>(n)) * eps);
  return std::pow(1.0 + term, kk);
}

double kappa_d(int d) {
  if (d < 1 || d > 10) throw std::invalid_argument("kappa_d: supported for 1 <= d <= 10");
  const int s = d / 2 + 2;
  const double p = 2.0 * (s - 1);  // decay exponent; p >= d + 1 so the tail integrates
  // Radial reduction: head on [0, 1] plus the u = 1/r transformed tail.
  const double head =
      quadrature_1d([&](double r) { return std::pow(r, d - 1) / (1.0 + std::pow(r, p)); },
                    0.0, 1.0, 1e-12);
  const double tail =
      quadrature_1d([&](double u) { return std::pow(u, p - d - 1) / (1.0 + std::pow(u, p)); },
                    0.0, 1.0, 1e-12);
  const double surface = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
  const double kappa_sq =
      (d + std::pow(static_cast<double>(d), s)) * surface * (head + tail);
  return std::sqrt(kappa_sq);
}

double barron_bound(double b, int d) {
  if (b < 0) throw std::invalid_argument("barron_bound: b must be >= 0");
  return b * kappa_d(d) * std::sqrt(static_cast<double>(d));
}

ScheduleMode schedule_mode_from_string(std::string_view s) {
  if (s == "theorem") return ScheduleMode::Theorem;
  if (s == "oracle_M") return ScheduleMode::OracleM;
  if (s == "experiment") return ScheduleMode::Experiment;
  throw ConfigError("unknown schedule mode '" + std::string(s) +
                    "' (expected theorem | oracle_M | experiment)");
}

std::string_view to_string(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::Theorem: return "theorem";
    case ScheduleMode::OracleM: return "oracle_M";
    case ScheduleMode::Experiment: return "experiment";
  }
  return "?";
}

Schedule schedule(DivergenceKind kind, std::int64_t n, ScheduleMode mode) {
  if (n < 16) throw ConfigError("schedule: need n >= 16");
  const double nd = static_cast<double>(n);
  constexpr double eta = 0.01;

  int k = 0;
  switch (mode) {
    case ScheduleMode::Experiment:
      k = static_cast<int>(std::lround(std::pow(nd, 0.2)));
      break;
    case ScheduleMode::OracleM:
      k = static_cast<int>(std::lround(std::sqrt(nd)));
      break;
    case ScheduleMode::Theorem: {
      if (kind == DivergenceKind::KL) {
        k = static_cast<int>(std::lround(std::pow(nd, 1.0 / 3.0 - eta)));
      } else {
        const double budget = std::pow(nd, 0.5 - eta);
        const int cap = static_cast<int>(std::lround(budget));
        if (kind == DivergenceKind::ChiSq) {
          k = truncate_to_constraint(cap, budget, [](double kk) {
            const double l = std::log(kk);
            return std::sqrt(kk) * l * l;
          });
        } else {
          k = truncate_to_constraint(cap, budget, [](double kk) {
            const double l = std::log(kk);
            return std::sqrt(kk) * l * l * l;
          });
        }
      }
      break;
    }
  }
  if (kind == DivergenceKind::SqHellinger) k = std::max(k, 3);
  if (k < 2) throw ConfigError("schedule: n too small to reach k >= 2");

  Schedule s;
  s.k = k;
  s.m_k = 0.5 * std::log(static_cast<double>(k));
  if (kind == DivergenceKind::SqHellinger) s.t_k = 1.0 / std::log(static_cast<double>(k));
  return s;
}

double effective_rate(DivergenceKind kind, double k, double n, RateVariant variant) {
  if (!(k >= 3) || !(n >= 1)) throw std::invalid_argument("effective_rate: need k >= 3, n >= 1");
  const double approx = 1.0 / std::sqrt(k);
  const double root_n = std::sqrt(n);
  const double logk = std::log(k);
  switch (kind) {
    case DivergenceKind::KL:
      return variant == RateVariant::Theorem ? approx + k * std::sqrt(k) / root_n
                                             : approx + std::sqrt(k) / root_n;
    case DivergenceKind::ChiSq:
      return variant == RateVariant::Theorem ? approx + std::sqrt(k) * logk * logk / root_n
                                             : approx + std::sqrt(k) / root_n;
    case DivergenceKind::SqHellinger:
      return variant == RateVariant::Theorem
                 ? logk * approx + logk * logk * logk * std::sqrt(k) / root_n
                 : logk * approx + std::sqrt(k) * logk * logk / root_n;
  }
  return 0.0;
}

}  // namespace fdne
