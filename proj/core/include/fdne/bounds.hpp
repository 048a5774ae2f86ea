#pragma once

#include <cstdint>
#include <optional>

#include "fdne/divergences.hpp"
#include "fdne/network.hpp"

namespace fdne {

/// Closed-form upper bound on sup gamma'(g(x)) over the class:
///   KL: e^{k a2 + a3}, chi^2: 0.5 (k a2 + a3) + 1, H^2: 1/t^2.
double gamma_prime_sup(DivergenceKind kind, int k, const ParamBounds& bounds);

struct BoundInputs {
  DivergenceKind kind = DivergenceKind::KL;
  int k = 1;
  ParamBounds bounds;
  std::int64_t n = 1;
  double universal_C = 1.0;  // unnamed universal constant; all tails scale with it
};

struct BoundReport {
  double gamma_prime_sup_value = 0.0;
  double R = 0.0;  // 2 (gamma'_sup + 1) sqrt(k)
  double V = 0.0;  // 4 C a2^2 k R^2
  double E = 0.0;  // 4 sqrt(2) n^{-1/2} k^{3/2} a2 (gamma'_sup + 1)
  std::int64_t n = 1;
  double universal_C = 1.0;

  /// Deviation tail 2C exp(-n delta^2 / V); equals 2C at delta = 0.
  double tail(double delta) const;
};

BoundReport estimation_constants(const BoundInputs& inputs);

/// Parameter-space covering number bound (1 + sqrt(k) a2 R / (sqrt(n) eps))^k.
double covering_bound(int k, double a2, double R, std::int64_t n, double eps);

/// Dimension constant kappa_d with s = floor(d/2) + 2:
///   kappa_d^2 = (d + d^s) * Integral over R^d of (1 + |w|^{2(s-1)})^{-1},
/// reduced to a 1-D radial integral. Supported for 1 <= d <= 10.
double kappa_d(int d);

/// Barron-coefficient bound b * kappa_d * sqrt(d) for smooth functions.
double barron_bound(double b, int d);

enum class ScheduleMode { Theorem, OracleM, Experiment };

ScheduleMode schedule_mode_from_string(std::string_view s);
std::string_view to_string(ScheduleMode mode);

struct Schedule {
  int k = 0;
  double m_k = 0.0;               // 0.5 log k
  std::optional<double> t_k;      // 1 / log k, Hellinger only
};

/// Width schedule k(n) per estimation mode, with the class scale m_k and the
/// Hellinger truncation t_k.
Schedule schedule(DivergenceKind kind, std::int64_t n, ScheduleMode mode);

/// Which bound family the rate shape comes from: Theorem uses the adaptive
/// m_k = 0.5 log k rates, OracleM the known-scale (m_k = M) rates.
enum class RateVariant { Theorem, OracleM };

/// Effective-error shape with all hidden constants set to one; a qualitative
/// comparison aid, not a certified bound.
double effective_rate(DivergenceKind kind, double k, double n,
                      RateVariant variant = RateVariant::Theorem);

}  // namespace fdne
