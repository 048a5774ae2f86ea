#include "fdne/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fdne/errors.hpp"

namespace fdne {
namespace {

// QUADPACK dqk15 abscissae (positive half) and weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double lo, hi;
  double integral;  // K15 value
  double err;       // |K15 - G7|
};

Panel evaluate_panel(const std::function<double(double)>& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::fabs(kronrod - gauss)};
}

}  // namespace

double quadrature_1d(const std::function<double(double)>& f, double lo, double hi,
                     double tol, std::size_t max_subintervals) {
  if (!(hi > lo)) throw DomainError("quadrature_1d: empty interval");
  if (!(tol > 0)) throw DomainError("quadrature_1d: tolerance must be positive");

  const double total_width = hi - lo;
  std::vector<Panel> pending{evaluate_panel(f, lo, hi)};
  std::size_t panels_created = 1;
  double accepted = 0.0;

  while (!pending.empty()) {
    Panel p = pending.back();
    pending.pop_back();
    // Local budget proportional to width keeps the summed error below tol.
    if (p.err <= tol * (p.hi - p.lo) / total_width || p.err == 0.0) {
      accepted += p.integral;
      continue;
    }
    if (panels_created + 1 > max_subintervals) {
      throw NonConvergence("quadrature_1d: subdivision budget (" +
                           std::to_string(max_subintervals) + ") exhausted");
    }
    const double mid = 0.5 * (p.lo + p.hi);
    pending.push_back(evaluate_panel(f, p.lo, mid));
    pending.push_back(evaluate_panel(f, mid, p.hi));
    panels_created += 1;  // one split: net +1 interval
  }
  return accepted;
}

GridRule1D clenshaw_curtis(std::size_t points, double lo, double hi) {
  if (points < 2 || points % 2 == 0) {
    throw DomainError("clenshaw_curtis: need an odd point count >= 3");
  }
  if (!(hi > lo)) throw DomainError("clenshaw_curtis: empty interval");

  const std::size_t n = points - 1;  // even
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  GridRule1D rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  for (std::size_t j = 0; j <= n; ++j) {
    const double theta = std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    double w = 1.0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
      const double b = (k == n / 2) ? 1.0 : 2.0;
      w -= b * std::cos(2.0 * static_cast<double>(k) * theta) /
           static_cast<double>(4 * k * k - 1);
    }
    const double c = (j == 0 || j == n) ? 1.0 : 2.0;
    w *= c / static_cast<double>(n);
    // Nodes descend from hi to lo as j grows; clamp away endpoint rounding.
    rule.nodes[j] = std::min(std::max(mid + half * std::cos(theta), lo), hi);
    rule.weights[j] = w * half;
  }
  return rule;
}

}  // namespace fdne
