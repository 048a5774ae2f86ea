#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fdne {

/// Adaptive 1-D quadrature (Gauss 7 / Kronrod 15 with bisection).
///
/// Refines until the summed local error estimate is below `tol` (absolute).
/// Throws NonConvergence once `max_subintervals` have been created without
/// meeting the tolerance.
double quadrature_1d(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-10, std::size_t max_subintervals = 1000000);

/// Fixed quadrature rule: nodes and matching weights on [lo, hi].
struct GridRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Clenshaw-Curtis rule with `points` nodes (points = 2^m + 1 nests halves).
GridRule1D clenshaw_curtis(std::size_t points, double lo, double hi);

}  // namespace fdne
