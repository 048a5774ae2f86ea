#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fdne/rng.hpp"

namespace fdne {

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile, accurate to ~1e-15 relative over (0, 1).
double normal_icdf(double p);

/// Axis-aligned box in R^d with positive finite volume.
struct BoxSupport {
  int dims = 0;
  std::vector<double> lo;
  std::vector<double> hi;

  BoxSupport() = default;
  BoxSupport(std::vector<double> lo_, std::vector<double> hi_);

  double volume() const;
  bool contains(std::span<const double> x) const;
  bool operator==(const BoxSupport&) const = default;
};

/// One-dimensional marginal: truncated Gaussian or uniform on [lo, hi].
class Marginal1D {
 public:
  enum class Kind { TruncGauss, Uniform };

  static Marginal1D trunc_gauss(double mu, double sigma, double lo, double hi);
  static Marginal1D uniform(double lo, double hi);

  Kind kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

  double density(double x) const;
  double log_density(double x) const;  // -inf outside [lo, hi]
  double cdf(double x) const;

  /// Inverse-CDF draw; always lands in [lo, hi].
  double sample(RngStream& rng) const;

 private:
  Marginal1D() = default;

  Kind kind_ = Kind::Uniform;
  double lo_ = 0, hi_ = 1;
  double mu_ = 0, sigma_ = 1;
  double cdf_lo_ = 0, cdf_hi_ = 1;  // Phi((lo-mu)/sigma), Phi((hi-mu)/sigma)
  double log_norm_ = 0;             // log(sigma * Z) for TruncGauss, log(hi-lo) for Uniform
};

/// n points in R^d, row-major.
struct Points {
  int dims = 0;
  std::vector<double> data;

  Points() = default;
  Points(int d, std::size_t n) : dims(d), data(static_cast<std::size_t>(d) * n) {}

  std::size_t size() const { return dims == 0 ? 0 : data.size() / static_cast<std::size_t>(dims); }
  std::span<const double> operator[](std::size_t i) const {
    return {data.data() + i * static_cast<std::size_t>(dims), static_cast<std::size_t>(dims)};
  }
  std::span<double> row(std::size_t i) {
    return {data.data() + i * static_cast<std::size_t>(dims), static_cast<std::size_t>(dims)};
  }
};

/// Product of 1-D marginals on the induced box support.
class ProductDistribution {
 public:
  explicit ProductDistribution(std::vector<Marginal1D> marginals);

  int dims() const { return support_.dims; }
  const BoxSupport& support() const { return support_; }
  const Marginal1D& marginal(int i) const { return marginals_[static_cast<std::size_t>(i)]; }

  double log_density(std::span<const double> x) const;

  /// n i.i.d. draws; deterministic in the stream state.
  Points sample(RngStream& rng, std::size_t n) const;

 private:
  std::vector<Marginal1D> marginals_;
  BoxSupport support_;
};

/// (P, Q) on a shared box support; P << Q holds for the families here.
struct DistributionPair {
  ProductDistribution p;
  ProductDistribution q;

  DistributionPair(ProductDistribution p_, ProductDistribution q_);
  int dims() const { return p.dims(); }
  const BoxSupport& support() const { return p.support(); }
};

/// Expectation of a coordinate-separable integrand under a product measure.
///
/// The integrand is either a product or a sum of per-coordinate factors; a
/// null factor means the neutral element (1 for products, 0 for sums).
struct SeparableIntegrand {
  enum class Combine { Product, Sum };
  Combine combine = Combine::Product;
  std::vector<std::function<double(double)>> coord;
};

double expect_product(const ProductDistribution& dist, const SeparableIntegrand& integrand,
                      double tol = 1e-10);

}  // namespace fdne
