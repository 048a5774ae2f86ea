#include "fdne/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fdne/errors.hpp"
#include "fdne/quadrature.hpp"

namespace fdne {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

double acklam_icdf(double p) {
  // Peter Acklam's rational approximation, |relative error| < 1.15e-9.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;

  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0); }

double normal_icdf(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw DomainError("normal_icdf: p must lie strictly inside (0, 1)");
  }
  double x = acklam_icdf(p);
  // One Halley step against erfc brings the result to full double precision.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

BoxSupport::BoxSupport(std::vector<double> lo_, std::vector<double> hi_)
    : dims(static_cast<int>(lo_.size())), lo(std::move(lo_)), hi(std::move(hi_)) {
  if (dims < 1 || hi.size() != lo.size()) {
    throw std::invalid_argument("BoxSupport: need matching non-empty bound vectors");
  }
  for (int i = 0; i < dims; ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i])) {
      throw std::invalid_argument("BoxSupport: lo[" + std::to_string(i) + "] < hi[" +
                                  std::to_string(i) + "] violated");
    }
  }
}

double BoxSupport::volume() const {
  double v = 1.0;
  for (int i = 0; i < dims; ++i) v *= hi[i] - lo[i];
  return v;
}

bool BoxSupport::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dims) return false;
  for (int i = 0; i < dims; ++i) {
    if (!(x[i] >= lo[i]) || !(x[i] <= hi[i])) return false;
  }
  return true;
}

Marginal1D Marginal1D::trunc_gauss(double mu, double sigma, double lo, double hi) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("Marginal1D: sigma must be positive and finite");
  }
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("Marginal1D: need finite lo < hi");
  }
  Marginal1D m;
  m.kind_ = Kind::TruncGauss;
  m.lo_ = lo;
  m.hi_ = hi;
  m.mu_ = mu;
  m.sigma_ = sigma;
  m.cdf_lo_ = normal_cdf((lo - mu) / sigma);
  m.cdf_hi_ = normal_cdf((hi - mu) / sigma);
  const double z = m.cdf_hi_ - m.cdf_lo_;
  if (!(z > 0)) {
    throw std::invalid_argument("Marginal1D: truncation interval carries no mass");
  }
  m.log_norm_ = std::log(sigma) + std::log(z);
  return m;
}

Marginal1D Marginal1D::uniform(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("Marginal1D: need finite lo < hi");
  }
  Marginal1D m;
  m.kind_ = Kind::Uniform;
  m.lo_ = lo;
  m.hi_ = hi;
  m.log_norm_ = std::log(hi - lo);
  return m;
}

double Marginal1D::log_density(double x) const {
  if (!(x >= lo_) || !(x <= hi_)) return -kInf;
  if (kind_ == Kind::Uniform) return -log_norm_;
  const double z = (x - mu_) / sigma_;
  return -0.5 * z * z - kLogSqrt2Pi - log_norm_;
}

double Marginal1D::density(double x) const {
  const double l = log_density(x);
  return l == -kInf ? 0.0 : std::exp(l);
}

double Marginal1D::cdf(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  if (kind_ == Kind::Uniform) return (x - lo_) / (hi_ - lo_);
  return (normal_cdf((x - mu_) / sigma_) - cdf_lo_) / (cdf_hi_ - cdf_lo_);
}

double Marginal1D::sample(RngStream& rng) const {
  const double u = rng.next_double();
  double x;
  if (kind_ == Kind::Uniform) {
    x = lo_ + u * (hi_ - lo_);
  } else {
    const double p = cdf_lo_ + u * (cdf_hi_ - cdf_lo_);
    x = mu_ + sigma_ * normal_icdf(p);
  }
  return std::min(std::max(x, lo_), hi_);
}

ProductDistribution::ProductDistribution(std::vector<Marginal1D> marginals)
    : marginals_(std::move(marginals)) {
  if (marginals_.empty()) {
    throw std::invalid_argument("ProductDistribution: need at least one marginal");
  }
  std::vector<double> lo, hi;
  lo.reserve(marginals_.size());
  hi.reserve(marginals_.size());
  for (const auto& m : marginals_) {
    lo.push_back(m.lo());
    hi.push_back(m.hi());
  }
  support_ = BoxSupport(std::move(lo), std::move(hi));
}

double ProductDistribution::log_density(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dims()) {
    throw std::invalid_argument("log_density: point dimension mismatch");
  }
  double sum = 0.0;
  for (int i = 0; i < dims(); ++i) {
    const double l = marginals_[static_cast<std::size_t>(i)].log_density(x[i]);
    if (l == -kInf) return -kInf;
    sum += l;
  }
  return sum;
}

Points ProductDistribution::sample(RngStream& rng, std::size_t n) const {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  Points pts(dims(), n);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = pts.row(i);
    for (int j = 0; j < dims(); ++j) {
      row[static_cast<std::size_t>(j)] = marginals_[static_cast<std::size_t>(j)].sample(rng);
    }
  }
  return pts;
}

DistributionPair::DistributionPair(ProductDistribution p_, ProductDistribution q_)
    : p(std::move(p_)), q(std::move(q_)) {
  if (!(p.support() == q.support())) {
    throw std::invalid_argument("DistributionPair: P and Q must share their support box");
  }
}

double expect_product(const ProductDistribution& dist, const SeparableIntegrand& integrand,
                      double tol) {
  if (static_cast<int>(integrand.coord.size()) != dist.dims()) {
    throw std::invalid_argument("expect_product: factor count must equal dims");
  }
  const bool product = integrand.combine == SeparableIntegrand::Combine::Product;
  double acc = product ? 1.0 : 0.0;
  for (int i = 0; i < dist.dims(); ++i) {
    const auto& f = integrand.coord[static_cast<std::size_t>(i)];
    if (!f) continue;  // neutral factor
    const Marginal1D& m = dist.marginal(i);
    const double v = quadrature_1d([&](double x) { return f(x) * m.density(x); }, m.lo(),
                                   m.hi(), tol);
    if (product) {
      acc *= v;
    } else {
      acc += v;
    }
  }
  return acc;
}

}  // namespace fdne
