#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "fdne/distributions.hpp"
#include "fdne/errors.hpp"
#include "fdne/quadrature.hpp"
#include "fdne/rng.hpp"

#include "support.hpp"

using namespace fdne;

TEST_CASE("normal_icdf inverts normal_cdf to near machine precision") {
  CHECK(normal_icdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(normal_icdf(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  for (double p = 0.0005; p < 1.0; p += 0.0101) {
    const double x = normal_icdf(p);
    CHECK(std::fabs(normal_cdf(x) - p) < 1e-14);
  }
  CHECK_THROWS_AS(normal_icdf(0.0), DomainError);
  CHECK_THROWS_AS(normal_icdf(1.0), DomainError);
}

TEST_CASE("construction validates bounds") {
  CHECK_THROWS_AS(Marginal1D::uniform(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Marginal1D::trunc_gauss(0, -1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(BoxSupport({0.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(DistributionPair(ProductDistribution({Marginal1D::uniform(0, 1)}),
                                   ProductDistribution({Marginal1D::uniform(0, 2)})),
                  std::invalid_argument);
}

TEST_CASE("marginal densities integrate to one") {
  const auto tg = Marginal1D::trunc_gauss(0.3, 1.7, -0.5, 2.0);
  const auto un = Marginal1D::uniform(-2.0, 5.0);
  for (const auto& m : {tg, un}) {
    const double mass =
        quadrature_1d([&](double x) { return m.density(x); }, m.lo(), m.hi(), 1e-12);
    CHECK(std::fabs(mass - 1.0) < 1e-8);
  }
}

TEST_CASE("uniform log densities match -log volume") {
  ProductDistribution unit({Marginal1D::uniform(0, 1), Marginal1D::uniform(0, 1)});
  const std::vector<double> mid{0.5, 0.5};
  CHECK(unit.log_density(mid) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));

  ProductDistribution box({Marginal1D::uniform(0.1, 2.0), Marginal1D::uniform(-1.0, 0.0)});
  const std::vector<double> x{1.0, -0.5};
  CHECK(box.log_density(x) == doctest::Approx(-std::log(1.9)).epsilon(1e-15));
}

TEST_CASE("truncated gaussian log density at the boundary") {
  const auto m = Marginal1D::trunc_gauss(0.0, 1.0, 0.1, 2.0);
  const double z = quadrature_1d(
      [](double x) { return testsup::normal_pdf(x); }, 0.1, 2.0, 1e-12);
  const double want = -0.5 * 0.01 - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(z);
  CHECK(m.log_density(0.1) == doctest::Approx(want).epsilon(1e-10));
  CHECK(m.log_density(0.0999) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("product log density equals the sum of marginal log densities") {
  const auto pair = testsup::gauss2d_pair();
  RngStream rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto x = testsup::random_point_in(pair.support(), rng);
    double sum = 0;
    for (int j = 0; j < pair.dims(); ++j) sum += pair.p.marginal(j).log_density(x[static_cast<std::size_t>(j)]);
    CHECK(pair.p.log_density(x) == sum);  // identical fp operations
  }
  const std::vector<double> outside{3.0, -0.5};
  CHECK(pair.p.log_density(outside) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("sampling is deterministic and stays inside the support") {
  ProductDistribution u({Marginal1D::uniform(0, 1)});
  RngStream r1(77, 3), r2(77, 3);
  const auto a = u.sample(r1, 3);
  const auto b = u.sample(r2, 3);
  CHECK(a.data == b.data);  // bit-identical
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i][0] >= 0.0);
    CHECK(a[i][0] <= 1.0);
  }

  const auto pair = testsup::gauss2d_pair();
  RngStream rng(123, 0);
  const auto pts = pair.p.sample(rng, 10000);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(pair.support().contains(pts[i]));
}

TEST_CASE("truncated gaussian sample mean matches the phi/Phi formula") {
  const auto m = Marginal1D::trunc_gauss(0.0, 1.0, 0.1, 2.0);
  ProductDistribution dist({m});
  RngStream rng(2024);
  const std::size_t n = 10000;
  const auto pts = dist.sample(rng, n);
  double sum = 0, sumsq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += pts[i][0];
    sumsq += pts[i][0] * pts[i][0];
  }
  const double mean = sum / static_cast<double>(n);
  const double sd = std::sqrt(sumsq / static_cast<double>(n) - mean * mean);
  const double want = testsup::trunc_normal_mean(0.0, 1.0, 0.1, 2.0);
  CHECK(std::fabs(mean - want) < 3.0 * sd / std::sqrt(static_cast<double>(n)));

  // Same value through the quadrature path.
  const double by_quad =
      quadrature_1d([&](double x) { return x * m.density(x); }, 0.1, 2.0, 1e-12);
  CHECK(by_quad == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("per-coordinate empirical CDF tracks the analytic CDF") {
  const auto pair = testsup::gauss2d_pair();
  RngStream rng(9, 1);
  const std::size_t n = 10000;
  const auto pts = pair.p.sample(rng, n);
  for (int j = 0; j < 2; ++j) {
    const auto& m = pair.p.marginal(j);
    for (double q : {0.25, 0.5, 0.75}) {
      const double x = m.lo() + q * (m.hi() - m.lo());
      double below = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (pts[i][static_cast<std::size_t>(j)] <= x) ++below;
      }
      const double emp = below / static_cast<double>(n);
      CHECK(std::fabs(emp - m.cdf(x)) < 4.0 / std::sqrt(static_cast<double>(n)));
    }
  }
}

TEST_CASE("expect_product handles products and sums of 1-D factors") {
  const auto pair = testsup::gauss2d_pair();

  SeparableIntegrand one{SeparableIntegrand::Combine::Product, {nullptr, nullptr}};
  CHECK(expect_product(pair.q, one) == doctest::Approx(1.0).epsilon(1e-12));

  SeparableIntegrand coord1{SeparableIntegrand::Combine::Product,
                            {[](double x) { return x; }, nullptr}};
  CHECK(expect_product(pair.p, coord1) ==
        doctest::Approx(testsup::trunc_normal_mean(0, 1, 0.1, 2.0)).epsilon(1e-10));

  // Sum form: E_P[x_1 + x_2].
  SeparableIntegrand sum{SeparableIntegrand::Combine::Sum,
                         {[](double x) { return x; }, [](double x) { return x; }}};
  const double want = testsup::trunc_normal_mean(0, 1, 0.1, 2.0) +
                      testsup::trunc_normal_mean(0, 1, -1.0, 0.0);
  CHECK(expect_product(pair.p, sum) == doctest::Approx(want).epsilon(1e-10));
}
