#include <doctest.h>

#include <cmath>
#include <vector>

#include "fdne/errors.hpp"
#include "fdne/network.hpp"
#include "fdne/rng.hpp"

#include "support.hpp"

using namespace fdne;

TEST_CASE("expand_bounds resolves the named classes") {
  const auto star = expand_bounds(NetworkClassSpec::star(1.0), 4.0);
  CHECK(star.a1 == doctest::Approx(2.0 * std::log(4.0)).epsilon(1e-15));
  CHECK(star.a2 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(star.a3 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(!star.trunc);

  const auto ones = expand_bounds(NetworkClassSpec::ones(), 17.0);
  CHECK(ones.a1 == 1.0);
  CHECK(ones.a2 == 1.0);
  CHECK(ones.a3 == 1.0);
  CHECK(!ones.trunc);

  // m = 0.5 log k and t = 1/log k evaluated at k = e^2.
  const double k = std::exp(2.0);
  const auto trunc = expand_bounds(NetworkClassSpec::truncated_star(0.5 * std::log(k), 1.0 / std::log(k)), k);
  CHECK(trunc.a3 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trunc.trunc.has_value());
  CHECK(*trunc.trunc == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(expand_bounds(NetworkClassSpec::star(1.0), 1.0), InvalidSpec);
  CHECK_THROWS_AS(expand_bounds(NetworkClassSpec::truncated_star(1.0, 0.5), 1.9), InvalidSpec);
}

TEST_CASE("forward at hand-checkable parameter settings") {
  NetParams p = NetParams::zeros(1, 2);
  const ParamBounds bounds(1, 1, 1);
  const std::vector<double> x{0.3, -0.8};
  CHECK(forward(p, bounds, x) == 0.0);

  p.beta[0] = 1.0;  // w = 0, b = 0 -> sigmoid(0) = 0.5 anywhere
  CHECK(forward(p, bounds, x) == doctest::Approx(0.5).epsilon(1e-15));

  ParamBounds truncated(1, 1, 1, 0.1);
  p.b0 = 1.0;  // pre-truncation value 1.5
  CHECK(forward(p, truncated, x) == doctest::Approx(0.9).epsilon(1e-15));
}

TEST_CASE("forward respects the class output bound") {
  RngStream rng(100);
  const ParamBounds plain(1.5, 0.7, 0.4);
  const ParamBounds truncated(1.5, 0.7, 0.4, 0.25);
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + static_cast<int>(rng.below(6));
    const int d = 1 + static_cast<int>(rng.below(3));
    const auto params = testsup::random_inbox_params(k, d, plain, rng);
    std::vector<double> x(static_cast<std::size_t>(d));
    for (auto& v : x) v = rng.uniform(-2.0, 2.0);
    const double cap = k * plain.a2 + plain.a3;
    CHECK(std::fabs(forward(params, plain, x)) <= cap + 1e-12);
    CHECK(forward(params, truncated, x) <= 1.0 - 0.25 + 1e-15);
  }
}

TEST_CASE("gradient at the zero network") {
  NetParams p = NetParams::zeros(3, 2);
  const ParamBounds bounds(1, 1, 1);
  const std::vector<double> x{0.4, 0.6};
  const NetParams g = grad_params(p, bounds, x);
  CHECK(g.b0 == 1.0);
  for (int i = 0; i < 3; ++i) {
    CHECK(g.beta[static_cast<std::size_t>(i)] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.b[static_cast<std::size_t>(i)] == 0.0);  // beta = 0 kills the chain
    CHECK(g.w_at(i, 0) == 0.0);
    CHECK(g.w_at(i, 1) == 0.0);
  }
}

TEST_CASE("gradient matches central finite differences") {
  RngStream rng(2718);
  const ParamBounds bounds(2.0, 1.0, 1.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    NetParams p = testsup::random_inbox_params(3, 2, bounds, rng);
    std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const NetParams analytic = grad_params(p, bounds, x);
    const auto grads = testsup::flatten(analytic);
    auto slots = testsup::param_slots(p);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const double keep = *slots[s];
      *slots[s] = keep + h;
      const double up = forward(p, bounds, x);
      *slots[s] = keep - h;
      const double down = forward(p, bounds, x);
      *slots[s] = keep;
      const double fd = (up - down) / (2 * h);
      CHECK(grads[s] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("saturated truncated network has zero gradient") {
  NetParams p = NetParams::zeros(2, 1);
  p.b0 = 0.95;
  const ParamBounds bounds(1, 1, 1, 0.1);  // cut at 0.9 < 0.95
  const std::vector<double> x{0.0};
  const NetParams g = grad_params(p, bounds, x);
  for (const double v : testsup::flatten(g)) CHECK(v == 0.0);
}

TEST_CASE("projection clamps, is idempotent and non-expansive") {
  const ParamBounds bounds(1.0, 0.5, 0.25);
  RngStream rng(55);
  for (int trial = 0; trial < 200; ++trial) {
    NetParams raw = NetParams::zeros(4, 3);
    for (double*& slot : testsup::param_slots(raw)) *slot = rng.uniform(-3, 3);
    const NetParams once = project(raw, bounds);
    CHECK(in_box(once, bounds));
    const NetParams twice = project(once, bounds);
    CHECK(testsup::flatten(once) == testsup::flatten(twice));

    // |clip(v) - clip(u)| <= |v - u| per coordinate.
    NetParams other = NetParams::zeros(4, 3);
    for (double*& slot : testsup::param_slots(other)) *slot = rng.uniform(-3, 3);
    const auto a = testsup::flatten(raw);
    const auto b = testsup::flatten(other);
    const auto pa = testsup::flatten(project(raw, bounds));
    const auto pb = testsup::flatten(project(other, bounds));
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::fabs(pa[i] - pb[i]) <= std::fabs(a[i] - b[i]) + 1e-15);
    }
  }

  NetParams p = NetParams::zeros(1, 1);
  p.beta[0] = 0.7;
  project_inplace(p, bounds);
  CHECK(p.beta[0] == 0.5);

  NetParams inbox = NetParams::zeros(1, 1);
  inbox.beta[0] = 0.4;
  const auto kept = project(inbox, bounds);
  CHECK(kept.beta[0] == 0.4);
}

TEST_CASE("output is 1-Lipschitz in the beta group") {
  RngStream rng(81);
  const ParamBounds bounds(2.0, 1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    NetParams a = testsup::random_inbox_params(5, 2, bounds, rng);
    NetParams b = a;
    double l1 = 0;
    for (auto& v : b.beta) {
      const double nv = rng.uniform(-1, 1);
      l1 += std::fabs(nv - v);
      v = nv;
    }
    std::vector<double> x{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    CHECK(std::fabs(forward(a, bounds, x) - forward(b, bounds, x)) <= l1 + 1e-12);
  }
}

TEST_CASE("init draws inside the box and respects degenerate bounds") {
  RngStream r1(7, 2), r2(7, 2);
  const ParamBounds ones(1, 1, 1);
  const NetParams a = init_params(4, 3, ones, r1);
  const NetParams b = init_params(4, 3, ones, r2);
  CHECK(testsup::flatten(a) == testsup::flatten(b));
  for (const double v : testsup::flatten(a)) CHECK(std::fabs(v) <= 0.1);

  RngStream r3(9);
  const NetParams zero = init_params(2, 2, ParamBounds(0, 0, 0), r3);
  for (const double v : testsup::flatten(zero)) CHECK(v == 0.0);
}

TEST_CASE("checkpoint JSON round-trips exactly") {
  RngStream rng(123);
  const ParamBounds bounds(2.0, 0.5, 1.0, 0.2);
  const NetParams p = testsup::random_inbox_params(3, 2, bounds, rng);
  const std::string text = checkpoint_to_json(p, bounds);
  const auto [q, qb] = checkpoint_from_json(text);
  CHECK(q.k == p.k);
  CHECK(q.d == p.d);
  CHECK(testsup::flatten(q) == testsup::flatten(p));
  CHECK(qb.a1 == bounds.a1);
  CHECK(qb.a2 == bounds.a2);
  CHECK(qb.a3 == bounds.a3);
  REQUIRE(qb.trunc.has_value());
  CHECK(*qb.trunc == 0.2);

  CHECK_THROWS_AS(checkpoint_from_json("{\"k\": 1}"), ConfigError);
  CHECK_THROWS_AS(checkpoint_from_json("not json"), ConfigError);
}
