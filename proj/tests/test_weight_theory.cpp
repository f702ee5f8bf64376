#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "maxbell/errors.hpp"
#include "maxbell/weight_theory.hpp"

using namespace maxbell;

namespace {

LeafFunction two_leaves(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return LeafFunction(build_uniform_tree(1, 2), v);
}

}  // namespace

TEST_CASE("tree A_p constant and dual weight") {
  auto t = build_uniform_tree(3, 2);
  CHECK(ap_constant_tree(LeafFunction::constant(t, 1.0), 2) == doctest::Approx(1));
  CHECK(ap_constant_tree(two_leaves(2, 0.5), 2) == doctest::Approx(25.0 / 16));

  auto s = sigma_weight(two_leaves(4, 1), 2);
  CHECK(s[0] == doctest::Approx(0.25));
  CHECK(s[1] == doctest::Approx(1));
  s = sigma_weight(two_leaves(8, 1), 3);
  CHECK(s[0] == doctest::Approx(1 / std::sqrt(8.0)));
  CHECK_THROWS_AS(sigma_weight(two_leaves(0, 1), 2), DomainError);
}

TEST_CASE("A_p* constants of power weights") {
  auto c = power_weight_constants({1, 0, 2});
  CHECK(c.a == doctest::Approx(1));
  CHECK(c.c == doctest::Approx(1));
  c = power_weight_constants({2, 0.5, 3});
  CHECK(c.a == doctest::Approx(1 / 1.5));
  CHECK(c.c == doctest::Approx(2 / 1.5));
  c = power_weight_constants({1, -0.5, 2});
  CHECK(c.a == doctest::Approx(1 / 1.5));
  CHECK(c.c == doctest::Approx(1 / 1.5));
  CHECK_THROWS_AS(power_weight_constants({1, 1, 2}), DomainError);
  CHECK_THROWS_AS(power_weight_constants({1, -1, 2}), DomainError);

  for (double p : {1.5, 2.0, 3.0}) {
    for (double b : {-0.5, 0.0, 0.3 * (p - 1)}) {
      const auto exact = power_weight_constants({1.7, b, p});
      const auto solved = apstar_constants(PiecewisePower::power(1.7, b), p);
      CHECK(solved.a == doctest::Approx(exact.a).epsilon(1e-12));
      CHECK(solved.c == doctest::Approx(exact.c).epsilon(1e-12));
      CHECK(audit_apstar(PiecewisePower::power(1.7, b), p, exact).holds);
    }
  }
  CHECK(apstar_constants(PiecewisePower::constant(1), 2).a == doctest::Approx(1));
  CHECK_THROWS_AS(apstar_constants(PiecewisePower::power(1, 1), 2), NotApStarError);
}

TEST_CASE("A_p* tail integral against quadrature") {
  const auto wss = PiecewisePower({0.0, 0.4, 1.0}, {{{2, -0.3}}, {{2 * std::pow(0.4, -0.3), 0}}});
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double t : {0.01, 0.2, 0.4, 0.7}) {
    auto fn = [&](double s) { return wss(s) / (s * s); };
    const double oracle = t < 0.4 ? ts.integrate(fn, t, 0.4) + ts.integrate(fn, 0.4, 1.0) : ts.integrate(fn, t, 1.0);
    CHECK(apstar_tail_integral(wss, 2, t) == doctest::Approx(oracle).epsilon(1e-10));
  }
  CHECK(apstar_ratio(wss, 2, 0.5) == doctest::Approx(wss(0.5) / 0.5));
}

TEST_CASE("A_p* constants of a piecewise weight satisfy the defining inequality") {
  const auto wss = PiecewisePower({0.0, 0.4, 1.0}, {{{2, -0.3}}, {{2 * std::pow(0.4, -0.3), 0}}});
  const auto c = apstar_constants(wss, 2.0);
  const auto audit = audit_apstar(wss, 2.0, c, 4000, 1e-10);
  CHECK(audit.holds);
  // Best constants: the slack touches zero somewhere and a cannot shrink.
  CHECK(audit.worst_slack == doctest::Approx(0).epsilon(1e-6).scale(1));
  CHECK_FALSE(audit_apstar(wss, 2.0, {c.a * 0.99, c.c}, 4000, 1e-10).holds);
  CHECK_FALSE(audit_apstar(wss, 2.0, {c.a, c.c * 1.01 + 1e-3}, 4000, 1e-10).holds);
}
