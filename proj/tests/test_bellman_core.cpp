#include <doctest.h>

#include <cmath>

#include "maxbell/bellman_core.hpp"
#include "maxbell/errors.hpp"

using namespace maxbell;

TEST_CASE("H_p") {
  CHECK(h_p(2, 1) == doctest::Approx(1));
  CHECK(h_p(2, 2) == doctest::Approx(0));
  CHECK(std::abs(h_p(3, 1.5)) < 1e-15);
  CHECK_THROWS_AS(h_p(1, 1), DomainError);
}

TEST_CASE("omega_p") {
  for (double p : {1.25, 2.0, 7.0}) {
    CHECK(omega_p(p, 1) == 1);
    CHECK(omega_p(p, 0) == p / (p - 1));
  }
  CHECK(omega_p(2, 0.75) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK_THROWS_AS(omega_p(2, 1.5), DomainError);
  CHECK_THROWS_AS(omega_p(2, -0.1), DomainError);
  // Monotone decreasing in y.
  for (double p : {1.5, 3.0}) {
    double prev = omega_p(p, 0);
    for (int i = 1; i <= 100; ++i) {
      const double cur = omega_p(p, i / 100.0);
      CHECK(cur <= prev);
      prev = cur;
    }
  }
}

TEST_CASE("omega_p from the gap 1 - y") {
  for (double gap : {1e-30, 1e-16, 1e-8, 0.01, 0.3, 0.9}) {
    CHECK(omega_p_gap(2, gap) == doctest::Approx(1 + std::sqrt(gap)).epsilon(1e-14));
  }
  for (double p : {1.5, 3.0}) {
    CHECK(omega_p_gap(p, 0) == 1);
    CHECK(omega_p_gap(p, 1) == doctest::Approx(p / (p - 1)).epsilon(1e-15));
    CHECK(omega_p_gap(p, 0.25) == doctest::Approx(omega_p(p, 0.75)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(omega_p_gap(2, -0.1), DomainError);
}

TEST_CASE("unweighted Bellman function and Doob") {
  CHECK(bellman_unweighted({2, 1, 1}) == doctest::Approx(1));
  CHECK(bellman_unweighted({2, 1, 0}) == doctest::Approx(4));
  CHECK(bellman_unweighted({2, 1, 0.5}) == doctest::Approx(std::pow(1 + std::sqrt(0.75), 2)).epsilon(1e-14));
  CHECK_THROWS_AS(bellman_unweighted({2, 1, 2}), DomainError);

  CHECK(doob_refined_l2(1, 1) == doctest::Approx(1));
  CHECK(doob_refined_l2(1, 0) == doctest::Approx(4));
  CHECK(doob_refined_l2(2, 1) == doctest::Approx(std::pow(std::sqrt(2.0) + 1, 2)));

  // Bounded by the classical constant and by F from below.
  for (double p : {1.5, 2.0, 4.0}) {
    for (double r = 0.0; r <= 1.0; r += 0.05) {
      const double F = 3.0;
      const double f = std::pow(r * F, 1 / p);
      const double v = bellman_unweighted({p, F, f});
      CHECK(v >= F * (1 - 1e-14));
      CHECK(v <= std::pow(p / (p - 1), p) * F * (1 + 1e-14));
    }
  }
}

TEST_CASE("weighted Bellman function") {
  for (double F : {1.0, 2.0, 5.0}) {
    for (double f = 0; f * f <= F; f += 0.25) {
      CHECK(bellman_star({{2, F, f}, 1, 1}) == doctest::Approx(bellman_unweighted({2, F, f})).epsilon(1e-14));
    }
  }
  CHECK(bellman_star({{2, 2, 1}, 1, 1}) == doctest::Approx(2 * std::pow(1 + std::sqrt(0.5), 2)));
  CHECK(bellman_star({{2, 1, 0}, 3, 0.5}) == doctest::Approx(9 * 4));
  CHECK_THROWS_AS(bellman_star({{2, 1, 2}, 1, 1}), DomainError);
}

TEST_CASE("beta-parametrised bound") {
  CHECK(ap2_rhs(2, 1, 1, 1, 0, 1) == doctest::Approx(4));
  CHECK(ap2_rhs(2, 1, 1, 1, 1, 1) == doctest::Approx(2));
  CHECK(ap2_rhs(2, 1, 1, 1, 0, 3) == doctest::Approx(16.0 / 3));
  CHECK_THROWS_AS(ap2_rhs(2, 1, 1, 1, 0, 0), DomainError);

  CHECK(minimize_ap2(2, 1, 1, 1, 1).value == doctest::Approx(1).epsilon(1e-9));
  CHECK(minimize_ap2(2, 1, 1, 1, 0).value == doctest::Approx(4).epsilon(1e-9));
  CHECK(minimize_ap2(2, 1, 1, 2, 1).value == doctest::Approx(5.8284271247).epsilon(1e-9));
  // The minimum never undercuts the closed form (it is an infimum over beta).
  for (double p : {1.5, 3.0}) {
    for (double f : {0.0, 0.3, 0.6}) {
      const double star = bellman_star({{p, 1, f}, 1 / (p - 1), 1 / (p - 1)});
      const auto m = minimize_ap2(p, 1 / (p - 1), 1 / (p - 1), 1, f);
      CHECK(m.value >= star * (1 - 1e-12));
      CHECK(ap2_rhs(p, 1 / (p - 1), 1 / (p - 1), 1, f, m.beta) == doctest::Approx(m.value));
    }
  }
}

TEST_CASE("double-maximal bounds") {
  CHECK(thm3_w1_bound(2, 1, 1, 1, 1, 1, 1) == doctest::Approx(1));
  CHECK(thm3_w1_bound(2, 1, 0, 0, 1, 1, 1) == doctest::Approx(16));
  CHECK(thm3_w2_bound(2, 1, 1, 1, 1) == doctest::Approx(4));
  CHECK(thm3_w2_bound(2, 1, 0, 1, 1) == doctest::Approx(16));
  CHECK(thm3_w2_bound(2, 1, 1, 1, 4) == doctest::Approx(16));

  // F=2, f=1, m=1.2 with unit totals: direct evaluation of the display.
  const double sigma_bound = 2 * std::pow(1 + std::sqrt(1 - 0.5), 2);
  const double w1 = sigma_bound * std::pow(1 + std::sqrt(1 - 1.44 / sigma_bound), 2);
  CHECK(thm3_w1_bound(2, 2, 1, 1.2, 1, 1, 1) == doctest::Approx(w1).epsilon(1e-14));
  CHECK_THROWS_AS(thm3_w1_bound(2, 1, 2, 1, 1, 1, 1), DomainError);

  CHECK(omega_composite(2, 1, 0) == doctest::Approx(4));
  CHECK(omega_composite(2, 2, 1) == doctest::Approx(bellman_unweighted({2, 2, 1})));
}
