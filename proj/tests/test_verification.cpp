#include <doctest.h>

#include <cmath>
#include <sstream>

#include "maxbell/bellman_core.hpp"
#include "maxbell/errors.hpp"
#include "maxbell/verification.hpp"
#include "maxbell/weight_theory.hpp"

using namespace maxbell;

namespace {

LeafFunction two_leaves(const TreeHandle& t, double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return LeafFunction(t, v);
}

}  // namespace

TEST_CASE("symmetrization") {
  auto t = build_uniform_tree(4, 2);
  const auto g = decreasing_rearrangement(LeafFunction::constant(t, 2.0));
  auto rep = verify_symmetrization(t, g, {2.0, PiecewisePower::constant(1), 1.0}, 10, 1);
  CHECK(rep.pass);
  for (const auto& row : rep.rows) CHECK(row.lhs == doctest::Approx(row.rhs).epsilon(1e-14));

  rep = run_thm1_suite({2.0, PiecewisePower::constant(1), 1.0}, 200, 3);
  CHECK(rep.pass);
  CHECK(rep.rows.size() == 200);
  CHECK(rep.details["max_ratio"].get<double>() < 1.0);
  CHECK(rep.details["two_path_gap"].get<double>() <= 1e-10);

  // Steps that no set of leaves can fill.
  const RearrangementResult odd{PiecewisePower::steps({0.0, 0.3, 1.0}, std::vector<double>{2.0, 1.0}), t};
  CHECK_THROWS_AS(verify_symmetrization(t, odd, {}, 1, 0), StructuralError);
}

TEST_CASE("weighted upper bound") {
  auto rep = verify_thm2_upper(2, 1, 0, 100, 9);
  CHECK(rep.pass);
  CHECK(rep.rows.size() == 100);
  for (const auto& row : rep.rows) CHECK(row.lhs <= row.rhs * (1 + 1e-8));

  // Constant g: Delta = f^p int w** sits below the formula.
  const auto wss = PiecewisePower::power(1.0, 0.5);
  const auto g = PiecewisePower::constant(1.3);
  const double F = integrate_power_composite(g, 3, wss, 0, 1);
  const auto ac = power_weight_constants({1, 0.5, 3});
  CHECK(delta_w(g, wss, 3) == doctest::Approx(std::pow(1.3, 3) / 1.5));
  CHECK(delta_w(g, wss, 3) <= bellman_star({{3, F, 1.3}, ac.a, ac.c}));
}

TEST_CASE("brute-force oracle") {
  const auto corner = bruteforce_thm2_sup(2, 1, 0, 1, 1, 64, 500, 4);
  CHECK(corner.best == doctest::Approx(1).epsilon(1e-12));
  CHECK(corner.best <= 1 + 1e-8);

  const auto ac = power_weight_constants({1, 0.5, 3});
  const double target = bellman_star({{3, 2, 1}, ac.a, ac.c});
  const auto r = bruteforce_thm2_sup(3, 1, 0.5, 2, 1, 64, 20000, 2);
  CHECK(r.best <= target * (1 + 1e-8));
  CHECK(r.best >= target * 0.95);
  CHECK_THROWS_AS(bruteforce_thm2_sup(2, 1, 0, 1, 2, 64, 10, 0), DomainError);
}

TEST_CASE("Lerner-type estimate") {
  auto t = build_uniform_tree(1, 2);
  auto rep = verify_lerner(LeafFunction::constant(t, 3.0), LeafFunction::constant(t, 2.0), 2.5);
  CHECK(rep.pass);
  CHECK(rep.lhs == doctest::Approx(rep.rhs));

  rep = verify_lerner(two_leaves(t, 2, 0.5), two_leaves(t, 1, 0), 2);
  CHECK(rep.pass);
  CHECK(rep.details["ap"].get<double>() == doctest::Approx(25.0 / 16));
  // Leafwise: lhs (1, 1/2), rhs 25/16 (1, 0.96).
  CHECK(rep.details["min_slack"].get<double>() == doctest::Approx(25.0 / 16 - 1));

  SuiteOptions opt;
  opt.trials = 30;
  opt.seed = 5;
  CHECK(run_lerner_suite(opt).pass);
}

TEST_CASE("double-maximal chain") {
  auto t = build_uniform_tree(1, 2);
  auto rep = verify_thm3(LeafFunction::constant(t, 1), LeafFunction::constant(t, 1), 2);
  CHECK(rep.pass);
  CHECK(rep.lhs == doctest::Approx(1));
  CHECK(rep.details["W1"].get<double>() == doctest::Approx(1));
  CHECK(rep.details["W2"].get<double>() == doctest::Approx(4));

  rep = verify_thm3(LeafFunction::constant(t, 1), two_leaves(t, 4, 0), 2);
  CHECK(rep.pass);
  CHECK(rep.lhs == doctest::Approx(10));
  CHECK(rep.details["F"].get<double>() == doctest::Approx(8));
  CHECK(rep.details["f"].get<double>() == doctest::Approx(2));
  CHECK(rep.details["m"].get<double>() == doctest::Approx(2));
}

TEST_CASE("Doob") {
  auto t = build_uniform_tree(2, 3);
  auto rep = verify_doob(LeafFunction::constant(t, 1.7), 3);
  CHECK(rep.pass);
  CHECK(rep.lhs == doctest::Approx(std::pow(1.7, 3)));
  CHECK(rep.rhs == doctest::Approx(std::pow(1.7, 3)));

  auto t1 = build_uniform_tree(1, 2);
  rep = verify_doob(two_leaves(t1, 4, 0), 2);
  CHECK(rep.pass);
  CHECK(rep.lhs == doctest::Approx(10));
  CHECK(rep.rhs == doctest::Approx(12 + 2 * std::sqrt(32.0)));
  CHECK(rep.details["classical"].get<double>() == doctest::Approx(32));
}

TEST_CASE("S_alpha limits") {
  auto rep = verify_prop2({2, 2, 1, 4.0 / 3, 1}, {0.1, 0.01, 0.001});
  CHECK(rep.pass);
  const auto& last = rep.details["table"].back();
  CHECK(std::abs(last["ratio"].get<double>() - 1) < 0.01);

  // Unweighted case: ratio tends to 1 as alpha shrinks.
  rep = verify_prop2({2, 2, 1, 1, 1}, {0.1, 0.01, 0.001});
  CHECK(rep.pass);
  CHECK(rep.details["table"].back()["ratio_error"].get<double>() < 1e-3);
}

TEST_CASE("reports and determinism") {
  SuiteOptions opt;
  opt.trials = 25;
  opt.seed = 42;
  const auto a = run_doob_suite(opt);
  const auto b = run_doob_suite(opt);
  REQUIRE(a.rows.size() == 25);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].lhs == b.rows[i].lhs);
    CHECK(a.rows[i].rhs == b.rows[i].rhs);
    CHECK(a.rows[i].trial == i);
  }
  CHECK(report_to_json(a) == report_to_json(b));

  const Json doc = report_to_json(a);
  for (const char* key : {"name", "seed", "trials", "lhs", "rhs", "margin", "pass", "worst_instance"}) {
    CHECK(doc.contains(key));
  }
  CHECK_NOTHROW(tree_from_json(doc["worst_instance"]));

  std::ostringstream csv;
  write_csv(csv, a);
  std::string line;
  std::istringstream in(csv.str());
  std::getline(in, line);
  CHECK(line == "name,trial,lhs,rhs,margin,pass");
  int count = 0;
  while (std::getline(in, line)) ++count;
  CHECK(count == 25);

  // A failing row drives pass and the headline numbers.
  VerificationReport r;
  TrialRecord good{0, 1.0, 2.0, 1.0, true, false, ""};
  TrialRecord bad{1, 3.0, 2.0, -1.0, false, false, ""};
  r.add(good);
  r.add(bad);
  CHECK_FALSE(r.pass);
  CHECK(r.margin == -1.0);
  CHECK(r.worst_instance["trial"] == 1);
}

TEST_CASE("generated weights satisfy the Hoelder lower bound") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto inst = random_instance(s, 4, {0, 10}, {0.125, 8});
    for (double p : {1.5, 2.0, 3.0}) {
      const double ap = ap_constant_tree(inst.w, p);
      CHECK(std::isfinite(ap));
      CHECK(ap >= 1.0 - 1e-12);
    }
  }
}
