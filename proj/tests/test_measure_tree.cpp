#include <doctest.h>

#include <cmath>
#include <random>

#include "maxbell/errors.hpp"
#include "maxbell/measure_tree.hpp"
#include "maxbell/verification.hpp"

using namespace maxbell;

namespace {

LeafFunction leaf(const TreeHandle& t, std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x[i++] = d;
  return LeafFunction(t, x);
}

}  // namespace

TEST_CASE("uniform trees") {
  auto t = build_uniform_tree(1, 2);
  CHECK(t->leaf_count() == 2);
  CHECK(t->measure(t->leaves()[0]) == doctest::Approx(0.5));

  t = build_uniform_tree(3, 2);
  CHECK(t->leaf_count() == 8);
  CHECK(t->measure(0) == 1.0);
  for (NodeId l : t->leaves()) CHECK(t->measure(l) == doctest::Approx(0.125));

  t = build_uniform_tree(2, 3);
  CHECK(t->leaf_count() == 9);
  for (NodeId id = 0; id < t->node_count(); ++id) {
    if (!t->is_leaf(id)) CHECK(t->children(id).size() == 3);
  }
  CHECK_THROWS_AS(build_uniform_tree(0, 2), DomainError);
  CHECK_THROWS_AS(build_uniform_tree(25, 2), InstanceTooLargeError);
}

TEST_CASE("tree validation") {
  CHECK_THROWS_AS(TreeSpace({{1, 2}, {}, {}}, {1.0, 0.5, 0.4}), MeasureError);
  CHECK_THROWS_AS(TreeSpace({{1}, {}}, {1.0, 1.0}), StructuralError);
  CHECK_THROWS_AS(TreeSpace({{1, 2}, {}, {}}, {0.9, 0.45, 0.45}), MeasureError);
  CHECK_THROWS_AS(TreeSpace({{1, 2}, {}, {}}, {1.0, 1.0, 0.0}), MeasureError);
  CHECK_THROWS_AS(TreeSpace({{2, 1}, {}, {0}}, {1.0, 0.5, 0.5}), StructuralError);
  CHECK_NOTHROW(TreeSpace({{1, 2}, {}, {}}, {1.0, 0.25, 0.75}));
}

TEST_CASE("S_alpha construction") {
  SAlphaTree s = build_salpha(0.5, 1);
  const TreeSpace& t = *s.tree;
  auto kids = t.children(0);
  REQUIRE(kids.size() == 3);
  CHECK(s.kind[kids[0]] == SAlphaNodeKind::kAnnulus);
  CHECK(t.measure(kids[0]) == doctest::Approx(0.5));
  CHECK(t.measure(kids[1]) == doctest::Approx(0.25));
  CHECK(t.measure(kids[2]) == doctest::Approx(0.25));
  CHECK(s.rank[kids[1]] == 1);

  auto annulus_mass = [](const SAlphaTree& st, int rank) {
    double m = 0.0;
    for (NodeId id = 0; id < st.tree->node_count(); ++id) {
      if (st.kind[id] == SAlphaNodeKind::kAnnulus && st.rank[id] == rank) m += st.tree->measure(id);
    }
    return m;
  };
  CHECK(annulus_mass(build_salpha(0.5, 2), 1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(annulus_mass(build_salpha(0.1, 3), 2) == doctest::Approx(0.081).epsilon(1e-14));

  // Every S-node of rank m below the cutoff sheds alpha of its mass.
  s = build_salpha(0.3, 6);
  for (NodeId id = 0; id < s.tree->node_count(); ++id) {
    if (s.kind[id] != SAlphaNodeKind::kSNode || s.tree->is_leaf(id)) continue;
    double annulus = 0.0, rest = 0.0;
    for (NodeId c : s.tree->children(id)) {
      (s.kind[c] == SAlphaNodeKind::kAnnulus ? annulus : rest) += s.tree->measure(c);
    }
    if (s.rank[id] < 6) {
      CHECK(annulus == doctest::Approx(0.3 * s.tree->measure(id)).epsilon(1e-13));
      CHECK(rest == doctest::Approx(0.7 * s.tree->measure(id)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(build_salpha(1.0, 3), DomainError);
  CHECK_THROWS_AS(build_salpha(0.5, 0), DomainError);
}

TEST_CASE("maximal function and node integrals") {
  auto t = build_uniform_tree(1, 2);
  auto phi = leaf(t, {4, 0});
  auto m = maximal_function(phi);
  CHECK(m[0] == doctest::Approx(4));
  CHECK(m[1] == doctest::Approx(2));
  CHECK(node_integral(0, phi, LeafFunction::constant(t, 1.0)) == doctest::Approx(2));
  CHECK(node_integral(0, phi, leaf(t, {2, 1})) == doctest::Approx(4));
  CHECK(node_integral(0, LeafFunction::constant(t, 1), LeafFunction::constant(t, 1)) == doctest::Approx(1));

  auto t2 = build_uniform_tree(2, 2);
  auto m2 = maximal_function(leaf(t2, {8, 0, 0, 0}));
  CHECK(m2[0] == doctest::Approx(8));
  CHECK(m2[1] == doctest::Approx(4));
  CHECK(m2[2] == doctest::Approx(2));
  CHECK(m2[3] == doctest::Approx(2));

  auto c = maximal_function(LeafFunction::constant(t2, 3.0), leaf(t2, {1, 2, 3, 4}));
  for (std::size_t i = 0; i < 4; ++i) CHECK(c[i] == doctest::Approx(3));

  auto other = build_uniform_tree(2, 2);
  CHECK_THROWS_AS(maximal_function(leaf(t2, {1, 2, 3, 4}), LeafFunction::constant(other, 1)),
                  StructuralError);
  CHECK_THROWS_AS(leaf(t2, {1, -1, 0, 0}), DomainError);
  CHECK_THROWS_AS(maximal_function(leaf(t2, {1, 1, 1, 1}), leaf(t2, {0, 0, 1, 1})), MeasureError);
}

TEST_CASE("maximal function properties on random trees") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RandomInstance inst = random_instance(seed, 1 + int(seed % 5), {0.0, 10.0}, {0.125, 8.0});
    const LeafFunction m = maximal_function(inst.phi);
    const LeafFunction mw = maximal_function(inst.phi, inst.w);
    // Pointwise domination, root-average floor, and L^infinity bound.
    const double avg = node_integral(0, inst.phi, LeafFunction::constant(inst.tree, 1.0));
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(m[i] >= inst.phi[i] - 1e-12);
      CHECK(m[i] >= avg - 1e-12);
      CHECK(m[i] <= inst.phi.values().maxCoeff() + 1e-12);
      CHECK(mw[i] >= inst.phi[i] - 1e-12);
    }
    // Sublinearity: M(phi + psi) <= M phi + M psi.
    const LeafFunction psi = inst.w;
    const LeafFunction sum = inst.phi.with_values(inst.phi.values() + psi.values());
    const LeafFunction ms = maximal_function(sum);
    const LeafFunction mp = maximal_function(psi);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(ms[i] <= m[i] + mp[i] + 1e-12);
    // Mass conservation at the root.
    const Eigen::VectorXd all = node_integrals(inst.phi, inst.w);
    CHECK(all[0] == doctest::Approx(inst.phi.values().cwiseProduct(inst.w.values())
                                        .dot(inst.tree->leaf_measures())).epsilon(1e-13));
  }
}

TEST_CASE("random instance contract") {
  auto a = random_instance(11, 6, {0, 10}, {0.125, 8});
  auto b = random_instance(11, 6, {0, 10}, {0.125, 8});
  CHECK(a.phi.values() == b.phi.values());
  CHECK(a.w.values() == b.w.values());
  CHECK(a.tree->adjacency() == b.tree->adjacency());
  CHECK(a.tree->leaf_count() >= 64);
  CHECK(a.tree->leaf_count() <= 729);
}
