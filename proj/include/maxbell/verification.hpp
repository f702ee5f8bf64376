#pragma once

// Seeded numerical checks of the inequalities: symmetrization (<= direction),
// the weighted Bellman upper bound and a brute-force oracle for its supremum,
// the Lerner-type pointwise estimate, the two double-maximal bounds,
// Doob's inequality with its refinements, and the S_alpha limit construction.
//
// Every trial draws from its own engine seeded by (seed, trial), so results do
// not depend on the order in which trials run.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "maxbell/extremal_lab.hpp"
#include "maxbell/io.hpp"
#include "maxbell/measure_tree.hpp"
#include "maxbell/step_functions.hpp"

namespace maxbell {

/// G(x) = x^q, weight h on (0,1], truncation k in (0,1]. General monotone G
/// is not supported.
struct SymmetrizationProblem {
  double q = 1.0;
  PiecewisePower h = PiecewisePower::constant(1.0);
  double k = 1.0;
};

struct TrialRecord {
  std::size_t trial = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  bool pass = true;
  bool skipped = false;
  std::string note;
};

struct VerificationReport {
  std::string name;
  std::string instance;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = true;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t skipped = 0;
  std::string tolerance;
  Json worst_instance = Json::object();
  Json details = Json::object();
  std::vector<TrialRecord> rows;

  /// Appends a row. The headline lhs/rhs/margin and the worst instance follow
  /// the row with the smallest relative margin; `instance` is only called
  /// when the row becomes the worst one.
  void add(TrialRecord row, const std::function<Json()>& instance = {});
  /// Appends every row of `other`, renumbered as trial `trial`.
  void absorb(const VerificationReport& other, std::size_t trial);
};

Json report_to_json(const VerificationReport& report);
/// One row per trial: name,trial,lhs,rhs,margin,pass.
void write_csv(std::ostream& out, const VerificationReport& report, bool header = true);

/// Engine for one trial, seeded from (seed, trial).
std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial);

struct RandomInstance {
  TreeHandle tree;
  LeafFunction phi;
  LeafFunction w;
};

/// Tree of depth `max_depth` with every leaf at that depth, random arity 2-3
/// and random child masses; phi and w uniform in the given ranges.
RandomInstance random_instance(std::uint64_t seed, int max_depth,
                               std::pair<double, double> value_range,
                               std::pair<double, double> weight_range);

/// int_0^k (M phi)*^q h over `trials` random layouts phi of g on the tree,
/// against int_0^k (hardy_average g)^q h.
VerificationReport verify_symmetrization(const TreeHandle& tree, const RearrangementResult& g,
                                         const SymmetrizationProblem& prob, std::size_t trials,
                                         std::uint64_t seed);

/// Delta_w(g) <= bellman_star for random feasible g and w** = k t^b.
VerificationReport verify_thm2_upper(double p, double k, double b, std::size_t trials,
                                     std::uint64_t seed);

struct BruteForceResult {
  double best = 0.0;
  std::vector<double> breakpoints;
  std::vector<double> values;
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  std::size_t fit_failures = 0;
};

/// Hill climbing over nonincreasing step functions on a geometric partition
/// of (0,1] with int g = f and int g^p w** = F.
BruteForceResult bruteforce_thm2_sup(double p, double k, double b, double F, double f,
                                     int pieces, int budget, std::uint64_t seed);

VerificationReport verify_lerner(const LeafFunction& w, const LeafFunction& phi, double p);
VerificationReport verify_thm3(const LeafFunction& w, const LeafFunction& phi, double p);
VerificationReport verify_doob(const LeafFunction& phi, double p);
VerificationReport verify_prop2(const Prop2Config& cfg, const std::vector<double>& alphas);

struct SuiteOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  int max_depth = 6;
  std::vector<double> p_values{1.5, 2.0, 3.0};
  std::pair<double, double> value_range{0.0, 10.0};
  std::pair<double, double> weight_range{0.125, 8.0};
};

/// Random-instance suites; trial i uses p_values[i % size] and a depth drawn
/// from 1..max_depth.
VerificationReport run_lerner_suite(const SuiteOptions& opt);
VerificationReport run_thm3_suite(const SuiteOptions& opt);
VerificationReport run_doob_suite(const SuiteOptions& opt);

/// Symmetrization on a depth-6 binary tree with g the cell averages of
/// t^(-1/4).
VerificationReport run_thm1_suite(const SymmetrizationProblem& prob, std::size_t trials,
                                  std::uint64_t seed);

}  // namespace maxbell
