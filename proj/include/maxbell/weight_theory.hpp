#pragma once

// Weight classes: the tree A_p characteristic and the A_p* condition on a
// rearranged weight w** over (0,1], with its best constants (a, c).

#include "maxbell/measure_tree.hpp"
#include "maxbell/step_functions.hpp"

namespace maxbell {

/// Best pair for the A_p* inequality
///   int_t^1 w**(s)/s^p ds + c <= a w**(t)/t^(p-1)   for all t in (0,1].
struct ApStarConstants {
  double a = 0.0;
  double c = 0.0;
};

/// w**(t) = k t^b with -1 < b < p-1.
struct PowerWeightSpec {
  double k = 1.0;
  double b = 0.0;
  double p = 2.0;
};

/// sigma = w^(-1/(p-1)), leafwise.
LeafFunction sigma_weight(const LeafFunction& w, double p);

/// [w]_{T,p} = max over nodes of w(I) sigma(I)^(p-1) / mu(I)^p.
double ap_constant_tree(const LeafFunction& w, double p);

/// u0(t) = int_t^1 w**(s) / s^p ds.
double apstar_tail_integral(const PiecewisePower& wss, double p, double t);

/// r(t) = w**(t) / t^(p-1).
double apstar_ratio(const PiecewisePower& wss, double p, double t);

/// Best constants: a = sup u0/r, c = inf (a r - u0). Throws NotApStarError when
/// a is infinite, DegenerateConstantsError when c <= 0 and TailConditionError
/// when t^p u0(t) does not vanish at 0.
ApStarConstants apstar_constants(const PiecewisePower& wss, double p);

/// Closed form a = 1/(p-1-b), c = k/(p-1-b).
ApStarConstants power_weight_constants(const PowerWeightSpec& spec);

struct ApStarAudit {
  bool holds = true;
  double worst_slack = 0.0;  // min over the grid of a r(t) - u0(t) - c
  double worst_t = 1.0;
};

/// Checks the defining inequality for (a, c) on a geometric grid over
/// [t_min, 1], allowing `tolerance` relative to max(1, a r(t)).
ApStarAudit audit_apstar(const PiecewisePower& wss, double p, const ApStarConstants& constants,
                         int points = 1000, double t_min = 1e-8, double tolerance = 1e-9);

}  // namespace maxbell
