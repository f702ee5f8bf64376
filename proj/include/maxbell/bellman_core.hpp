#pragma once

// Scalar Bellman machinery for the maximal operator: H_p and its inverse
// omega_p, the exact unweighted Bellman function, the weighted formula for
// A_p* weights with its beta-parametrised upper bound, and the double-maximal
// upper bounds for A_p weights on a tree.

namespace maxbell {

/// (p, F, f) with f^p <= F.
struct BellmanPoint {
  double p = 2.0;
  double F = 1.0;
  double f = 0.0;

  double conjugate() const noexcept { return p / (p - 1.0); }
};

/// BellmanPoint plus the A_p* constants (a, c); requires
/// c f^p <= (p-1)^(p-1) a^p F.
struct WeightedBellmanPoint {
  BellmanPoint point;
  double a = 1.0;
  double c = 1.0;
};

struct Ap2Minimum {
  double beta = 0.0;
  double value = 0.0;
};

/// H_p(z) = -(p-1) z^p + p z^(p-1).
double h_p(double p, double z);

/// Inverse of H_p on [1, p/(p-1)], by bisection.
double omega_p(double p, double y);

/// omega_p(1 - gap), accurate for small gap where H_p is flat.
double omega_p_gap(double p, double gap);

/// F * omega_p(f^p / F)^p.
double bellman_unweighted(const BellmanPoint& pt);

/// (sqrt(F) + sqrt(F - f^2))^2, the p = 2 refinement of Doob's inequality.
double doob_refined_l2(double F, double f);

/// (p-1)^p a^p F omega_p(c f^p / ((p-1)^(p-1) a^p F))^p.
double bellman_star(const WeightedBellmanPoint& wpt);

/// Upper bound for Delta_w(g) parametrised by beta > 0:
/// (1 + 1/beta) ((beta+1)^(p-1) A - B) / (p-1), A = (p-1)^p a^p F,
/// B = (p-1) c f^p.
double ap2_rhs(double p, double a, double c, double F, double f, double beta);

/// Golden-section minimisation of ap2_rhs over beta in (1e-9, 1e9), after a
/// 64-point log-spaced scan.
Ap2Minimum minimize_ap2(double p, double a, double c, double F, double f);

/// Double-maximal bound in terms of m. `m` is int phi^(p-1) w, `w_total` is w(X), `sigma_total` is
/// sigma(X), `ap` is [w]_p.
double thm3_w1_bound(double p, double F, double f, double m, double w_total,
                     double sigma_total, double ap);

/// Double-maximal bound in terms of sigma(X): p^(p') [w]_p^(1/(p-1)) F omega_p(f^p / (sigma(X)^(p-1) F))^p.
double thm3_w2_bound(double p, double F, double f, double sigma_total, double ap);

/// x * omega_{p}(y^p / x)^p; increasing in x, decreasing in y.
double omega_composite(double p, double x, double y);

}  // namespace maxbell
