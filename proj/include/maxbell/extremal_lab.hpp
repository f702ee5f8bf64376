#pragma once

// Sharpness constructions: the extremal power family g_alpha for the weighted
// Bellman function, its discretization on S_alpha trees as geometric profiles,
// and the closed-form quantities of the lower-bound construction.

#include <optional>

#include "maxbell/measure_tree.hpp"
#include "maxbell/step_functions.hpp"

namespace maxbell {

/// Function equal to lambda_eff * gamma^m on the rank-m annuli of S_alpha,
/// gamma = (1-alpha)^exponent.
struct GeometricProfile {
  double lambda_eff = 1.0;
  double gamma = 1.0;
  double exponent = 0.0;
  double alpha = 0.5;

  /// Profile with a given rank ratio; the exponent is recovered from gamma.
  static GeometricProfile from_ratio(double lambda_eff, double gamma, double alpha);

  double value(int rank) const;
  /// 1 - gamma^power (1 - alpha), computed without cancellation.
  double series_gap(double power) const;
};

struct Prop2Config {
  double p = 2.0;
  double F = 1.0;
  double f = 1.0;
  double h = 1.0;
  double z = 1.0;
};

struct PowerWeightParams {
  double k = 1.0;
  double b = 0.0;
};

struct Prop2Instance {
  double alpha = 0.0;
  double alpha_g = 0.0;
  GeometricProfile phi;
  GeometricProfile w;
  double int_phi = 0.0;
  double int_phi_p_w = 0.0;
  double int_w = 0.0;
  double ap_const = 0.0;
  double int_maximal_p_w = 0.0;
};

/// g(t) = f (1 - alpha_g) t^(-alpha_g); integrates to f.
PiecewisePower extremal_g(double f, double alpha_g);

/// Parameter of the extremal g for the weight k t^b and data (F, f).
double solve_ap5(double p, double k, double b, double F, double f);

/// (1-alpha)^p / (1 + b - alpha p) - F / (k f^p).
double ap5_residual(double p, double k, double b, double F, double f, double alpha_g);

/// Geometric profile whose rank-m value is the annulus average of lambda t^s.
GeometricProfile discretize_power(double lambda, double s, double alpha);

/// alpha / (1 - gamma (1 - alpha)); the node average of a profile divided by
/// its value on the node's own annulus.
double profile_average_factor(const GeometricProfile& prof);

/// [w]_p of a geometric weight with respect to S_alpha (rank independent).
double salpha_ap_constant(const GeometricProfile& wprof, double p);

PowerWeightParams prop2_derive_kb(const Prop2Config& cfg);

Prop2Instance prop2_instance(const Prop2Config& cfg, double alpha);

/// F omega_p(z f^p / (h F))^p omega_p(1/h)^(-p).
double prop2_limit_rhs(const Prop2Config& cfg);

/// Leaf function of a profile on a truncated S_alpha tree. Tail leaves carry
/// the exact subtree average; with `sigma_exponent` = q they are split so that
/// both int psi and int psi^(-q) over every retained node are exact.
LeafFunction profile_on_tree(const SAlphaTree& tree, const GeometricProfile& prof,
                             std::optional<double> sigma_exponent = std::nullopt);

}  // namespace maxbell
