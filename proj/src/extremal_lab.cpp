#include "maxbell/extremal_lab.hpp"

#include <cmath>
#include <string>

#include "maxbell/bellman_core.hpp"
#include "maxbell/errors.hpp"

namespace maxbell {

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
}

void validate(const Prop2Config& cfg) {
  if (!(cfg.p > 1.0)) throw DomainError("p must exceed 1");
  if (!(cfg.F > 0.0)) throw DomainError("F must be positive");
  if (!(cfg.f >= 0.0)) throw DomainError("f must be nonnegative");
  if (!(cfg.h >= 1.0)) throw DomainError("h must be >= 1");
  if (!(cfg.z > 0.0)) throw DomainError("z must be positive");
  if (cfg.z * std::pow(cfg.f, cfg.p) > cfg.h * cfg.F) {
    throw DomainError("z f^p must not exceed h F");
  }
}

// Two positive values v1 <= v2 with mean `mean` and mean of v^(-q) equal to
// `inverse_mean`. Exists whenever inverse_mean >= mean^(-q) (Jensen).
std::pair<double, double> two_point_closure(double mean, double inverse_mean, double q) {
  const double floor_value = std::pow(mean, -q);
  if (inverse_mean <= floor_value) return {mean, mean};
  auto excess = [&](double v1) {
    return 0.5 * (std::pow(v1, -q) + std::pow(2.0 * mean - v1, -q)) - inverse_mean;
  };
  // excess is decreasing on (0, mean]; positive at lo, nonpositive at mean.
  double lo = 0.5 * std::pow(2.0 * inverse_mean, -1.0 / q);
  double hi = mean;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (excess(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double v1 = 0.5 * (lo + hi);
  return {v1, 2.0 * mean - v1};
}

}  // namespace

GeometricProfile GeometricProfile::from_ratio(double lambda_eff, double gamma, double alpha) {
  require_alpha(alpha);
  if (!(lambda_eff > 0.0) || !(gamma > 0.0)) throw DomainError("lambda and gamma must be positive");
  return {lambda_eff, gamma, std::log(gamma) / std::log1p(-alpha), alpha};
}

double GeometricProfile::value(int rank) const { return lambda_eff * std::pow(gamma, rank); }

double GeometricProfile::series_gap(double power) const {
  return -std::expm1((power * exponent + 1.0) * std::log1p(-alpha));
}

PiecewisePower extremal_g(double f, double alpha_g) {
  if (!(f >= 0.0)) throw DomainError("f must be nonnegative");
  if (!(alpha_g >= 0.0 && alpha_g < 1.0)) throw DomainError("alpha_g must lie in [0,1)");
  return PiecewisePower::power(f * (1.0 - alpha_g), -alpha_g);
}

double solve_ap5(double p, double k, double b, double F, double f) {
  if (!(p > 1.0)) throw DomainError("p must exceed 1");
  if (!(b > -1.0 && b < p - 1.0)) throw DomainError("b must satisfy -1 < b < p-1");
  if (!(k > 0.0) || !(F > 0.0) || !(f > 0.0)) throw DomainError("need k, F, f > 0");
  const double gap = p - 1.0 - b;
  const double arg = k * std::pow(f, p) / (std::pow((p - 1.0) / gap, p - 1.0) * F);
  if (!(arg >= 0.0 && arg <= 1.0)) {
    throw DomainError("omega_p argument " + std::to_string(arg) +
                      " lies outside [0,1]: no extremal in the power family");
  }
  const double z = omega_p(p, arg);
  double alpha_g = 1.0 - gap / ((p - 1.0) * z);
  if (alpha_g < 0.0) {
    if (alpha_g > -1e-14) return 0.0;
    throw DomainError("extremal exponent " + std::to_string(alpha_g) +
                      " is negative: the power-family extremal would be increasing");
  }
  return alpha_g;
}

double ap5_residual(double p, double k, double b, double F, double f, double alpha_g) {
  return std::pow(1.0 - alpha_g, p) / (1.0 + b - alpha_g * p) - F / (k * std::pow(f, p));
}

GeometricProfile discretize_power(double lambda, double s, double alpha) {
  require_alpha(alpha);
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  if (!(s > -1.0)) throw IntegrabilityError("t^s is not integrable for s <= -1");
  const double log_keep = std::log1p(-alpha);
  // lambda (1 - (1-alpha)^(s+1)) / (alpha (s+1)); the s -> 0 case gives lambda exactly.
  const double lambda_eff =
      s == 0.0 ? lambda : lambda * -std::expm1((s + 1.0) * log_keep) / (alpha * (s + 1.0));
  return {lambda_eff, std::exp(s * log_keep), s, alpha};
}

double profile_average_factor(const GeometricProfile& prof) {
  require_alpha(prof.alpha);
  const double gap = prof.series_gap(1.0);
  if (!(gap > 0.0)) throw DivergenceError("gamma (1 - alpha) >= 1: node averages diverge");
  return prof.alpha / gap;
}

double salpha_ap_constant(const GeometricProfile& wprof, double p) {
  if (!(p > 1.0)) throw DomainError("p must exceed 1");
  require_alpha(wprof.alpha);
  const double q = 1.0 / (p - 1.0);
  const double w_gap = wprof.series_gap(1.0);
  const double sigma_gap = wprof.series_gap(-q);
  if (!(w_gap > 0.0) || !(sigma_gap > 0.0)) {
    throw DivergenceError("weight or dual weight series diverges on S_alpha");
  }
  return std::pow(wprof.alpha, p) / (w_gap * std::pow(sigma_gap, p - 1.0));
}

PowerWeightParams prop2_derive_kb(const Prop2Config& cfg) {
  validate(cfg);
  const double p = cfg.p;
  const double theta = omega_p(p, 1.0 / cfg.h);
  const double b = (p - 1.0) * (1.0 - theta);
  if (!(b > -1.0 && b < p - 1.0)) {
    throw DomainError("derived b = " + std::to_string(b) + " leaves (-1, p-1)");
  }
  const double k = cfg.z * (b + 1.0);
  const double h_back = std::pow((p - 1.0) / (p - 1.0 - b), p - 1.0) / (b + 1.0);
  if (std::abs(h_back - cfg.h) > 1e-10 * cfg.h) {
    throw DomainError("derived (k, b) do not reproduce h");
  }
  return {k, b};
}

Prop2Instance prop2_instance(const Prop2Config& cfg, double alpha) {
  require_alpha(alpha);
  const auto [k, b] = prop2_derive_kb(cfg);
  const double p = cfg.p;
  Prop2Instance out;
  out.alpha = alpha;
  out.alpha_g = solve_ap5(p, k, b, cfg.F, cfg.f);
  out.phi = discretize_power(cfg.f * (1.0 - out.alpha_g), -out.alpha_g, alpha);
  out.w = discretize_power(k, b, alpha);

  const double phi_gap = out.phi.series_gap(1.0);
  const double w_gap = out.w.series_gap(1.0);
  // phi^p w on rank m annuli is lambda1^p lambda2 (gamma1^p gamma2)^m.
  const double joint_gap =
      -std::expm1((p * out.phi.exponent + out.w.exponent + 1.0) * std::log1p(-alpha));
  if (!(phi_gap > 0.0) || !(w_gap > 0.0) || !(joint_gap > 0.0)) {
    throw DivergenceError("a geometric series of the construction diverges");
  }
  out.int_phi = out.phi.lambda_eff * alpha / phi_gap;
  out.int_w = out.w.lambda_eff * alpha / w_gap;
  out.int_phi_p_w = std::pow(out.phi.lambda_eff, p) * out.w.lambda_eff * alpha / joint_gap;
  out.ap_const = salpha_ap_constant(out.w, p);
  // gamma1 >= 1, so on every annulus the best cell is the annulus' own S-node.
  out.int_maximal_p_w = std::pow(profile_average_factor(out.phi), p) * out.int_phi_p_w;
  return out;
}

double prop2_limit_rhs(const Prop2Config& cfg) {
  validate(cfg);
  const double p = cfg.p;
  const double inner = cfg.z * std::pow(cfg.f, p) / (cfg.h * cfg.F);
  return cfg.F * std::pow(omega_p(p, inner), p) * std::pow(omega_p(p, 1.0 / cfg.h), -p);
}

LeafFunction profile_on_tree(const SAlphaTree& salpha, const GeometricProfile& prof,
                             std::optional<double> sigma_exponent) {
  if (std::abs(prof.alpha - salpha.alpha) > 1e-15) {
    throw StructuralError("profile and tree use different alpha");
  }
  const TreeSpace& tree = *salpha.tree;
  const int cutoff = salpha.rank_cutoff;
  const double tail_mean = prof.value(cutoff) * profile_average_factor(prof);
  std::pair<double, double> tail{tail_mean, tail_mean};
  if (sigma_exponent) {
    const double q = *sigma_exponent;
    const double gap = prof.series_gap(-q);
    if (!(gap > 0.0)) throw DivergenceError("dual weight series diverges on S_alpha");
    const double inverse_mean = std::pow(prof.value(cutoff), -q) * prof.alpha / gap;
    tail = two_point_closure(tail_mean, inverse_mean, q);
  }

  Eigen::VectorXd values(static_cast<Eigen::Index>(tree.leaf_count()));
  const auto leaves = tree.leaves();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const NodeId node = leaves[i];
    double v = 0.0;
    switch (salpha.kind[node]) {
      case SAlphaNodeKind::kAnnulus:
        v = prof.value(salpha.rank[node]);
        break;
      case SAlphaNodeKind::kTail: {
        // First tail child of its owner takes the smaller value.
        const bool first = tree.children(salpha.owner[node]).front() == node;
        v = first ? tail.first : tail.second;
        break;
      }
      case SAlphaNodeKind::kSNode:
        throw StructuralError("S-node leaf in a truncated S_alpha tree");
    }
    values[static_cast<Eigen::Index>(i)] = v;
  }
  return LeafFunction(salpha.tree, std::move(values));
}

}  // namespace maxbell
