#include "maxbell/weight_theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "maxbell/errors.hpp"

namespace maxbell {

namespace {

constexpr int kSupSamples = 1 << 12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p must exceed 1");
}

// w**(s) / s^p as a piecewise power function.
PiecewisePower shifted_integrand(const PiecewisePower& wss, double p) {
  std::vector<std::vector<PowerTerm>> terms;
  for (std::size_t i = 0; i < wss.piece_count(); ++i) {
    auto& out = terms.emplace_back();
    for (const PowerTerm& t : wss.terms(i)) out.push_back({t.coeff, t.exponent - p});
  }
  std::vector<double> bp(wss.breakpoints().begin(), wss.breakpoints().end());
  return PiecewisePower(std::move(bp), std::move(terms));
}

double eval(std::span<const PowerTerm> terms, double t) {
  double sum = 0.0;
  for (const PowerTerm& term : terms) sum += term.coeff * std::pow(t, term.exponent);
  return sum;
}

// Lowest exponent with a nonzero coefficient.
PowerTerm leading_term(std::span<const PowerTerm> terms) {
  PowerTerm lead{0.0, kInf};
  for (const PowerTerm& t : terms) {
    if (t.coeff == 0.0) continue;
    if (t.exponent < lead.exponent) {
      lead = t;
    } else if (t.exponent == lead.exponent) {
      lead.coeff += t.coeff;
    }
  }
  return lead;
}

class ApStarSolver {
 public:
  ApStarSolver(const PiecewisePower& wss, double p)
      : wss_(wss), p_(p), integrand_(shifted_integrand(wss, p)) {}

  double u0(double t) const { return t >= 1.0 ? 0.0 : integrate(integrand_, t, 1.0); }
  double r_piece(std::size_t i, double t) const {
    return eval(wss_.terms(i), t) / std::pow(t, p_ - 1.0);
  }

  // One-sided value of u0 at the left end of piece i (t -> lo+), lo > 0.
  double u0_left(std::size_t i) const { return u0(wss_.lo(i)); }

  ApStarConstants solve() const {
    double a = 0.0;
    for (std::size_t i = 0; i < wss_.piece_count(); ++i) a = std::max(a, sup_ratio(i));
    if (!std::isfinite(a)) throw NotApStarError("u0(t)/r(t) is unbounded: weight is not A_p*");
    double c = kInf;
    for (std::size_t i = 0; i < wss_.piece_count(); ++i) c = std::min(c, inf_gap(i, a));
    if (!(c > 0.0)) {
      throw DegenerateConstantsError("best constant c = " + std::to_string(c) + " is not positive");
    }
    check_tail();
    return {a, c};
  }

 private:
  // sup over piece i of u0/r.
  double sup_ratio(std::size_t i) const {
    const auto terms = wss_.terms(i);
    const double lo = wss_.lo(i);
    const double hi = wss_.hi(i);
    const PowerTerm lead = leading_term(terms);
    if (!(lead.coeff > 0.0)) throw NotApStarError("w** vanishes or is negative on a piece");

    double best = u0(hi) / r_piece(i, hi);
    if (lo == 0.0) {
      const double gamma = lead.exponent - p_ + 1.0;
      if (gamma >= 0.0) return kInf;
      best = std::max(best, -1.0 / gamma);
    } else {
      best = std::max(best, u0_left(i) / r_piece(i, lo));
    }
    if (terms.size() > 1) {
      best = std::max(best, sampled_extremum(i, [&](double t) { return u0(t) / r_piece(i, t); }));
    }
    return best;
  }

  // inf over piece i of a r - u0.
  double inf_gap(std::size_t i, double a) const {
    const auto terms = wss_.terms(i);
    const double lo = wss_.lo(i);
    const double hi = wss_.hi(i);
    double best = a * r_piece(i, hi) - u0(hi);
    if (lo == 0.0) {
      if (terms.size() == 1) {
        // a r - u0 = kappa t^gamma (a + 1/gamma) - u0(hi) - kappa hi^gamma / gamma.
        const PowerTerm lead = terms.front();
        const double gamma = lead.exponent - p_ + 1.0;
        const double slope = lead.coeff * (a + 1.0 / gamma);
        if (slope <= 0.0) {
          best = std::min(best, -u0(hi) - lead.coeff * std::pow(hi, gamma) / gamma);
        }
      }
    } else {
      best = std::min(best, a * r_piece(i, lo) - u0_left(i));
    }
    if (terms.size() > 1) {
      best = std::min(best,
                      -sampled_extremum(i, [&](double t) { return u0(t) - a * r_piece(i, t); }));
    }
    return best;
  }

  // max over piece i of fn, by dense sampling and one Newton step in log t.
  template <typename Fn>
  double sampled_extremum(std::size_t i, Fn fn) const {
    const double lo = wss_.lo(i);
    const double hi = wss_.hi(i);
    const double x_hi = std::log(hi);
    const double x_lo = lo > 0.0 ? std::log(lo) : x_hi + std::log(1e-12);
    double best_x = x_hi;
    double best_v = fn(hi);
    for (int j = 0; j < kSupSamples; ++j) {
      const double x = x_lo + (x_hi - x_lo) * (j + 0.5) / kSupSamples;
      const double v = fn(std::exp(x));
      if (v > best_v) {
        best_v = v;
        best_x = x;
      }
    }
    const double h = (x_hi - x_lo) / kSupSamples;
    const double fp = fn(std::exp(best_x + h));
    const double fm = fn(std::exp(best_x - h));
    const double d1 = (fp - fm) / (2.0 * h);
    const double d2 = (fp - 2.0 * best_v + fm) / (h * h);
    if (d2 < 0.0) {
      const double x = best_x - d1 / d2;
      if (x > x_lo && x < x_hi) best_v = std::max(best_v, fn(std::exp(x)));
    }
    return best_v;
  }

  void check_tail() const {
    // t^p u0(t) ~ t^(beta + 1) near 0 for a leading term t^beta.
    const PowerTerm lead = leading_term(wss_.terms(0));
    if (!(lead.exponent > -1.0)) {
      throw TailConditionError("t^p * int_t^1 w**/s^p does not vanish at 0");
    }
  }

  const PiecewisePower& wss_;
  double p_;
  PiecewisePower integrand_;
};

}  // namespace

LeafFunction sigma_weight(const LeafFunction& w, double p) {
  require_p(p);
  if ((w.values().array() <= 0.0).any()) throw DomainError("weight must be positive on every leaf");
  return w.with_values(w.values().array().pow(-1.0 / (p - 1.0)).matrix());
}

double ap_constant_tree(const LeafFunction& w, double p) {
  const LeafFunction sigma = sigma_weight(w, p);
  const Eigen::VectorXd w_mass = node_masses(w);
  const Eigen::VectorXd s_mass = node_masses(sigma);
  const TreeSpace& tree = w.tree();
  double best = 0.0;
  for (NodeId id = 0; id < tree.node_count(); ++id) {
    const auto k = static_cast<Eigen::Index>(id);
    const double ratio =
        w_mass[k] * std::pow(s_mass[k], p - 1.0) / std::pow(tree.measure(id), p);
    best = std::max(best, ratio);
  }
  return best;
}

double apstar_tail_integral(const PiecewisePower& wss, double p, double t) {
  require_p(p);
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("t must lie in (0,1]");
  return t >= 1.0 ? 0.0 : integrate(shifted_integrand(wss, p), t, 1.0);
}

double apstar_ratio(const PiecewisePower& wss, double p, double t) {
  require_p(p);
  return wss(t) / std::pow(t, p - 1.0);
}

ApStarConstants apstar_constants(const PiecewisePower& wss, double p) {
  require_p(p);
  return ApStarSolver(wss, p).solve();
}

ApStarConstants power_weight_constants(const PowerWeightSpec& spec) {
  require_p(spec.p);
  if (!(spec.k > 0.0)) throw DomainError("k must be positive");
  if (!(spec.b > -1.0 && spec.b < spec.p - 1.0)) {
    throw DomainError("b must satisfy -1 < b < p-1");
  }
  const double gap = spec.p - 1.0 - spec.b;
  return {1.0 / gap, spec.k / gap};
}

ApStarAudit audit_apstar(const PiecewisePower& wss, double p, const ApStarConstants& constants,
                         int points, double t_min, double tolerance) {
  require_p(p);
  const PiecewisePower integrand = shifted_integrand(wss, p);
  ApStarAudit out;
  out.worst_slack = kInf;
  for (int j = 0; j < points; ++j) {
    const double t = j + 1 == points ? 1.0 : t_min * std::pow(1.0 / t_min, double(j) / (points - 1));
    const double ar = constants.a * wss(t) / std::pow(t, p - 1.0);
    const double u0 = t >= 1.0 ? 0.0 : integrate(integrand, t, 1.0);
    const double slack = ar - u0 - constants.c;
    if (slack < out.worst_slack) {
      out.worst_slack = slack;
      out.worst_t = t;
    }
    if (slack < -tolerance * std::max(1.0, std::abs(ar))) out.holds = false;
  }
  return out;
}

}  // namespace maxbell
