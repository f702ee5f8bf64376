#include "maxbell/bellman_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "maxbell/errors.hpp"

namespace maxbell {

namespace {

constexpr int kOmegaMaxIterations = 200;
constexpr double kBetaMin = 1e-9;
constexpr double kBetaMax = 1e9;
constexpr int kBetaScan = 64;
// Relative overshoot of a domain ratio past 1 that is treated as rounding.
constexpr double kDomainSlack = 1e-12;

void require_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p must exceed 1");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Ratios in (1, 1 + kDomainSlack] are boundary points hit through rounding.
double snap(double ratio) { return ratio > 1.0 && ratio <= 1.0 + kDomainSlack ? 1.0 : ratio; }

double omega_checked(double p, double y, const char* what) {
  y = snap(y);
  if (!(y >= 0.0 && y <= 1.0)) {
    throw DomainError(std::string(what) + " argument " + fmt(y) + " lies outside [0,1]");
  }
  return omega_p(p, y);
}

}  // namespace

double h_p(double p, double z) {
  require_p(p);
  if (!std::isfinite(z)) throw DomainError("z must be finite");
  // z^(p-1) (p - (p-1) z) loses less than the expanded form near z = 1.
  return std::pow(z, p - 1.0) * (p - (p - 1.0) * z);
}

double omega_p(double p, double y) {
  require_p(p);
  if (!(y >= 0.0 && y <= 1.0)) throw DomainError("y must lie in [0,1]");
  const double top = p / (p - 1.0);
  if (y == 1.0) return 1.0;
  if (y == 0.0) return top;
  // H_p decreases from 1 at z = 1 to 0 at z = p/(p-1).
  double lo = 1.0;
  double hi = top;
  for (int it = 0; it < kOmegaMaxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h_p(p, mid) > y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(h_p(p, lo) - y) <= std::abs(h_p(p, hi) - y) ? lo : hi;
}

double omega_p_gap(double p, double gap) {
  require_p(p);
  if (!(gap >= 0.0 && gap <= 1.0)) throw DomainError("gap must lie in [0,1]");
  if (gap > 0.5) return omega_p(p, 1.0 - gap);
  // 1 - H_p(1 + u) = (p-1) u (1 + e) - e with e = (1+u)^(p-1) - 1.
  auto deficit = [p](double u) {
    const double e = std::expm1((p - 1.0) * std::log1p(u));
    return (p - 1.0) * u * (1.0 + e) - e;
  };
  double lo = 0.0;
  double hi = 1.0 / (p - 1.0);
  for (int it = 0; it < kOmegaMaxIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (deficit(mid) < gap) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double u = std::abs(deficit(lo) - gap) <= std::abs(deficit(hi) - gap) ? lo : hi;
  return 1.0 + u;
}

double bellman_unweighted(const BellmanPoint& pt) {
  require_p(pt.p);
  if (!(pt.F > 0.0) || !(pt.f >= 0.0)) throw DomainError("need F > 0 and f >= 0");
  const double gap = (pt.F - std::pow(pt.f, pt.p)) / pt.F;
  if (gap < -kDomainSlack) throw DomainError("f^p must not exceed F");
  return pt.F * std::pow(omega_p_gap(pt.p, std::max(0.0, gap)), pt.p);
}

double doob_refined_l2(double F, double f) {
  if (!(F > 0.0) || !(f >= 0.0)) throw DomainError("need F > 0 and f >= 0");
  if (snap(f * f / F) > 1.0) throw DomainError("f^2 must not exceed F");
  const double s = std::sqrt(F) + std::sqrt(std::max(0.0, F - f * f));
  return s * s;
}

double bellman_star(const WeightedBellmanPoint& wpt) {
  const auto& [p, F, f] = wpt.point;
  require_p(p);
  if (!(F > 0.0) || !(f >= 0.0)) throw DomainError("need F > 0 and f >= 0");
  if (!(wpt.a > 0.0) || !(wpt.c > 0.0)) throw DomainError("constants a, c must be positive");
  const double scaled_a = (p - 1.0) * wpt.a;
  const double kappa = (wpt.c / wpt.a) / std::pow(scaled_a, p - 1.0);
  const double gap = (F - kappa * std::pow(f, p)) / F;
  if (gap < -kDomainSlack) throw DomainError("c f^p exceeds (p-1)^(p-1) a^p F");
  return std::pow(scaled_a, p) * F * std::pow(omega_p_gap(p, std::max(0.0, gap)), p);
}

double ap2_rhs(double p, double a, double c, double F, double f, double beta) {
  require_p(p);
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  const double big_a = std::pow(p - 1.0, p) * std::pow(a, p) * F;
  const double big_b = (p - 1.0) * c * std::pow(f, p);
  const double excess = big_a * std::expm1((p - 1.0) * std::log1p(beta)) + (big_a - big_b);
  return (1.0 + 1.0 / beta) * excess / (p - 1.0);
}

Ap2Minimum minimize_ap2(double p, double a, double c, double F, double f) {
  require_p(p);
  if (!(F > 0.0) || !(f >= 0.0) || !(a > 0.0) || !(c > 0.0)) {
    throw DomainError("need F, a, c > 0 and f >= 0");
  }
  const double big_a = std::pow(p - 1.0, p) * std::pow(a, p) * F;
  const double big_b = (p - 1.0) * c * std::pow(f, p);
  if (snap(big_b / big_a) > 1.0) throw DomainError("B = (p-1) c f^p exceeds A = (p-1)^p a^p F");

  auto value_at = [&](double log_beta) { return ap2_rhs(p, a, c, F, f, std::exp(log_beta)); };
  double lo = std::log(kBetaMin);
  double hi = std::log(kBetaMax);

  std::array<double, kBetaScan> grid{};
  std::array<double, kBetaScan> vals{};
  const double step = (hi - lo) / (kBetaScan - 1);
  int best = 0;
  for (int i = 0; i < kBetaScan; ++i) {
    grid[i] = lo + step * i;
    vals[i] = value_at(grid[i]);
    if (vals[i] < vals[best]) best = i;
  }
  int local_minima = 0;
  for (int i = 0; i < kBetaScan; ++i) {
    const bool left_ok = i == 0 || vals[i] <= vals[i - 1];
    const bool right_ok = i == kBetaScan - 1 || vals[i] <= vals[i + 1];
    if (left_ok && right_ok) ++local_minima;
  }
  double left = grid[std::max(best - 1, 0)];
  double right = grid[std::min(best + 1, kBetaScan - 1)];

  if (local_minima > 1) {
    // Not unimodal on the scan: keep refining a grid around the best point.
    for (int round = 0; round < 12; ++round) {
      const double h = (right - left) / (kBetaScan - 1);
      double best_x = left;
      double best_v = value_at(left);
      for (int i = 1; i < kBetaScan; ++i) {
        const double x = left + h * i;
        const double v = value_at(x);
        if (v < best_v) {
          best_v = v;
          best_x = x;
        }
      }
      left = std::max(lo, best_x - h);
      right = std::min(hi, best_x + h);
    }
  } else {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = right - inv_phi * (right - left);
    double x2 = left + inv_phi * (right - left);
    double f1 = value_at(x1);
    double f2 = value_at(x2);
    for (int it = 0; it < 200 && right - left > 1e-12; ++it) {
      if (f1 <= f2) {
        right = x2;
        x2 = x1;
        f2 = f1;
        x1 = right - inv_phi * (right - left);
        f1 = value_at(x1);
      } else {
        left = x1;
        x1 = x2;
        f1 = f2;
        x2 = left + inv_phi * (right - left);
        f2 = value_at(x2);
      }
    }
  }
  const double x = 0.5 * (left + right);
  Ap2Minimum out{std::exp(x), value_at(x)};
  // The scan endpoints stand in for the open-interval limits.
  if (vals[best] < out.value) out = {std::exp(grid[best]), vals[best]};
  // With B = A the infimum is the beta -> 0 limit, equal to A.
  if (big_b >= big_a && big_a < out.value) out = {0.0, big_a};
  return out;
}

double thm3_w1_bound(double p, double F, double f, double m, double w_total,
                     double sigma_total, double ap) {
  require_p(p);
  if (!(F > 0.0) || !(f >= 0.0) || !(m >= 0.0) || !(w_total > 0.0) || !(sigma_total > 0.0) ||
      !(ap > 0.0)) {
    throw DomainError("need F, w(X), sigma(X), [w]_p > 0 and f, m >= 0");
  }
  const double pc = p / (p - 1.0);
  const double inner_p = std::pow(f, p) / (std::pow(sigma_total, p - 1.0) * F);
  const double sigma_bound = F * std::pow(omega_checked(p, inner_p, "omega_p"), p);
  const double inner_pc =
      std::pow(m, pc) / (std::pow(w_total, pc - 1.0) * sigma_bound);
  return std::pow(ap, 1.0 / (p - 1.0)) * sigma_bound *
         std::pow(omega_checked(pc, inner_pc, "omega_p'"), pc);
}

double thm3_w2_bound(double p, double F, double f, double sigma_total, double ap) {
  require_p(p);
  if (!(F > 0.0) || !(f >= 0.0) || !(sigma_total > 0.0) || !(ap > 0.0)) {
    throw DomainError("need F, sigma(X), [w]_p > 0 and f >= 0");
  }
  const double pc = p / (p - 1.0);
  const double inner_p = std::pow(f, p) / (std::pow(sigma_total, p - 1.0) * F);
  return std::pow(p, pc) * std::pow(ap, 1.0 / (p - 1.0)) * F *
         std::pow(omega_checked(p, inner_p, "omega_p"), p);
}

double omega_composite(double p, double x, double y) {
  if (!(x > 0.0) || !(y >= 0.0)) throw DomainError("need x > 0 and y >= 0");
  return x * std::pow(omega_checked(p, std::pow(y, p) / x, "omega_p"), p);
}

}  // namespace maxbell
