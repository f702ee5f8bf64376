#include "maxbell/step_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "maxbell/errors.hpp"

namespace maxbell {

namespace {

constexpr double kFlagTolerance = 1e-12;
constexpr int kFlagSamples = 1 << 10;
constexpr double kQuadratureRelTol = 1e-10;
constexpr double kSingularFloor = 1e-15;
constexpr long kMaxEvaluations = 1'000'000;
constexpr unsigned kMaxBisectionDepth = 15;

// Combines equal exponents and drops vanishing coefficients.
std::vector<PowerTerm> merge_terms(std::vector<PowerTerm> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const PowerTerm& a, const PowerTerm& b) { return a.exponent < b.exponent; });
  std::vector<PowerTerm> out;
  for (const PowerTerm& t : terms) {
    if (!out.empty() && out.back().exponent == t.exponent) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const PowerTerm& t) { return t.coeff == 0.0; });
  return out;
}

double eval_terms(std::span<const PowerTerm> terms, double t) {
  double sum = 0.0;
  for (const PowerTerm& term : terms) sum += term.coeff * std::pow(t, term.exponent);
  return sum;
}

double integrate_term(const PowerTerm& term, double a, double b) {
  if (term.coeff == 0.0) return 0.0;
  const double e1 = term.exponent + 1.0;
  if (e1 == 0.0) {
    if (a <= 0.0) throw IntegrabilityError("integral of c/t diverges at 0");
    return term.coeff * std::log(b / a);
  }
  if (a <= 0.0 && e1 < 0.0) {
    throw IntegrabilityError("integral of t^" + std::to_string(term.exponent) +
                             " diverges at 0");
  }
  return term.coeff * (std::pow(b, e1) - std::pow(a, e1)) / e1;
}

double scale_of(double v) { return std::max(1.0, std::abs(v)); }

// Sample points for flag checks: uniform on a bounded piece, geometric toward 0
// on the first piece.
std::vector<double> flag_samples(double lo, double hi) {
  std::vector<double> ts(kFlagSamples);
  for (int j = 0; j < kFlagSamples; ++j) {
    const double s = static_cast<double>(j) / (kFlagSamples - 1);
    ts[static_cast<std::size_t>(j)] =
        lo > 0.0 ? hi - s * (hi - lo) : hi * std::exp2(-40.0 * s);
  }
  return ts;  // decreasing in t
}

}  // namespace

PiecewisePower::PiecewisePower(std::vector<double> breakpoints,
                               std::vector<std::vector<PowerTerm>> terms, PiecewiseFlags flags)
    : breakpoints_(std::move(breakpoints)), terms_(std::move(terms)), flags_(flags) {
  if (breakpoints_.size() < 2) throw DomainError("piecewise function needs at least one piece");
  if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0) {
    throw DomainError("breakpoints must run from 0 to 1");
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > breakpoints_[i - 1])) {
      throw DomainError("breakpoints must be strictly increasing");
    }
  }
  if (terms_.size() + 1 != breakpoints_.size()) {
    throw DomainError("need one term list per piece");
  }
  for (const auto& piece : terms_) {
    for (const PowerTerm& t : piece) {
      if (!std::isfinite(t.coeff) || !std::isfinite(t.exponent)) {
        throw DomainError("power term is not finite");
      }
    }
  }
  validate_flags();
}

PiecewisePower PiecewisePower::constant(double value) {
  return PiecewisePower({0.0, 1.0}, {{PowerTerm{value, 0.0}}},
                        PiecewiseFlags{value >= 0.0, true});
}

PiecewisePower PiecewisePower::power(double coeff, double exponent) {
  return PiecewisePower({0.0, 1.0}, {{PowerTerm{coeff, exponent}}},
                        PiecewiseFlags{coeff >= 0.0, coeff * exponent <= 0.0});
}

PiecewisePower PiecewisePower::steps(std::vector<double> breakpoints,
                                     std::span<const double> values) {
  std::vector<std::vector<PowerTerm>> terms;
  terms.reserve(values.size());
  bool nonneg = true;
  bool nonincreasing = true;
  for (std::size_t i = 0; i < values.size(); ++i) {
    terms.push_back({PowerTerm{values[i], 0.0}});
    nonneg = nonneg && values[i] >= 0.0;
    nonincreasing = nonincreasing && (i == 0 || values[i] <= values[i - 1]);
  }
  return PiecewisePower(std::move(breakpoints), std::move(terms),
                        PiecewiseFlags{nonneg, nonincreasing});
}

std::size_t PiecewisePower::piece_at(double t) const {
  if (!(t > 0.0 && t <= 1.0)) throw DomainError("evaluation point must lie in (0,1]");
  // First breakpoint >= t closes the piece (t_{i}, t_{i+1}].
  const auto it = std::lower_bound(breakpoints_.begin() + 1, breakpoints_.end(), t);
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double PiecewisePower::eval_piece(std::size_t piece, double t) const {
  return eval_terms(terms_.at(piece), t);
}

double PiecewisePower::operator()(double t) const { return eval_piece(piece_at(t), t); }

bool PiecewisePower::single_term_pieces() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& piece) { return piece.size() <= 1; });
}

bool PiecewisePower::is_step() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& piece) {
    return std::all_of(piece.begin(), piece.end(),
                       [](const PowerTerm& t) { return t.exponent == 0.0 || t.coeff == 0.0; });
  });
}

void PiecewisePower::validate_flags() const {
  if (!flags_.nonneg && !flags_.nonincreasing) return;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& piece = terms_[i];
    const double a = breakpoints_[i];
    const double b = breakpoints_[i + 1];
    if (piece.size() <= 1) {
      // c*t^e is monotone on the piece; sign and slope are read off c and e.
      const PowerTerm t = piece.empty() ? PowerTerm{} : piece.front();
      if (flags_.nonneg && t.coeff < 0.0) {
        throw DomainError("piece " + std::to_string(i) + " is negative");
      }
      if (flags_.nonincreasing && t.coeff * t.exponent > 0.0) {
        throw DomainError("piece " + std::to_string(i) + " is increasing");
      }
    } else {
      const auto ts = flag_samples(a, b);
      double prev = eval_terms(piece, ts.front());
      for (double t : ts) {
        const double v = eval_terms(piece, t);
        if (flags_.nonneg && v < -kFlagTolerance * scale_of(v)) {
          throw DomainError("piece " + std::to_string(i) + " is negative at t=" +
                            std::to_string(t));
        }
        // ts runs right to left, so values must not decrease along it.
        if (flags_.nonincreasing && v < prev - kFlagTolerance * scale_of(prev)) {
          throw DomainError("piece " + std::to_string(i) + " is increasing near t=" +
                            std::to_string(t));
        }
        prev = v;
      }
    }
    if (flags_.nonincreasing && i + 1 < terms_.size()) {
      const double left = eval_terms(piece, b);
      const double right = eval_terms(terms_[i + 1], b);
      if (right > left + kFlagTolerance * scale_of(left)) {
        throw DomainError("jump up at breakpoint " + std::to_string(b));
      }
    }
  }
}

RearrangementResult decreasing_rearrangement(const LeafFunction& phi) {
  const Eigen::VectorXd& values = phi.values();
  const Eigen::VectorXd& mass = phi.tree().leaf_measures();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values[a] > values[b]; });

  std::vector<double> breakpoints{0.0};
  std::vector<double> steps;
  double position = 0.0;
  for (Eigen::Index k : order) {
    position += mass[k];
    // Exact equality only: merging is cosmetic and must not blur masses.
    if (!steps.empty() && steps.back() == values[k]) {
      breakpoints.back() = position;
    } else {
      steps.push_back(values[k]);
      breakpoints.push_back(position);
    }
  }
  breakpoints.back() = 1.0;
  return {PiecewisePower::steps(std::move(breakpoints), steps), phi.tree_handle()};
}

PiecewisePower hardy_average(const PiecewisePower& g) {
  std::vector<std::vector<PowerTerm>> out;
  out.reserve(g.piece_count());
  double accumulated = 0.0;  // int_0^{t_i} g
  for (std::size_t i = 0; i < g.piece_count(); ++i) {
    const double a = g.lo(i);
    const double b = g.hi(i);
    std::vector<PowerTerm> terms;
    double carry = accumulated;
    for (const PowerTerm& t : g.terms(i)) {
      if (t.coeff == 0.0) continue;
      const double e1 = t.exponent + 1.0;
      if (e1 == 0.0) {
        throw IntegrabilityError("Hardy average of a c/t term leaves the power class");
      }
      if (i == 0 && e1 < 0.0) {
        throw IntegrabilityError("g is not integrable near 0");
      }
      terms.push_back({t.coeff / e1, t.exponent});
      if (a > 0.0) carry -= t.coeff * std::pow(a, e1) / e1;
    }
    if (carry != 0.0) terms.push_back({carry, -1.0});
    out.push_back(merge_terms(std::move(terms)));
    for (const PowerTerm& t : g.terms(i)) accumulated += integrate_term(t, a, b);
  }
  std::vector<double> breakpoints(g.breakpoints().begin(), g.breakpoints().end());
  return PiecewisePower(std::move(breakpoints), std::move(out), g.flags());
}

double integrate(const PiecewisePower& f, double lo, double hi) {
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
    throw DomainError("integration bounds must satisfy 0 <= lo < hi <= 1");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < f.piece_count(); ++i) {
    const double a = std::max(lo, f.lo(i));
    const double b = std::min(hi, f.hi(i));
    if (!(b > a)) continue;
    for (const PowerTerm& t : f.terms(i)) sum += integrate_term(t, a, b);
  }
  return sum;
}

namespace {

class CompositeIntegrator {
 public:
  CompositeIntegrator(double q, std::span<const PowerTerm> base, std::span<const PowerTerm> weight,
                      long& evaluations)
      : q_(q), base_(base), weight_(weight), evaluations_(evaluations) {}

  double operator()(double a, double b) const {
    if (a > 0.0) return adaptive(a, b);
    // Leading behaviour at 0 decides integrability, and closes the last sliver.
    const PowerTerm lead = base_.front();
    if (lead.coeff < 0.0) throw DomainError("base is negative near 0");
    for (const PowerTerm& w : weight_) {
      if (q_ * lead.exponent + w.exponent <= -1.0) {
        throw IntegrabilityError("base^q * weight is not integrable at 0");
      }
    }
    const double lead_q = std::pow(lead.coeff, q_);
    auto closure = [&](double right) {
      double tail = 0.0;
      for (const PowerTerm& w : weight_) {
        tail += integrate_term({lead_q * w.coeff, q_ * lead.exponent + w.exponent}, 0.0, right);
      }
      return tail;
    };
    double sum = 0.0;
    double right = b;
    while (right * 0.5 >= std::numeric_limits<double>::min()) {
      if (right < kSingularFloor) {
        const double lead_at = lead.coeff * std::pow(right, lead.exponent);
        const double drift = q_ * std::abs(eval_terms(base_, right) / lead_at - 1.0);
        if (std::abs(closure(right)) * drift <= 1e-3 * kQuadratureRelTol * std::abs(sum)) break;
      }
      sum += adaptive(right * 0.5, right);
      right *= 0.5;
    }
    return sum + closure(right);
  }

 private:
  double integrand(double t) const {
    if (++evaluations_ > kMaxEvaluations) {
      throw ConvergenceError("quadrature exceeded 10^6 evaluations", partial_, 0.0);
    }
    const double base = std::max(0.0, eval_terms(base_, t));
    return std::pow(base, q_) * eval_terms(weight_, t);
  }

  double adaptive(double a, double b) const {
    double error = 0.0;
    double l1 = 0.0;
    auto f = [this, b](double s) { return b * integrand(b * s); };
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a / b, 1.0, kMaxBisectionDepth, kQuadratureRelTol * 0.1, &error, &l1);
    if (error > kQuadratureRelTol * std::max(l1, std::numeric_limits<double>::min())) {
      throw ConvergenceError("quadrature did not reach relative tolerance 1e-10", partial_ + value,
                             error);
    }
    partial_ += value;
    return value;
  }

  double q_;
  std::span<const PowerTerm> base_;
  std::span<const PowerTerm> weight_;
  long& evaluations_;
  mutable double partial_ = 0.0;
};

}  // namespace

double integrate_power_composite(const PiecewisePower& base, double q,
                                 const PiecewisePower& weight, double lo, double hi) {
  if (!(q > 0.0)) throw DomainError("exponent q must be positive");
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
    throw DomainError("integration bounds must satisfy 0 <= lo < hi <= 1");
  }
  std::vector<double> cuts{lo, hi};
  for (double t : base.breakpoints()) if (t > lo && t < hi) cuts.push_back(t);
  for (double t : weight.breakpoints()) if (t > lo && t < hi) cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  long evaluations = 0;
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double a = cuts[j];
    const double b = cuts[j + 1];
    const double mid = 0.5 * (a + b);
    const auto bterms = merge_terms(
        std::vector<PowerTerm>(base.terms(base.piece_at(mid)).begin(),
                               base.terms(base.piece_at(mid)).end()));
    const auto wterms = merge_terms(
        std::vector<PowerTerm>(weight.terms(weight.piece_at(mid)).begin(),
                               weight.terms(weight.piece_at(mid)).end()));
    if (bterms.empty() || wterms.empty()) continue;
    if (bterms.size() == 1) {
      const PowerTerm b0 = bterms.front();
      if (b0.coeff < 0.0) throw DomainError("base must be nonnegative");
      const double cq = std::pow(b0.coeff, q);
      for (const PowerTerm& w : wterms) {
        total += integrate_term({cq * w.coeff, q * b0.exponent + w.exponent}, a, b);
      }
    } else {
      total += CompositeIntegrator(q, bterms, wterms, evaluations)(a, b);
    }
  }
  return total;
}

double delta_w(const PiecewisePower& g, const PiecewisePower& wss, double p) {
  if (!(p > 1.0)) throw DomainError("p must exceed 1");
  if (!g.flags().nonincreasing || !g.flags().nonneg) {
    throw DomainError("g must be flagged nonnegative and nonincreasing");
  }
  return integrate_power_composite(hardy_average(g), p, wss, 0.0, 1.0);
}

}  // namespace maxbell
