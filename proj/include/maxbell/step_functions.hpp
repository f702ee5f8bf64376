#pragma once

// Functions on (0,1] given piecewise as finite sums of power terms c*t^e.
// The class is closed under the Hardy averaging operator (as long as no piece
// carries a 1/t term that would have to be integrated), which is what lets
// the extremal power functions and their averages be represented exactly.

#include <span>
#include <vector>

#include "maxbell/measure_tree.hpp"

namespace maxbell {

struct PowerTerm {
  double coeff = 0.0;
  double exponent = 0.0;
};

struct PiecewiseFlags {
  bool nonneg = false;
  bool nonincreasing = false;
};

class PiecewisePower {
 public:
  /// `breakpoints` is 0 = t_0 < t_1 < ... < t_n = 1; `terms[i]` describes the
  /// piece (t_i, t_{i+1}]. Set flags are validated; a violated flag throws
  /// DomainError.
  PiecewisePower(std::vector<double> breakpoints, std::vector<std::vector<PowerTerm>> terms,
                 PiecewiseFlags flags = {});

  static PiecewisePower constant(double value);
  /// c * t^e on the single piece (0,1].
  static PiecewisePower power(double coeff, double exponent);
  /// Step function with values[i] on (t_i, t_{i+1}].
  static PiecewisePower steps(std::vector<double> breakpoints, std::span<const double> values);

  std::size_t piece_count() const noexcept { return terms_.size(); }
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  double lo(std::size_t piece) const { return breakpoints_[piece]; }
  double hi(std::size_t piece) const { return breakpoints_[piece + 1]; }
  std::span<const PowerTerm> terms(std::size_t piece) const { return terms_[piece]; }
  const PiecewiseFlags& flags() const noexcept { return flags_; }

  /// Index of the piece (t_i, t_{i+1}] containing t in (0,1].
  std::size_t piece_at(double t) const;
  double operator()(double t) const;
  /// Value of piece `piece`'s formula at t (used for one-sided limits).
  double eval_piece(std::size_t piece, double t) const;

  bool single_term_pieces() const noexcept;
  bool is_step() const noexcept;

 private:
  void validate_flags() const;

  std::vector<double> breakpoints_;
  std::vector<std::vector<PowerTerm>> terms_;
  PiecewiseFlags flags_;
};

/// Nonincreasing step function equimeasurable with a leaf function.
struct RearrangementResult {
  PiecewisePower steps;
  TreeHandle source;
};

RearrangementResult decreasing_rearrangement(const LeafFunction& phi);

/// t -> (1/t) * int_0^t g, exact on the power-sum class.
PiecewisePower hardy_average(const PiecewisePower& g);

/// Closed-form integral over (lo, hi].
double integrate(const PiecewisePower& f, double lo, double hi);

/// int_lo^hi base(t)^q * weight(t) dt. Closed form where base is a single
/// power term on a piece; adaptive Gauss-Kronrod otherwise.
double integrate_power_composite(const PiecewisePower& base, double q,
                                 const PiecewisePower& weight, double lo, double hi);

/// Delta_w(g) = int_0^1 (hardy_average(g))^p * wss dt.
double delta_w(const PiecewisePower& g, const PiecewisePower& wss, double p);

}  // namespace maxbell
