#ifndef SHIFTLAB_STEP_FUNCTION_HPP
#define SHIFTLAB_STEP_FUNCTION_HPP

#include <map>
#include <string>
#include <vector>

#include "shiftlab/core.hpp"
#include "shiftlab/types.hpp"

namespace shiftlab {

/// Arguments of unit-modulus eigenvalues, sorted ascending in [0, 2pi),
/// multiplicities kept as repeats.
struct PhaseList {
  std::vector<double> phases;
  std::string source;
};

PhaseList make_phase_list(std::vector<double> phases, std::string source);

enum class Normalization { kMinimalL1, kZeroMean, kRaw };

Normalization normalization_from_string(const std::string& s);
std::string to_string(Normalization n);

/// Piecewise-constant real function on the circle. values[i] lives on the arc
/// [breakpoints[i], breakpoints[i+1]) taken cyclically, so the last arc wraps
/// through theta = 0. An empty breakpoint list means a constant function.
struct StepFunctionCircle {
  std::vector<double> breakpoints;  // sorted, in [0, 2pi)
  std::vector<double> values;       // same length; constant() if empty breakpoints
  double constant = 0.0;            // used only when breakpoints is empty
  Normalization normalization = Normalization::kRaw;

  size_t arc_count() const { return breakpoints.empty() ? 1 : breakpoints.size(); }
  double value_on_arc(size_t i) const { return breakpoints.empty() ? constant : values[i]; }
  /// Arc i spans [arc_start(i), arc_end(i)) with arc_end(last) = breakpoints[0] + 2pi.
  double arc_start(size_t i) const;
  double arc_end(size_t i) const;
  double arc_length(size_t i) const { return arc_end(i) - arc_start(i); }

  double value_at(double theta) const;
  double jump_at(size_t i) const;  // value entering arc i minus value before breakpoint i

  /// Value on the arc containing theta = 0 (the wrap arc).
  double wrap_value() const;

  StepFunctionCircle shifted(double c) const;
  double l1_norm() const;      // integral of |f| d(theta)
  double mean() const;         // (1/2pi) integral of f d(theta)
  double weighted_median() const;
};

/// Build the unitary-pair spectral shift function: jump +1 at each phase of
/// the first list, -1 at each phase of the second; phases closer than
/// merge_tol are merged and their jumps summed; zero jumps are dropped.
StepFunctionCircle step_from_phases(const PhaseList& plus, const PhaseList& minus,
                                    Normalization mode, double merge_tol = 1e-12);

StepFunctionCircle normalize(const StepFunctionCircle& f, Normalization mode);

/// Exact closed-form integral over the circle of p'(zeta) f(zeta) d(zeta):
/// each arc contributes value * (p(end) - p(start)), no quadrature.
Complex integrate_step(const StepFunctionCircle& f, const LaurentPoly& p);

/// Checks the unitary-pair invariants: jumps integral within tol and total
/// jump zero within tol.
struct JumpCheck {
  bool integer_jumps = true;
  double max_deviation = 0.0;
  double total_jump = 0.0;
};
JumpCheck check_integer_jumps(const StepFunctionCircle& f, double tol = 1e-9);

/// Fourier coefficients c_k = (1/2pi) \int f e^{-ik t} dt for |k| <= max_mode.
struct FourierCoeffs {
  int max_mode = 0;
  std::vector<Complex> c;  // index k + max_mode

  Complex at(int k) const { return c[static_cast<size_t>(k + max_mode)]; }
  Complex& at(int k) { return c[static_cast<size_t>(k + max_mode)]; }
};

/// Exact arc-by-arc coefficients of a circle step function.
FourierCoeffs fourier_step(const StepFunctionCircle& f, int max_mode);

/// Zygmund integral \int f log(1 + f) dm with normalized measure, exact per
/// arc; throws NegativeValues if any arc value is negative.
double zygmund_value(const StepFunctionCircle& f);

// ---------------------------------------------------------------------------
// Line step functions (pullbacks of circle step functions under the Cayley
// boundary map).
// ---------------------------------------------------------------------------

/// Piecewise-constant function on R with m breakpoints and m+1 interval
/// values; values.front()/back() are the two tails.
struct StepFunctionLine {
  std::vector<double> breakpoints;  // ascending
  std::vector<double> values;       // breakpoints.size() + 1 entries

  double tail_left() const { return values.front(); }
  double tail_right() const { return values.back(); }
  double value_at(double t) const;
};

/// \int_a^b |f| dt, exact.
double line_truncated_l1(const StepFunctionLine& f, double radius);

/// \int f'(t) * f_step contributions: sum_i v_i (f(b_i) - f(a_i)) with
/// f(+-inf) = 0 for the tails; exact for proper rational test functions.
Complex integrate_line_against_derivative(const StepFunctionLine& xi, const RationalFn& f);

struct WeightedNormReport {
  double weighted_norm = 0.0;  // \int |xi| / (1+t^2) dt, closed form
  std::map<double, double> truncated_l1;  // R -> \int_{-R}^{R} |xi|
  double tail_constant_estimate = 0.0;    // (|tail_left| + |tail_right|)/2
};

WeightedNormReport weighted_norm_report(const StepFunctionLine& f,
                                        const std::vector<double>& radii = {10.0, 100.0, 1000.0});

}  // namespace shiftlab

#endif
