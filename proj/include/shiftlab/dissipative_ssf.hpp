#ifndef SHIFTLAB_DISSIPATIVE_SSF_HPP
#define SHIFTLAB_DISSIPATIVE_SSF_HPP

#include <optional>
#include <string>
#include <vector>

#include "shiftlab/contraction_ssf.hpp"
#include "shiftlab/step_function.hpp"
#include "shiftlab/types.hpp"

namespace shiftlab {

/// Bounded dissipative matrix with its Hermitian split cached.
struct DissipativeOperator {
  Operator op;
  Matrix re_part;
  Matrix im_part;
  double sigma_min_im = 0.0;  // smallest eigenvalue of Im part
};

DissipativeOperator make_dissipative(Operator op, double tol_role = kDefaultRoleTol);

/// T = (L - iI)(L + iI)^{-1}; a contraction whenever L is dissipative.
Matrix cayley(const Matrix& l, double tol_check = 1e-8);

/// L = i (I + T)(I - T)^{-1}; defined when 1 is not in the spectrum of T.
Matrix inverse_cayley(const Matrix& t);

/// Boundary map of the transform: t real -> zeta = (t-i)/(t+i) on the circle;
/// inverse theta -> -cot(theta/2).
double line_to_circle_angle(double t);
double circle_angle_to_line(double theta);

struct PullBackResult {
  StepFunctionLine line;
  bool breakpoint_near_one = false;  // a circle breakpoint sat within 1e-12 of zeta = 1
};

/// Carry a circle step function to the real line along the boundary map. The
/// arc containing zeta = 1 becomes both tails; a breakpoint within 1e-12 of
/// zeta = 1 is perturbed by 1e-10 and flagged.
PullBackResult pull_back_ssf(const StepFunctionCircle& eta);

struct Condition31Report {
  double sigma_min_im0 = 0.0;
  double norm_31 = 0.0;  // ||(L1 - L0) (Im L0)^{-1}||_S1, +inf when the kernel check fails
  bool verdict = false;
};

Condition31Report check_condition_31(const DissipativeOperator& l0, const DissipativeOperator& l1,
                                     double kernel_tol = kDefaultKernelTol);

/// Default rational test set: orders 1 and 2 at poles -i, 1-2i, -3-0.5i.
std::vector<RationalFn> default_rational_set();

struct LinePipelineConfig {
  PipelineConfig circle;  // period here is a floor; raised per the test set
  double kernel_tol = kDefaultKernelTol;
  double rational_tolerance = 1e-6;
  std::vector<RationalFn> test_set;  // empty -> default_rational_set()
};

struct LineSSFResult {
  StepFunctionLine ssf;
  StepFunctionCircle circle_ssf;
  int period_used = 0;
  Condition31Report condition31;
  HypothesisReport circle_hypothesis;
  WeightedNormReport weighted;
  std::vector<TraceFormulaReport> residuals;
  bool breakpoint_near_one = false;
  bool all_pass = false;
  std::string caveat = kFiniteDimCaveat;
};

/// Theorem-3.1 pipeline: Cayley-transform the pair, run the contraction
/// machinery, pull the circle step function back to the line, then verify
/// the rational trace formula and the weighted-integrability data.
LineSSFResult real_ssf_line(const DissipativeOperator& l0, const DissipativeOperator& l1,
                            const LinePipelineConfig& cfg);

/// Residuals of trace(f(L1) - f(L0)) against sum_i v_i (f(b_i) - f(a_i)).
std::vector<TraceFormulaReport> verify_trace_formula_line(const DissipativeOperator& l0,
                                                          const DissipativeOperator& l1,
                                                          const StepFunctionLine& xi,
                                                          const std::vector<RationalFn>& fs,
                                                          double tolerance = 1e-6);

/// Smallest period that pushes the Cayley-pulled-back Taylor tails of every
/// pole in the set below `tolerance` (plus margin); the wrap error of the
/// cyclic dilation enters at mode N-1 with weight ~N, which this accounts
/// for.
int required_period_for_rational_set(const std::vector<RationalFn>& fs, double tolerance,
                                     int requested);

struct TailProbeReport {
  double im_trace_v = 0.0;
  double tail_constant_estimate = 0.0;
  double growth_intercept = 0.0;  // a in truncated_l1(R) ~ a + b R
  double growth_slope = 0.0;      // b
  std::string verdict_text;
};

/// Theorem-3.2 diagnostics: Im trace(V), the tail constant of the computed
/// step function, and a least-squares linear fit of truncated_l1(R) over the
/// report radii. No proportionality between the slope and Im trace(V) is
/// asserted.
TailProbeReport nonintegrability_probe(const DissipativeOperator& l0,
                                       const DissipativeOperator& l1,
                                       const LineSSFResult& result);

}  // namespace shiftlab

#endif
