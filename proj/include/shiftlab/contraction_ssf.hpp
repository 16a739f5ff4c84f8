#ifndef SHIFTLAB_CONTRACTION_SSF_HPP
#define SHIFTLAB_CONTRACTION_SSF_HPP

#include <optional>
#include <string>
#include <vector>

#include "shiftlab/circle_ssf.hpp"
#include "shiftlab/dilation.hpp"
#include "shiftlab/rng.hpp"
#include "shiftlab/step_function.hpp"
#include "shiftlab/types.hpp"

namespace shiftlab {

/// Every report of this pipeline carries the finite-dimension caveat.
inline constexpr const char* kFiniteDimCaveat =
    "finite-dimensional run: trace-class membership is automatic; the reported "
    "norms quantify conditioning, not membership";

/// Verdicts for the defect-kernel and weighted-difference conditions on a
/// contraction pair. The S1 norms are finite iff the kernel condition holds;
/// in finite dimension the verdict is the kernel check.
struct HypothesisReport {
  double sigma_min_defect = 0.0;       // smallest eigenvalue of D_{T0}
  double sigma_min_defect_star = 0.0;  // dual check on D_{T0*} (equal in exact arithmetic)
  double alpha = 1.0;
  double norm_a = 0.0;  // ||(T1-T0) D_{T0}^{-2a}||_S1, +inf when kernel fails
  double norm_b = 0.0;  // ||(T1*-T0*) D_{T0*}^{-2a}||_S1
  bool kernel_ok = false;
  bool verdict = false;
};

HypothesisReport check_hypotheses(const Matrix& t0, const Matrix& t1, double alpha = 1.0,
                                  double kernel_tol = kDefaultKernelTol,
                                  double tol_role = kDefaultRoleTol);

struct TraceFormulaReport {
  std::string function_label;
  Complex lhs{0.0, 0.0};
  Complex rhs{0.0, 0.0};
  double abs_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool diagnostic_only = false;  // wraparound regime: reported, not gating
};

struct PipelineConfig {
  int period = 64;  // minimum dilation period; raised to fit the test set
  double alpha = 1.0;
  double kernel_tol = kDefaultKernelTol;
  double tol_role = kDefaultRoleTol;
  Normalization normalization = Normalization::kMinimalL1;
  int max_degree = 16;            // monomial test degrees 1..max_degree
  int random_polynomials = 4;     // seeded random degree-<=max_degree polynomials
  std::uint64_t poly_seed = 1234; // seed for the random test polynomials
  double poly_tolerance = 1e-8;
  bool force_dense_eig = false;
};

struct SSFResult {
  StepFunctionCircle ssf;
  int period_requested = 0;
  int period_used = 0;  // >= requested when the test set demands more
  HypothesisReport hypothesis;
  std::vector<TraceFormulaReport> residuals;
  double an_functional_of_difference = 0.0;
  double s1_difference = 0.0;  // ||U1 - U0||_S1 of the dilation pair
  bool all_pass = false;
  std::string caveat = kFiniteDimCaveat;
};

/// The main pipeline: hypothesis gate, dilation pair, eigenphase step
/// function, and a monomial + random-polynomial residual table verified
/// against direct traces.
SSFResult real_ssf(const Matrix& t0, const Matrix& t1, const PipelineConfig& cfg);

/// Residuals of trace(p(T1) - p(T0)) against the step-function integral for
/// caller-supplied analytic polynomials.
std::vector<TraceFormulaReport> verify_trace_formula(
    const Matrix& t0, const Matrix& t1, const StepFunctionCircle& ssf,
    const std::vector<std::pair<std::string, LaurentPoly>>& polys, double tolerance = 1e-8);

/// The default test set of cfg: monomials z^1..z^max_degree plus seeded
/// random polynomials with unit-ball coefficients.
std::vector<std::pair<std::string, LaurentPoly>> default_polynomial_set(const PipelineConfig& cfg);

struct ImaginaryPartReport {
  double l1_norm = 0.0;            // \int |2 Im xi_det| d(theta)/2pi
  double deficit_imag_route = 0.0; // hardy deficit of 2i Im(xi_det) against the dilation ssf
};

struct CorollaryResult {
  SSFResult real_route;
  std::optional<SampledCircleFunction> determinant_route;
  double corollary_norm_a = 0.0;  // ||(I-X) T D_T^{-2a}||_S1
  double corollary_norm_b = 0.0;  // ||T* (I-X) D_{T*}^{-2a}||_S1
  std::optional<double> hardy_deficit_vs_determinant;
  std::optional<ImaginaryPartReport> im_part;
  int fourier_modes = 0;
};

struct CorollaryConfig {
  PipelineConfig pipeline;
  int fourier_modes = 256;
  int determinant_grid = 1024;
  double strictness_margin = 0.05;
};

/// The {T, XT} study: X a Hermitian PSD contraction. Runs the real pipeline
/// and, for strict T, the determinant route plus the H1 comparisons of the
/// real and purely-imaginary reconstructions.
CorollaryResult corollary_xt(const Matrix& t, const Matrix& x, const CorollaryConfig& cfg);

struct DefectStudyRow {
  Eigen::Index dim = 0;
  std::uint64_t seed = 0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  double defect_diff = 0.0;       // ||D_{T1} - D_{T0}||_Sp
  double defect_diff_star = 0.0;  // ||D_{T1*} - D_{T0*}||_Sp
};

/// Defect-difference scaling across a dimension-indexed family of perturbed
/// strict pairs.
std::vector<DefectStudyRow> defect_difference_study(const std::vector<EnsembleConfig>& family,
                                                    double p, double alpha);

struct SqrtStudyResult {
  double ynorm = 0.0;   // ||Y - X||_Sp
  double wnorm = 0.0;   // ||(Y - X) X^{-alpha}||_Sp
  double target = 0.0;  // ||Y^{1/2} - X^{1/2}||_Sp
};

/// Square-root Lipschitz data for 0 <= X, Y <= I with trivial kernel of X.
SqrtStudyResult sqrt_lipschitz_study(const Matrix& x, const Matrix& y, double alpha, double p,
                                     double kernel_tol = kDefaultKernelTol,
                                     double tol_role = kDefaultRoleTol);

/// Smallest period that keeps every tested mode inside the exact window of
/// the cyclic dilation (traces match through k = N-2), with margin.
int required_period_for_degree(int max_degree, int requested);

}  // namespace shiftlab

#endif
