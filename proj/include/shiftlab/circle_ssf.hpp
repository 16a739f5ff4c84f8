#ifndef SHIFTLAB_CIRCLE_SSF_HPP
#define SHIFTLAB_CIRCLE_SSF_HPP

#include <string>
#include <vector>

#include "shiftlab/step_function.hpp"
#include "shiftlab/types.hpp"

namespace shiftlab {

/// Spectral shift function of a pair of unitary matrices: an exact step
/// function with jump +1 at each eigenphase of u0 and -1 at each eigenphase
/// of u1 (the sign is the one fixed by the 1x1 trace oracle), normalized per
/// the requested mode.
StepFunctionCircle unitary_ssf(const Matrix& u0, const Matrix& u1,
                               Normalization mode = Normalization::kMinimalL1,
                               double tol_role = kDefaultRoleTol);

/// Same, starting from precomputed eigenphase lists.
StepFunctionCircle unitary_ssf(const PhaseList& phases0, const PhaseList& phases1,
                               Normalization mode = Normalization::kMinimalL1,
                               double merge_tol = 1e-12);

/// Complex-valued function sampled on an equispaced circle grid.
struct SampledCircleFunction {
  int grid = 0;  // theta_j = 2 pi j / grid
  std::vector<Complex> values;
};

/// Perturbation-determinant spectral shift function on a grid:
///   xi_c(e^{i theta}) = -(1/2 pi i) log det(T1 - z)/det(T0 - z),
/// branch continued along the grid from the principal value at theta = 0.
/// The grid doubles automatically (up to 2^16) until successive phase steps
/// stay below pi/2. The returned grid is the final one.
SampledCircleFunction determinant_ssf(const Matrix& t0, const Matrix& t1, int grid_size,
                                      double strictness_margin = 0.05);

/// Discrete Fourier coefficients of a sampled function for |k| <= max_mode;
/// requires grid >= 4*max_mode.
FourierCoeffs fourier_sampled(const SampledCircleFunction& f, int max_mode);

/// max over k in [-M, -1] of |c_k(a - b)|: the Hardy-class deficit. Both
/// inputs must carry the same mode window.
double hardy_deficit(const FourierCoeffs& a, const FourierCoeffs& b);
double hardy_deficit(const StepFunctionCircle& a, const SampledCircleFunction& b, int max_mode);

struct ZygmundReport {
  double zygmund_value = 0.0;
  SampledCircleFunction conjugate;  // sampled conjugate function, grid >= 4*max_mode
};

/// Zygmund integral (requires a nonnegative step function) together with the
/// harmonic conjugate synthesized through the -i sgn(k) multiplier on
/// max_mode Fourier modes.
ZygmundReport zygmund_and_conjugate(const StepFunctionCircle& f, int max_mode = 64,
                                    int grid = 0);

}  // namespace shiftlab

#endif
