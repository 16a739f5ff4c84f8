#include "shiftlab/contraction_ssf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace shiftlab {

namespace {

double s1_norm(const Matrix& m) { return schatten_norm(m, 1.0); }

}  // namespace

HypothesisReport check_hypotheses(const Matrix& t0, const Matrix& t1, double alpha,
                                  double kernel_tol, double tol_role) {
  if (t0.rows() != t1.rows()) throw DimensionMismatch(t0.rows(), t1.rows());
  if (!(alpha > 0.5 && alpha <= 1.0)) throw BadAlpha(alpha);
  const double s0 = sigma_max(t0);
  if (s0 > 1.0 + tol_role) throw NotAContraction(s0);
  const double s1 = sigma_max(t1);
  if (s1 > 1.0 + tol_role) throw NotAContraction(s1);

  DefectPair dp = defect(t0, tol_role);
  HypothesisReport r;
  r.alpha = alpha;
  r.sigma_min_defect = hermitian_eigenvalues(dp.d).minCoeff();
  r.sigma_min_defect_star = hermitian_eigenvalues(dp.d_star).minCoeff();
  r.kernel_ok = r.sigma_min_defect >= kernel_tol;
  if (!r.kernel_ok) {
    r.norm_a = std::numeric_limits<double>::infinity();
    r.norm_b = std::numeric_limits<double>::infinity();
    r.verdict = false;
    return r;
  }
  auto inv_a = hermitian_power(dp.d, -2.0 * alpha, kernel_tol);
  auto inv_b = hermitian_power(dp.d_star, -2.0 * alpha, kernel_tol);
  if (!inv_a || !inv_b) {
    r.kernel_ok = false;
    r.norm_a = std::numeric_limits<double>::infinity();
    r.norm_b = std::numeric_limits<double>::infinity();
    r.verdict = false;
    return r;
  }
  r.norm_a = s1_norm((t1 - t0) * (*inv_a));
  r.norm_b = s1_norm((t1 - t0).adjoint() * (*inv_b));
  r.verdict = r.kernel_ok;
  return r;
}

int required_period_for_degree(int max_degree, int requested) {
  // Dilation traces are exact through k = N-2; keep a margin of 16 beyond
  // the largest tested mode.
  return std::max(requested, max_degree + 18);
}

std::vector<std::pair<std::string, LaurentPoly>> default_polynomial_set(
    const PipelineConfig& cfg) {
  std::vector<std::pair<std::string, LaurentPoly>> set;
  for (int k = 1; k <= cfg.max_degree; ++k)
    set.emplace_back("z^" + std::to_string(k), LaurentPoly::monomial(k));
  StreamRng rng(cfg.poly_seed, 17);
  for (int i = 0; i < cfg.random_polynomials; ++i) {
    std::vector<Complex> coeffs(static_cast<size_t>(cfg.max_degree) + 1);
    for (auto& c : coeffs) {
      // Uniform in the unit disc.
      const double r = std::sqrt(rng.uniform());
      const double phi = kTwoPi * rng.uniform();
      c = std::polar(r, phi);
    }
    set.emplace_back("rand-poly-" + std::to_string(i), LaurentPoly::analytic(std::move(coeffs)));
  }
  return set;
}

std::vector<TraceFormulaReport> verify_trace_formula(
    const Matrix& t0, const Matrix& t1, const StepFunctionCircle& ssf,
    const std::vector<std::pair<std::string, LaurentPoly>>& polys, double tolerance) {
  std::vector<TraceFormulaReport> out;
  out.reserve(polys.size());
  for (const auto& [label, p] : polys) {
    if (p.min_power() < 0)
      throw InvalidConfig("trace-formula test polynomials must be analytic");
    TraceFormulaReport r;
    r.function_label = label;
    r.lhs = (poly_eval(t1, p) - poly_eval(t0, p)).trace();
    r.rhs = integrate_step(ssf, p);
    r.abs_residual = std::abs(r.lhs - r.rhs);
    r.tolerance = tolerance;
    r.pass = r.abs_residual <= tolerance;
    out.push_back(std::move(r));
  }
  return out;
}

SSFResult real_ssf(const Matrix& t0, const Matrix& t1, const PipelineConfig& cfg) {
  SSFResult res;
  res.hypothesis = check_hypotheses(t0, t1, cfg.alpha, cfg.kernel_tol, cfg.tol_role);
  if (!res.hypothesis.verdict)
    throw HypothesisFailed("defect kernel condition failed: sigma_min(D_T0) = " +
                           std::to_string(res.hypothesis.sigma_min_defect));
  res.period_requested = cfg.period;
  res.period_used = required_period_for_degree(cfg.max_degree, cfg.period);
  if (res.period_used < 3) throw PeriodTooSmall(res.period_used);

  DilationPair pair = dilation_pair(t0, t1, res.period_used, cfg.tol_role);
  res.s1_difference = pair.s1_difference;
  PhaseList p0 = make_phase_list(dilation_eigenphases(pair.first, cfg.force_dense_eig), "U[T0]");
  PhaseList p1 = make_phase_list(dilation_eigenphases(pair.second, cfg.force_dense_eig), "U[T1]");
  res.ssf = unitary_ssf(p0, p1, cfg.normalization);

  res.residuals = verify_trace_formula(t0, t1, res.ssf, default_polynomial_set(cfg),
                                       cfg.poly_tolerance);
  res.an_functional_of_difference = an_functional(singular_values(t1 - t0));
  res.all_pass = std::all_of(res.residuals.begin(), res.residuals.end(),
                             [](const TraceFormulaReport& r) { return r.pass; });
  return res;
}

CorollaryResult corollary_xt(const Matrix& t, const Matrix& x, const CorollaryConfig& cfg) {
  if (t.rows() != x.rows()) throw DimensionMismatch(t.rows(), x.rows());
  const Eigen::Index n = x.rows();
  const double herm_defect = (x - x.adjoint()).norm();
  if (herm_defect > cfg.pipeline.tol_role * std::max(1.0, x.norm()))
    throw XNotPositiveContraction("X is not Hermitian: ||X - X*|| = " +
                                  std::to_string(herm_defect));
  RealVector xe = hermitian_eigenvalues(x);
  if (xe.minCoeff() < -cfg.pipeline.tol_role || xe.maxCoeff() > 1.0 + cfg.pipeline.tol_role)
    throw XNotPositiveContraction("spectrum of X not inside [0, 1]: [" +
                                  std::to_string(xe.minCoeff()) + ", " +
                                  std::to_string(xe.maxCoeff()) + "]");

  CorollaryResult out;
  Matrix xt = x * t;

  // Corollary-specific weighted norms.
  DefectPair dp = defect(t, cfg.pipeline.tol_role);
  auto inv_a = hermitian_power(dp.d, -2.0 * cfg.pipeline.alpha, cfg.pipeline.kernel_tol);
  auto inv_b = hermitian_power(dp.d_star, -2.0 * cfg.pipeline.alpha, cfg.pipeline.kernel_tol);
  const Matrix eye = Matrix::Identity(n, n);
  if (inv_a) out.corollary_norm_a = s1_norm((eye - x) * t * (*inv_a));
  if (inv_b) out.corollary_norm_b = s1_norm(t.adjoint() * (eye - x) * (*inv_b));

  // The dual-route comparison needs dilation Fourier modes out to
  // fourier_modes, hence a period beyond that window.
  CorollaryConfig local = cfg;
  local.pipeline.period = required_period_for_degree(cfg.fourier_modes, cfg.pipeline.period);
  out.fourier_modes = cfg.fourier_modes;
  out.real_route = real_ssf(t, xt, local.pipeline);

  if (sigma_max(t) <= 1.0 - cfg.strictness_margin) {
    int grid = std::max(cfg.determinant_grid, 4 * cfg.fourier_modes);
    SampledCircleFunction det = determinant_ssf(t, xt, grid, cfg.strictness_margin);
    FourierCoeffs ssf_modes = fourier_step(out.real_route.ssf, cfg.fourier_modes);
    FourierCoeffs det_modes = fourier_sampled(det, cfg.fourier_modes);
    out.hardy_deficit_vs_determinant = hardy_deficit(ssf_modes, det_modes);

    // 2i Im(xi_det) is the purely imaginary reconstruction; it shares the
    // negative modes, so its deficit against the dilation route must also be
    // small.
    SampledCircleFunction imag_route;
    imag_route.grid = det.grid;
    imag_route.values.resize(det.values.size());
    double l1 = 0.0;
    for (size_t j = 0; j < det.values.size(); ++j) {
      const double im = det.values[j].imag();
      imag_route.values[j] = Complex(0.0, 2.0 * im);
      l1 += std::abs(2.0 * im);
    }
    ImaginaryPartReport rep;
    rep.l1_norm = l1 / static_cast<double>(det.grid);
    rep.deficit_imag_route = hardy_deficit(ssf_modes, fourier_sampled(imag_route, cfg.fourier_modes));
    out.im_part = rep;
    out.determinant_route = std::move(det);
  }
  return out;
}

std::vector<DefectStudyRow> defect_difference_study(const std::vector<EnsembleConfig>& family,
                                                    double p, double alpha) {
  std::vector<DefectStudyRow> rows;
  rows.reserve(family.size());
  for (const EnsembleConfig& cfg : family) {
    auto [a, b] = random_pair(cfg);
    DefectStudyRow row;
    row.dim = cfg.dim;
    row.seed = cfg.seed;
    HypothesisReport hyp = check_hypotheses(a.mat, b.mat, alpha);
    row.norm_a = hyp.norm_a;
    row.norm_b = hyp.norm_b;
    DefectPair d0 = defect(a.mat);
    DefectPair d1 = defect(b.mat);
    row.defect_diff = schatten_norm(d1.d - d0.d, p);
    row.defect_diff_star = schatten_norm(d1.d_star - d0.d_star, p);
    rows.push_back(row);
  }
  return rows;
}

SqrtStudyResult sqrt_lipschitz_study(const Matrix& x, const Matrix& y, double alpha, double p,
                                     double kernel_tol, double tol_role) {
  if (x.rows() != y.rows()) throw DimensionMismatch(x.rows(), y.rows());
  if (!(alpha > 0.5 && alpha <= 1.0)) throw BadAlpha(alpha);
  RealVector xe = hermitian_eigenvalues(x);
  RealVector ye = hermitian_eigenvalues(y);
  if (xe.minCoeff() < -tol_role || xe.maxCoeff() > 1.0 + tol_role ||
      ye.minCoeff() < -tol_role || ye.maxCoeff() > 1.0 + tol_role)
    throw NotInUnitInterval("need 0 <= X, Y <= I within tolerance");
  if (xe.minCoeff() < kernel_tol) throw KernelNotTrivial(xe.minCoeff());

  SqrtStudyResult r;
  r.ynorm = schatten_norm(y - x, p);
  auto xinv = hermitian_power(x, -alpha, kernel_tol);
  if (!xinv) throw KernelNotTrivial(xe.minCoeff());
  r.wnorm = schatten_norm((y - x) * (*xinv), p);
  r.target = schatten_norm(psd_sqrt(y) - psd_sqrt(x), p);
  return r;
}

}  // namespace shiftlab
