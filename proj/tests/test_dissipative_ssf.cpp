#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shiftlab/dissipative_ssf.hpp"
#include "shiftlab/rng.hpp"
#include "test_helpers.hpp"

using namespace shiftlab;
using namespace shiftlab::testing;

namespace {

DissipativeOperator random_dissipative(std::uint64_t seed, Eigen::Index n, double floor) {
  EnsembleConfig cfg;
  cfg.dim = n;
  cfg.kind = "dissipative";
  cfg.margin = floor;
  cfg.seed = seed;
  return make_dissipative(random_operator(cfg));
}

}  // namespace

TEST_CASE("cayley: scalar landmarks and the circle image of the reals") {
  CHECK(std::abs(cayley(scalar1x1(Complex(0.0, 1.0)))(0, 0)) <= 1e-15);
  CHECK(std::abs(cayley(scalar1x1(Complex(0.0, 0.0)))(0, 0) - Complex(-1.0, 0.0)) <= 1e-15);
  for (double t : {-3.0, -0.4, 0.0, 1.7, 25.0})
    CHECK(std::abs(std::abs(cayley(scalar1x1(Complex(t, 0.0)))(0, 0)) - 1.0) <= 1e-12);
}

TEST_CASE("cayley round trip and contraction property") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    DissipativeOperator l = random_dissipative(seed, 1 + static_cast<Eigen::Index>(seed % 5), 0.1);
    Matrix t = cayley(l.op.mat);
    CHECK(sigma_max(t) <= 1.0 + 1e-12);
    CHECK((inverse_cayley(t) - l.op.mat).norm() <= 1e-10);
  }
}

TEST_CASE("make_dissipative splits Hermitian parts and rejects violations") {
  DissipativeOperator l = random_dissipative(3, 4, 0.2);
  CHECK((l.re_part - l.re_part.adjoint()).norm() <= 1e-14);
  CHECK((l.im_part - l.im_part.adjoint()).norm() <= 1e-14);
  CHECK((l.op.mat - (l.re_part + Complex(0.0, 1.0) * l.im_part)).norm() <= 1e-13);
  CHECK(l.sigma_min_im >= 0.2 - 1e-12);
  CHECK_THROWS_AS(make_dissipative(Operator(scalar1x1(Complex(0.0, -0.1)))), NotDissipative);
}

TEST_CASE("boundary maps are mutually inverse and orientation-preserving") {
  for (double t : {-50.0, -2.0, -0.1, 0.0, 0.3, 4.0, 120.0}) {
    const double theta = line_to_circle_angle(t);
    CHECK(theta > 0.0);
    CHECK(theta < kTwoPi);
    CHECK(circle_angle_to_line(theta) == doctest::Approx(t).epsilon(1e-12));
    // zeta(t) really is the Cayley boundary value (t - i)/(t + i).
    const Complex zeta = std::polar(1.0, theta);
    const Complex want = Complex(t, -1.0) / Complex(t, 1.0);
    CHECK(std::abs(zeta - want) <= 1e-12);
  }
  CHECK(line_to_circle_angle(-1e9) < line_to_circle_angle(1e9));
}

TEST_CASE("pull_back: zero, bounded-arc indicator, tails from the wrap arc") {
  StepFunctionCircle zero;
  zero.constant = 0.0;
  PullBackResult pz = pull_back_ssf(zero);
  CHECK(pz.line.breakpoints.empty());
  CHECK(pz.line.values.front() == doctest::Approx(0.0));

  StepFunctionCircle arc;  // indicator of an arc away from zeta = 1
  arc.breakpoints = {1.0, 2.0};
  arc.values = {1.0, 0.0};
  PullBackResult pa = pull_back_ssf(arc);
  REQUIRE(pa.line.breakpoints.size() == 2);
  CHECK(pa.line.tail_left() == doctest::Approx(0.0));
  CHECK(pa.line.tail_right() == doctest::Approx(0.0));
  CHECK(pa.line.value_at(0.5 * (pa.line.breakpoints[0] + pa.line.breakpoints[1])) ==
        doctest::Approx(1.0));
  CHECK(pa.line.breakpoints[0] == doctest::Approx(circle_angle_to_line(1.0)));

  StepFunctionCircle near_one;
  near_one.breakpoints = {1e-13, 3.0};
  near_one.values = {1.0, 0.0};
  CHECK(pull_back_ssf(near_one).breakpoint_near_one);
}

TEST_CASE("condition 3.1: identity Im part, singular Im part, scalar oracle") {
  DissipativeOperator l0 = make_dissipative(
      Operator(Matrix(Matrix::Identity(3, 3) * Complex(0.5, 0.0) + Complex(0.0, 1.0) * Matrix::Identity(3, 3))));
  DissipativeOperator l1 = make_dissipative(
      Operator(Matrix(l0.op.mat + 0.2 * Matrix::Identity(3, 3))));
  Condition31Report r = check_condition_31(l0, l1);
  CHECK(r.verdict);
  CHECK(r.norm_31 == doctest::Approx(schatten_norm(l1.op.mat - l0.op.mat, 1.0)));

  // Im L0 singular: a purely real direction.
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = Complex(0.3, 1.0);
  m(1, 1) = Complex(-0.4, 0.0);
  DissipativeOperator sing = make_dissipative(Operator(m));
  Matrix mm = m;
  mm(0, 0) += Complex(0.1, 0.0);
  Condition31Report rs = check_condition_31(sing, make_dissipative(Operator(mm)));
  CHECK_FALSE(rs.verdict);
  CHECK(std::isinf(rs.norm_31));

  DissipativeOperator a = make_dissipative(Operator(scalar1x1(Complex(1.0, 2.0))));
  DissipativeOperator b = make_dissipative(Operator(scalar1x1(Complex(1.5, 2.0))));
  CHECK(check_condition_31(a, b).norm_31 == doctest::Approx(0.25));
}

TEST_CASE("the 1x1 pullback oracle fixes the orientation sign") {
  // L0 = i, L1 = 2i; f = (t + i)^{-1}: lhs = (3i)^{-1} - (2i)^{-1} = i/6.
  DissipativeOperator l0 = make_dissipative(Operator(scalar1x1(Complex(0.0, 1.0))));
  DissipativeOperator l1 = make_dissipative(Operator(scalar1x1(Complex(0.0, 2.0))));
  LinePipelineConfig cfg;
  cfg.circle.period = 64;
  LineSSFResult res = real_ssf_line(l0, l1, cfg);
  RationalFn f;
  f.terms.push_back({Complex(0.0, -1.0), 1, Complex(1.0, 0.0)});
  Complex lhs = Complex(0.0, 1.0 / 6.0);
  Complex rhs = integrate_line_against_derivative(res.ssf, f);
  CHECK(std::abs(lhs - rhs) <= 1e-8);
  // And the full residual table passes.
  CHECK(res.all_pass);
}

TEST_CASE("real_ssf_line: equal pair is zero with zero weighted norm") {
  DissipativeOperator l = random_dissipative(9, 3, 0.2);
  LinePipelineConfig cfg;
  LineSSFResult res = real_ssf_line(l, l, cfg);
  CHECK(res.weighted.weighted_norm <= 1e-12);
  for (const auto& row : res.residuals) CHECK(row.abs_residual <= 1e-10);
}

TEST_CASE("real_ssf_line random dim-4 pair on the default rational set") {
  StreamRng rng(23, 1);
  DissipativeOperator l0 = random_dissipative(23, 4, 0.2);
  Matrix pert = 0.05 * rng.rank_r_hermitian(4, 2) +
                Complex(0.0, 0.05) * rng.rank_r_psd(4, 2);
  DissipativeOperator l1 = make_dissipative(Operator(Matrix(l0.op.mat + pert), "pert"));
  LinePipelineConfig cfg;
  cfg.circle.period = 64;  // floor; the rational set raises it
  LineSSFResult res = real_ssf_line(l0, l1, cfg);
  CHECK(res.period_used > 64);
  double worst = 0.0;
  for (const auto& row : res.residuals) worst = std::max(worst, row.abs_residual);
  CHECK(worst <= 1e-6);
  CHECK(res.all_pass);
  CHECK(std::isfinite(res.weighted.weighted_norm));
  CHECK(res.weighted.weighted_norm > 0.0);
}

TEST_CASE("real_ssf_line refuses a singular Im L0") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = Complex(0.3, 1.0);
  m(1, 1) = Complex(0.1, 0.0);  // real eigenvalue direction
  DissipativeOperator l0 = make_dissipative(Operator(m));
  DissipativeOperator l1 = make_dissipative(Operator(Matrix(m + 0.1 * Matrix::Identity(2, 2))));
  LinePipelineConfig cfg;
  CHECK_THROWS_AS(real_ssf_line(l0, l1, cfg), Condition31Failed);
}

TEST_CASE("verify_trace_formula_line: constant tail formula and interval endpoints") {
  DissipativeOperator l = random_dissipative(31, 2, 0.2);
  StepFunctionLine constant;
  constant.values = {1.5};
  RationalFn f;
  f.terms.push_back({Complex(0.0, -1.0), 1, Complex(1.0, 0.0)});
  CHECK(std::abs(integrate_line_against_derivative(constant, f)) == 0.0);

  StepFunctionLine indicator;
  indicator.breakpoints = {0.0, 1.0};
  indicator.values = {0.0, 1.0, 0.0};
  const Complex want = 1.0 / Complex(1.0, 1.0) - 1.0 / Complex(0.0, 1.0);
  CHECK(std::abs(integrate_line_against_derivative(indicator, f) - want) <= 1e-15);
}

TEST_CASE("weighted norm: exact arctan pieces and N-doubling stability") {
  StepFunctionLine box;
  box.breakpoints = {-1.0, 1.0};
  box.values = {0.0, 2.0, 0.0};
  WeightedNormReport rep = weighted_norm_report(box);
  CHECK(rep.weighted_norm == doctest::Approx(2.0 * (std::atan(1.0) - std::atan(-1.0))));
  CHECK(rep.truncated_l1.at(10.0) == doctest::Approx(4.0));
  CHECK(rep.tail_constant_estimate == doctest::Approx(0.0));

  StreamRng rng(37, 0);
  DissipativeOperator l0 = random_dissipative(37, 3, 0.2);
  Matrix pert = 0.08 * rng.rank_r_hermitian(3, 1);
  DissipativeOperator l1 = make_dissipative(Operator(Matrix(l0.op.mat + pert), "pert"));
  LinePipelineConfig cfg;
  LineSSFResult base = real_ssf_line(l0, l1, cfg);
  LinePipelineConfig doubled = cfg;
  doubled.circle.period = 2 * base.period_used;
  LineSSFResult fine = real_ssf_line(l0, l1, doubled);
  CHECK(fine.period_used >= 2 * base.period_used);
  const double a = base.weighted.weighted_norm;
  const double b = fine.weighted.weighted_norm;
  CHECK(std::abs(a - b) <= 0.05 * std::max(a, b));
}

TEST_CASE("nonintegrability probe reports the designed families") {
  StreamRng rng(41, 7);
  DissipativeOperator l0 = random_dissipative(41, 3, 0.2);

  // Family A: L1 = L0 + 0.1i * projector: Im trace V = 0.1.
  Vector u = rng.gaussian_matrix(3, 1).col(0);
  u /= u.norm();
  Matrix proj = u * u.adjoint();
  DissipativeOperator la =
      make_dissipative(Operator(Matrix(l0.op.mat + Complex(0.0, 0.1) * proj), "A"));
  LinePipelineConfig cfg;
  LineSSFResult res_a = real_ssf_line(l0, la, cfg);
  TailProbeReport probe_a = nonintegrability_probe(l0, la, res_a);
  CHECK(probe_a.im_trace_v == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(probe_a.verdict_text.find("nonreal trace") != std::string::npos);

  // Family B: Hermitian perturbation: Im trace V = 0.
  Matrix h = rng.rank_r_hermitian(3, 1);
  DissipativeOperator lb = make_dissipative(Operator(Matrix(l0.op.mat + 0.1 * h), "B"));
  LineSSFResult res_b = real_ssf_line(l0, lb, cfg);
  TailProbeReport probe_b = nonintegrability_probe(l0, lb, res_b);
  CHECK(std::abs(probe_b.im_trace_v) <= 1e-12);
  CHECK(probe_b.verdict_text.find("real trace") != std::string::npos);

  // L1 = L0: everything zero.
  TailProbeReport trivial = nonintegrability_probe(l0, l0, real_ssf_line(l0, l0, cfg));
  CHECK(trivial.im_trace_v == doctest::Approx(0.0));
  CHECK(std::abs(trivial.growth_slope) <= 1e-12);
  CHECK(trivial.tail_constant_estimate == doctest::Approx(0.0));
}
