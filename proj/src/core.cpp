#include "shiftlab/core.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace shiftlab {

namespace {

void require_square(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch(m.rows(), m.cols());
}

}  // namespace

RealVector singular_values(const Matrix& m) {
  require_square(m);
  if (m.rows() == 0) return RealVector(0);
  Eigen::BDCSVD<Matrix> svd(m);
  if (svd.info() != Eigen::Success) throw EigSolverFailed("SVD did not converge");
  return svd.singularValues();
}

RealVector hermitian_eigenvalues(const Matrix& m) {
  require_square(m);
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigSolverFailed("Hermitian eigensolver did not converge");
  return es.eigenvalues();
}

double sigma_max(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  return singular_values(m)(0);
}

RoleReport classify(const Matrix& m, double tol_role) {
  require_square(m);
  RoleReport r;
  r.sigma_max = sigma_max(m);
  const Eigen::Index n = m.rows();
  r.unitary_defect = (m.adjoint() * m - Matrix::Identity(n, n)).norm();
  Matrix im = (m - m.adjoint()) / Complex(0.0, 2.0);
  r.min_imag_eig = n == 0 ? 0.0 : hermitian_eigenvalues(im).minCoeff();
  r.contraction = r.sigma_max <= 1.0 + tol_role;
  r.strict_contraction = r.sigma_max < 1.0 - tol_role;
  r.unitary = r.unitary_defect <= tol_role;
  r.dissipative = r.min_imag_eig >= -tol_role;
  return r;
}

Matrix psd_sqrt(const Matrix& m, double tol_psd) {
  require_square(m);
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw EigSolverFailed("Hermitian eigensolver did not converge");
  RealVector w = es.eigenvalues();
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) < -tol_psd) throw NotPsdWithinTolerance(w(i));
    if (w(i) < 0.0) w(i) = 0.0;
  }
  return es.eigenvectors() * w.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

std::optional<Matrix> hermitian_power(const Matrix& m, double exponent, double floor_tol) {
  require_square(m);
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw EigSolverFailed("Hermitian eigensolver did not converge");
  RealVector w = es.eigenvalues();
  if (exponent < 0.0 && w.minCoeff() < floor_tol) return std::nullopt;
  RealVector p(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) p(i) = std::pow(w(i), exponent);
  return es.eigenvectors() * p.asDiagonal() * es.eigenvectors().adjoint();
}

DefectPair defect(const Matrix& t, double tol_role, double tol_psd) {
  require_square(t);
  const double smax = sigma_max(t);
  if (smax > 1.0 + tol_role) throw NotAContraction(smax);
  const Eigen::Index n = t.rows();
  Matrix id = Matrix::Identity(n, n);
  DefectPair d;
  d.d = psd_sqrt(id - t.adjoint() * t, tol_psd);
  d.d_star = psd_sqrt(id - t * t.adjoint(), tol_psd);
  return d;
}

double schatten_norm(const Matrix& m, double p) {
  if (p <= 0.0) throw InvalidConfig("Schatten exponent must be positive");
  RealVector s = singular_values(m);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i), p);
  return std::pow(acc, 1.0 / p);
}

double an_functional(const RealVector& s) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double x = s(i);
    if (x > 0.0) acc += x * std::log1p(1.0 / x);
  }
  return acc;
}

// -------------------------------- LaurentPoly ------------------------------

LaurentPoly::LaurentPoly(int min_power, std::vector<Complex> coeffs)
    : min_power_(min_power), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) coeffs_.push_back(Complex(0.0, 0.0));
  // Trim zero fringes so min/max powers are meaningful.
  while (coeffs_.size() > 1 && coeffs_.back() == Complex(0.0, 0.0)) coeffs_.pop_back();
  while (coeffs_.size() > 1 && coeffs_.front() == Complex(0.0, 0.0)) {
    coeffs_.erase(coeffs_.begin());
    ++min_power_;
  }
}

LaurentPoly LaurentPoly::constant(Complex c) { return LaurentPoly(0, {c}); }

LaurentPoly LaurentPoly::monomial(int k, Complex c) { return LaurentPoly(k, {c}); }

LaurentPoly LaurentPoly::analytic(std::vector<Complex> coeffs) {
  return LaurentPoly(0, std::move(coeffs));
}

Complex LaurentPoly::coeff(int k) const {
  if (k < min_power_ || k > max_power()) return Complex(0.0, 0.0);
  return coeffs_[static_cast<size_t>(k - min_power_)];
}

Complex LaurentPoly::operator()(Complex z) const {
  // Horner down to k = 0 (coeff() is zero below min_power_); the principal
  // part accumulates powers of 1/z.
  Complex pos(0.0, 0.0);
  if (max_power() >= 0) {
    for (int k = max_power(); k >= 0; --k) pos = pos * z + coeff(k);
  }
  if (min_power_ >= 0) return pos;
  Complex neg(0.0, 0.0);
  const Complex w = 1.0 / z;
  Complex wp = w;
  for (int k = -1; k >= min_power_; --k) {
    neg += coeff(k) * wp;
    wp *= w;
  }
  return pos + neg;
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& other) const {
  const int lo = std::min(min_power_, other.min_power_);
  const int hi = std::max(max_power(), other.max_power());
  std::vector<Complex> c(static_cast<size_t>(hi - lo + 1), Complex(0.0, 0.0));
  for (int k = lo; k <= hi; ++k) c[static_cast<size_t>(k - lo)] = coeff(k) + other.coeff(k);
  return LaurentPoly(lo, std::move(c));
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& other) const {
  const int lo = min_power_ + other.min_power_;
  const int hi = max_power() + other.max_power();
  std::vector<Complex> c(static_cast<size_t>(hi - lo + 1), Complex(0.0, 0.0));
  for (int a = min_power_; a <= max_power(); ++a)
    for (int b = other.min_power(); b <= other.max_power(); ++b)
      c[static_cast<size_t>(a + b - lo)] += coeff(a) * other.coeff(b);
  return LaurentPoly(lo, std::move(c));
}

Matrix poly_eval(const Matrix& t, const LaurentPoly& p, double tol_role) {
  require_square(t);
  const Eigen::Index n = t.rows();
  Matrix id = Matrix::Identity(n, n);
  Matrix pos = Matrix::Zero(n, n);
  if (p.max_power() >= 0) {
    for (int k = p.max_power(); k >= 0; --k) pos = pos * t + p.coeff(k) * id;
  }
  if (p.min_power() >= 0) return pos;
  const double defect_u = (t.adjoint() * t - id).norm();
  if (defect_u > tol_role) throw NegativePowersNeedUnitary();
  const Matrix tinv = t.adjoint();  // T^{-1} for unitary T
  Matrix neg = Matrix::Zero(n, n);
  Matrix power = tinv;
  for (int k = -1; k >= p.min_power(); --k) {
    if (p.coeff(k) != Complex(0.0, 0.0)) neg += p.coeff(k) * power;
    if (k > p.min_power()) power = power * tinv;
  }
  return pos + neg;
}

// -------------------------------- RationalFn -------------------------------

Complex RationalFn::operator()(Complex t) const {
  Complex acc(0.0, 0.0);
  for (const auto& term : terms) {
    Complex r = 1.0 / (t - term.pole);
    acc += term.coeff * (term.order == 1 ? r : r * r);
  }
  return acc;
}

Matrix rational_eval(const Matrix& l, const RationalFn& f) {
  require_square(l);
  const Eigen::Index n = l.rows();
  Matrix id = Matrix::Identity(n, n);
  Matrix acc = Matrix::Zero(n, n);
  for (const auto& term : f.terms) {
    if (term.order != 1 && term.order != 2)
      throw InvalidConfig("rational pole orders are restricted to 1 and 2");
    if (term.pole.imag() >= 0.0) throw PoleInClosedUpperHalfPlane(term.pole);
    Matrix shifted = l - term.pole * id;
    Eigen::PartialPivLU<Matrix> lu(shifted);
    Matrix res = lu.solve(id);
    if (!((shifted * res - id).norm() <= 1e-8 * std::max(1.0, shifted.norm())))
      throw SingularResolvent(term.pole);
    acc += term.coeff * (term.order == 1 ? res : Matrix(res * res));
  }
  return acc;
}

HermitianSplit hermitian_split(const Matrix& m) {
  require_square(m);
  HermitianSplit s;
  s.re = 0.5 * (m + m.adjoint());
  s.im = (m - m.adjoint()) / Complex(0.0, 2.0);
  return s;
}

}  // namespace shiftlab
