#ifndef SHIFTLAB_CORE_HPP
#define SHIFTLAB_CORE_HPP

#include <optional>
#include <vector>

#include "shiftlab/types.hpp"

namespace shiftlab {

/// Role flags plus the measured quantities they were decided on.
struct RoleReport {
  double sigma_max = 0.0;       // largest singular value
  double unitary_defect = 0.0;  // ||M*M - I||_F
  double min_imag_eig = 0.0;    // smallest eigenvalue of (M - M*)/(2i)
  bool contraction = false;
  bool strict_contraction = false;
  bool unitary = false;
  bool dissipative = false;
};

RoleReport classify(const Matrix& m, double tol_role = kDefaultRoleTol);

/// Singular values, descending. Hard failure if the SVD does not converge.
RealVector singular_values(const Matrix& m);

/// Eigenvalues of a Hermitian matrix, ascending, with the input symmetrized.
RealVector hermitian_eigenvalues(const Matrix& m);

double sigma_max(const Matrix& m);

/// Unique PSD square root of a Hermitian PSD matrix. Eigenvalues in
/// [-tol_psd, 0) are clamped to zero; anything more negative throws.
Matrix psd_sqrt(const Matrix& m, double tol_psd = kDefaultPsdTol);

/// Hermitian f(M) = Q f(diag) Q*. Used for inverse powers in the hypothesis
/// checks; eigenvalues below `floor_tol` make the result unavailable.
std::optional<Matrix> hermitian_power(const Matrix& m, double exponent, double floor_tol);

/// Defect pair (D_T, D_T*) of a contraction.
struct DefectPair {
  Matrix d;       // (I - T*T)^{1/2}
  Matrix d_star;  // (I - TT*)^{1/2}
};
DefectPair defect(const Matrix& t, double tol_role = kDefaultRoleTol,
                  double tol_psd = kDefaultPsdTol);

/// Schatten p-norm (sum s_k^p)^{1/p}, p > 0.
double schatten_norm(const Matrix& m, double p);

/// Sum s_k log(1 + 1/s_k) over a singular spectrum, with 0*log(1+inf) := 0.
double an_functional(const RealVector& s);

// ---------------------------------------------------------------------------
// Laurent polynomials sum_{k=min..max} c_k z^k. Negative powers are legal on
// the unit circle and, for matrices, on unitary arguments only.
// ---------------------------------------------------------------------------
class LaurentPoly {
 public:
  LaurentPoly() : min_power_(0), coeffs_{Complex(0.0, 0.0)} {}
  LaurentPoly(int min_power, std::vector<Complex> coeffs);

  static LaurentPoly constant(Complex c);
  static LaurentPoly monomial(int k, Complex c = Complex(1.0, 0.0));
  /// Analytic polynomial c0 + c1 z + ... from low-to-high coefficients.
  static LaurentPoly analytic(std::vector<Complex> coeffs);

  int min_power() const { return min_power_; }
  int max_power() const { return min_power_ + static_cast<int>(coeffs_.size()) - 1; }
  Complex coeff(int k) const;
  bool is_analytic() const { return min_power_ >= 0; }

  Complex operator()(Complex z) const;

  LaurentPoly operator+(const LaurentPoly& other) const;
  LaurentPoly operator*(const LaurentPoly& other) const;

 private:
  int min_power_;
  std::vector<Complex> coeffs_;  // coeffs_[i] is the coefficient of z^(min_power_ + i)
};

/// Sz.-Nagy–Foias calculus restricted to polynomials: Horner for the analytic
/// part; negative powers use T*=T^{-1} and require a unitary argument.
Matrix poly_eval(const Matrix& t, const LaurentPoly& p, double tol_role = kDefaultRoleTol);

// ---------------------------------------------------------------------------
// Proper rational functions sum_k c_k (z - pole_k)^{-order_k} with poles in
// the open lower half-plane and orders 1 or 2.
// ---------------------------------------------------------------------------
struct RationalTerm {
  Complex pole;
  int order = 1;  // 1 or 2
  Complex coeff = Complex(1.0, 0.0);
};

struct RationalFn {
  std::vector<RationalTerm> terms;
  std::string label;

  Complex operator()(Complex t) const;
};

/// Sum c_k (L - pole_k I)^{-order_k}; the solves are validated and a failed
/// one reports the offending pole.
Matrix rational_eval(const Matrix& l, const RationalFn& f);

/// Frobenius-measured Hermitian split M = re + i*im.
struct HermitianSplit {
  Matrix re;
  Matrix im;
};
HermitianSplit hermitian_split(const Matrix& m);

}  // namespace shiftlab

#endif
