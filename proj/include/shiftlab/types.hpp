#ifndef SHIFTLAB_TYPES_HPP
#define SHIFTLAB_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace shiftlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.1415926535897932384626433832795;

// Default validation knobs. Every entry point that cares accepts an override.
inline constexpr double kDefaultRoleTol = 1e-10;
inline constexpr double kDefaultPsdTol = 1e-12;
inline constexpr double kDefaultKernelTol = 1e-8;

/// Dense square complex matrix together with a free-text label that travels
/// into reports and exported files.
struct Operator {
  Matrix mat;
  std::string label;

  Operator() = default;
  Operator(Matrix m, std::string lab = {}) : mat(std::move(m)), label(std::move(lab)) {}

  Eigen::Index dim() const { return mat.rows(); }
  bool square() const { return mat.rows() == mat.cols(); }
};

// ---------------------------------------------------------------------------
// Error taxonomy. Everything derives from Error so callers can catch broadly;
// the CLI maps these onto exit codes.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotAContraction : Error {
  explicit NotAContraction(double sigma_max)
      : Error("operator is not a contraction: sigma_max = " + std::to_string(sigma_max)),
        sigma_max(sigma_max) {}
  double sigma_max;
};

struct NotUnitary : Error {
  explicit NotUnitary(double defect)
      : Error("operator is not unitary: ||U*U - I||_F = " + std::to_string(defect)),
        defect(defect) {}
  double defect;
};

struct NotDissipative : Error {
  explicit NotDissipative(double lambda_min)
      : Error("operator is not dissipative: lambda_min(Im) = " + std::to_string(lambda_min)),
        lambda_min(lambda_min) {}
  double lambda_min;
};

struct DimensionMismatch : Error {
  DimensionMismatch(Eigen::Index a, Eigen::Index b)
      : Error("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

struct NotPsdWithinTolerance : Error {
  explicit NotPsdWithinTolerance(double lambda_min)
      : Error("matrix has eigenvalue " + std::to_string(lambda_min) +
              " below the PSD clamp tolerance") {}
};

struct NegativePowersNeedUnitary : Error {
  NegativePowersNeedUnitary()
      : Error("Laurent polynomial with negative powers requires a unitary argument") {}
};

struct PoleInClosedUpperHalfPlane : Error {
  explicit PoleInClosedUpperHalfPlane(Complex pole)
      : Error("rational pole " + std::to_string(pole.real()) + "+" +
              std::to_string(pole.imag()) + "i is not in the open lower half-plane") {}
};

struct SingularResolvent : Error {
  explicit SingularResolvent(Complex pole)
      : Error("resolvent solve failed at pole " + std::to_string(pole.real()) + "+" +
              std::to_string(pole.imag()) + "i") {}
};

struct InvalidConfig : Error {
  using Error::Error;
};

struct PeriodTooSmall : Error {
  explicit PeriodTooSmall(int n) : Error("dilation period must be >= 3, got " + std::to_string(n)) {}
};

struct NotStrictContraction : Error {
  explicit NotStrictContraction(double sigma_max, double bound)
      : Error("need sigma_max <= " + std::to_string(bound) + ", got " + std::to_string(sigma_max)) {}
};

struct DeterminantVanishes : Error {
  explicit DeterminantVanishes(double theta)
      : Error("perturbation determinant vanishes near theta = " + std::to_string(theta)) {}
};

struct UnwrapAmbiguous : Error {
  UnwrapAmbiguous() : Error("log-determinant phase step exceeded pi/2 at the finest grid") {}
};

struct GridTooCoarse : Error {
  GridTooCoarse(int grid, int modes)
      : Error("grid of " + std::to_string(grid) + " points cannot resolve " +
              std::to_string(modes) + " Fourier modes (need >= 4x)") {}
};

struct NegativeValues : Error {
  NegativeValues() : Error("Zygmund integral needs a nonnegative step function") {}
};

struct BadAlpha : Error {
  explicit BadAlpha(double a)
      : Error("alpha must lie in (1/2, 1], got " + std::to_string(a)) {}
};

struct HypothesisFailed : Error {
  using Error::Error;
};

struct Condition31Failed : Error {
  using Error::Error;
};

struct XNotPositiveContraction : Error {
  using Error::Error;
};

struct NotInUnitInterval : Error {
  using Error::Error;
};

struct KernelNotTrivial : Error {
  explicit KernelNotTrivial(double sigma_min)
      : Error("kernel condition failed: smallest eigenvalue " + std::to_string(sigma_min)) {}
};

struct SingularShift : Error {
  SingularShift() : Error("L + iI solve failed; dissipativity violated beyond tolerance") {}
};

struct EigSolverFailed : Error {
  using Error::Error;
};

struct SchemaError : Error {
  using Error::Error;
};

}  // namespace shiftlab

#endif
