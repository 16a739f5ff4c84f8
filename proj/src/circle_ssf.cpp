#include "shiftlab/circle_ssf.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "shiftlab/dilation.hpp"

namespace shiftlab {

StepFunctionCircle unitary_ssf(const Matrix& u0, const Matrix& u1, Normalization mode,
                               double tol_role) {
  if (u0.rows() != u1.rows()) throw DimensionMismatch(u0.rows(), u1.rows());
  PhaseList p0 = make_phase_list(unitary_eigenphases(u0, tol_role), "u0");
  PhaseList p1 = make_phase_list(unitary_eigenphases(u1, tol_role), "u1");
  return unitary_ssf(p0, p1, mode);
}

StepFunctionCircle unitary_ssf(const PhaseList& phases0, const PhaseList& phases1,
                               Normalization mode, double merge_tol) {
  if (phases0.phases.size() != phases1.phases.size())
    throw DimensionMismatch(static_cast<Eigen::Index>(phases0.phases.size()),
                            static_cast<Eigen::Index>(phases1.phases.size()));
  return step_from_phases(phases0, phases1, mode, merge_tol);
}

SampledCircleFunction determinant_ssf(const Matrix& t0, const Matrix& t1, int grid_size,
                                      double strictness_margin) {
  if (t0.rows() != t1.rows()) throw DimensionMismatch(t0.rows(), t1.rows());
  const double smax = sigma_max(t0);
  if (smax > 1.0 - strictness_margin) throw NotStrictContraction(smax, 1.0 - strictness_margin);
  const Eigen::Index n = t0.rows();
  const Matrix id = Matrix::Identity(n, n);

  int grid = std::max(grid_size, 16);
  constexpr int kMaxGrid = 1 << 16;
  while (true) {
    std::vector<Complex> dets(static_cast<size_t>(grid));
    for (int j = 0; j < grid; ++j) {
      const Complex z = std::polar(1.0, kTwoPi * j / grid);
      const Complex d1 = Eigen::PartialPivLU<Matrix>(t1 - z * id).determinant();
      const Complex d0 = Eigen::PartialPivLU<Matrix>(t0 - z * id).determinant();
      if (std::abs(d1) < 1e-12 || std::abs(d0) < 1e-12)
        throw DeterminantVanishes(kTwoPi * j / grid);
      dets[static_cast<size_t>(j)] = d1 / d0;
    }
    bool ok = true;
    std::vector<Complex> logs(static_cast<size_t>(grid));
    double phase = std::arg(dets[0]);
    logs[0] = Complex(std::log(std::abs(dets[0])), phase);
    for (int j = 1; j < grid && ok; ++j) {
      const double step = std::arg(dets[static_cast<size_t>(j)] / dets[static_cast<size_t>(j - 1)]);
      if (std::abs(step) >= kPi / 2.0) {
        ok = false;
        break;
      }
      phase += step;
      logs[static_cast<size_t>(j)] = Complex(std::log(std::abs(dets[static_cast<size_t>(j)])), phase);
    }
    if (ok) {
      // Closing step back to theta = 0 must also be tame.
      const double close = std::arg(dets[0] / dets[static_cast<size_t>(grid - 1)]);
      if (std::abs(close) >= kPi / 2.0) ok = false;
    }
    if (ok) {
      SampledCircleFunction out;
      out.grid = grid;
      out.values.resize(static_cast<size_t>(grid));
      for (int j = 0; j < grid; ++j)
        out.values[static_cast<size_t>(j)] = -logs[static_cast<size_t>(j)] / Complex(0.0, kTwoPi);
      return out;
    }
    if (grid >= kMaxGrid) throw UnwrapAmbiguous();
    grid *= 2;
  }
}

FourierCoeffs fourier_sampled(const SampledCircleFunction& f, int max_mode) {
  if (f.grid < 4 * max_mode) throw GridTooCoarse(f.grid, max_mode);
  FourierCoeffs fc;
  fc.max_mode = max_mode;
  fc.c.assign(static_cast<size_t>(2 * max_mode + 1), Complex(0.0, 0.0));
  // Direct sums; grid sizes here are a few thousand at most.
  for (int k = -max_mode; k <= max_mode; ++k) {
    Complex acc(0.0, 0.0);
    for (int j = 0; j < f.grid; ++j)
      acc += f.values[static_cast<size_t>(j)] * std::polar(1.0, -kTwoPi * k * j / f.grid);
    fc.at(k) = acc / static_cast<double>(f.grid);
  }
  return fc;
}

double hardy_deficit(const FourierCoeffs& a, const FourierCoeffs& b) {
  if (a.max_mode != b.max_mode)
    throw DimensionMismatch(a.max_mode, b.max_mode);
  double worst = 0.0;
  for (int k = -a.max_mode; k <= -1; ++k) worst = std::max(worst, std::abs(a.at(k) - b.at(k)));
  return worst;
}

double hardy_deficit(const StepFunctionCircle& a, const SampledCircleFunction& b, int max_mode) {
  return hardy_deficit(fourier_step(a, max_mode), fourier_sampled(b, max_mode));
}

ZygmundReport zygmund_and_conjugate(const StepFunctionCircle& f, int max_mode, int grid) {
  ZygmundReport r;
  r.zygmund_value = zygmund_value(f);
  if (grid <= 0) grid = 4 * max_mode;
  if (grid < 4 * max_mode) throw GridTooCoarse(grid, max_mode);
  FourierCoeffs fc = fourier_step(f, max_mode);
  r.conjugate.grid = grid;
  r.conjugate.values.assign(static_cast<size_t>(grid), Complex(0.0, 0.0));
  for (int j = 0; j < grid; ++j) {
    Complex acc(0.0, 0.0);
    for (int k = -max_mode; k <= max_mode; ++k) {
      if (k == 0) continue;
      const Complex mult(0.0, k > 0 ? -1.0 : 1.0);  // -i sgn(k)
      acc += mult * fc.at(k) * std::polar(1.0, kTwoPi * k * j / grid);
    }
    r.conjugate.values[static_cast<size_t>(j)] = acc;
  }
  return r;
}

}  // namespace shiftlab
