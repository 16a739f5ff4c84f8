#include "shiftlab/dilation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace shiftlab {

JuliaBlock julia_block(const Matrix& t, double tol_role) {
  const double smax = sigma_max(t);
  if (smax > 1.0 + tol_role) throw NotAContraction(smax);
  const Eigen::Index n = t.rows();
  DefectPair dp = defect(t, tol_role);
  JuliaBlock j;
  j.t = t;
  j.block.resize(2 * n, 2 * n);
  j.block.topLeftCorner(n, n) = dp.d;
  j.block.topRightCorner(n, n) = -t.adjoint();
  j.block.bottomLeftCorner(n, n) = t;
  j.block.bottomRightCorner(n, n) = dp.d_star;
  j.unitary_defect = (j.block.adjoint() * j.block - Matrix::Identity(2 * n, 2 * n)).norm();
  return j;
}

PeriodicDilation build_periodic(const Matrix& t, int period, double tol_role) {
  if (period < 3) throw PeriodTooSmall(period);
  const double smax = sigma_max(t);
  if (smax > 1.0 + tol_role) throw NotAContraction(smax);
  PeriodicDilation d;
  d.base = t;
  DefectPair dp = defect(t, tol_role);
  d.d = std::move(dp.d);
  d.d_star = std::move(dp.d_star);
  d.period = period;
  return d;
}

Matrix PeriodicDilation::dense() const {
  const Eigen::Index n = base_dim();
  const int N = period;
  Matrix u = Matrix::Zero(n * N, n * N);
  u.block(0, 0, n, n) = base;
  u.block(0, n, n, n) = d_star;
  u.block(static_cast<Eigen::Index>(N - 1) * n, 0, n, n) = d;
  u.block(static_cast<Eigen::Index>(N - 1) * n, n, n, n) = -base.adjoint();
  for (int r = 1; r <= N - 2; ++r)
    u.block(static_cast<Eigen::Index>(r) * n, static_cast<Eigen::Index>(r + 1) * n, n, n) =
        Matrix::Identity(n, n);
  return u;
}

namespace {

// One block-sparse right-multiplication step P <- P * U. P is stored as N
// block columns of size (Nn x n); U touches only block columns 0 and 1
// nontrivially, every other column is a copy.
void multiply_by_dilation(std::vector<Matrix>& cols, const PeriodicDilation& d) {
  const int N = d.period;
  Matrix new0 = cols[0] * d.base + cols[static_cast<size_t>(N - 1)] * d.d;
  Matrix new1 = cols[0] * d.d_star - cols[static_cast<size_t>(N - 1)] * d.base.adjoint();
  // Column c >= 2 of the product is column c-1 of P.
  for (int c = N - 1; c >= 3; --c)
    cols[static_cast<size_t>(c)] = std::move(cols[static_cast<size_t>(c - 1)]);
  cols[2] = std::move(cols[1]);
  cols[0] = std::move(new0);
  cols[1] = std::move(new1);
}

std::vector<Matrix> identity_block_columns(const PeriodicDilation& d) {
  const Eigen::Index n = d.base_dim();
  const int N = d.period;
  std::vector<Matrix> cols(static_cast<size_t>(N));
  for (int c = 0; c < N; ++c) {
    cols[static_cast<size_t>(c)] = Matrix::Zero(n * N, n);
    cols[static_cast<size_t>(c)].block(static_cast<Eigen::Index>(c) * n, 0, n, n) =
        Matrix::Identity(n, n);
  }
  return cols;
}

Complex block_columns_trace(const std::vector<Matrix>& cols, Eigen::Index n) {
  Complex tr(0.0, 0.0);
  for (size_t c = 0; c < cols.size(); ++c)
    tr += cols[c].block(static_cast<Eigen::Index>(c) * n, 0, n, n).trace();
  return tr;
}

}  // namespace

CompressedPower compress_power(const PeriodicDilation& d, int k) {
  if (k < 0) throw InvalidConfig("compress_power needs k >= 0");
  const Eigen::Index n = d.base_dim();
  CompressedPower out;
  out.k = k;
  out.within_dilation_range = k <= d.period - 2;
  std::vector<Matrix> cols = identity_block_columns(d);
  Matrix tk = Matrix::Identity(n, n);
  for (int step = 0; step < k; ++step) {
    multiply_by_dilation(cols, d);
    tk = tk * d.base;
  }
  out.block = cols[0].topRows(n);
  out.deviation_from_base_power = (out.block - tk).norm();
  return out;
}

std::vector<Complex> dilation_power_traces(const PeriodicDilation& d, int kmax) {
  std::vector<Complex> traces;
  traces.reserve(static_cast<size_t>(std::max(kmax, 0)));
  std::vector<Matrix> cols = identity_block_columns(d);
  for (int k = 1; k <= kmax; ++k) {
    multiply_by_dilation(cols, d);
    traces.push_back(block_columns_trace(cols, d.base_dim()));
  }
  return traces;
}

PowerSweep power_sweep(const PeriodicDilation& d, int kmax) {
  const Eigen::Index n = d.base_dim();
  PowerSweep out;
  out.compression_deviation.reserve(static_cast<size_t>(kmax) + 1);
  std::vector<Matrix> cols = identity_block_columns(d);
  Matrix tk = Matrix::Identity(n, n);
  out.compression_deviation.push_back((cols[0].topRows(n) - tk).norm());
  for (int k = 1; k <= kmax; ++k) {
    multiply_by_dilation(cols, d);
    tk = tk * d.base;
    out.compression_deviation.push_back((cols[0].topRows(n) - tk).norm());
    out.dilation_traces.push_back(block_columns_trace(cols, n));
    out.base_traces.push_back(tk.trace());
  }
  return out;
}

DilationPair dilation_pair(const Matrix& t0, const Matrix& t1, int period, double tol_role) {
  if (t0.rows() != t1.rows() || t0.cols() != t1.cols())
    throw DimensionMismatch(t0.rows(), t1.rows());
  DilationPair p;
  p.first = build_periodic(t0, period, tol_role);
  p.second = build_periodic(t1, period, tol_role);
  const Eigen::Index n = t0.rows();
  p.rank_bound = static_cast<int>(2 * n);
  // The difference lives in block rows {0, N-1}; measure it there directly.
  Matrix diff(2 * n, static_cast<Eigen::Index>(2) * n);
  diff.block(0, 0, n, n) = t1 - t0;
  diff.block(0, n, n, n) = p.second.d_star - p.first.d_star;
  diff.block(n, 0, n, n) = p.second.d - p.first.d;
  diff.block(n, n, n, n) = -(t1 - t0).adjoint();
  RealVector s = singular_values(diff);
  p.s1_difference = s.sum();
  const double cutoff = std::max(1e-12, 1e-12 * (s.size() ? s(0) : 0.0));
  p.observed_rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) ++p.observed_rank;
  return p;
}

// ---------------------------------------------------------------------------
// Eigenphases.
// ---------------------------------------------------------------------------

std::vector<double> unitary_eigenphases(const Matrix& u, double tol_role) {
  const Eigen::Index n = u.rows();
  const double defect_u = (u.adjoint() * u - Matrix::Identity(n, n)).norm();
  if (defect_u > tol_role) throw NotUnitary(defect_u);
  Eigen::ComplexSchur<Matrix> schur(u, /*computeU=*/false);
  if (schur.info() != Eigen::Success) throw EigSolverFailed("complex Schur did not converge");
  std::vector<double> phases;
  phases.reserve(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex lam = schur.matrixT()(i, i);
    if (std::abs(std::abs(lam) - 1.0) > 1e-8)
      throw EigSolverFailed("eigenvalue off the unit circle by more than 1e-8");
    double th = std::arg(lam);
    if (th < 0.0) th += kTwoPi;
    if (th >= kTwoPi) th -= kTwoPi;
    phases.push_back(th);
  }
  std::sort(phases.begin(), phases.end());
  return phases;
}

namespace {

// Evaluator for the phase-stripped transfer determinant
//   s(theta) = det M(e^{i theta}) * e^{-i N n theta / 2},
// which is a fixed unimodular constant times a real-valued function of theta
// whose zeros are exactly the dilation eigenphases.
class TransferDeterminant {
 public:
  explicit TransferDeterminant(const PeriodicDilation& d)
      : t_(d.base), dstar_(d.d_star), dd_(d.d), n_(d.base_dim()), period_(d.period) {}

  Complex stripped(double theta) const {
    const Complex z = std::polar(1.0, theta);
    Matrix m(2 * n_, 2 * n_);
    m.topLeftCorner(n_, n_) = t_;
    m.topLeftCorner(n_, n_).diagonal().array() -= z;
    m.topRightCorner(n_, n_) = dstar_;
    m.bottomLeftCorner(n_, n_) = dd_;
    Complex zpow = std::polar(1.0, theta * static_cast<double>(period_ - 1));
    m.bottomRightCorner(n_, n_) = -t_.adjoint();
    m.bottomRightCorner(n_, n_).diagonal().array() -= zpow;
    const Complex det = Eigen::PartialPivLU<Matrix>(m).determinant();
    const double total = static_cast<double>(period_) * static_cast<double>(n_);
    return det * std::polar(1.0, -0.5 * total * theta);
  }

 private:
  const Matrix& t_;
  const Matrix& dstar_;
  const Matrix& dd_;
  Eigen::Index n_;
  int period_;
};

// Scalar version: phases of the dilation of a 1x1 contraction t solve
// z^N - t z^{N-1} + conj(t) z - 1 = 0.
class ScalarTransferDeterminant {
 public:
  ScalarTransferDeterminant(Complex t, int period) : t_(t), period_(period) {}

  Complex stripped(double theta) const {
    const Complex z = std::polar(1.0, theta);
    const Complex zN1 = std::polar(1.0, theta * static_cast<double>(period_ - 1));
    const Complex det = zN1 * (z - t_) + std::conj(t_) * z - 1.0;
    return det * std::polar(1.0, -0.5 * static_cast<double>(period_) * theta);
  }

 private:
  Complex t_;
  int period_;
};

// Brent-style root polish of a real function on a sign-change bracket.
template <typename F>
double brent_root(const F& f, double a, double b, double fa, double fb) {
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < 120; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 1e-15;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
      d = m; e = m;
    } else {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d; d = p / q;
      } else {
        d = m; e = m;
      }
    }
    a = b; fa = fb;
    b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
    if ((fb > 0.0) == (fc > 0.0)) { c = a; fc = fa; }
  }
  return b;
}

// Find every sign change of fr on [a, b] given the endpoint values, zooming
// recursively around the interior minimum of |fr| when none is visible. The
// channels of a dilation do not repel each other, so near-coincident root
// pairs inside one grid cell are routine, not exceptional. Appends the roots
// found (an even count when fa, fb share a sign).
template <typename F>
void zoom_cell(const F& fr, double a, double b, double fa, double fb, int depth,
               std::vector<double>& roots) {
  constexpr int kSub = 48;
  if (b - a < 1e-13 || depth <= 0) {
    // Unresolvable at double precision: a cell that bottoms out at a
    // numerically vanishing value holds a coincident pair.
    const double mid = 0.5 * (a + b);
    const double scale = std::max({std::abs(fa), std::abs(fb), 1e-300});
    if ((fa > 0.0) == (fb > 0.0) && std::abs(fr(mid)) <= 1e-9 * scale) {
      roots.push_back(mid);
      roots.push_back(mid);
    }
    return;
  }
  double t[kSub + 1], f[kSub + 1];
  t[0] = a;
  f[0] = fa;
  t[kSub] = b;
  f[kSub] = fb;
  for (int s = 1; s < kSub; ++s) {
    t[s] = a + (b - a) * s / kSub;
    f[s] = fr(t[s]);
  }
  bool found = false;
  for (int s = 0; s < kSub; ++s) {
    if (f[s] == 0.0) {
      roots.push_back(t[s]);
      found = true;
    } else if ((f[s] > 0.0) != (f[s + 1] > 0.0)) {
      roots.push_back(brent_root(fr, t[s], t[s + 1], f[s], f[s + 1]));
      found = true;
    }
  }
  if (found) return;
  int m = 1;
  for (int s = 2; s < kSub; ++s)
    if (std::abs(f[s]) < std::abs(f[m])) m = s;
  zoom_cell(fr, t[m - 1], t[m + 1], f[m - 1], f[m + 1], depth - 1, roots);
}

// Root scan of the stripped determinant over [0, 2pi) with total-count
// validation: a coarse pass catches the generic roots, then the cells with
// the smallest endpoint magnitudes are zoomed until the count closes.
// Returns nullopt when the count cannot be closed.
template <typename Det>
std::optional<std::vector<double>> scan_roots(const Det& det, Eigen::Index expected) {
  const Eigen::Index grid = std::max<Eigen::Index>(64, 6 * expected);
  std::vector<Complex> vals(static_cast<size_t>(grid));
  double best = -1.0;
  size_t best_at = 0;
  for (Eigen::Index g = 0; g < grid; ++g) {
    vals[static_cast<size_t>(g)] =
        det.stripped(kTwoPi * static_cast<double>(g) / static_cast<double>(grid));
    const double a = std::abs(vals[static_cast<size_t>(g)]);
    if (a > best) {
      best = a;
      best_at = static_cast<size_t>(g);
    }
  }
  if (best <= 0.0) return std::nullopt;
  const Complex ref = vals[best_at] / std::abs(vals[best_at]);
  // Validate that stripping really produced a constant-phase function.
  double max_im = 0.0, max_re = 0.0;
  std::vector<double> r(static_cast<size_t>(grid));
  for (Eigen::Index g = 0; g < grid; ++g) {
    const Complex q = vals[static_cast<size_t>(g)] / ref;
    r[static_cast<size_t>(g)] = q.real();
    max_im = std::max(max_im, std::abs(q.imag()));
    max_re = std::max(max_re, std::abs(q.real()));
  }
  if (max_im > 1e-6 * std::max(max_re, 1e-300)) return std::nullopt;
  auto fr = [&](double theta) { return (det.stripped(theta) / ref).real(); };
  auto cell_a = [&](Eigen::Index g) { return kTwoPi * static_cast<double>(g) / static_cast<double>(grid); };

  std::vector<double> roots;
  roots.reserve(static_cast<size_t>(expected));
  std::vector<Eigen::Index> quiet;  // cells without a visible sign change
  for (Eigen::Index g = 0; g < grid; ++g) {
    const double fa = r[static_cast<size_t>(g)];
    const double fb = r[static_cast<size_t>((g + 1) % grid)];
    if (fa == 0.0) {
      roots.push_back(cell_a(g));
    } else if ((fa > 0.0) != (fb > 0.0)) {
      roots.push_back(brent_root(fr, cell_a(g), cell_a(g + 1), fa, fb));
    } else {
      quiet.push_back(g);
    }
  }
  if (static_cast<Eigen::Index>(roots.size()) < expected) {
    // Rank quiet cells by endpoint magnitude and zoom the most suspicious
    // ones until the count closes.
    std::sort(quiet.begin(), quiet.end(), [&](Eigen::Index a, Eigen::Index b) {
      const double ma = std::min(std::abs(r[static_cast<size_t>(a)]),
                                 std::abs(r[static_cast<size_t>((a + 1) % grid)]));
      const double mb = std::min(std::abs(r[static_cast<size_t>(b)]),
                                 std::abs(r[static_cast<size_t>((b + 1) % grid)]));
      return ma < mb;
    });
    const size_t cap = std::min(quiet.size(),
                                static_cast<size_t>(16 + 8 * (expected - static_cast<Eigen::Index>(roots.size()))));
    for (size_t qi = 0; qi < cap && static_cast<Eigen::Index>(roots.size()) < expected; ++qi) {
      const Eigen::Index g = quiet[qi];
      zoom_cell(fr, cell_a(g), cell_a(g + 1), r[static_cast<size_t>(g)],
                r[static_cast<size_t>((g + 1) % grid)], 6, roots);
    }
  }
  if (static_cast<Eigen::Index>(roots.size()) != expected) return std::nullopt;
  for (double& th : roots) {
    if (th >= kTwoPi) th -= kTwoPi;
    if (th < 0.0) th += kTwoPi;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

bool strictly_diagonal(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
  return true;
}

}  // namespace

std::vector<double> dilation_eigenphases(const PeriodicDilation& d, bool force_dense) {
  const Eigen::Index n = d.base_dim();
  const Eigen::Index total = d.dim();
  if (!force_dense) {
    if (strictly_diagonal(d.base)) {
      // The dilation of a diagonal contraction is a direct sum of scalar
      // dilations; solving per entry also handles repeated entries exactly.
      std::vector<double> all;
      all.reserve(static_cast<size_t>(total));
      for (Eigen::Index i = 0; i < n; ++i) {
        ScalarTransferDeterminant det(d.base(i, i), d.period);
        auto roots = scan_roots(det, d.period);
        if (!roots) { all.clear(); break; }
        all.insert(all.end(), roots->begin(), roots->end());
      }
      if (static_cast<Eigen::Index>(all.size()) == total) {
        std::sort(all.begin(), all.end());
        return all;
      }
    } else {
      TransferDeterminant det(d);
      auto roots = scan_roots(det, total);
      if (roots) return *roots;
    }
  }
  if (total > 2048 && !force_dense)
    throw EigSolverFailed("transfer-determinant root scan miscounted on a large dilation");
  return unitary_eigenphases(d.dense(), 1e-8);
}

}  // namespace shiftlab
