#ifndef SHIFTLAB_DILATION_HPP
#define SHIFTLAB_DILATION_HPP

#include <vector>

#include "shiftlab/core.hpp"
#include "shiftlab/types.hpp"

namespace shiftlab {

/// The 2n x 2n unitary [[D_T, -T*], [T, D_T*]] built from a contraction.
struct JuliaBlock {
  Matrix t;
  Matrix block;          // [[D_T, -T*], [T, D_T*]]
  double unitary_defect; // ||J*J - I||_F, checked at construction
};

JuliaBlock julia_block(const Matrix& t, double tol_role = kDefaultRoleTol);

/// Finite periodic unitary dilation of a contraction on the cyclic lattice
/// Z/NZ. Block row 0 holds (T, D_T*), block row N-1 holds (D_T, -T*), block
/// rows 1..N-2 hold the identity one step to the right; lattice index j sits
/// in slot j mod N.
struct PeriodicDilation {
  Matrix base;     // the contraction T (n x n)
  Matrix d;        // D_T
  Matrix d_star;   // D_T*
  int period = 0;  // N

  Eigen::Index base_dim() const { return base.rows(); }
  Eigen::Index dim() const { return base.rows() * period; }

  /// Dense N*n x N*n matrix, assembled on demand.
  Matrix dense() const;

  static int slot(int lattice_index, int period) {
    int s = lattice_index % period;
    return s < 0 ? s + period : s;
  }
};

PeriodicDilation build_periodic(const Matrix& t, int period, double tol_role = kDefaultRoleTol);

/// (0,0) block of U^k together with its distance from T^k. Exact agreement is
/// guaranteed for 0 <= k <= N-2; beyond that the cyclic wraparound
/// contaminates the block and the deviation is reported, not hidden.
struct CompressedPower {
  Matrix block;
  int k = 0;
  double deviation_from_base_power = 0.0;
  bool within_dilation_range = false;  // k <= N-2
};

CompressedPower compress_power(const PeriodicDilation& d, int k);

/// trace(U^k) for k = 1..kmax in one sweep (block-sparse power iteration).
std::vector<Complex> dilation_power_traces(const PeriodicDilation& d, int kmax);

/// One incremental pass over U^k for k = 0..kmax collecting the compression
/// deviations ||(U^k)_{00} - T^k||_F and both trace sequences.
struct PowerSweep {
  std::vector<double> compression_deviation;  // index k = 0..kmax
  std::vector<Complex> dilation_traces;       // index k-1, k = 1..kmax
  std::vector<Complex> base_traces;           // index k-1, k = 1..kmax
};
PowerSweep power_sweep(const PeriodicDilation& d, int kmax);

/// Two dilations with identical layout plus the rank/Schatten data of their
/// difference. U1 - U0 is supported in block rows {0, N-1}, so rank <= 2n.
struct DilationPair {
  PeriodicDilation first;
  PeriodicDilation second;
  int rank_bound = 0;      // 2n
  int observed_rank = 0;   // from the singular values of U1 - U0
  double s1_difference = 0.0;
};

DilationPair dilation_pair(const Matrix& t0, const Matrix& t1, int period,
                           double tol_role = kDefaultRoleTol);

/// All N*n eigenphases of the dilation, sorted ascending in [0, 2pi).
///
/// The default path roots the phase-stripped transfer determinant
/// det [[T - z, D_T*], [D_T, -T* - z^{N-1}]] on the unit circle (the dilation
/// spectrum equals its zero set), which costs O(N n^4) instead of a dense
/// O((Nn)^3) Schur sweep. The root count is validated against N*n exactly;
/// on a miscount the grid is refined, and as a last resort (or on request)
/// the dense Schur route is used. Exactly block-diagonal bases are solved
/// per block.
std::vector<double> dilation_eigenphases(const PeriodicDilation& d, bool force_dense = false);

/// Eigenphases of a general unitary matrix via dense Schur, in [0, 2pi).
std::vector<double> unitary_eigenphases(const Matrix& u, double tol_role = kDefaultRoleTol);

}  // namespace shiftlab

#endif
