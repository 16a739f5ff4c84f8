#ifndef SHIFTLAB_RNG_HPP
#define SHIFTLAB_RNG_HPP

#include <cstdint>
#include <random>
#include <utility>

#include "shiftlab/types.hpp"

namespace shiftlab {

/// Deterministic per-stream generator. Each (master seed, stream id) pair is
/// an independent stream, so batch order and parallelism cannot change what a
/// given stream produces. Gaussians come from an explicit Box-Muller over the
/// raw 64-bit output: std::normal_distribution sequences are
/// implementation-defined and would break the byte-identical report contract
/// across standard libraries.
class StreamRng {
 public:
  StreamRng(std::uint64_t master_seed, std::uint64_t stream_id);

  double uniform();   // [0, 1)
  double gaussian();  // standard normal
  Complex complex_gaussian();  // (g1 + i g2)/sqrt(2), unit variance

  Matrix gaussian_matrix(Eigen::Index n);            // iid complex Gaussian entries
  Matrix gaussian_matrix(Eigen::Index r, Eigen::Index c);
  Matrix hermitian_gaussian(Eigen::Index n);         // (G + G*)/2
  Matrix haar_unitary(Eigen::Index n);               // QR with positive-diagonal R
  Matrix rank_r_gaussian(Eigen::Index n, int rank);  // P Q* with n x r factors, unit spectral norm
  Matrix rank_r_hermitian(Eigen::Index n, int rank); // rank-r Hermitian, unit spectral norm
  Matrix rank_r_psd(Eigen::Index n, int rank);       // rank-r PSD, unit spectral norm

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct EnsembleConfig {
  Eigen::Index dim = 0;
  std::string kind;  // strict-contraction | contraction | unitary | dissipative | positive-contraction
  double margin = 0.1;  // delta in (0,1)
  std::uint64_t seed = 0;
  int perturbation_rank = 1;
  double perturbation_size = 0.0;
};

/// One operator of the configured kind, fully determined by (seed).
Operator random_operator(const EnsembleConfig& cfg);

/// Base + perturbed pair of the configured kind. The perturbation respects
/// the kind's defining constraint exactly (singular clamp for contractions,
/// unitary rotation for unitaries, PSD-increasing imaginary part for
/// dissipative operators, spectral clamp into [0,1] for positive
/// contractions).
std::pair<Operator, Operator> random_pair(const EnsembleConfig& cfg);

/// Clamp all singular values of m to <= bound.
Matrix clamp_singular_values(const Matrix& m, double bound);

/// Clamp the spectrum of a Hermitian matrix into [lo, hi].
Matrix clamp_hermitian_spectrum(const Matrix& m, double lo, double hi);

}  // namespace shiftlab

#endif
