#include "shiftlab/rng.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "shiftlab/core.hpp"

namespace shiftlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

StreamRng::StreamRng(std::uint64_t master_seed, std::uint64_t stream_id)
    : engine_(splitmix64(splitmix64(master_seed) ^ splitmix64(stream_id * 0x9e3779b97f4a7c15ULL + 1))) {}

double StreamRng::uniform() {
  // 53-bit mantissa from the top bits.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double StreamRng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(kTwoPi * u2);
  have_spare_ = true;
  return r * std::cos(kTwoPi * u2);
}

Complex StreamRng::complex_gaussian() {
  const double a = gaussian();
  const double b = gaussian();
  return Complex(a, b) / std::sqrt(2.0);
}

Matrix StreamRng::gaussian_matrix(Eigen::Index r, Eigen::Index c) {
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = complex_gaussian();
  return m;
}

Matrix StreamRng::gaussian_matrix(Eigen::Index n) { return gaussian_matrix(n, n); }

Matrix StreamRng::hermitian_gaussian(Eigen::Index n) {
  Matrix g = gaussian_matrix(n);
  return 0.5 * (g + g.adjoint());
}

Matrix StreamRng::haar_unitary(Eigen::Index n) {
  Matrix g = gaussian_matrix(n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase convention so the factorization is unique.
  for (Eigen::Index j = 0; j < n; ++j) {
    Complex d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
  }
  return q;
}

Matrix StreamRng::rank_r_gaussian(Eigen::Index n, int rank) {
  const Eigen::Index r = std::min<Eigen::Index>(std::max(rank, 1), n);
  Matrix p = gaussian_matrix(n, r);
  Matrix q = gaussian_matrix(n, r);
  Matrix m = p * q.adjoint();
  const double s = sigma_max(m);
  if (s > 0.0) m /= s;
  return m;
}

Matrix StreamRng::rank_r_hermitian(Eigen::Index n, int rank) {
  const Eigen::Index r = std::min<Eigen::Index>(std::max(rank, 1), n);
  Matrix p = gaussian_matrix(n, r);
  RealVector d(r);
  for (Eigen::Index i = 0; i < r; ++i) d(i) = gaussian();
  Matrix m = p * d.asDiagonal() * p.adjoint();
  m = 0.5 * (m + m.adjoint());
  const double s = sigma_max(m);
  if (s > 0.0) m /= s;
  return m;
}

Matrix StreamRng::rank_r_psd(Eigen::Index n, int rank) {
  const Eigen::Index r = std::min<Eigen::Index>(std::max(rank, 1), n);
  Matrix p = gaussian_matrix(n, r);
  Matrix m = p * p.adjoint();
  m = 0.5 * (m + m.adjoint());
  const double s = sigma_max(m);
  if (s > 0.0) m /= s;
  return m;
}

Matrix clamp_singular_values(const Matrix& m, double bound) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw EigSolverFailed("SVD did not converge");
  RealVector s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::min(s(i), bound);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
}

Matrix clamp_hermitian_spectrum(const Matrix& m, double lo, double hi) {
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw EigSolverFailed("Hermitian eigensolver did not converge");
  RealVector w = es.eigenvalues();
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::min(std::max(w(i), lo), hi);
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

namespace {

void validate(const EnsembleConfig& cfg) {
  if (cfg.dim <= 0) throw InvalidConfig("ensemble dim must be positive");
  if (!(cfg.margin > 0.0 && cfg.margin < 1.0)) throw InvalidConfig("margin must lie in (0,1)");
  if (cfg.kind != "strict-contraction" && cfg.kind != "contraction" && cfg.kind != "unitary" &&
      cfg.kind != "dissipative" && cfg.kind != "positive-contraction")
    throw InvalidConfig("unknown ensemble kind: " + cfg.kind);
}

Matrix base_operator(const EnsembleConfig& cfg, StreamRng& rng) {
  const Eigen::Index n = cfg.dim;
  if (cfg.kind == "strict-contraction")
    return clamp_singular_values(rng.gaussian_matrix(n), 1.0 - cfg.margin);
  if (cfg.kind == "contraction") return clamp_singular_values(rng.gaussian_matrix(n), 1.0);
  if (cfg.kind == "unitary") return rng.haar_unitary(n);
  if (cfg.kind == "dissipative") {
    Matrix a = rng.hermitian_gaussian(n);
    Matrix w = rng.gaussian_matrix(n);
    Matrix b = cfg.margin * Matrix::Identity(n, n) + (w * w.adjoint()) / static_cast<double>(n);
    return a + Complex(0.0, 1.0) * b;
  }
  // positive-contraction: Hermitian with spectrum sampled in [margin, 1].
  Matrix q = rng.haar_unitary(n);
  RealVector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = cfg.margin + (1.0 - cfg.margin) * rng.uniform();
  return q * w.asDiagonal() * q.adjoint();
}

}  // namespace

Operator random_operator(const EnsembleConfig& cfg) {
  validate(cfg);
  StreamRng rng(cfg.seed, 0);
  return Operator(base_operator(cfg, rng), cfg.kind + "-" + std::to_string(cfg.seed));
}

std::pair<Operator, Operator> random_pair(const EnsembleConfig& cfg) {
  validate(cfg);
  StreamRng rng(cfg.seed, 0);
  Matrix t0 = base_operator(cfg, rng);
  StreamRng prng(cfg.seed, 1);
  const Eigen::Index n = cfg.dim;
  const double eps = cfg.perturbation_size;
  Matrix t1;
  if (cfg.kind == "strict-contraction")
    t1 = clamp_singular_values(t0 + eps * prng.rank_r_gaussian(n, cfg.perturbation_rank),
                               1.0 - cfg.margin);
  else if (cfg.kind == "contraction")
    t1 = clamp_singular_values(t0 + eps * prng.rank_r_gaussian(n, cfg.perturbation_rank), 1.0);
  else if (cfg.kind == "unitary") {
    if (eps == 0.0) {
      t1 = prng.haar_unitary(n);
    } else {
      Matrix h = prng.rank_r_hermitian(n, cfg.perturbation_rank);
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      if (es.info() != Eigen::Success) throw EigSolverFailed("Hermitian eigensolver did not converge");
      Vector phases(n);
      for (Eigen::Index i = 0; i < n; ++i)
        phases(i) = std::exp(Complex(0.0, eps * es.eigenvalues()(i)));
      t1 = t0 * (es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
    }
  } else if (cfg.kind == "dissipative") {
    Matrix h = prng.rank_r_hermitian(n, cfg.perturbation_rank);
    Matrix s = prng.rank_r_psd(n, cfg.perturbation_rank);
    t1 = t0 + eps * (h + Complex(0.0, 1.0) * s);
  } else {  // positive-contraction
    t1 = clamp_hermitian_spectrum(t0 + eps * prng.rank_r_hermitian(n, cfg.perturbation_rank), 0.0,
                                  1.0);
  }
  const std::string stem = cfg.kind + "-" + std::to_string(cfg.seed);
  return {Operator(std::move(t0), stem + "-base"), Operator(std::move(t1), stem + "-pert")};
}

}  // namespace shiftlab
