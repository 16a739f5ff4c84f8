#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shiftlab/dilation.hpp"
#include "shiftlab/rng.hpp"
#include "test_helpers.hpp"

using namespace shiftlab;
using namespace shiftlab::testing;

TEST_CASE("julia block: zero, unitary, scalar rotation") {
  JuliaBlock z = julia_block(Matrix::Zero(3, 3));
  CHECK((z.block - Matrix::Identity(6, 6)).norm() <= 1e-14);

  Matrix u = haar(5, 3);
  JuliaBlock ju = julia_block(u);
  CHECK(ju.block.topLeftCorner(3, 3).norm() <= 1e-7);          // D_T = 0
  CHECK((ju.block.topRightCorner(3, 3) + u.adjoint()).norm() <= 1e-12);
  CHECK((ju.block.bottomLeftCorner(3, 3) - u).norm() == 0.0);

  JuliaBlock jh = julia_block(scalar1x1(Complex(0.5, 0.0)));
  const double root3over2 = std::sqrt(3.0) / 2.0;
  CHECK(jh.block(0, 0).real() == doctest::Approx(root3over2));
  CHECK(jh.block(0, 1).real() == doctest::Approx(-0.5));
  CHECK(jh.block(1, 0).real() == doctest::Approx(0.5));
  CHECK(jh.block(1, 1).real() == doctest::Approx(root3over2));
  CHECK(jh.unitary_defect <= 1e-12);
}

TEST_CASE("julia block unitarity on random contractions") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Matrix t = strict_contraction(seed, 2 + static_cast<Eigen::Index>(seed % 4), 0.02);
    CHECK(julia_block(t).unitary_defect <= 1e-10);
  }
}

TEST_CASE("periodic dilation of the zero contraction is the block shift") {
  PeriodicDilation d = build_periodic(Matrix::Zero(1, 1), 3);
  Matrix u = d.dense();
  // Columns map e_c -> e_{c-1 mod 3}.
  Matrix shift = Matrix::Zero(3, 3);
  shift(2, 0) = 1.0;
  shift(0, 1) = 1.0;
  shift(1, 2) = 1.0;
  CHECK((u - shift).norm() == 0.0);
}

TEST_CASE("periodic dilation is unitary") {
  PeriodicDilation half = build_periodic(scalar1x1(Complex(0.5, 0.0)), 8);
  Matrix u = half.dense();
  CHECK((u.adjoint() * u - Matrix::Identity(8, 8)).norm() <= 1e-12);

  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Matrix t = strict_contraction(seed + 40, 3, 0.05);
    Matrix v = build_periodic(t, 16).dense();
    CHECK((v.adjoint() * v - Matrix::Identity(48, 48)).norm() <= 1e-10);
  }
}

TEST_CASE("difference from the zero dilation is supported in block rows {N-1, 0}") {
  Matrix t = strict_contraction(3, 3, 0.1);
  const int N = 16;
  Matrix u = build_periodic(t, N).dense();
  Matrix u0 = build_periodic(Matrix::Zero(3, 3), N).dense();
  Matrix diff = u - u0;
  for (int r = 1; r <= N - 2; ++r)
    CHECK(diff.block(3 * r, 0, 3, 3 * N).norm() == 0.0);
  CHECK(diff.block(0, 0, 3, 3 * N).norm() > 1e-3);
}

TEST_CASE("build_periodic rejects small periods and expansions") {
  CHECK_THROWS_AS(build_periodic(Matrix::Zero(2, 2), 2), PeriodTooSmall);
  CHECK_THROWS_AS(build_periodic(scalar1x1(Complex(1.5, 0.0)), 8), NotAContraction);
}

TEST_CASE("compression: identity at k=0, T at k=1, wraparound reported beyond") {
  Matrix t = scalar1x1(Complex(0.5, 0.0));
  PeriodicDilation d = build_periodic(t, 8);
  CompressedPower c0 = compress_power(d, 0);
  CHECK((c0.block - Matrix::Identity(1, 1)).norm() == 0.0);
  CompressedPower c1 = compress_power(d, 1);
  CHECK((c1.block - t).norm() == 0.0);

  for (int k = 0; k <= 6; ++k) CHECK(compress_power(d, k).deviation_from_base_power <= 1e-12);
  CompressedPower c9 = compress_power(d, 9);
  CHECK_FALSE(c9.within_dilation_range);
  CHECK(c9.deviation_from_base_power > 1e-3);
}

TEST_CASE("compression against dense powers on a random contraction") {
  Matrix t = strict_contraction(17, 2, 0.1);
  const int N = 12;
  PeriodicDilation d = build_periodic(t, N);
  Matrix u = d.dense();
  Matrix p = Matrix::Identity(2 * N, 2 * N);
  for (int k = 0; k <= N; ++k) {
    CompressedPower c = compress_power(d, k);
    CHECK((c.block - p.topLeftCorner(2, 2)).norm() <= 1e-11);
    p = p * u;
  }
}

TEST_CASE("trace identity holds through N-2 and the traces match the dense matrix") {
  Matrix t = strict_contraction(23, 3, 0.05);
  const int N = 16;
  PeriodicDilation d = build_periodic(t, N);
  std::vector<Complex> traces = dilation_power_traces(d, N);
  Matrix u = d.dense();
  Matrix p = Matrix::Identity(3 * N, 3 * N);
  Matrix tk = Matrix::Identity(3, 3);
  for (int k = 1; k <= N; ++k) {
    p = p * u;
    tk = tk * t;
    CHECK(std::abs(traces[static_cast<size_t>(k - 1)] - p.trace()) <= 1e-9);
    if (k <= N - 2) CHECK(std::abs(traces[static_cast<size_t>(k - 1)] - tk.trace()) <= 1e-10);
  }
  // First wraparound term: trace(U^{N-1}) - trace(T^{N-1}) = -(N-1) tr(T*).
  const Complex wrap = traces[static_cast<size_t>(N - 2)] - tk.trace() * Complex(0.0, 0.0);
  (void)wrap;
  Matrix tn1 = power_oracle(t, N - 1);
  CHECK(std::abs(traces[static_cast<size_t>(N - 2)] - tn1.trace() +
                 static_cast<double>(N - 1) * std::conj(t.trace())) <= 1e-9);
}

TEST_CASE("dilation pair: zero difference, rank bound, Schatten comparison") {
  Matrix t = strict_contraction(29, 2, 0.1);
  DilationPair same = dilation_pair(t, t, 8);
  CHECK(same.s1_difference == doctest::Approx(0.0));
  CHECK(same.observed_rank == 0);

  DilationPair pair =
      dilation_pair(scalar1x1(Complex(0.3, 0.0)), scalar1x1(Complex(0.5, 0.0)), 8);
  CHECK(pair.rank_bound == 2);
  CHECK(pair.observed_rank <= 2);
  // SVD of the dense difference agrees on the rank bound.
  Matrix diff = pair.second.dense() - pair.first.dense();
  RealVector s = singular_values(diff);
  int dense_rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > 1e-12) ++dense_rank;
  CHECK(dense_rank <= 2);
  CHECK(dense_rank == pair.observed_rank);

  Matrix a = strict_contraction(31, 3, 0.1);
  Matrix b = strict_contraction(37, 3, 0.1);
  DilationPair big = dilation_pair(a, b, 32);
  CHECK(big.s1_difference >= schatten_norm(b - a, 1.0) - 1e-12);
  CHECK_THROWS_AS(dilation_pair(a, strict_contraction(1, 2), 8), DimensionMismatch);
}

TEST_CASE("fast eigenphases match dense Schur") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(seed % 4);
    const int N = seed % 2 == 0 ? 8 : 16;
    Matrix t = strict_contraction(seed + 60, n, 0.05);
    PeriodicDilation d = build_periodic(t, N);
    std::vector<double> fast = dilation_eigenphases(d);
    std::vector<double> dense = dilation_eigenphases(d, /*force_dense=*/true);
    REQUIRE(fast.size() == dense.size());
    double worst = 0.0;
    for (size_t i = 0; i < fast.size(); ++i)
      worst = std::max(worst, std::abs(fast[i] - dense[i]));
    CHECK(worst <= 1e-11);
  }
}

TEST_CASE("fast eigenphases handle non-strict and repeated-diagonal bases") {
  // Unitary base: defects vanish, the dilation decouples.
  Matrix u = haar(71, 2);
  PeriodicDilation du = build_periodic(u, 8);
  std::vector<double> fast = dilation_eigenphases(du);
  std::vector<double> dense = dilation_eigenphases(du, true);
  REQUIRE(fast.size() == dense.size());
  for (size_t i = 0; i < fast.size(); ++i) CHECK(std::abs(fast[i] - dense[i]) <= 1e-10);

  // diag(t, t): every phase doubled; the per-block scalar path keeps the count.
  Matrix rep = Matrix::Zero(2, 2);
  rep(0, 0) = Complex(0.4, 0.1);
  rep(1, 1) = Complex(0.4, 0.1);
  PeriodicDilation dr = build_periodic(rep, 12);
  std::vector<double> fr = dilation_eigenphases(dr);
  std::vector<double> dr_dense = dilation_eigenphases(dr, true);
  REQUIRE(fr.size() == dr_dense.size());
  for (size_t i = 0; i < fr.size(); ++i) CHECK(std::abs(fr[i] - dr_dense[i]) <= 1e-9);
}

TEST_CASE("eigenphase count equals N*n across the ensemble") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Matrix t = strict_contraction(seed + 80, 4, 0.1);
    PeriodicDilation d = build_periodic(t, 24);
    CHECK(dilation_eigenphases(d).size() == 96);
  }
}
