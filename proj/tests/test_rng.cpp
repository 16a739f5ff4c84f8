#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shiftlab/core.hpp"
#include "shiftlab/rng.hpp"

using namespace shiftlab;

TEST_CASE("same seed reproduces the matrix; different streams differ") {
  EnsembleConfig cfg;
  cfg.dim = 4;
  cfg.kind = "strict-contraction";
  cfg.margin = 0.1;
  cfg.seed = 42;
  Operator a = random_operator(cfg);
  Operator b = random_operator(cfg);
  CHECK((a.mat - b.mat).norm() == 0.0);
  cfg.seed = 43;
  CHECK((a.mat - random_operator(cfg).mat).norm() > 1e-3);
}

TEST_CASE("strict contraction clamps exactly to 1 - margin") {
  EnsembleConfig cfg;
  cfg.dim = 6;
  cfg.kind = "strict-contraction";
  cfg.margin = 0.1;
  for (std::uint64_t s = 0; s < 10; ++s) {
    cfg.seed = s;
    CHECK(sigma_max(random_operator(cfg).mat) <= 0.9 + 1e-12);
  }
}

TEST_CASE("unitary kind is unitary; dissipative kind clears its floor") {
  EnsembleConfig cfg;
  cfg.dim = 5;
  cfg.kind = "unitary";
  cfg.seed = 7;
  Matrix u = random_operator(cfg).mat;
  CHECK((u.adjoint() * u - Matrix::Identity(5, 5)).norm() <= 1e-12);

  cfg.kind = "dissipative";
  cfg.margin = 0.2;
  for (std::uint64_t s = 0; s < 6; ++s) {
    cfg.seed = s;
    Matrix l = random_operator(cfg).mat;
    Matrix im = (l - l.adjoint()) / Complex(0.0, 2.0);
    CHECK(hermitian_eigenvalues(im).minCoeff() >= 0.2 - 1e-12);
  }
}

TEST_CASE("positive-contraction spectrum sits inside [margin, 1]") {
  EnsembleConfig cfg;
  cfg.dim = 6;
  cfg.kind = "positive-contraction";
  cfg.margin = 0.2;
  cfg.seed = 3;
  Matrix x = random_operator(cfg).mat;
  RealVector w = hermitian_eigenvalues(x);
  CHECK(w.minCoeff() >= 0.2 - 1e-12);
  CHECK(w.maxCoeff() <= 1.0 + 1e-12);
  CHECK((x - x.adjoint()).norm() <= 1e-13);
}

TEST_CASE("pairs: determinism, kind constraints, perturbation scale") {
  EnsembleConfig cfg;
  cfg.dim = 4;
  cfg.kind = "strict-contraction";
  cfg.margin = 0.1;
  cfg.seed = 11;
  cfg.perturbation_rank = 1;
  cfg.perturbation_size = 0.05;
  auto [a1, b1] = random_pair(cfg);
  auto [a2, b2] = random_pair(cfg);
  CHECK((a1.mat - a2.mat).norm() == 0.0);
  CHECK((b1.mat - b2.mat).norm() == 0.0);
  CHECK(sigma_max(b1.mat) <= 0.9 + 1e-12);
  const double diff = (b1.mat - a1.mat).norm();
  CHECK(diff > 1e-4);
  CHECK(diff <= 0.2);

  cfg.kind = "unitary";
  auto [u0, u1] = random_pair(cfg);
  CHECK((u1.mat.adjoint() * u1.mat - Matrix::Identity(4, 4)).norm() <= 1e-12);

  cfg.kind = "dissipative";
  cfg.margin = 0.2;
  auto [l0, l1] = random_pair(cfg);
  Matrix im1 = (l1.mat - l1.mat.adjoint()) / Complex(0.0, 2.0);
  CHECK(hermitian_eigenvalues(im1).minCoeff() >= 0.2 - 1e-12);

  cfg.kind = "positive-contraction";
  auto [x0, x1] = random_pair(cfg);
  RealVector w = hermitian_eigenvalues(x1.mat);
  CHECK(w.minCoeff() >= -1e-12);
  CHECK(w.maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("invalid configs are rejected") {
  EnsembleConfig cfg;
  cfg.dim = 0;
  cfg.kind = "unitary";
  CHECK_THROWS_AS(random_operator(cfg), InvalidConfig);
  cfg.dim = 3;
  cfg.kind = "mystery";
  CHECK_THROWS_AS(random_operator(cfg), InvalidConfig);
  cfg.kind = "unitary";
  cfg.margin = 1.5;
  CHECK_THROWS_AS(random_operator(cfg), InvalidConfig);
}
