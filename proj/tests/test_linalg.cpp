#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include <Eigen/Eigenvalues>

#include "support.hpp"
#include "vcc/error.hpp"
#include "vcc/linalg.hpp"

using namespace vcc;
using testing_support::Gen;

TEST_CASE("eigenvalues of the identity are all one") {
  const HermitianEig e = hermitian_eig(CMatrix::Identity(3, 3));
  CHECK(e.values.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(e.values(i) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("diagonal matrix keeps its basis vectors") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 4.0;
  const HermitianEig e = hermitian_eig(a);
  CHECK(e.values(0) == doctest::Approx(4.0));
  CHECK(e.values(1) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.vectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("random Gram matrices: reconstruction, orthonormality, agreement with Eigen") {
  Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen.integer(1, 8);
    const CMatrix b = gen.matrix(n, gen.integer(1, 8));
    const CMatrix a = b * b.adjoint();
    const HermitianEig e = hermitian_eig(a);
    const double norm = std::max(a.norm(), 1e-300);
    const CMatrix rebuilt = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    CHECK((a - rebuilt).norm() / norm <= 1e-8);
    CHECK((e.vectors.adjoint() * e.vectors - CMatrix::Identity(n, n)).norm() <= 1e-10);
    for (int i = 0; i < n; ++i) {
      CHECK((a * e.vectors.col(i) - e.values(i) * e.vectors.col(i)).norm() <= 1e-8 * norm);
      if (i > 0) CHECK(e.values(i - 1) >= e.values(i));
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> oracle(a);
    RVector want = oracle.eigenvalues().reverse();
    CHECK((e.values - want).cwiseAbs().maxCoeff() <= 1e-10 * norm);
  }
}

TEST_CASE("non-Hermitian input is rejected") {
  CMatrix a = CMatrix::Identity(2, 2);
  a(0, 1) = Complex(0.5, 0.0);
  try {
    hermitian_eig(a);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotHermitian);
  }
}

TEST_CASE("pseudo-inverse of a rank-deficient Gram matrix satisfies the Penrose identities") {
  Gen gen(3);
  const CMatrix h = gen.matrix(6, 2);
  CMatrix dup(6, 3);
  dup << h.col(0), h.col(1), h.col(0);
  const CMatrix g = dup.adjoint() * dup;
  const CMatrix p = hermitian_pinv(g);
  CHECK((g * p * g - g).norm() <= 1e-10 * g.norm());
  CHECK((p * g * p - p).norm() <= 1e-10 * p.norm());
  CHECK(numerical_rank(hermitian_eig(g).values) == 2);
}

TEST_CASE("gram_inverse matches the exact inverse when well conditioned and falls back otherwise") {
  Gen gen(5);
  const CMatrix h = gen.matrix(8, 4);
  const CMatrix g = h.adjoint() * h;
  CHECK((gram_inverse(g) * g - CMatrix::Identity(4, 4)).norm() <= 1e-10);

  CMatrix dup(8, 2);
  dup << h.col(0), h.col(0);
  const CMatrix gs = dup.adjoint() * dup;
  const CMatrix inv = gram_inverse(gs);
  CHECK(inv.allFinite());
  CHECK((gs * inv * gs - gs).norm() <= 1e-10 * gs.norm());
}

TEST_CASE("matrix text dump round-trips") {
  Gen gen(9);
  const CMatrix m = gen.matrix(3, 4);
  std::stringstream ss;
  write_matrix_text(ss, m);
  const CMatrix back = read_matrix_text(ss);
  CHECK(back.rows() == 3);
  CHECK(back.cols() == 4);
  CHECK((back - m).norm() == 0.0);
}
