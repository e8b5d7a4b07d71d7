#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <numeric>

#include "support.hpp"
#include "vcc/error.hpp"
#include "vcc/precoding.hpp"

using namespace vcc;
using testing_support::Gen;

namespace {

GroupChannel random_group(Gen& gen, int L, const std::vector<int>& m, const std::vector<double>& beta = {}) {
  GroupChannel g;
  g.L = L;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double b = beta.empty() ? 1.0 : beta[k];
    g.users.push_back({gen.matrix(L, m[k], b), b});
  }
  return g;
}

// Nonzero eigenvalues of the L x L matrix T H* H^T T, descending.
RVector large_eigenvalues(const CMatrix& t, const CMatrix& hk, int J) {
  const CMatrix big = t * hk.conjugate() * hk.transpose() * t;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (big + big.adjoint()));
  return es.eigenvalues().reverse().head(J);
}

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvariantViolation;
}

// Unconjugated inner product a^T b.
Complex tdot(const CVector& a, const CVector& b) { return a.cwiseProduct(b).sum(); }

}  // namespace

TEST_CASE("projection with nothing to null is the identity") {
  const CMatrix t = projection(CMatrix(5, 0), 5);
  CHECK((t - CMatrix::Identity(5, 5)).norm() == 0.0);
}

TEST_CASE("rank-one projection") {
  Gen gen(1);
  const CMatrix h = gen.matrix(6, 1);
  const CMatrix t = projection(h, 6);
  CHECK((t * h.conjugate()).norm() <= 1e-12);
  CHECK(t.trace().real() == doctest::Approx(5.0));
  CMatrix dup(6, 2);
  dup << h, h;
  CHECK(projection(dup, 6).trace().real() == doctest::Approx(5.0));
}

TEST_CASE("projection invariants on random blocks") {
  Gen gen(2);
  for (int trial = 0; trial < 300; ++trial) {
    const int L = gen.integer(2, 16);
    const int c = gen.integer(1, L - 1);
    const CMatrix h = gen.matrix(L, c);
    const CMatrix t = projection(h, L);
    CHECK((t * t - t).norm() / t.norm() <= 1e-10);
    CHECK((t - t.adjoint()).norm() / t.norm() <= 1e-10);
    CHECK((t * h.conjugate()).norm() / h.norm() <= 1e-9);
    CHECK(t.trace().real() == doctest::Approx(L - c).epsilon(1e-9));
  }
}

TEST_CASE("single-antenna single-user BD-MRC is maximum ratio transmission") {
  Gen gen(3);
  GroupChannel g = random_group(gen, 4, {1});
  const PrecoderSolution s = bd_mrc(g);
  const CVector h = g.users[0].h.col(0);
  REQUIRE(s.users[0].J == 1);
  CHECK(s.users[0].lambda(0) == doctest::Approx(h.squaredNorm()));
  const Complex overlap = s.users[0].V.col(0).dot(h.conjugate() / h.norm());
  CHECK(std::abs(overlap) == doctest::Approx(1.0));
  CHECK(std::abs(s.users[0].R(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("single user with two antennas: eigenvalues are squared singular values") {
  Gen gen(4);
  GroupChannel g = random_group(gen, 4, {2});
  const PrecoderSolution s = bd_mrc(g);
  Eigen::JacobiSVD<CMatrix> svd(g.users[0].h);
  const RVector sv2 = svd.singularValues().cwiseAbs2();
  CHECK(testing_support::max_rel_err(s.users[0].lambda, sv2) <= 1e-10);
}

TEST_CASE("small and large eigenproblems agree") {
  Gen gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    GroupChannel g = random_group(gen, 8, {2, 2});
    const PrecoderSolution s = bd_mrc(g);
    for (int k = 0; k < 2; ++k) {
      const CMatrix t = projection(g.others(k), 8);
      const UserPrecoder& u = s.users[static_cast<std::size_t>(k)];
      CHECK(testing_support::max_rel_err(u.lambda, large_eigenvalues(t, g.users[static_cast<std::size_t>(k)].h, u.J)) <=
            1e-8);
    }
  }
}

TEST_CASE("BD-MRC nulling, unit norms and per-stream gains on random groups") {
  Gen gen(6);
  for (int trial = 0; trial < 300; ++trial) {
    const int Q = gen.integer(1, 3);
    std::vector<int> m(static_cast<std::size_t>(Q));
    for (auto& x : m) x = gen.integer(1, 4);
    const int L = std::max(4 * gen.integer(2, 8), std::accumulate(m.begin(), m.end(), 0));
    GroupChannel g = random_group(gen, L, m);
    const PrecoderSolution s = bd_mrc(g);
    for (int k = 0; k < Q; ++k) {
      const UserPrecoder& u = s.users[static_cast<std::size_t>(k)];
      const CMatrix& hk = g.users[static_cast<std::size_t>(k)].h;
      CHECK(u.J <= hk.cols());
      for (int q = 0; q < u.J; ++q) {
        CHECK(std::abs(u.V.col(q).norm() - 1.0) <= 1e-12);
        CHECK(std::abs(u.R.col(q).norm() - 1.0) <= 1e-12);
        if (q > 0) CHECK(u.lambda(q - 1) >= u.lambda(q));
        CHECK(u.lambda(q) > 0.0);
        const Complex gain = u.R.col(q).dot(hk.transpose() * u.V.col(q));
        CHECK(testing_support::rel_err(std::norm(gain), u.lambda(q)) <= 1e-9);
        for (int p = 0; p < u.J; ++p) {
          if (p == q) continue;
          CHECK(std::abs(u.R.col(q).dot(hk.transpose() * u.V.col(p))) <= 1e-9 * std::sqrt(u.lambda(p)));
        }
      }
      for (int j = 0; j < Q; ++j) {
        if (j == k) continue;
        const CMatrix& hj = g.users[static_cast<std::size_t>(j)].h;
        CHECK((hj.transpose() * u.V).cwiseAbs().maxCoeff() / hj.norm() <= 1e-9);
      }
    }
    const auto fast = bd_mrc_eigenvalues(g);
    for (int k = 0; k < Q; ++k) {
      CHECK(testing_support::max_rel_err(fast[static_cast<std::size_t>(k)], s.users[static_cast<std::size_t>(k)].lambda) <=
            1e-8);
    }
  }
}

TEST_CASE("BD-MRC rejects infeasible groups and names the user") {
  Gen gen(7);
  GroupChannel g = random_group(gen, 4, {2, 2});
  g.users[1].h = g.users[0].h;  // identical channels: no null space left for either user
  try {
    bd_mrc(g);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInfeasibleDimension);
    CHECK(std::string(e.what()).find("user 1") != std::string::npos);
  }
  GroupChannel wide = random_group(gen, 3, {2, 2});
  CHECK(error_of([&] { bd_mrc(wide); }) == ErrorCode::kInfeasibleDimension);
}

TEST_CASE("closed-form SINR against the definition") {
  Gen gen(8);
  UserPrecoder unit;
  unit.J = 1;
  unit.lambda = RVector::Ones(1);
  CHECK(bd_mrc_sinr(unit, RVector::Constant(1, 0.3), 0.3)(0) == doctest::Approx(1.0));
  CHECK(bd_mrc_sinr(unit, RVector::Zero(1), 0.3)(0) == 0.0);
  for (int trial = 0; trial < 100; ++trial) {
    GroupChannel g = random_group(gen, 12, {2, 3, 1});
    const PrecoderSolution s = bd_mrc(g);
    std::vector<RVector> powers;
    for (const auto& u : s.users) {
      RVector p(u.J);
      for (int q = 0; q < u.J; ++q) p(q) = gen.uniform(0.1, 2.0);
      powers.push_back(p);
    }
    const auto direct = bd_mrc_sinr_direct(g, s, powers, 0.7);
    for (std::size_t k = 0; k < s.users.size(); ++k) {
      CHECK(testing_support::max_rel_err(direct[k], bd_mrc_sinr(s.users[k], powers[k], 0.7)) <= 1e-8);
    }
  }
}

TEST_CASE("eigenvalues concentrate around beta (L - M_psi + M)") {
  Gen gen(9);
  double sum = 0.0;
  int n = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    GroupChannel g = random_group(gen, 256, {2, 2});
    for (const auto& lam : bd_mrc_eigenvalues(g)) {
      sum += lam.sum();
      n += static_cast<int>(lam.size());
    }
  }
  const double ratio = sum / n / (256 - 4 + 2);
  CHECK(ratio >= 0.97);
  CHECK(ratio <= 1.03);
}

TEST_CASE("ZF special cases") {
  GroupChannel one;
  one.L = 1;
  one.users.push_back({CMatrix::Constant(1, 1, Complex(0.6, -0.8) * 2.0), 1.0});
  const ZfSolution s1 = zf(one);
  CHECK(s1.gains(0) == doctest::Approx(4.0));
  CHECK(std::abs(s1.V(0, 0) - Complex(0.6, 0.8)) <= 1e-12);

  GroupChannel orth;
  orth.L = 4;
  CMatrix a = CMatrix::Zero(4, 1), b = CMatrix::Zero(4, 1);
  a(0, 0) = Complex(1.0, 1.0);
  a(1, 0) = 2.0;
  b(2, 0) = Complex(0.0, 3.0);
  orth.users = {{a, 1.0}, {b, 1.0}};
  const ZfSolution s2 = zf(orth);
  CHECK(s2.gains(0) == doctest::Approx(a.squaredNorm()));
  CHECK(s2.gains(1) == doctest::Approx(b.squaredNorm()));
  CHECK(std::abs(s2.V.col(0).dot(a.col(0).conjugate()) / a.norm()) == doctest::Approx(1.0));
}

TEST_CASE("ZF diagonalises random groups") {
  Gen gen(10);
  for (int trial = 0; trial < 300; ++trial) {
    GroupChannel g = random_group(gen, 16, {1, 2, 1}, {gen.uniform(0.1, 3), gen.uniform(0.1, 3), gen.uniform(0.1, 3)});
    const ZfSolution s = zf(g);
    const CMatrix d = g.stacked().transpose() * s.V;
    for (int i = 0; i < d.rows(); ++i) {
      CHECK(std::abs(s.V.col(i).norm() - 1.0) <= 1e-12);
      CHECK(s.gains(i) > 0.0);
      CHECK(std::norm(d(i, i)) == doctest::Approx(s.gains(i)).epsilon(1e-9));
      for (int j = 0; j < d.cols(); ++j) {
        if (i != j) CHECK(std::abs(d(i, j)) <= 1e-9 * std::abs(d(j, j)));
      }
    }
  }
}

TEST_CASE("ZF inverse gain expectation") {
  Gen gen(11);
  double acc = 0.0;
  const int n = 10000;
  const double beta = 0.5;
  for (int draw = 0; draw < n; ++draw) acc += 1.0 / zf_gains(gen.matrix(16, 4, beta))(0);
  CHECK(std::abs(acc / n * beta * (16 - 4) - 1.0) <= 0.03);
}

TEST_CASE("ZF singular Gram matrix") {
  Gen gen(12);
  const CMatrix h = gen.matrix(4, 1);
  CMatrix dup(4, 2);
  dup << h, h;
  CHECK(error_of([&] { zf_gains(dup); }) == ErrorCode::kNumericalSingularity);
}

TEST_CASE("imperfect CSIT SINR") {
  Gen gen(13);
  const CMatrix h = gen.matrix(8, 3);
  const RVector p = RVector::Constant(3, 2.0);
  const RVector perfect = zf_imperfect_csit_sinr(h, h, p, 0.5);
  const RVector g = zf_gains(h);
  for (int k = 0; k < 3; ++k) CHECK(perfect(k) == doctest::Approx(2.0 * g(k) / 0.5).epsilon(1e-9));

  const CMatrix err = gen.matrix(8, 3, 0.01);
  const CMatrix h_hat = h - err;
  const RVector single = zf_imperfect_csit_sinr(h_hat.leftCols(1), h.leftCols(1), RVector::Constant(1, 1e6), 1.0);
  const double coupling = std::norm(h.col(0).dot(h_hat.col(0)) / h_hat.col(0).norm());
  CHECK(single(0) == doctest::Approx(1e6 * coupling).epsilon(1e-9));  // nothing to interfere with

  // Interference-limited: a 100x power increase barely moves the SINR.
  const RVector lo = zf_imperfect_csit_sinr(h_hat, h, RVector::Constant(3, 1e6), 1.0);
  const RVector hi = zf_imperfect_csit_sinr(h_hat, h, RVector::Constant(3, 1e8), 1.0);
  for (int k = 0; k < 3; ++k) CHECK(hi(k) / lo(k) < 1.01);
}

TEST_CASE("imperfect CSIR SINR") {
  const Complex a(0.8, 0.6);
  CHECK(zf_imperfect_csir_sinr(12.0, 3, 2, 0.0, a, 0.5) == doctest::Approx(2.0 * 1.0 / 0.5));
  CHECK(zf_imperfect_csir_sinr(4.0, 1, 1, 0.1, a, 0.5) == doctest::Approx(4.0 * 1.1 / 0.5));
  const double p = 12.0 / 6.0;
  CHECK(zf_imperfect_csir_sinr(12.0, 3, 2, 0.1, a, 0.5) == doctest::Approx(p * 1.1 / (0.5 + p * 0.1 * 5.0)));
}

TEST_CASE("MSV beamformers") {
  Gen gen(14);
  const CMatrix mc = gen.matrix(6, 3), uc = gen.matrix(6, 5);
  const MsvSolution none = msv_beamformers(mc, uc, 0);
  CHECK(std::abs(std::abs(none.f0.dot(mc.col(0).conjugate() / mc.col(0).norm())) - 1.0) <= 1e-12);

  const CMatrix mc2 = gen.matrix(2, 2), uc2 = gen.matrix(2, 1);
  const MsvSolution two = msv_beamformers(mc2, uc2, 1);
  CHECK(std::abs(tdot(uc2.col(0), two.f0)) <= 1e-12);

  for (int q = 0; q <= 5; ++q) {
    const MsvSolution s = msv_beamformers(mc, uc, q);
    CHECK(std::abs(s.f0.norm() - 1.0) <= 1e-12);
    for (int k = 0; k < q; ++k) {
      CHECK(std::abs(tdot(uc.col(k), s.f0)) <= 1e-9);
      const CVector& fk = s.f[static_cast<std::size_t>(k)];
      CHECK(std::abs(fk.norm() - 1.0) <= 1e-12);
      CHECK(std::abs(tdot(mc.col(0), fk)) <= 1e-9);
      for (int j = 0; j < q; ++j) {
        if (j != k) CHECK(std::abs(tdot(uc.col(j), fk)) <= 1e-9);
      }
    }
  }
  CHECK(error_of([&] { msv_beamformers(mc, uc, 6); }) == ErrorCode::kInfeasibleDimension);
}

TEST_CASE("MSV multicast gain is unit mean at full unicast load") {
  Gen gen(15);
  double acc = 0.0;
  const int n = 10000;
  for (int draw = 0; draw < n; ++draw) {
    const CMatrix mc = gen.matrix(8, 2), uc = gen.matrix(8, 7);
    acc += std::norm(tdot(mc.col(1), msv_beamformers(mc, uc, 7).f0));
  }
  CHECK(std::abs(acc / n - 1.0) <= 0.03);
}

TEST_CASE("MSV rates") {
  Gen gen(16);
  const CMatrix mc = gen.matrix(8, 1), uc = gen.matrix(8, 7);
  const MsvSolution s = msv_beamformers(mc, uc, 7);
  const MsvRates r = msv_rates(s, mc, uc, 10.0, 1.0, 1, 0, 15000, 10);
  CHECK(r.multicast == doctest::Approx(std::log1p(10.0 / 8.0 * std::norm(tdot(mc.col(0), s.f0)))));
  CHECK(r.xi == doctest::Approx(1.0 - 10.0 * 8 / 15000.0));
  CHECK(msv_rates(s, mc, uc, 0.0, 1.0, 1, 0, 15000, 10).total == 0.0);
  for (int q = 0; q <= 7; ++q) {
    const MsvRates a = msv_rates(msv_beamformers(mc, uc, q), mc, uc, 50.0, 1.0, 1, 0, 15000, 10);
    const MsvRates b = msv_rates_fast(mc, uc, q, 50.0, 1.0, 1, 0, 15000, 10);
    CHECK(b.total == doctest::Approx(a.total).epsilon(1e-9));
  }
  CHECK(msv_high_snr_gain_limit(32, 5) == doctest::Approx(1.15625).epsilon(1e-15));
}
