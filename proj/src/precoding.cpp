#include "vcc/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vcc/error.hpp"

namespace vcc {
namespace {

constexpr double kRankTol = 1e-10;
constexpr double kConditionTol = 1e-12;

CMatrix gram(const CMatrix& h) { return h.transpose() * h.conjugate(); }

// Cholesky-based inverse of a Gram matrix, or false when the factorisation
// fails or a pivot is negligible next to the largest diagonal entry.
bool try_cholesky_inverse(const CMatrix& g, CMatrix& inverse) {
  const Eigen::Index n = g.rows();
  Eigen::LLT<CMatrix> llt(g);
  if (llt.info() != Eigen::Success) return false;
  const CMatrix& l = llt.matrixLLT();
  double min_pivot = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) min_pivot = std::min(min_pivot, std::norm(l(i, i)));
  if (min_pivot < kConditionTol * g.diagonal().real().maxCoeff()) return false;
  inverse = llt.solve(CMatrix::Identity(n, n));
  return true;
}

std::vector<int> column_offsets(const GroupChannel& group) {
  std::vector<int> offset;
  int col = 0;
  for (const auto& u : group.users) {
    offset.push_back(col);
    col += static_cast<int>(u.h.cols());
  }
  return offset;
}

RVector positive_part(const RVector& values) {
  const int J = numerical_rank(values, kRankTol);
  return values.head(J);
}

}  // namespace

CMatrix projection(const CMatrix& h_minus_k, int L) {
  CMatrix t = CMatrix::Identity(L, L);
  if (h_minus_k.cols() == 0) return t;
  t -= h_minus_k.conjugate() * hermitian_pinv(gram(h_minus_k)) * h_minus_k.transpose();
  return t;
}

CVector project_out(const CMatrix& h_block, const CVector& x) {
  if (h_block.cols() == 0) return x;
  return x - h_block.conjugate() * (gram_inverse(gram(h_block)) * (h_block.transpose() * x));
}

PrecoderSolution bd_mrc(const GroupChannel& group) {
  std::vector<int> counts;
  for (const auto& u : group.users) counts.push_back(static_cast<int>(u.h.cols()));
  check_group_dimensions(group.L, counts);

  PrecoderSolution solution;
  for (int k = 0; k < static_cast<int>(group.users.size()); ++k) {
    const CMatrix& hk = group.users[static_cast<std::size_t>(k)].h;
    const CMatrix t = projection(group.others(k), group.L);
    CMatrix a = hk.transpose() * t * hk.conjugate();
    a = 0.5 * (a + a.adjoint()).eval();  // Hermitian up to rounding
    const HermitianEig eig = hermitian_eig(a);
    // A user whose channel lies inside the others' span leaves only rounding
    // noise after projection; the relative test alone would count it.
    const bool nulled = eig.values.size() == 0 || eig.values(0) <= kRankTol * hk.squaredNorm();
    const int J = nulled ? 0 : numerical_rank(eig.values, kRankTol);
    if (J == 0) {
      throw Error(ErrorCode::kInfeasibleDimension,
                  "user " + std::to_string(k + 1) + " has no interference-free stream");
    }
    UserPrecoder up;
    up.J = J;
    up.lambda = eig.values.head(J);
    up.V.resize(group.L, J);
    up.R.resize(hk.cols(), J);
    for (int q = 0; q < J; ++q) {
      const CVector w = t * (hk.conjugate() * eig.vectors.col(q));
      up.V.col(q) = w / w.norm();
      const CVector y = hk.transpose() * up.V.col(q);
      up.R.col(q) = y / y.norm();
    }
    solution.users.push_back(std::move(up));
  }
  return solution;
}

std::vector<RVector> bd_mrc_eigenvalues(const GroupChannel& group) {
  std::vector<int> counts;
  for (const auto& u : group.users) counts.push_back(static_cast<int>(u.h.cols()));
  check_group_dimensions(group.L, counts);

  std::vector<RVector> out;
  CMatrix inverse;
  if (!try_cholesky_inverse(gram(group.stacked()), inverse)) {
    for (const auto& u : bd_mrc(group).users) out.push_back(u.lambda);
    return out;
  }
  const std::vector<int> offset = column_offsets(group);
  for (std::size_t k = 0; k < group.users.size(); ++k) {
    const int m = static_cast<int>(group.users[k].h.cols());
    const HermitianEig eig = hermitian_eig(inverse.block(offset[k], offset[k], m, m));
    RVector lambda(m);
    for (int i = 0; i < m; ++i) lambda(i) = 1.0 / eig.values(m - 1 - i);
    out.push_back(positive_part(lambda));
  }
  return out;
}

RVector bd_mrc_sinr(const UserPrecoder& user, const RVector& powers, double N0) {
  if (powers.size() != user.J) throw Error(ErrorCode::kInvalidArgument, "bd_mrc_sinr: power vector length != J");
  return (powers.array() * user.lambda.array() / N0).matrix();
}

std::vector<RVector> bd_mrc_sinr_direct(const GroupChannel& group, const PrecoderSolution& solution,
                                        const std::vector<RVector>& powers, double N0) {
  const std::size_t n = group.users.size();
  if (solution.users.size() != n || powers.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "bd_mrc_sinr_direct: inconsistent user counts");
  }
  std::vector<RVector> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const CMatrix& hk = group.users[k].h;
    const UserPrecoder& uk = solution.users[k];
    out[k].resize(uk.J);
    for (int q = 0; q < uk.J; ++q) {
      // r^H H_k^T v = c^H v with c = conj(H_k) r.
      const CVector c = hk.conjugate() * uk.R.col(q);
      double signal = 0.0;
      double interference = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const UserPrecoder& uj = solution.users[j];
        for (int p = 0; p < uj.J; ++p) {
          const double energy = powers[j](p) * std::norm(c.dot(uj.V.col(p)));
          if (j == k && p == q) {
            signal = energy;
          } else {
            interference += energy;
          }
        }
      }
      out[k](q) = signal / (N0 * uk.R.col(q).squaredNorm() + interference);
    }
  }
  return out;
}

ZfSolution zf(const GroupChannel& group) {
  std::vector<int> counts;
  for (const auto& u : group.users) counts.push_back(static_cast<int>(u.h.cols()));
  check_group_dimensions(group.L, counts);
  const CMatrix h = group.stacked();
  CMatrix inverse;
  if (!try_cholesky_inverse(gram(h), inverse)) {
    throw Error(ErrorCode::kNumericalSingularity, "zf: channel Gram matrix is singular");
  }
  ZfSolution out;
  out.offset = column_offsets(group);
  out.V = h.conjugate() * inverse;
  out.gains.resize(h.cols());
  for (Eigen::Index l = 0; l < h.cols(); ++l) {
    const double d = inverse(l, l).real();
    out.V.col(l) /= std::sqrt(d);
    out.gains(l) = 1.0 / d;
  }
  return out;
}

RVector zf_gains(const CMatrix& h) {
  CMatrix inverse;
  if (!try_cholesky_inverse(gram(h), inverse)) {
    throw Error(ErrorCode::kNumericalSingularity, "zf: channel Gram matrix is singular");
  }
  return inverse.diagonal().real().cwiseInverse();
}

RVector zf_imperfect_csit_sinr(const CMatrix& h_hat, const CMatrix& h_true, const RVector& powers, double N0) {
  if (h_hat.rows() != h_true.rows() || h_hat.cols() != h_true.cols() || powers.size() != h_hat.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "zf_imperfect_csit_sinr: dimension mismatch");
  }
  GroupChannel estimate;
  estimate.L = static_cast<int>(h_hat.rows());
  for (Eigen::Index k = 0; k < h_hat.cols(); ++k) estimate.users.push_back({h_hat.col(k), 1.0});
  const ZfSolution sol = zf(estimate);
  const CMatrix coupling = h_true.transpose() * sol.V;
  const Eigen::Index n = h_hat.cols();
  RVector sinr(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double interference = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != k) interference += powers(j) * std::norm(coupling(k, j));
    }
    sinr(k) = powers(k) * std::norm(coupling(k, k)) / (N0 + interference);
  }
  return sinr;
}

double zf_imperfect_csir_sinr(double P_tot, int G, int Q, double csir_error_variance, Complex a_hat, double N0) {
  const double per_stream = P_tot / (static_cast<double>(G) * Q);
  const double interference = per_stream * csir_error_variance * (static_cast<double>(G) * Q - 1.0);
  return per_stream * (std::norm(a_hat) + csir_error_variance) / (N0 + interference);
}

MsvSolution msv_beamformers(const CMatrix& h_mc, const CMatrix& h_uc, int Q_uc) {
  const Eigen::Index L = h_mc.rows();
  if (h_mc.cols() < 1 || h_uc.rows() != L) throw Error(ErrorCode::kInvalidArgument, "msv: bad channel shapes");
  if (Q_uc < 0 || Q_uc > L - 1 || Q_uc > h_uc.cols()) {
    throw Error(ErrorCode::kInfeasibleDimension, "msv: Q_uc=" + std::to_string(Q_uc) + " exceeds L-1 or channels");
  }
  const CMatrix u = h_uc.leftCols(Q_uc);
  MsvSolution out;
  const CVector w0 = project_out(u, h_mc.col(0).conjugate());
  out.f0 = w0 / w0.norm();
  for (int k = 0; k < Q_uc; ++k) {
    CMatrix block(L, Q_uc);
    block.col(0) = h_mc.col(0);
    Eigen::Index col = 1;
    for (int j = 0; j < Q_uc; ++j) {
      if (j != k) block.col(col++) = u.col(j);
    }
    const CVector w = project_out(block, u.col(k).conjugate());
    out.f.push_back(w / w.norm());
  }
  return out;
}

namespace {

MsvRates finish_msv(const RVector& multicast_gain, const RVector& unicast_gain, int Q_uc, double P_tot, double N0,
                    int G, int lambda_gamma, int T, int Theta) {
  MsvRates r;
  const double p = P_tot / (Q_uc + 1.0);
  r.multicast = G * std::log1p(p * multicast_gain.minCoeff() / N0);
  for (Eigen::Index k = 0; k < unicast_gain.size(); ++k) r.unicast += std::log1p(p * unicast_gain(k) / N0);
  r.xi = csi_overhead(T, Theta, Q_uc + 1 + lambda_gamma).xi;
  r.total = r.xi * (r.multicast + r.unicast);
  return r;
}

}  // namespace

MsvRates msv_rates(const MsvSolution& solution, const CMatrix& h_mc, const CMatrix& h_uc, double P_tot, double N0,
                   int G, int lambda_gamma, int T, int Theta) {
  const int Q_uc = static_cast<int>(solution.f.size());
  const RVector mc = (h_mc.transpose() * solution.f0).cwiseAbs2();
  RVector uc(Q_uc);
  for (int k = 0; k < Q_uc; ++k) uc(k) = std::norm(h_uc.col(k).cwiseProduct(solution.f[static_cast<std::size_t>(k)]).sum());
  return finish_msv(mc, uc, Q_uc, P_tot, N0, G, lambda_gamma, T, Theta);
}

MsvRates msv_rates_fast(const CMatrix& h_mc, const CMatrix& h_uc, int Q_uc, double P_tot, double N0, int G,
                        int lambda_gamma, int T, int Theta) {
  const Eigen::Index L = h_mc.rows();
  if (Q_uc < 0 || Q_uc > L - 1 || Q_uc > h_uc.cols()) {
    throw Error(ErrorCode::kInfeasibleDimension, "msv: Q_uc=" + std::to_string(Q_uc) + " exceeds L-1 or channels");
  }
  const CMatrix u = h_uc.leftCols(Q_uc);
  const CVector w0 = project_out(u, h_mc.col(0).conjugate());
  const RVector mc = (h_mc.transpose() * w0).cwiseAbs2() / w0.squaredNorm();
  RVector uc(Q_uc);
  if (Q_uc > 0) {
    CMatrix block(L, Q_uc + 1);
    block.col(0) = h_mc.col(0);
    block.rightCols(Q_uc) = u;
    uc = zf_gains(block).tail(Q_uc);
  }
  return finish_msv(mc, uc, Q_uc, P_tot, N0, G, lambda_gamma, T, Theta);
}

double msv_high_snr_gain_limit(int L, int lambda_gamma) {
  return static_cast<double>(L + lambda_gamma) / static_cast<double>(L);
}

}  // namespace vcc
