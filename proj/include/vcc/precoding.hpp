#pragma once

#include <vector>

#include "vcc/channel.hpp"
#include "vcc/linalg.hpp"

namespace vcc {

// T = I - H* (H^T H*)^+ H^T for an L x n block H. An empty block yields I_L.
CMatrix projection(const CMatrix& h_minus_k, int L);

// Applies the projection above to a vector without forming the L x L matrix.
CVector project_out(const CMatrix& h_block, const CVector& x);

struct UserPrecoder {
  CMatrix V;       // L x J, unit-norm columns
  CMatrix R;       // M_k x J, unit-norm columns
  RVector lambda;  // J eigenvalues, descending, positive
  int J = 0;
};

struct PrecoderSolution {
  std::vector<UserPrecoder> users;
};

// Block-diagonalising precoder with receive MRC for one group.
// Throws kInfeasibleDimension naming the user whose J would be zero.
PrecoderSolution bd_mrc(const GroupChannel& group);

// Only the positive eigenvalues of H_k^T T_k H_k^* for each user, computed
// from the inverse of the group Gram matrix (the per-user matrices are Schur
// complements). Falls back to explicit projection if the Gram matrix is
// rank deficient.
std::vector<RVector> bd_mrc_eigenvalues(const GroupChannel& group);

// SINR_q = P_q * lambda_q / N0.
RVector bd_mrc_sinr(const UserPrecoder& user, const RVector& powers, double N0);

// SINR from raw precoder and combiner columns, counting every intra-group
// stream as interference. powers[k](q) is the power of stream q of user k.
std::vector<RVector> bd_mrc_sinr_direct(const GroupChannel& group, const PrecoderSolution& solution,
                                        const std::vector<RVector>& powers, double N0);

struct ZfSolution {
  CMatrix V;                // L x M_psi, unit-norm columns
  RVector gains;            // 1 / [(H^T H*)^-1]_{ll}
  std::vector<int> offset;  // first column of each user
};

// Throws kNumericalSingularity if H^T H* is not invertible.
ZfSolution zf(const GroupChannel& group);
// Per-column ZF gains only.
RVector zf_gains(const CMatrix& H);

// Single-antenna users; column k of h_hat / h_true is user k. The precoder is
// built from h_hat and applied to h_true.
RVector zf_imperfect_csit_sinr(const CMatrix& h_hat, const CMatrix& h_true, const RVector& powers, double N0);

// Equal power P_tot/(G Q) per stream; residual coupling error is treated as
// additional signal energy and as interference from the other G Q - 1 streams.
double zf_imperfect_csir_sinr(double P_tot, int G, int Q, double csir_error_variance, Complex a_hat, double N0);

struct MsvSolution {
  CVector f0;              // multicast beamformer
  std::vector<CVector> f;  // unicast beamformers
};

// h_mc: L x (multicast users), h_uc: L x (at least Q_uc) unicast channels.
MsvSolution msv_beamformers(const CMatrix& h_mc, const CMatrix& h_uc, int Q_uc);

struct MsvRates {
  double multicast = 0.0;  // G * min_k ln(1 + p |h_mc,k^T f0|^2 / N0)
  double unicast = 0.0;
  double xi = 1.0;
  double total = 0.0;  // xi * (multicast + unicast)
};

// Equal split P_tot / (Q_uc + 1) over the active streams; Q_uc = L - 1 is
// the original scheme. xi counts Q_uc + 1 + lambda_gamma pilots.
MsvRates msv_rates(const MsvSolution& solution, const CMatrix& h_mc, const CMatrix& h_uc, double P_tot, double N0,
                   int G, int lambda_gamma, int T, int Theta);

// Same rates without materialising beamformers, through Gram-matrix identities.
MsvRates msv_rates_fast(const CMatrix& h_mc, const CMatrix& h_uc, int Q_uc, double P_tot, double N0, int G,
                        int lambda_gamma, int T, int Theta);

double msv_high_snr_gain_limit(int L, int lambda_gamma);

}  // namespace vcc
