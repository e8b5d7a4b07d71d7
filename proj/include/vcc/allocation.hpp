#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "vcc/linalg.hpp"

namespace vcc {

struct WaterfillResult {
  RVector powers;        // same order as the input eigenvalues
  double water_level = 0.0;  // 1/alpha; zero when the budget is zero
  int active = 0;        // number of streams with positive power
};

// Maximises sum_q ln(1 + P_q lambda_q / N0) subject to sum_q P_q = budget.
// Eigenvalues must be positive and sorted in descending order.
WaterfillResult waterfill(const RVector& lambda, double budget, double N0);

// Effective rate of one user as a function of its power budget, with the
// budget spread across its streams by water-filling.
struct UserRateFunction {
  RVector lambda;  // descending, positive
  double N0 = 1.0;
  double xi = 1.0;
};

double user_rate(const UserRateFunction& fn, double power);

// Smallest power reaching the target rate. Exact: the active set is found
// by scanning and the water level follows in closed form.
double inverse_user_rate(const UserRateFunction& fn, double target_rate);

struct MmfSolution {
  double R_star = 0.0;         // effective sum-rate, nats/s/Hz
  double per_user_rate = 0.0;  // R_star / (number of users)
  std::vector<RVector> powers;  // per user, per stream
  RVector user_power;           // per user totals
  double total_power = 0.0;
  double R_lower = 0.0;
  double R_upper = 0.0;
};

// Max-min fair allocation over users that do not interfere with each other.
// Finds R with sum_k f_k^{-1}(R / n) = P_tot by bisection inside the
// analytic bracket. P_tot <= 0 returns the all-zero allocation.
MmfSolution mmf_bd_mrc(const std::vector<UserRateFunction>& users, double P_tot);

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
};

// Per-user smallest/largest eigenvalue and stream count. The lower end treats
// every stream as the weakest one, the upper end as the strongest.
Bracket mmf_brackets(const std::vector<double>& lambda_min, const std::vector<double>& lambda_max,
                     const std::vector<int>& streams, double xi, double N0, double P_tot);
// Each user's own xi and N0 are honoured.
Bracket mmf_brackets(const std::vector<UserRateFunction>& users, double P_tot);

// Root R >= 0 of sum_k a_k (exp(R / c_k) - 1) = P for a_k, c_k > 0.
double solve_exp_sum(const std::vector<double>& a, const std::vector<double>& c, double P);

struct AsymptoticSolution {
  double R_star = 0.0;
  std::vector<double> user_power;    // per user
  std::vector<double> symbol_power;  // per user, each of its streams
};

// Large-array approximation of the MMF sum-rate. betas and antennas are
// flattened over all served users; group_total_antennas[k] is M_psi of the
// group of user k. Uniform antenna counts use the closed form.
AsymptoticSolution mmf_massive_mimo(const std::vector<double>& betas, const std::vector<int>& antennas,
                                    const std::vector<int>& group_total_antennas, int L, double xi, double N0,
                                    double P_tot);
// Uniform case: xi G Q M ln(1 + P (L - (Q-1) M) / (N0 M sum 1/beta)).
double mmf_massive_mimo_uniform(const std::vector<double>& betas, int M, int Q, int L, double xi, double N0,
                                double P_tot);

// Fading-averaged ZF MMF bounds. group_total_antennas[k] is M_psi of the
// group of user k. Uses beta (L - M_psi) for the lower and
// beta (L - M_psi + 1) for the upper bound.
Bracket zf_mmf_bounds(const std::vector<double>& betas, const std::vector<int>& antennas,
                      const std::vector<int>& group_total_antennas, int L, double xi, double N0, double P_tot);
Bracket zf_mmf_bounds_uniform(const std::vector<double>& betas, int M, int Q, int L, double xi, double N0,
                              double P_tot);

// Per-user fading-averaged ZF rate bounds for given stream powers.
Bracket zf_rate_bounds_per_user(double beta, int M_psi, int L, double xi, double N0, const RVector& powers);

// Smallest p >= 0 with scale * sum_i ln(1 + p * s_i) = target, for
// non-negative slopes s_i. Newton iteration from p = 0 approaches the root
// monotonically from below because the left side is concave in p.
double inverse_log_sum(const std::vector<double>& slopes, double scale, double target);

// Max-min fair rate for users whose rate functions are arbitrary increasing
// functions of their power. inverse(k, r) returns the power user k needs for
// rate r. Bisection on R in [0, upper].
double mmf_generic(int n_users, const std::function<double(int, double)>& inverse, double P_tot, double upper);

}  // namespace vcc
