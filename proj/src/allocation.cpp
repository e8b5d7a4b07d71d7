#include "vcc/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vcc/error.hpp"

namespace vcc {
namespace {

constexpr int kMaxBisection = 400;
constexpr double kRateRelTol = 1e-14;

void check_lambda(const RVector& lambda) {
  for (Eigen::Index q = 0; q < lambda.size(); ++q) {
    if (!(lambda(q) > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eigenvalues must be positive");
    if (q > 0 && lambda(q) > lambda(q - 1)) {
      throw Error(ErrorCode::kInvalidArgument, "eigenvalues must be sorted in descending order");
    }
  }
}

bool uniform(const std::vector<int>& v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

double sum_inverse(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += 1.0 / x;
  return s;
}

}  // namespace

WaterfillResult waterfill(const RVector& lambda, double budget, double N0) {
  check_lambda(lambda);
  const Eigen::Index J = lambda.size();
  WaterfillResult out{RVector::Zero(J), 0.0, 0};
  if (!(budget > 0.0) || J == 0) return out;
  double floor_sum = 0.0;
  for (Eigen::Index j = 1; j <= J; ++j) {
    floor_sum += N0 / lambda(j - 1);
    const double level = (budget + floor_sum) / static_cast<double>(j);
    if (j == J || level <= N0 / lambda(j)) {
      out.water_level = level;
      out.active = static_cast<int>(j);
      for (Eigen::Index q = 0; q < j; ++q) out.powers(q) = std::max(level - N0 / lambda(q), 0.0);
      return out;
    }
  }
  return out;
}

double user_rate(const UserRateFunction& fn, double power) {
  const WaterfillResult wf = waterfill(fn.lambda, power, fn.N0);
  double rate = 0.0;
  for (int q = 0; q < wf.active; ++q) rate += std::log1p(wf.powers(q) * fn.lambda(q) / fn.N0);
  return fn.xi * rate;
}

double inverse_user_rate(const UserRateFunction& fn, double target_rate) {
  check_lambda(fn.lambda);
  if (!(target_rate > 0.0)) return 0.0;
  const Eigen::Index J = fn.lambda.size();
  if (J == 0) return std::numeric_limits<double>::infinity();
  // With j active streams the rate is xi * (j ln(level) - sum_q ln(N0/lambda_q)).
  double log_floor_sum = 0.0;
  for (Eigen::Index j = 1; j <= J; ++j) {
    log_floor_sum += std::log(fn.N0 / fn.lambda(j - 1));
    const double log_level = (target_rate / fn.xi + log_floor_sum) / static_cast<double>(j);
    if (j == J || log_level <= std::log(fn.N0 / fn.lambda(j))) {
      double power = 0.0;
      for (Eigen::Index q = 0; q < j; ++q) {
        const double log_floor = std::log(fn.N0 / fn.lambda(q));
        power += std::exp(log_floor) * std::expm1(log_level - log_floor);
      }
      return power;
    }
  }
  return std::numeric_limits<double>::infinity();
}

double solve_exp_sum(const std::vector<double>& a, const std::vector<double>& c, double P) {
  if (a.size() != c.size() || a.empty()) throw Error(ErrorCode::kInvalidArgument, "solve_exp_sum: bad inputs");
  if (!(P > 0.0)) return 0.0;
  auto residual = [&](double R) {
    double s = -P;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::expm1(R / c[k]);
    return s;
  };
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.size(); ++k) hi = std::min(hi, c[k] * std::log1p(P / a[k]));
  double lo = 0.0;
  while (residual(hi) < 0.0) hi *= 1.0 + 1e-12;
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= kRateRelTol * hi) break;
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Bracket mmf_brackets(const std::vector<double>& lambda_min, const std::vector<double>& lambda_max,
                     const std::vector<int>& streams, double xi, double N0, double P_tot) {
  const std::size_t n = streams.size();
  if (lambda_min.size() != n || lambda_max.size() != n || n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "mmf_brackets: inconsistent inputs");
  }
  if (!(P_tot > 0.0)) return {0.0, 0.0};
  const double nn = static_cast<double>(n);
  if (uniform(streams)) {
    const double J = streams.front();
    return {xi * J * nn * std::log1p(P_tot / (J * N0 * sum_inverse(lambda_min))),
            xi * J * nn * std::log1p(P_tot / (J * N0 * sum_inverse(lambda_max)))};
  }
  std::vector<double> a_lo(n), a_hi(n), c(n);
  for (std::size_t k = 0; k < n; ++k) {
    a_lo[k] = streams[k] * N0 / lambda_min[k];
    a_hi[k] = streams[k] * N0 / lambda_max[k];
    c[k] = xi * streams[k] * nn;
  }
  return {solve_exp_sum(a_lo, c, P_tot), solve_exp_sum(a_hi, c, P_tot)};
}

Bracket mmf_brackets(const std::vector<UserRateFunction>& users, double P_tot) {
  std::vector<double> lmin, lmax;
  std::vector<int> streams;
  bool shared = true;
  for (const auto& u : users) {
    if (u.lambda.size() == 0) throw Error(ErrorCode::kInvalidArgument, "mmf: user without streams");
    lmax.push_back(u.lambda(0));
    lmin.push_back(u.lambda(u.lambda.size() - 1));
    streams.push_back(static_cast<int>(u.lambda.size()));
    shared = shared && u.xi == users.front().xi && u.N0 == users.front().N0;
  }
  if (shared) return mmf_brackets(lmin, lmax, streams, users.front().xi, users.front().N0, P_tot);
  if (!(P_tot > 0.0)) return {0.0, 0.0};
  const double nn = static_cast<double>(users.size());
  std::vector<double> a_lo, a_hi, c;
  for (std::size_t k = 0; k < users.size(); ++k) {
    a_lo.push_back(streams[k] * users[k].N0 / lmin[k]);
    a_hi.push_back(streams[k] * users[k].N0 / lmax[k]);
    c.push_back(users[k].xi * streams[k] * nn);
  }
  return {solve_exp_sum(a_lo, c, P_tot), solve_exp_sum(a_hi, c, P_tot)};
}

MmfSolution mmf_bd_mrc(const std::vector<UserRateFunction>& users, double P_tot) {
  if (users.empty()) throw Error(ErrorCode::kInvalidArgument, "mmf_bd_mrc: no users");
  for (const auto& u : users) {
    check_lambda(u.lambda);
    if (u.lambda.size() == 0) throw Error(ErrorCode::kInvalidArgument, "mmf_bd_mrc: user without streams");
  }
  const std::size_t n = users.size();
  MmfSolution sol;
  sol.powers.resize(n);
  sol.user_power = RVector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) sol.powers[k] = RVector::Zero(users[k].lambda.size());
  if (!(P_tot > 0.0)) return sol;

  const Bracket bracket = mmf_brackets(users, P_tot);
  sol.R_lower = bracket.lower;
  sol.R_upper = bracket.upper;
  const double nn = static_cast<double>(n);
  auto residual = [&](double R) {
    double s = -P_tot;
    for (const auto& u : users) s += inverse_user_rate(u, R / nn);
    return s;
  };
  double lo = bracket.lower;
  double hi = bracket.upper;
  // Guard against rounding at the bracket ends.
  if (residual(lo) > 0.0) lo = 0.0;
  for (double step = 1e-12; residual(hi) < 0.0; step *= 2.0) hi = hi * (1.0 + step) + 1e-300;
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= kRateRelTol * hi) break;
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  sol.R_star = lo;
  sol.per_user_rate = lo / nn;
  for (std::size_t k = 0; k < n; ++k) {
    const double pk = inverse_user_rate(users[k], sol.per_user_rate);
    sol.user_power(static_cast<Eigen::Index>(k)) = pk;
    sol.powers[k] = waterfill(users[k].lambda, pk, users[k].N0).powers;
    sol.total_power += pk;
  }
  return sol;
}

double mmf_massive_mimo_uniform(const std::vector<double>& betas, int M, int Q, int L, double xi, double N0,
                                double P_tot) {
  if (!(P_tot > 0.0)) return 0.0;
  const double n = static_cast<double>(betas.size());
  return xi * n * M * std::log1p(P_tot * (L - (Q - 1.0) * M) / (N0 * M * sum_inverse(betas)));
}

AsymptoticSolution mmf_massive_mimo(const std::vector<double>& betas, const std::vector<int>& antennas,
                                    const std::vector<int>& group_total_antennas, int L, double xi, double N0,
                                    double P_tot) {
  const std::size_t n = betas.size();
  if (antennas.size() != n || group_total_antennas.size() != n || n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "mmf_massive_mimo: inconsistent inputs");
  }
  for (int m_psi : group_total_antennas) {
    if (m_psi > L) throw Error(ErrorCode::kInfeasibleDimension, "mmf_massive_mimo: M_psi exceeds L");
  }
  AsymptoticSolution out;
  out.user_power.assign(n, 0.0);
  out.symbol_power.assign(n, 0.0);
  if (!(P_tot > 0.0)) return out;
  std::vector<double> a(n), c(n);
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = N0 * antennas[k] / (betas[k] * (L - group_total_antennas[k] + antennas[k]));
    c[k] = xi * antennas[k] * static_cast<double>(n);
  }
  if (uniform(antennas) && uniform(group_total_antennas) && group_total_antennas[0] % antennas[0] == 0) {
    const int M = antennas[0];
    out.R_star = mmf_massive_mimo_uniform(betas, M, group_total_antennas[0] / M, L, xi, N0, P_tot);
  } else {
    out.R_star = solve_exp_sum(a, c, P_tot);
  }
  for (std::size_t k = 0; k < n; ++k) {
    out.user_power[k] = a[k] * std::expm1(out.R_star / c[k]);
    out.symbol_power[k] = out.user_power[k] / antennas[k];
  }
  return out;
}

Bracket zf_mmf_bounds_uniform(const std::vector<double>& betas, int M, int Q, int L, double xi, double N0,
                              double P_tot) {
  if (!(P_tot > 0.0)) return {0.0, 0.0};
  const double n = static_cast<double>(betas.size());
  const double s = N0 * M * sum_inverse(betas);
  const double lower_factor = std::max(L - Q * M, 0);
  return {xi * n * M * std::log1p(P_tot * lower_factor / s), xi * n * M * std::log1p(P_tot * (L - Q * M + 1.0) / s)};
}

Bracket zf_mmf_bounds(const std::vector<double>& betas, const std::vector<int>& antennas,
                      const std::vector<int>& group_total_antennas, int L, double xi, double N0, double P_tot) {
  const std::size_t n = betas.size();
  if (antennas.size() != n || group_total_antennas.size() != n || n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "zf_mmf_bounds: inconsistent inputs");
  }
  if (!(P_tot > 0.0)) return {0.0, 0.0};
  if (uniform(antennas) && uniform(group_total_antennas) && group_total_antennas[0] % antennas[0] == 0) {
    const int M = antennas[0];
    return zf_mmf_bounds_uniform(betas, M, group_total_antennas[0] / M, L, xi, N0, P_tot);
  }
  std::vector<double> a_lo(n), a_hi(n), c(n);
  bool lower_degenerate = false;
  for (std::size_t k = 0; k < n; ++k) {
    const double spare = L - group_total_antennas[k];
    if (spare + 1.0 <= 0.0) throw Error(ErrorCode::kInfeasibleDimension, "zf_mmf_bounds: M_psi exceeds L");
    if (spare <= 0.0) lower_degenerate = true;
    a_lo[k] = antennas[k] * N0 / (betas[k] * spare);
    a_hi[k] = antennas[k] * N0 / (betas[k] * (spare + 1.0));
    c[k] = xi * antennas[k] * static_cast<double>(n);
  }
  return {lower_degenerate ? 0.0 : solve_exp_sum(a_lo, c, P_tot), solve_exp_sum(a_hi, c, P_tot)};
}

Bracket zf_rate_bounds_per_user(double beta, int M_psi, int L, double xi, double N0, const RVector& powers) {
  Bracket out;
  for (Eigen::Index q = 0; q < powers.size(); ++q) {
    out.lower += std::log1p(powers(q) * beta * std::max(L - M_psi, 0) / N0);
    out.upper += std::log1p(powers(q) * beta * (L - M_psi + 1.0) / N0);
  }
  out.lower *= xi;
  out.upper *= xi;
  return out;
}

double inverse_log_sum(const std::vector<double>& slopes, double scale, double target) {
  if (!(target > 0.0)) return 0.0;
  double p = 0.0;
  for (int it = 0; it < 500; ++it) {
    double value = -target;
    double derivative = 0.0;
    for (double s : slopes) {
      value += scale * std::log1p(p * s);
      derivative += scale * s / (1.0 + p * s);
    }
    if (!(derivative > 0.0)) return std::numeric_limits<double>::infinity();
    if (value >= 0.0) return p;
    const double next = p - value / derivative;
    if (next <= p * (1.0 + 1e-15)) return next;
    p = next;
  }
  return p;
}

double mmf_generic(int n_users, const std::function<double(int, double)>& inverse, double P_tot, double upper) {
  if (!(P_tot > 0.0) || n_users <= 0) return 0.0;
  auto residual = [&](double R) {
    double s = -P_tot;
    for (int k = 0; k < n_users; ++k) s += inverse(k, R / n_users);
    return s;
  };
  double lo = 0.0;
  double hi = upper > 0.0 ? upper : 1.0;
  while (residual(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= kRateRelTol * hi) break;
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace vcc
