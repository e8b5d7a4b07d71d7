#include "vcc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "vcc/allocation.hpp"
#include "vcc/channel.hpp"
#include "vcc/error.hpp"
#include "vcc/precoding.hpp"
#include "vcc/rng.hpp"

namespace vcc {
namespace {

constexpr std::size_t kMaxViolationsPerLocation = 8;

// Registry mapping (scheme, sweep point, q) to a slot of the per-location
// result vector. Built once before sampling so every worker uses the same layout.
class Layout {
 public:
  int add(const std::string& scheme, int point, int q) {
    const auto key = std::make_tuple(scheme, point, q);
    const auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const int id = static_cast<int>(index_.size());
    index_.emplace(key, id);
    return id;
  }
  int at(const std::string& scheme, int point, int q) const {
    const auto it = index_.find(std::make_tuple(scheme, point, q));
    if (it == index_.end()) throw Error(ErrorCode::kInvariantViolation, "missing result slot for " + scheme);
    return it->second;
  }
  bool has(const std::string& scheme, int point, int q) const {
    return index_.count(std::make_tuple(scheme, point, q)) != 0;
  }
  std::size_t size() const { return index_.size(); }

 private:
  std::map<std::tuple<std::string, int, int>, int> index_;
};

struct Series {
  int m = 1;
  std::string suffix;
  std::vector<int> q;
  std::vector<int> qp;
  int pool = 1;  // users drawn per group
};

struct Context {
  Scenario s;
  double N0 = 1.0;
  std::vector<double> power;
  CellGeometry geometry;
  std::vector<Series> series;
  Layout layout;
  bool bdmrc = false;
  bool zf = false;
  bool asymptotic = false;
  bool msv = false;
  bool csi = false;

  double xi(long receive_antennas) const { return csi_overhead(s.T, s.theta, receive_antennas).xi; }
};

struct LocationResult {
  std::vector<double> values;
  std::vector<std::string> violations;
};

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string csir_tag(double v) { return "csir_" + fmt_short(v); }

Context make_context(const Scenario& s) {
  validate(s);
  Context ctx;
  ctx.s = s;
  ctx.bdmrc = s.has_scheme("bdmrc");
  ctx.zf = s.has_scheme("zf");
  ctx.asymptotic = s.has_scheme("asymptotic");
  ctx.msv = s.has_scheme("msv");
  ctx.csi = s.has_scheme("csi");
  if (s.symmetric()) {
    ctx.N0 = 1.0;
    for (double snr : s.snr_db) ctx.power.push_back(db_to_linear(snr));
  } else {
    ctx.geometry = CellGeometry::by_name(s.geometry);
    ctx.N0 = noise_power_watts(s.noise_dbm_hz, s.bandwidth_hz);
    for (double p : s.ptot_dbm) ctx.power.push_back(dbm_to_watts(p));
  }
  for (int m : s.M) {
    Series se;
    se.m = m;
    se.suffix = s.M.size() > 1 ? "_M" + std::to_string(m) : "";
    se.q = s.q_values(m);
    se.qp = s.qp_values(m);
    se.pool = std::max(*std::max_element(se.q.begin(), se.q.end()), *std::max_element(se.qp.begin(), se.qp.end()));
    ctx.series.push_back(se);
  }

  const int n_points = static_cast<int>(ctx.power.size());
  for (const Series& se : ctx.series) {
    for (int p = 0; p < n_points; ++p) {
      for (int q : se.q) {
        if (ctx.bdmrc) ctx.layout.add("vcc_bdmrc" + se.suffix, p, q);
        if (ctx.asymptotic) ctx.layout.add("vcc_bdmrc_asymptotic" + se.suffix, p, q);
        if (ctx.zf) {
          for (const char* name : {"vcc_zf", "vcc_zf_inst", "vcc_zf_lower", "vcc_zf_upper"}) {
            ctx.layout.add(name + se.suffix, p, q);
          }
        }
        if (ctx.csi) {
          ctx.layout.add("vcc_zf_perfect" + se.suffix, p, q);
          ctx.layout.add("vcc_zf_csit" + se.suffix, p, q);
          for (double v : s.csir_var) ctx.layout.add("vcc_zf_" + csir_tag(v) + se.suffix, p, q);
        }
      }
      for (int q : se.qp) {
        if (ctx.bdmrc || ctx.msv) ctx.layout.add("cacheless_bdmrc" + se.suffix, p, q);
        if (ctx.zf) {
          for (const char* name : {"cacheless_zf", "cacheless_zf_inst", "cacheless_zf_lower", "cacheless_zf_upper"}) {
            ctx.layout.add(name + se.suffix, p, q);
          }
        }
        if (ctx.csi) {
          ctx.layout.add("cacheless_zf_perfect" + se.suffix, p, q);
          ctx.layout.add("cacheless_zf_csit" + se.suffix, p, q);
          for (double v : s.csir_var) ctx.layout.add("cacheless_zf_" + csir_tag(v) + se.suffix, p, q);
        }
      }
      if (ctx.msv) {
        for (int quc = 0; quc <= s.L - 1; ++quc) ctx.layout.add("msv_modified" + se.suffix, p, quc);
      }
    }
  }
  return ctx;
}

void note(LocationResult& out, std::string message) {
  if (out.violations.size() < kMaxViolationsPerLocation) out.violations.push_back(std::move(message));
}

std::vector<UserRateFunction> rate_functions(const std::vector<std::vector<CMatrix>>& h, int groups, int q, int L,
                                             double N0, double xi) {
  std::vector<UserRateFunction> users;
  for (int g = 0; g < groups; ++g) {
    GroupChannel group;
    group.L = L;
    for (int k = 0; k < q; ++k) group.users.push_back({h[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)], 1.0});
    for (RVector& lambda : bd_mrc_eigenvalues(group)) users.push_back({std::move(lambda), N0, xi});
  }
  return users;
}

// Per-user ZF stream gains, each user's gains sorted in descending order.
std::vector<RVector> zf_user_gains(const std::vector<std::vector<CMatrix>>& h, int groups, int q, int m, int L) {
  std::vector<RVector> out;
  for (int g = 0; g < groups; ++g) {
    CMatrix stacked(L, q * m);
    for (int k = 0; k < q; ++k) stacked.middleCols(k * m, m) = h[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)];
    const RVector gains = zf_gains(stacked);
    for (int k = 0; k < q; ++k) {
      RVector gk = gains.segment(k * m, m);
      std::sort(gk.data(), gk.data() + gk.size(), std::greater<>());
      out.push_back(std::move(gk));
    }
  }
  return out;
}

void check_mmf(const MmfSolution& sol, double P, const std::string& where, LocationResult& out) {
  if (std::abs(sol.total_power - P) > 1e-9 * P) {
    note(out, where + ": MMF power " + std::to_string(sol.total_power) + " misses budget " + std::to_string(P));
  }
  const double slack = 1e-12 * std::max(sol.R_upper, 1.0);
  if (sol.R_star < sol.R_lower - slack || sol.R_star > sol.R_upper + slack) {
    note(out, where + ": MMF rate outside its analytic bracket");
  }
}

std::vector<double> flatten_betas(const std::vector<std::vector<double>>& beta, int groups, int q) {
  std::vector<double> out;
  for (int g = 0; g < groups; ++g) {
    for (int k = 0; k < q; ++k) out.push_back(beta[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)]);
  }
  return out;
}

// Expectation-first ZF MMF: each user's rate is its fading-averaged rate under
// an equal per-stream split of a pathloss-based power budget.
double zf_expectation_mmf(const std::vector<std::vector<double>>& slopes, double scale, double P, double upper) {
  const int n = static_cast<int>(slopes.size());
  return mmf_generic(
      n, [&](int k, double r) { return inverse_log_sum(slopes[static_cast<std::size_t>(k)], scale, r); }, P,
      upper);
}

void run_pathloss_series(const Context& ctx, const Series& se, int loc, LocationResult& out) {
  const Scenario& s = ctx.s;
  const int G = s.G();
  const int L = s.L;
  const int m = se.m;
  const int F = s.fadings;
  const double inv_f = 1.0 / F;
  const int n_points = static_cast<int>(ctx.power.size());

  std::vector<std::vector<double>> beta(static_cast<std::size_t>(G), std::vector<double>(static_cast<std::size_t>(se.pool), 1.0));
  if (!s.symmetric()) {
    for (int g = 0; g < G; ++g) {
      for (int k = 0; k < se.pool; ++k) {
        Substream rng(s.seed, {stream::kLocation, static_cast<std::uint64_t>(loc), static_cast<std::uint64_t>(g),
                               static_cast<std::uint64_t>(k)});
        beta[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)] = sample_user_position(ctx.geometry, rng).beta;
      }
    }
  }

  auto slot = [&](const std::string& name, int p, int q) { return ctx.layout.at(name + se.suffix, p, q); };

  for (int q : se.q) {
    const std::vector<double> b = flatten_betas(beta, G, q);
    const double xi = ctx.xi(static_cast<long>(G) * q * m);
    for (int p = 0; p < n_points; ++p) {
      if (ctx.asymptotic) {
        out.values[static_cast<std::size_t>(slot("vcc_bdmrc_asymptotic", p, q))] +=
            mmf_massive_mimo_uniform(b, m, q, L, xi, ctx.N0, ctx.power[static_cast<std::size_t>(p)]);
      }
      if (ctx.zf) {
        const Bracket bounds = zf_mmf_bounds_uniform(b, m, q, L, xi, ctx.N0, ctx.power[static_cast<std::size_t>(p)]);
        out.values[static_cast<std::size_t>(slot("vcc_zf_lower", p, q))] += bounds.lower;
        out.values[static_cast<std::size_t>(slot("vcc_zf_upper", p, q))] += bounds.upper;
      }
    }
  }
  if (ctx.zf) {
    for (int q : se.qp) {
      const std::vector<double> b = flatten_betas(beta, 1, q);
      const double xi = ctx.xi(static_cast<long>(q) * m);
      for (int p = 0; p < n_points; ++p) {
        const Bracket bounds = zf_mmf_bounds_uniform(b, m, q, L, xi, ctx.N0, ctx.power[static_cast<std::size_t>(p)]);
        out.values[static_cast<std::size_t>(slot("cacheless_zf_lower", p, q))] += bounds.lower;
        out.values[static_cast<std::size_t>(slot("cacheless_zf_upper", p, q))] += bounds.upper;
      }
    }
  }
  if (!ctx.bdmrc && !ctx.zf && !ctx.msv) return;

  // slopes[q index][user] collects gain / (M N0) over fadings and streams.
  std::vector<std::vector<std::vector<double>>> slopes_vcc(se.q.size()), slopes_cl(se.qp.size());
  for (std::size_t i = 0; i < se.q.size(); ++i) slopes_vcc[i].resize(static_cast<std::size_t>(G * se.q[i]));
  for (std::size_t i = 0; i < se.qp.size(); ++i) slopes_cl[i].resize(static_cast<std::size_t>(se.qp[i]));

  std::vector<std::vector<CMatrix>> h(static_cast<std::size_t>(G), std::vector<CMatrix>(static_cast<std::size_t>(se.pool)));
  for (int f = 0; f < F; ++f) {
    for (int g = 0; g < G; ++g) {
      for (int k = 0; k < se.pool; ++k) {
        Substream rng(s.seed, {stream::kFading, static_cast<std::uint64_t>(loc), static_cast<std::uint64_t>(f),
                               static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(k)});
        h[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)] =
            sample_user_channel(L, m, beta[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)], rng);
      }
    }

    auto run_side = [&](const std::vector<int>& qs, int groups, const char* prefix,
                        std::vector<std::vector<std::vector<double>>>& slopes, bool do_bdmrc) {
      for (std::size_t qi = 0; qi < qs.size(); ++qi) {
        const int q = qs[qi];
        const double xi = ctx.xi(static_cast<long>(groups) * q * m);
        if (do_bdmrc) {
          const auto users = rate_functions(h, groups, q, L, ctx.N0, xi);
          for (int p = 0; p < n_points; ++p) {
            const double P = ctx.power[static_cast<std::size_t>(p)];
            const MmfSolution sol = mmf_bd_mrc(users, P);
            check_mmf(sol, P, std::string(prefix) + "_bdmrc q=" + std::to_string(q), out);
            out.values[static_cast<std::size_t>(slot(std::string(prefix) + "_bdmrc", p, q))] += sol.R_star * inv_f;
          }
        }
        if (ctx.zf) {
          const auto gains = zf_user_gains(h, groups, q, m, L);
          std::vector<UserRateFunction> users;
          for (std::size_t k = 0; k < gains.size(); ++k) {
            users.push_back({gains[k], ctx.N0, xi});
            for (Eigen::Index j = 0; j < gains[k].size(); ++j) slopes[qi][k].push_back(gains[k](j) / (m * ctx.N0));
          }
          for (int p = 0; p < n_points; ++p) {
            const double P = ctx.power[static_cast<std::size_t>(p)];
            const MmfSolution sol = mmf_bd_mrc(users, P);
            check_mmf(sol, P, std::string(prefix) + "_zf_inst q=" + std::to_string(q), out);
            out.values[static_cast<std::size_t>(slot(std::string(prefix) + "_zf_inst", p, q))] += sol.R_star * inv_f;
          }
        }
      }
    };
    run_side(se.q, G, "vcc", slopes_vcc, ctx.bdmrc);
    run_side(se.qp, 1, "cacheless", slopes_cl, ctx.bdmrc || ctx.msv);
  }

  if (ctx.zf) {
    auto finish = [&](const std::vector<int>& qs, int groups, const std::string& prefix,
                      const std::vector<std::vector<std::vector<double>>>& slopes) {
      for (std::size_t qi = 0; qi < qs.size(); ++qi) {
        const int q = qs[qi];
        const double xi = ctx.xi(static_cast<long>(groups) * q * m);
        const std::vector<double> b = flatten_betas(beta, groups, q);
        for (int p = 0; p < n_points; ++p) {
          const double P = ctx.power[static_cast<std::size_t>(p)];
          const double upper = zf_mmf_bounds_uniform(b, m, q, L, xi, ctx.N0, P).upper;
          const double r = zf_expectation_mmf(slopes[qi], xi * inv_f, P, 1.5 * upper + 1e-300);
          out.values[static_cast<std::size_t>(slot(prefix + "_zf", p, q))] += r;
        }
      }
    };
    finish(se.q, G, "vcc", slopes_vcc);
    finish(se.qp, 1, "cacheless", slopes_cl);
  }
}

void run_msv_series(const Context& ctx, const Series& se, int loc, LocationResult& out) {
  const Scenario& s = ctx.s;
  const int L = s.L;
  const int G = s.G();
  const double inv_f = 1.0 / s.fadings;
  for (int f = 0; f < s.fadings; ++f) {
    Substream mc_rng(s.seed, {stream::kMulticast, static_cast<std::uint64_t>(loc), static_cast<std::uint64_t>(f)});
    Substream uc_rng(s.seed, {stream::kUnicast, static_cast<std::uint64_t>(loc), static_cast<std::uint64_t>(f)});
    const CMatrix h_mc = sample_user_channel(L, G, 1.0, mc_rng);
    const CMatrix h_uc = sample_user_channel(L, L - 1, 1.0, uc_rng);
    for (int quc = 0; quc <= L - 1; ++quc) {
      for (std::size_t p = 0; p < ctx.power.size(); ++p) {
        const MsvRates r =
            msv_rates_fast(h_mc, h_uc, quc, ctx.power[p], ctx.N0, G, s.lambda_gamma(), s.T, s.theta);
        out.values[static_cast<std::size_t>(ctx.layout.at("msv_modified" + se.suffix, static_cast<int>(p), quc))] +=
            r.total * inv_f;
      }
    }
  }
}

void run_csi_series(const Context& ctx, const Series& se, int loc, LocationResult& out) {
  const Scenario& s = ctx.s;
  const int L = s.L;
  const int G = s.G();
  const double inv_f = 1.0 / s.fadings;
  const std::size_t n_points = ctx.power.size();

  std::vector<std::vector<CVector>> h(static_cast<std::size_t>(G)), h_hat(static_cast<std::size_t>(G));
  for (int f = 0; f < s.fadings; ++f) {
    for (int g = 0; g < G; ++g) {
      h[static_cast<std::size_t>(g)].clear();
      h_hat[static_cast<std::size_t>(g)].clear();
      for (int k = 0; k < se.pool; ++k) {
        Substream fading(s.seed, {stream::kFading, static_cast<std::uint64_t>(loc), static_cast<std::uint64_t>(f),
                                  static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(k)});
        Substream csit(s.seed, {stream::kCsit, static_cast<std::uint64_t>(loc), static_cast<std::uint64_t>(f),
                                static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(k)});
        CVector hk = sample_user_channel(L, 1, 1.0, fading).col(0);
        h_hat[static_cast<std::size_t>(g)].push_back(corrupt_csit(hk, s.csit_var, csit, 1.0).h_hat);
        h[static_cast<std::size_t>(g)].push_back(std::move(hk));
      }
    }

    auto run_side = [&](const std::vector<int>& qs, int groups, const std::string& prefix) {
      for (int q : qs) {
        const double xi = ctx.xi(static_cast<long>(groups) * q);
        std::vector<double> perfect(n_points, 0.0), csit(n_points, 0.0);
        std::vector<std::vector<double>> csir(s.csir_var.size(), std::vector<double>(n_points, 0.0));
        for (int g = 0; g < groups; ++g) {
          CMatrix ht(L, q), hh(L, q);
          for (int k = 0; k < q; ++k) {
            ht.col(k) = h[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)];
            hh.col(k) = h_hat[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)];
          }
          const RVector gains = zf_gains(ht);
          GroupChannel est;
          est.L = L;
          for (int k = 0; k < q; ++k) est.users.push_back({hh.col(k), 1.0});
          const CMatrix coupling = ht.transpose() * zf(est).V;
          std::vector<std::vector<Complex>> a_hat(s.csir_var.size());
          for (std::size_t i = 0; i < s.csir_var.size(); ++i) {
            for (int k = 0; k < q; ++k) {
              Substream rng(s.seed, {stream::kCsir, static_cast<std::uint64_t>(loc), static_cast<std::uint64_t>(f),
                                     static_cast<std::uint64_t>(g), static_cast<std::uint64_t>(k),
                                     static_cast<std::uint64_t>(i)});
              a_hat[i].push_back(corrupt_coupling(coupling(k, k), s.csir_var[i], rng).a_hat);
            }
          }
          for (std::size_t p = 0; p < n_points; ++p) {
            const double P = ctx.power[p];
            const double per_stream = P / (static_cast<double>(groups) * q);
            const RVector sinr = zf_imperfect_csit_sinr(hh, ht, RVector::Constant(q, per_stream), ctx.N0);
            for (int k = 0; k < q; ++k) {
              perfect[p] += std::log1p(per_stream * gains(k) / ctx.N0);
              csit[p] += std::log1p(sinr(k));
              for (std::size_t i = 0; i < s.csir_var.size(); ++i) {
                csir[i][p] += std::log1p(
                    zf_imperfect_csir_sinr(P, groups, q, s.csir_var[i], a_hat[i][static_cast<std::size_t>(k)], ctx.N0));
              }
            }
          }
        }
        for (std::size_t p = 0; p < n_points; ++p) {
          const int pi = static_cast<int>(p);
          out.values[static_cast<std::size_t>(ctx.layout.at(prefix + "_zf_perfect" + se.suffix, pi, q))] +=
              xi * perfect[p] * inv_f;
          out.values[static_cast<std::size_t>(ctx.layout.at(prefix + "_zf_csit" + se.suffix, pi, q))] +=
              xi * csit[p] * inv_f;
          for (std::size_t i = 0; i < s.csir_var.size(); ++i) {
            out.values[static_cast<std::size_t>(
                ctx.layout.at(prefix + "_zf_" + csir_tag(s.csir_var[i]) + se.suffix, pi, q))] +=
                xi * csir[i][p] * inv_f;
          }
        }
      }
    };
    run_side(se.q, G, "vcc");
    run_side(se.qp, 1, "cacheless");
  }
}

LocationResult run_location(const Context& ctx, int loc) {
  LocationResult out;
  out.values.assign(ctx.layout.size(), 0.0);
  for (const Series& se : ctx.series) {
    run_pathloss_series(ctx, se, loc, out);
    if (ctx.msv) run_msv_series(ctx, se, loc, out);
    if (ctx.csi) run_csi_series(ctx, se, loc, out);
  }
  return out;
}

struct CellStats {
  double mean = 0.0;
  double se = 0.0;
};

std::vector<CellStats> reduce(const std::vector<LocationResult>& results, std::size_t n_cells) {
  std::vector<CellStats> stats(n_cells);
  const double n = static_cast<double>(results.size());
  for (std::size_t c = 0; c < n_cells; ++c) {
    double sum = 0.0;
    for (const auto& r : results) sum += r.values[c];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : results) ss += (r.values[c] - mean) * (r.values[c] - mean);
    stats[c].mean = mean;
    stats[c].se = results.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }
  return stats;
}

class RowBuilder {
 public:
  RowBuilder(const Context& ctx, const std::vector<CellStats>& stats, RateReport& report)
      : ctx_(ctx), stats_(stats), report_(report) {}

  ReportRow row(const std::string& scheme, int point, int q) const {
    const CellStats& st = stats_[static_cast<std::size_t>(ctx_.layout.at(scheme, point, q))];
    return make(scheme, point, q, st.mean, st.se);
  }

  ReportRow make(const std::string& scheme, int point, int q, double mean, double se) const {
    ReportRow r;
    r.scheme = scheme;
    if (ctx_.s.symmetric()) {
      r.snr_db = ctx_.s.snr_db[static_cast<std::size_t>(point)];
    } else {
      r.ptot_dbm = ctx_.s.ptot_dbm[static_cast<std::size_t>(point)];
    }
    r.q = q;
    r.mean_rate_nats = mean;
    r.stderr_nats = se;
    r.n_locations = ctx_.s.locations;
    r.n_fadings = ctx_.s.fadings;
    r.seed = ctx_.s.seed;
    return r;
  }

  // Emits per-q rows for a VCC/cacheless pair and the gain rows.
  void pair(const Series& se, const std::string& vcc, const std::string& base) {
    const bool fixed = ctx_.s.Q.size() == 1 && ctx_.s.Qp.size() == 1;
    for (int p = 0; p < static_cast<int>(ctx_.power.size()); ++p) {
      std::vector<ReportRow> vrows, brows;
      for (int q : se.q) vrows.push_back(row(vcc + se.suffix, p, q));
      for (int q : se.qp) brows.push_back(row(base + se.suffix, p, q));
      if (fixed) {
        vrows.front().gain = vrows.front().mean_rate_nats / brows.front().mean_rate_nats;
        push(vrows);
        push(brows);
        continue;
      }
      push(vrows);
      push(brows);
      const BestQ bv = optimize_q(vrows).front();
      const BestQ bb = optimize_q(brows).front();
      ReportRow vo = row(vcc + se.suffix, p, bv.q);
      vo.scheme = vcc + "_opt" + se.suffix;
      vo.gain_optimized = bv.mean / bb.mean;
      ReportRow bo = row(base + se.suffix, p, bb.q);
      bo.scheme = base + "_opt" + se.suffix;
      report_.rows.push_back(vo);
      report_.rows.push_back(bo);
    }
  }

  void single(const Series& se, const std::string& name, const std::vector<int>& qs) {
    for (int p = 0; p < static_cast<int>(ctx_.power.size()); ++p) {
      for (int q : qs) report_.rows.push_back(row(name + se.suffix, p, q));
    }
  }

  void push(const std::vector<ReportRow>& rows) { report_.rows.insert(report_.rows.end(), rows.begin(), rows.end()); }

 private:
  const Context& ctx_;
  const std::vector<CellStats>& stats_;
  RateReport& report_;
};

void check_zf_sandwich(const RateReport& report, const std::string& scheme, const std::string& suffix,
                       std::vector<std::string>& violations) {
  for (const ReportRow& sim : report.select(scheme + suffix)) {
    const auto match = [&](const std::string& name) -> const ReportRow* {
      for (const ReportRow& r : report.rows) {
        if (r.scheme == name + suffix && r.q == sim.q && r.ptot_dbm == sim.ptot_dbm && r.snr_db == sim.snr_db) return &r;
      }
      return nullptr;
    };
    const ReportRow* lo = match(scheme + "_lower");
    const ReportRow* hi = match(scheme + "_upper");
    if (!lo || !hi) continue;
    const double slack = 2.0 * sim.stderr_nats;
    if (sim.mean_rate_nats < lo->mean_rate_nats - slack || sim.mean_rate_nats > hi->mean_rate_nats + slack) {
      violations.push_back(scheme + suffix + " q=" + std::to_string(sim.q) + ": simulated mean " +
                           std::to_string(sim.mean_rate_nats) + " outside bound band [" +
                           std::to_string(lo->mean_rate_nats) + ", " + std::to_string(hi->mean_rate_nats) + "]");
    }
  }
}

std::string fmt_cell(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_cell(*v) : ""; }

}  // namespace

double ReportRow::mean_rate_bits() const { return mean_rate_nats / std::log(2.0); }

std::vector<ReportRow> RateReport::select(const std::string& scheme) const {
  std::vector<ReportRow> out;
  for (const auto& r : rows) {
    if (r.scheme == scheme) out.push_back(r);
  }
  return out;
}

const ReportRow* RateReport::find(const std::string& scheme, std::size_t point, int q) const {
  std::size_t seen = 0;
  std::optional<double> key;
  const auto& sweep = scenario.symmetric() ? scenario.snr_db : scenario.ptot_dbm;
  if (point < sweep.size()) key = sweep[point];
  for (const auto& r : rows) {
    if (r.scheme != scheme) continue;
    const std::optional<double> at = scenario.symmetric() ? r.snr_db : r.ptot_dbm;
    if (at == key && (q < 0 || r.q == q)) return &r;
    ++seen;
  }
  return nullptr;
}

RateReport run_scenario(const Scenario& scenario, int workers) {
  Context ctx = make_context(scenario);
  const int n_loc = scenario.locations;
  std::vector<LocationResult> results(static_cast<std::size_t>(n_loc));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_loc));
  std::atomic<int> next{0};
  auto work = [&] {
    for (;;) {
      const int loc = next.fetch_add(1);
      if (loc >= n_loc) return;
      try {
        results[static_cast<std::size_t>(loc)] = run_location(ctx, loc);
      } catch (...) {
        errors[static_cast<std::size_t>(loc)] = std::current_exception();
      }
    }
  };
  const int n_threads = std::clamp(workers, 1, n_loc);
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  RateReport report;
  report.scenario = scenario;
  for (int loc = 0; loc < n_loc; ++loc) {
    for (const auto& v : results[static_cast<std::size_t>(loc)].violations) {
      report.violations.push_back("location " + std::to_string(loc) + ": " + v);
    }
  }
  const std::vector<CellStats> stats = reduce(results, ctx.layout.size());
  RowBuilder rows(ctx, stats, report);

  for (const Series& se : ctx.series) {
    if (ctx.bdmrc) rows.pair(se, "vcc_bdmrc", "cacheless_bdmrc");
    if (ctx.asymptotic) rows.single(se, "vcc_bdmrc_asymptotic", se.q);
    if (ctx.zf) {
      rows.pair(se, "vcc_zf", "cacheless_zf");
      rows.pair(se, "vcc_zf_inst", "cacheless_zf_inst");
      rows.single(se, "vcc_zf_lower", se.q);
      rows.single(se, "vcc_zf_upper", se.q);
      rows.single(se, "cacheless_zf_lower", se.qp);
      rows.single(se, "cacheless_zf_upper", se.qp);
    }
    if (ctx.csi) {
      rows.pair(se, "vcc_zf_perfect", "cacheless_zf_perfect");
      rows.pair(se, "vcc_zf_csit", "cacheless_zf_csit");
      for (double v : scenario.csir_var) rows.pair(se, "vcc_zf_" + csir_tag(v), "cacheless_zf_" + csir_tag(v));
    }
    if (ctx.msv) {
      const int L = scenario.L;
      for (int p = 0; p < static_cast<int>(ctx.power.size()); ++p) {
        std::vector<ReportRow> base, modified;
        for (int q : se.qp) base.push_back(rows.row("cacheless_bdmrc" + se.suffix, p, q));
        for (int quc = 0; quc <= L - 1; ++quc) modified.push_back(rows.row("msv_modified" + se.suffix, p, quc));
        const BestQ bb = optimize_q(base).front();
        ReportRow original = modified.back();
        original.scheme = "msv" + se.suffix;
        original.gain = original.mean_rate_nats / bb.mean;
        const BestQ bm = optimize_q(modified).front();
        ReportRow best = modified[static_cast<std::size_t>(bm.q)];
        best.scheme = "msv_modified_opt" + se.suffix;
        best.gain_optimized = bm.mean / bb.mean;
        if (best.mean_rate_nats < original.mean_rate_nats) {
          report.violations.push_back("modified MSV below original MSV");
        }
        report.rows.push_back(original);
        rows.push(modified);
        report.rows.push_back(best);
        if (!ctx.bdmrc) {
          rows.push(base);
          ReportRow bo = rows.row("cacheless_bdmrc" + se.suffix, p, bb.q);
          bo.scheme = "cacheless_bdmrc_opt" + se.suffix;
          report.rows.push_back(bo);
        }
      }
      ReportRow limit;
      limit.scheme = "msv_limit" + se.suffix;
      limit.q = L - 1;
      limit.gain = msv_high_snr_gain_limit(L, scenario.lambda_gamma());
      limit.n_locations = 0;
      limit.n_fadings = 0;
      limit.seed = scenario.seed;
      report.rows.push_back(limit);
    }
    if (ctx.zf) {
      check_zf_sandwich(report, "vcc_zf", se.suffix, report.violations);
      check_zf_sandwich(report, "cacheless_zf", se.suffix, report.violations);
    }
  }
  return report;
}

std::vector<BestQ> optimize_q(const std::vector<ReportRow>& rows) {
  std::vector<BestQ> out;
  std::vector<std::pair<std::optional<double>, std::optional<double>>> keys;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.ptot_dbm, r.snr_db);
    const auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) {
      keys.push_back(key);
      out.push_back({r.q, r.mean_rate_nats});
      continue;
    }
    BestQ& best = out[static_cast<std::size_t>(it - keys.begin())];
    if (r.mean_rate_nats > best.mean || (r.mean_rate_nats == best.mean && r.q < best.q)) best = {r.q, r.mean_rate_nats};
  }
  return out;
}

std::vector<double> effective_gain(const std::vector<ReportRow>& vcc, const std::vector<ReportRow>& baseline,
                                   GainMode mode) {
  auto grid = [](const std::vector<ReportRow>& rows) {
    std::vector<std::pair<std::optional<double>, std::optional<double>>> keys;
    for (const auto& r : rows) {
      const auto key = std::make_pair(r.ptot_dbm, r.snr_db);
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    return keys;
  };
  const auto gv = grid(vcc);
  const auto gb = grid(baseline);
  if (gv != gb) throw Error(ErrorCode::kGridMismatch, "effective_gain: sweep grids differ");
  if (mode == GainMode::kFixed && (vcc.size() != gv.size() || baseline.size() != gb.size())) {
    throw Error(ErrorCode::kGridMismatch, "effective_gain: fixed mode needs one row per sweep point");
  }
  const auto bv = optimize_q(vcc);
  const auto bb = optimize_q(baseline);
  std::vector<double> out;
  for (std::size_t i = 0; i < bv.size(); ++i) out.push_back(bv[i].mean / bb[i].mean);
  return out;
}

std::string csv_header() {
  return "scheme,ptot_dbm,snr_db,q,mean_rate_nats,mean_rate_bits,stderr,gain,gain_optimized,n_locations,n_fadings,seed";
}

std::string to_csv(const RateReport& report) {
  std::ostringstream os;
  os << echo(report.scenario) << csv_header() << '\n';
  for (const auto& r : report.rows) {
    os << r.scheme << ',' << fmt_opt(r.ptot_dbm) << ',' << fmt_opt(r.snr_db) << ',' << r.q << ','
       << (r.n_locations ? fmt_cell(r.mean_rate_nats) : "") << ',' << (r.n_locations ? fmt_cell(r.mean_rate_bits()) : "")
       << ',' << (r.n_locations ? fmt_cell(r.stderr_nats) : "") << ',' << fmt_opt(r.gain) << ','
       << fmt_opt(r.gain_optimized) << ',' << r.n_locations << ',' << r.n_fadings << ',' << r.seed << '\n';
  }
  return os.str();
}

std::string summary(const RateReport& report) {
  std::ostringstream os;
  const Scenario& s = report.scenario;
  os << "recipe " << s.recipe << ": geometry=" << s.geometry << " L=" << s.L << " G=" << s.G()
     << " locations=" << s.locations << " fadings=" << s.fadings << " seed=" << s.seed << '\n';
  for (const auto& r : report.rows) {
    const bool per_q = r.scheme.find("_opt") == std::string::npos && !r.gain && r.scheme.rfind("msv_limit", 0) != 0;
    const bool band = r.scheme.find("_lower") != std::string::npos || r.scheme.find("_upper") != std::string::npos;
    if (per_q && !band && !(s.Q.size() == 1 && s.Qp.size() == 1) && r.scheme.find("asymptotic") == std::string::npos) {
      continue;  // per-q detail stays in the CSV
    }
    char line[256];
    const std::string where = r.ptot_dbm ? fmt_cell(*r.ptot_dbm) + " dBm" : r.snr_db ? fmt_cell(*r.snr_db) + " dB" : "-";
    std::snprintf(line, sizeof(line), "  %-34s %10s  q=%-3d", r.scheme.c_str(), where.c_str(), r.q);
    os << line;
    if (r.n_locations) {
      std::snprintf(line, sizeof(line), "  rate=%9.4f bit/s/Hz (se %.4f)", r.mean_rate_bits(), r.stderr_nats / std::log(2.0));
      os << line;
    }
    if (r.gain) os << "  gain=" << fmt_cell(*r.gain);
    if (r.gain_optimized) os << "  gain*=" << fmt_cell(*r.gain_optimized);
    os << '\n';
  }
  if (report.violations.empty()) {
    os << "invariants: all held\n";
  } else {
    os << "invariants: " << report.violations.size() << " violation(s)\n";
    for (const auto& v : report.violations) os << "  " << v << '\n';
  }
  return os.str();
}

}  // namespace vcc
