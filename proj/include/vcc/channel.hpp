#pragma once

#include <string_view>
#include <vector>

#include "vcc/linalg.hpp"
#include "vcc/rng.hpp"

namespace vcc {

// Annular cell with a power-law pathloss beta(r) = l0 * r^(-eta).
struct CellGeometry {
  double inner_radius_m = 35.0;
  double outer_radius_m = 500.0;
  double pathloss_exponent = 3.76;
  double l0 = 0.0;

  static CellGeometry macro();
  static CellGeometry micro();
  // "macro" or "micro"; anything else is kInvalidArgument.
  static CellGeometry by_name(std::string_view name);

  void validate() const;
  double beta(double distance_m) const;
};

struct LinkGain {
  double distance_m = 0.0;
  double beta = 0.0;
};

LinkGain link_gain_at(const CellGeometry& geometry, double distance_m);

// Distance with density proportional to r on [inner, outer].
LinkGain sample_user_position(const CellGeometry& geometry, Substream& rng);

// L x M matrix with i.i.d. CN(0, beta) entries, drawn column by column.
CMatrix sample_user_channel(int L, int M, double beta, Substream& rng);

struct UserChannel {
  CMatrix h;  // L x M_k
  double beta = 1.0;
};

struct GroupChannel {
  int L = 0;
  std::vector<UserChannel> users;

  int total_antennas() const;
  int antennas(int k) const { return static_cast<int>(users[static_cast<std::size_t>(k)].h.cols()); }
  // [H_1, ..., H_Q], L x M_psi.
  CMatrix stacked() const;
  // Stack of every user except k, L x (M_psi - M_k).
  CMatrix others(int k) const;
};

// Throws kInfeasibleDimension when L < sum(antenna_counts).
GroupChannel sample_group_channel(int L, const std::vector<int>& antenna_counts,
                                  const std::vector<double>& betas, Substream& rng);
// Same check, for channels assembled by the caller.
void check_group_dimensions(int L, const std::vector<int>& antenna_counts);

struct CsiOverhead {
  int T_coherence_symbols = 0;
  int Theta_pilot_symbols = 0;
  double xi = 1.0;
};

// xi = 1 - Theta * total_receive_antennas / T. Negative xi is an error.
CsiOverhead csi_overhead(int T, int Theta, long total_receive_antennas);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
// Thermal noise density integrated over the bandwidth, in watts.
double noise_power_watts(double density_dbm_per_hz = -174.0, double bandwidth_hz = 20e6);

struct CsitSample {
  CVector h_hat;
  CVector h_tilde;
};

// Splits a true channel into estimate and error, h = h_hat + h_tilde, where
// h_tilde ~ CN(0, error_variance) is independent of h_hat. The split is drawn
// from the conditional law given h, which needs the prior variance of h.
CsitSample corrupt_csit(const CVector& h, double error_variance, Substream& rng,
                        double channel_variance = 1.0);

struct CouplingSample {
  Complex a_hat;
  Complex a_tilde;
};

// a_tilde ~ CN(0, error_variance), a_hat = a - a_tilde.
CouplingSample corrupt_coupling(Complex a, double error_variance, Substream& rng);

}  // namespace vcc
