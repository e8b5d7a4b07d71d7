#include "vcc/channel.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "vcc/error.hpp"

namespace vcc {

CellGeometry CellGeometry::macro() { return {35.0, 500.0, 3.76, std::pow(10.0, -3.53)}; }

CellGeometry CellGeometry::micro() { return {10.0, 100.0, 3.0, std::pow(10.0, -3.7)}; }

CellGeometry CellGeometry::by_name(std::string_view name) {
  if (name == "macro") return macro();
  if (name == "micro") return micro();
  throw Error(ErrorCode::kInvalidArgument, "unknown geometry preset '" + std::string(name) + "'");
}

void CellGeometry::validate() const {
  if (!(inner_radius_m > 0.0) || !(outer_radius_m > inner_radius_m)) {
    throw Error(ErrorCode::kInvalidConfiguration, "geometry: need 0 < inner_radius_m < outer_radius_m");
  }
  if (!(pathloss_exponent > 2.0)) {
    throw Error(ErrorCode::kInvalidConfiguration, "geometry: pathloss_exponent must exceed 2");
  }
  if (!(l0 > 0.0)) throw Error(ErrorCode::kInvalidConfiguration, "geometry: l0 must be positive");
}

double CellGeometry::beta(double distance_m) const { return l0 * std::pow(distance_m, -pathloss_exponent); }

LinkGain link_gain_at(const CellGeometry& geometry, double distance_m) {
  return {distance_m, geometry.beta(distance_m)};
}

LinkGain sample_user_position(const CellGeometry& geometry, Substream& rng) {
  const double a2 = geometry.inner_radius_m * geometry.inner_radius_m;
  const double b2 = geometry.outer_radius_m * geometry.outer_radius_m;
  return link_gain_at(geometry, std::sqrt(rng.uniform(a2, b2)));
}

CMatrix sample_user_channel(int L, int M, double beta, Substream& rng) {
  CMatrix h(L, M);
  for (int j = 0; j < M; ++j) {
    for (int i = 0; i < L; ++i) h(i, j) = rng.complex_normal(beta);
  }
  return h;
}

int GroupChannel::total_antennas() const {
  int total = 0;
  for (const auto& u : users) total += static_cast<int>(u.h.cols());
  return total;
}

CMatrix GroupChannel::stacked() const {
  CMatrix out(L, total_antennas());
  Eigen::Index col = 0;
  for (const auto& u : users) {
    out.middleCols(col, u.h.cols()) = u.h;
    col += u.h.cols();
  }
  return out;
}

CMatrix GroupChannel::others(int k) const {
  CMatrix out(L, total_antennas() - antennas(k));
  Eigen::Index col = 0;
  for (std::size_t j = 0; j < users.size(); ++j) {
    if (static_cast<int>(j) == k) continue;
    out.middleCols(col, users[j].h.cols()) = users[j].h;
    col += users[j].h.cols();
  }
  return out;
}

void check_group_dimensions(int L, const std::vector<int>& antenna_counts) {
  const int total = std::accumulate(antenna_counts.begin(), antenna_counts.end(), 0);
  if (L < total) {
    throw Error(ErrorCode::kInfeasibleDimension,
                "group needs " + std::to_string(total) + " receive antennas but L=" + std::to_string(L));
  }
}

GroupChannel sample_group_channel(int L, const std::vector<int>& antenna_counts,
                                  const std::vector<double>& betas, Substream& rng) {
  if (antenna_counts.size() != betas.size()) {
    throw Error(ErrorCode::kInvalidArgument, "sample_group_channel: antenna/beta list sizes differ");
  }
  check_group_dimensions(L, antenna_counts);
  GroupChannel group;
  group.L = L;
  for (std::size_t k = 0; k < betas.size(); ++k) {
    group.users.push_back({sample_user_channel(L, antenna_counts[k], betas[k], rng), betas[k]});
  }
  return group;
}

CsiOverhead csi_overhead(int T, int Theta, long total_receive_antennas) {
  if (T <= 0 || Theta < 0 || total_receive_antennas < 0) {
    throw Error(ErrorCode::kInvalidArgument, "csi_overhead: need T > 0, Theta >= 0");
  }
  const double xi = 1.0 - static_cast<double>(Theta) * static_cast<double>(total_receive_antennas) / T;
  if (xi < 0.0) {
    throw Error(ErrorCode::kOverheadExceedsCoherence,
                "pilot overhead " + std::to_string(Theta * total_receive_antennas) +
                    " symbols exceeds coherence block T=" + std::to_string(T));
  }
  return {T, Theta, xi};
}

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts * 1000.0); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double noise_power_watts(double density_dbm_per_hz, double bandwidth_hz) {
  return dbm_to_watts(density_dbm_per_hz) * bandwidth_hz;
}

CsitSample corrupt_csit(const CVector& h, double error_variance, Substream& rng, double channel_variance) {
  if (error_variance < 0.0) throw Error(ErrorCode::kInvalidArgument, "corrupt_csit: negative error variance");
  if (error_variance > channel_variance) {
    throw Error(ErrorCode::kInvalidArgument, "corrupt_csit: error variance exceeds channel variance");
  }
  CsitSample out;
  if (error_variance == 0.0) {
    out.h_tilde = CVector::Zero(h.size());
    out.h_hat = h;
    return out;
  }
  const double ratio = error_variance / channel_variance;
  const double residual = error_variance * (1.0 - ratio);
  out.h_tilde.resize(h.size());
  for (Eigen::Index i = 0; i < h.size(); ++i) out.h_tilde(i) = ratio * h(i) + rng.complex_normal(residual);
  out.h_hat = h - out.h_tilde;
  return out;
}

CouplingSample corrupt_coupling(Complex a, double error_variance, Substream& rng) {
  if (error_variance < 0.0) throw Error(ErrorCode::kInvalidArgument, "corrupt_coupling: negative error variance");
  if (error_variance == 0.0) return {a, Complex(0.0, 0.0)};
  const Complex tilde = rng.complex_normal(error_variance);
  return {a - tilde, tilde};
}

}  // namespace vcc
