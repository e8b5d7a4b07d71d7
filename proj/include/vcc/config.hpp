#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vcc/caching.hpp"

namespace vcc {

// Everything a Monte Carlo run needs. Powers are dBm here and converted to
// watts inside the experiments module.
struct Scenario {
  std::string recipe = "custom";
  std::string geometry = "macro";  // macro | micro | symmetric
  int L = 32;
  int lambda = 10;
  Fraction gamma{1, 2};
  std::vector<int> M{4};    // one series per entry
  std::vector<int> Q;       // empty: optimise over [1, q cap]
  std::vector<int> Qp;      // cacheless multiplexing; empty: optimise
  std::vector<double> ptot_dbm;  // pathloss geometries
  std::vector<double> snr_db;    // symmetric geometry, SNR = P_tot / N0
  int T = 15000;
  int theta = 10;
  double noise_dbm_hz = -174.0;
  double bandwidth_hz = 20e6;
  std::vector<std::string> schemes{"bdmrc"};  // bdmrc zf asymptotic msv csi
  double csit_var = 0.0;
  std::vector<double> csir_var;
  int locations = 1000;
  int fadings = 20;
  std::uint64_t seed = 1;
  int B = 16;

  int lambda_gamma() const { return static_cast<int>(lambda * gamma.num / gamma.den); }
  int G() const { return lambda_gamma() + 1; }
  bool symmetric() const { return geometry == "symmetric"; }
  bool has_scheme(const std::string& s) const;
  std::size_t n_points() const { return symmetric() ? snr_db.size() : ptot_dbm.size(); }
  // Largest multiplexing value run for M antennas: min(q_max, L / M).
  int q_cap(int m) const;
  std::vector<int> q_values(int m) const;
  std::vector<int> qp_values(int m) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Throws kInvalidConfiguration / kInfeasibleDimension naming the field.
void validate(const Scenario& s);

// Applies one key=value assignment. Unknown keys raise kUnknownKey and
// malformed values kTypeMismatch; both messages name the key.
void apply_setting(Scenario& s, const std::string& key, const std::string& value);

// Flat "key=value" lines; blank lines and lines starting with '#' are skipped
// unless they carry "# key=value" (the echo header format).
void apply_config_text(Scenario& s, std::istream& in, bool accept_echo_comments = false);
void apply_config_file(Scenario& s, const std::string& path);

// Canonical "key=value" lines in a fixed order, each prefixed with "# ".
std::string echo(const Scenario& s);
// Inverse of echo(). Reading stops at the first line not starting with '#'.
Scenario parse_echo(const std::string& text);

std::vector<std::string> recipe_names();
Scenario recipe(const std::string& name);
std::string list_recipes();

}  // namespace vcc
