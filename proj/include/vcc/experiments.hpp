#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vcc/config.hpp"

namespace vcc {

// One CSV line. Missing optional values print as empty cells.
struct ReportRow {
  std::string scheme;
  std::optional<double> ptot_dbm;
  std::optional<double> snr_db;
  int q = 0;
  double mean_rate_nats = 0.0;
  double stderr_nats = 0.0;
  std::optional<double> gain;
  std::optional<double> gain_optimized;
  int n_locations = 0;
  int n_fadings = 0;
  std::uint64_t seed = 0;

  double mean_rate_bits() const;
};

struct RateReport {
  Scenario scenario;
  std::vector<ReportRow> rows;
  std::vector<std::string> violations;

  bool invariants_ok() const { return violations.empty(); }
  // Rows of one scheme in file order.
  std::vector<ReportRow> select(const std::string& scheme) const;
  const ReportRow* find(const std::string& scheme, std::size_t point, int q = -1) const;
};

// Runs every scheme named in the scenario. Location draws are distributed
// over `workers` threads; the output does not depend on the worker count.
RateReport run_scenario(const Scenario& scenario, int workers = 1);

enum class GainMode { kFixed, kOptimized };

// Ratio of mean rates per sweep point. In optimised mode each side may hold
// several rows per point (one per multiplexing value) and the ratio of the
// per-point maxima is returned. Throws kGridMismatch if the sweeps differ.
std::vector<double> effective_gain(const std::vector<ReportRow>& vcc, const std::vector<ReportRow>& baseline,
                                   GainMode mode);

struct BestQ {
  int q = 0;
  double mean = 0.0;
};
// Per sweep point, the row with the largest mean; ties go to the smaller q.
std::vector<BestQ> optimize_q(const std::vector<ReportRow>& rows);

std::string csv_header();
std::string to_csv(const RateReport& report);
std::string summary(const RateReport& report);

}  // namespace vcc
