#include "vcc/vcc.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include "vcc/caching.hpp"
#include "vcc/config.hpp"
#include "vcc/error.hpp"
#include "vcc/experiments.hpp"

struct vcc_config {
  vcc::Scenario scenario;
};

struct vcc_report {
  vcc::RateReport report;
};

namespace {

thread_local std::string g_last_error;

vcc_status fail(vcc_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <class Fn>
vcc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return VCC_OK;
  } catch (const vcc::Error& e) {
    return fail(static_cast<vcc_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VCC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VCC_ERR_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw vcc::Error(vcc::ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
}

double or_nan(const std::optional<double>& v) { return v ? *v : std::numeric_limits<double>::quiet_NaN(); }

vcc::PlacementPlan plan_for(int lambda, const char* gamma, int users) {
  require(gamma, "gamma");
  return vcc::build_placement(lambda, vcc::Fraction::parse(gamma), users, users);
}

}  // namespace

extern "C" {

const char* vcc_status_name(vcc_status status) {
  switch (status) {
    case VCC_OK:
      return "ok";
    case VCC_ERR_INTERNAL:
      return "internal";
    default:
      if (status >= VCC_ERR_INVALID_ARGUMENT && status <= VCC_ERR_INVARIANT_VIOLATION) {
        return vcc::to_string(static_cast<vcc::ErrorCode>(status));
      }
      return "unknown";
  }
}

const char* vcc_last_error(void) { return g_last_error.c_str(); }

void vcc_string_free(char* s) { std::free(s); }

vcc_status vcc_config_create(vcc_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new vcc_config();
  });
}

vcc_status vcc_config_load_recipe(vcc_config* cfg, const char* name) {
  return guarded([&] {
    require(cfg, "config");
    require(name, "name");
    cfg->scenario = vcc::recipe(name);
  });
}

vcc_status vcc_config_load_file(vcc_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg, "config");
    require(path, "path");
    vcc::apply_config_file(cfg->scenario, path);
  });
}

vcc_status vcc_config_set(vcc_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    require(value, "value");
    vcc::apply_setting(cfg->scenario, key, value);
  });
}

vcc_status vcc_config_validate(const vcc_config* cfg) {
  return guarded([&] {
    require(cfg, "config");
    vcc::validate(cfg->scenario);
  });
}

vcc_status vcc_config_echo(const vcc_config* cfg, char** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = dup_string(vcc::echo(cfg->scenario));
  });
}

void vcc_config_free(vcc_config* cfg) { delete cfg; }

vcc_status vcc_list_recipes(char** out) {
  return guarded([&] {
    require(out, "out");
    *out = dup_string(vcc::list_recipes());
  });
}

vcc_status vcc_run(const vcc_config* cfg, int workers, vcc_report** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    auto* r = new vcc_report();
    try {
      r->report = vcc::run_scenario(cfg->scenario, workers);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

vcc_status vcc_report_csv(const vcc_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = dup_string(vcc::to_csv(report->report));
  });
}

vcc_status vcc_report_write_csv(const vcc_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    require(path, "path");
    std::ofstream os(path);
    if (!os) throw vcc::Error(vcc::ErrorCode::kIo, std::string("cannot open ") + path + " for writing");
    os << vcc::to_csv(report->report);
    if (!os) throw vcc::Error(vcc::ErrorCode::kIo, std::string("write failed: ") + path);
  });
}

vcc_status vcc_report_summary(const vcc_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = dup_string(vcc::summary(report->report));
  });
}

int vcc_report_invariants_ok(const vcc_report* report) { return report && report->report.invariants_ok() ? 1 : 0; }

size_t vcc_report_violation_count(const vcc_report* report) { return report ? report->report.violations.size() : 0; }

const char* vcc_report_violation(const vcc_report* report, size_t index) {
  if (!report || index >= report->report.violations.size()) return nullptr;
  return report->report.violations[index].c_str();
}

size_t vcc_report_row_count(const vcc_report* report) { return report ? report->report.rows.size() : 0; }

vcc_status vcc_report_row(const vcc_report* report, size_t index, vcc_row* out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    if (index >= report->report.rows.size()) {
      throw vcc::Error(vcc::ErrorCode::kInvalidArgument, "row index " + std::to_string(index) + " out of range");
    }
    const vcc::ReportRow& r = report->report.rows[index];
    out->scheme = r.scheme.c_str();
    out->ptot_dbm = or_nan(r.ptot_dbm);
    out->snr_db = or_nan(r.snr_db);
    out->q = r.q;
    out->mean_rate_nats = r.mean_rate_nats;
    out->stderr_nats = r.stderr_nats;
    out->gain = or_nan(r.gain);
    out->gain_optimized = or_nan(r.gain_optimized);
    out->n_locations = r.n_locations;
    out->n_fadings = r.n_fadings;
  });
}

void vcc_report_free(vcc_report* report) { delete report; }

vcc_status vcc_schedule_dump(int lambda, const char* gamma, int users, int q, char** out) {
  return guarded([&] {
    require(out, "out");
    const vcc::PlacementPlan plan = plan_for(lambda, gamma, users);
    const vcc::DeliverySchedule schedule = vcc::build_schedule(plan, q, vcc::default_demands(plan));
    std::ostringstream os;
    vcc::write_schedule(os, schedule);
    *out = dup_string(os.str());
  });
}

vcc_status vcc_schedule_verify(int lambda, const char* gamma, int users, const char* schedule_text, int* ok,
                               char** report) {
  return guarded([&] {
    require(schedule_text, "schedule_text");
    require(ok, "ok");
    const vcc::PlacementPlan plan = plan_for(lambda, gamma, users);
    std::istringstream is(schedule_text);
    const vcc::DeliverySchedule schedule = vcc::read_schedule(is);
    const vcc::DeliveryReport result = vcc::verify_delivery(schedule, plan, vcc::default_demands(plan));
    *ok = result.ok ? 1 : 0;
    if (report) {
      std::ostringstream os;
      os << (result.ok ? "valid" : "invalid") << ": " << result.violation_count << " violation(s)\n";
      for (const auto& v : result.violations) os << "  " << v << '\n';
      *report = dup_string(os.str());
    }
  });
}

}  // extern "C"
