// Exercises libvcc through its C header only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "vcc/vcc.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  vcc_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("configure, run and read a report") {
  vcc_config* cfg = nullptr;
  REQUIRE(vcc_config_create(&cfg) == VCC_OK);
  REQUIRE(vcc_config_load_recipe(cfg, "fig4") == VCC_OK);
  REQUIRE(vcc_config_set(cfg, "locations", "3") == VCC_OK);
  REQUIRE(vcc_config_set(cfg, "fadings", "2") == VCC_OK);
  CHECK(vcc_config_validate(cfg) == VCC_OK);

  char* text = nullptr;
  REQUIRE(vcc_config_echo(cfg, &text) == VCC_OK);
  CHECK(take(text).find("# locations=3") != std::string::npos);

  vcc_report* report = nullptr;
  REQUIRE(vcc_run(cfg, 2, &report) == VCC_OK);
  CHECK(vcc_report_invariants_ok(report) == 1);
  CHECK(vcc_report_violation_count(report) == 0);
  CHECK(vcc_report_violation(report, 0) == nullptr);
  REQUIRE(vcc_report_row_count(report) > 0);

  vcc_row row;
  REQUIRE(vcc_report_row(report, 0, &row) == VCC_OK);
  CHECK(std::string(row.scheme) == "vcc_bdmrc");
  CHECK(row.q == 2);
  CHECK(std::isnan(row.snr_db));
  CHECK(row.gain > 1.0);
  CHECK(row.n_locations == 3);
  CHECK(vcc_report_row(report, 100000, &row) == VCC_ERR_INVALID_ARGUMENT);

  REQUIRE(vcc_report_csv(report, &text) == VCC_OK);
  CHECK(take(text).find("scheme,ptot_dbm") != std::string::npos);
  REQUIRE(vcc_report_summary(report, &text) == VCC_OK);
  CHECK(take(text).find("invariants: all held") != std::string::npos);
  CHECK(vcc_report_write_csv(report, "/nonexistent-dir/x.csv") == VCC_ERR_IO);

  vcc_report_free(report);
  vcc_config_free(cfg);
}

TEST_CASE("errors carry a status and a message") {
  vcc_config* cfg = nullptr;
  REQUIRE(vcc_config_create(&cfg) == VCC_OK);
  CHECK(vcc_config_set(cfg, "L", "banana") == VCC_ERR_TYPE_MISMATCH);
  CHECK(std::string(vcc_last_error()).find("'L'") != std::string::npos);
  CHECK(std::string(vcc_status_name(VCC_ERR_TYPE_MISMATCH)) == "type-mismatch");
  CHECK(vcc_config_set(cfg, "nope", "1") == VCC_ERR_UNKNOWN_KEY);
  CHECK(vcc_config_load_recipe(cfg, "fig1") == VCC_ERR_INVALID_CONFIGURATION);
  CHECK(vcc_config_set(cfg, nullptr, "1") == VCC_ERR_INVALID_ARGUMENT);
  REQUIRE(vcc_config_load_recipe(cfg, "fig4") == VCC_OK);
  CHECK(vcc_config_set(cfg, "Q", "9") == VCC_OK);
  vcc_report* report = nullptr;
  CHECK(vcc_run(cfg, 1, &report) == VCC_ERR_INFEASIBLE_DIMENSION);
  CHECK(report == nullptr);
  CHECK(std::string(vcc_status_name(VCC_OK)) == "ok");
  vcc_config_free(cfg);
  vcc_config_free(nullptr);
  vcc_report_free(nullptr);
}

TEST_CASE("recipes and schedules") {
  char* text = nullptr;
  REQUIRE(vcc_list_recipes(&text) == VCC_OK);
  CHECK(take(text).find("fig9") != std::string::npos);

  REQUIRE(vcc_schedule_dump(3, "1/3", 6, 1, &text) == VCC_OK);
  std::string schedule = take(text);
  int ok = 0;
  char* why = nullptr;
  REQUIRE(vcc_schedule_verify(3, "1/3", 6, schedule.c_str(), &ok, &why) == VCC_OK);
  CHECK(ok == 1);
  take(why);
  schedule.erase(0, schedule.find('\n') + 1);
  REQUIRE(vcc_schedule_verify(3, "1/3", 6, schedule.c_str(), &ok, &why) == VCC_OK);
  CHECK(ok == 0);
  CHECK(take(why).find("never receives") != std::string::npos);
  CHECK(vcc_schedule_dump(3, "1/2", 6, 1, &text) == VCC_ERR_INVALID_CONFIGURATION);
}
