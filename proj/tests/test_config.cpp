#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vcc/config.hpp"
#include "vcc/error.hpp"

using namespace vcc;

namespace {

Error error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  return Error(ErrorCode::kInvariantViolation, "no error");
}

}  // namespace

TEST_CASE("fig7 preset") {
  const Scenario s = recipe("fig7");
  CHECK(s.geometry == "micro");
  CHECK(s.L == 32);
  CHECK(s.M == std::vector<int>{2});
  CHECK(s.G() == 6);
  CHECK(s.Q.empty());
  CHECK(s.Qp.empty());
  CHECK(std::find(s.ptot_dbm.begin(), s.ptot_dbm.end(), 33.0) != s.ptot_dbm.end());
}

TEST_CASE("fig3 preset") {
  const Scenario s = recipe("fig3");
  CHECK(s.geometry == "macro");
  CHECK(s.L == 24);
  CHECK(s.M == std::vector<int>{4});
  CHECK(s.G() == 6);
  CHECK(s.Q == std::vector<int>{4});
  CHECK(s.Qp == std::vector<int>{4});
}

TEST_CASE("malformed values and unknown keys name the field") {
  Scenario s = recipe("fig3");
  const Error bad = error_of([&] { apply_setting(s, "L", "banana"); });
  CHECK(bad.code() == ErrorCode::kTypeMismatch);
  CHECK(std::string(bad.what()).find("'L'") != std::string::npos);
  const Error unknown = error_of([&] { apply_setting(s, "colour", "blue"); });
  CHECK(unknown.code() == ErrorCode::kUnknownKey);
  CHECK(std::string(unknown.what()).find("colour") != std::string::npos);
  const Error range = error_of([&] { apply_setting(s, "Q", "3,x"); });
  CHECK(range.code() == ErrorCode::kTypeMismatch);
}

TEST_CASE("infeasible scenarios name the field") {
  Scenario s = recipe("fig4");
  apply_setting(s, "Q", "9");
  const Error e = error_of([&] { validate(s); });
  CHECK(e.code() == ErrorCode::kInfeasibleDimension);
  CHECK(std::string(e.what()).find("Q") != std::string::npos);
  Scenario t = recipe("fig4");
  apply_setting(t, "schemes", "bdmrc,telepathy");
  CHECK(error_of([&] { validate(t); }).code() == ErrorCode::kInvalidConfiguration);
  Scenario u = recipe("fig4");
  apply_setting(u, "gamma", "1/4");
  CHECK(error_of([&] { validate(u); }).code() == ErrorCode::kInvalidConfiguration);
}

TEST_CASE("list values and ranges") {
  Scenario s;
  apply_setting(s, "ptot_dbm", "20:30:5");
  CHECK(s.ptot_dbm == std::vector<double>{20.0, 25.0, 30.0});
  apply_setting(s, "M", "2,4,12");
  CHECK(s.M == std::vector<int>{2, 4, 12});
  apply_setting(s, "Q", "opt");
  CHECK(s.Q.empty());
  apply_setting(s, "gamma", "2/4");
  CHECK(s.gamma == Fraction{1, 2});
}

TEST_CASE("echo round-trips for every recipe") {
  for (const auto& name : recipe_names()) {
    const Scenario s = recipe(name);
    CHECK_NOTHROW(validate(s));
    CHECK(parse_echo(echo(s)) == s);
  }
  Scenario odd = recipe("fig9");
  apply_setting(odd, "csir_var", "0.1,0.0003");
  apply_setting(odd, "bandwidth_hz", "1.25e7");
  apply_setting(odd, "seed", "18446744073709551615");
  CHECK(parse_echo(echo(odd)) == odd);
}

TEST_CASE("config files apply in order and flags override") {
  const std::string path = "test_config_tmp.cfg";
  {
    std::ofstream f(path);
    f << "# comment\nrecipe=fig4\n\nL=40\nlocations = 12\n";
  }
  Scenario s;
  apply_config_file(s, path);
  CHECK(s.recipe == "fig4");
  CHECK(s.L == 40);
  CHECK(s.locations == 12);
  apply_setting(s, "L", "32");
  CHECK(s.L == 32);
  std::remove(path.c_str());
  CHECK(error_of([&] { apply_config_file(s, "does/not/exist.cfg"); }).code() == ErrorCode::kIo);
}

TEST_CASE("recipe listing") {
  const std::string text = list_recipes();
  for (const char* name : {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"}) {
    CHECK(text.find(std::string(name) + " ") != std::string::npos);
  }
  CHECK(text.find("fig4  Macro, L=32, M=4, Q=2, Q'=8, G=4") != std::string::npos);
  const auto fig8 = text.find("fig8");
  CHECK(text.substr(fig8, text.find('\n', fig8) - fig8).find("0.01") != std::string::npos);
  CHECK(text == list_recipes());
  CHECK(error_of([] { recipe("fig1"); }).code() == ErrorCode::kInvalidConfiguration);
}
