// Command-line front end. Links only the C interface of libvcc.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vcc/vcc.h"

namespace {

constexpr int kExitInvariant = 1;
constexpr int kExitError = 2;

int report_error(vcc_status status) {
  std::cerr << "error [" << vcc_status_name(status) << "]: " << vcc_last_error() << '\n';
  return kExitError;
}

struct Owned {
  char* s = nullptr;
  ~Owned() { vcc_string_free(s); }
};

struct RunOptions {
  std::string recipe;
  std::vector<std::string> config_files;
  std::vector<std::string> settings;
  std::string out;
  std::string seed;
  std::string locations;
  std::string fadings;
  int workers = 1;
  bool quiet = false;
};

int build_config(const RunOptions& opt, vcc_config** cfg) {
  vcc_status st = vcc_config_create(cfg);
  if (st != VCC_OK) return report_error(st);
  if (!opt.recipe.empty() && (st = vcc_config_load_recipe(*cfg, opt.recipe.c_str())) != VCC_OK) return report_error(st);
  for (const auto& path : opt.config_files) {
    if ((st = vcc_config_load_file(*cfg, path.c_str())) != VCC_OK) return report_error(st);
  }
  std::vector<std::pair<std::string, std::string>> kv;
  for (const auto& s : opt.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error [invalid-argument]: --set expects key=value, got '" << s << "'\n";
      return kExitError;
    }
    kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (!opt.seed.empty()) kv.emplace_back("seed", opt.seed);
  if (!opt.locations.empty()) kv.emplace_back("locations", opt.locations);
  if (!opt.fadings.empty()) kv.emplace_back("fadings", opt.fadings);
  for (const auto& [k, v] : kv) {
    if ((st = vcc_config_set(*cfg, k.c_str(), v.c_str())) != VCC_OK) return report_error(st);
  }
  if ((st = vcc_config_validate(*cfg)) != VCC_OK) return report_error(st);
  return 0;
}

int cmd_run(const RunOptions& opt) {
  vcc_config* cfg = nullptr;
  int rc = build_config(opt, &cfg);
  if (rc != 0) {
    vcc_config_free(cfg);
    return rc;
  }
  vcc_report* report = nullptr;
  vcc_status st = vcc_run(cfg, opt.workers, &report);
  vcc_config_free(cfg);
  if (st != VCC_OK) return report_error(st);

  if (opt.out.empty() || opt.out == "-") {
    Owned csv;
    st = vcc_report_csv(report, &csv.s);
    if (st == VCC_OK) std::cout << csv.s;
  } else {
    st = vcc_report_write_csv(report, opt.out.c_str());
  }
  if (st != VCC_OK) {
    vcc_report_free(report);
    return report_error(st);
  }
  if (!opt.quiet) {
    Owned text;
    if (vcc_report_summary(report, &text.s) == VCC_OK) std::cerr << text.s;
  }
  const bool ok = vcc_report_invariants_ok(report) != 0;
  if (!ok && opt.quiet) {
    for (size_t i = 0; i < vcc_report_violation_count(report); ++i) {
      std::cerr << "violation: " << vcc_report_violation(report, i) << '\n';
    }
  }
  vcc_report_free(report);
  return ok ? 0 : kExitInvariant;
}

int cmd_echo(const RunOptions& opt) {
  vcc_config* cfg = nullptr;
  int rc = build_config(opt, &cfg);
  if (rc == 0) {
    Owned text;
    const vcc_status st = vcc_config_echo(cfg, &text.s);
    if (st != VCC_OK) {
      rc = report_error(st);
    } else {
      std::cout << text.s;
    }
  }
  vcc_config_free(cfg);
  return rc;
}

struct ScheduleOptions {
  int lambda = 4;
  std::string gamma = "1/2";
  int users = 8;
  int q = 1;
  std::string file;
};

int cmd_schedule_dump(const ScheduleOptions& opt) {
  Owned text;
  const vcc_status st = vcc_schedule_dump(opt.lambda, opt.gamma.c_str(), opt.users, opt.q, &text.s);
  if (st != VCC_OK) return report_error(st);
  std::cout << text.s;
  return 0;
}

int cmd_schedule_verify(const ScheduleOptions& opt) {
  std::stringstream buf;
  if (opt.file.empty() || opt.file == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(opt.file);
    if (!in) {
      std::cerr << "error [io]: cannot open " << opt.file << '\n';
      return kExitError;
    }
    buf << in.rdbuf();
  }
  int ok = 0;
  Owned text;
  const vcc_status st = vcc_schedule_verify(opt.lambda, opt.gamma.c_str(), opt.users, buf.str().c_str(), &ok, &text.s);
  if (st != VCC_OK) return report_error(st);
  std::cout << text.s;
  return ok ? 0 : kExitInvariant;
}

void add_run_options(CLI::App* app, RunOptions& opt) {
  app->add_option("-r,--recipe", opt.recipe, "Start from a named recipe (see --list-recipes)");
  app->add_option("-c,--config", opt.config_files, "key=value config file; repeatable, applied in order");
  app->add_option("-s,--set", opt.settings, "Override one setting, key=value; repeatable");
  app->add_option("--seed", opt.seed, "Master seed");
  app->add_option("--locations", opt.locations, "Number of user-location draws");
  app->add_option("--fadings", opt.fadings, "Fading draws per location");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache-aided multi-antenna delivery simulator"};

  RunOptions opt;
  add_run_options(&app, opt);
  app.add_option("-o,--out", opt.out, "CSV output path ('-' or omitted: stdout)");
  app.add_option("-j,--workers", opt.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", opt.quiet, "Suppress the summary on stderr");
  bool list = false;
  bool print_config = false;
  app.add_flag("--list-recipes", list, "List the built-in recipes and exit");
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  ScheduleOptions sched;
  auto* schedule = app.add_subcommand("schedule", "Build or check a delivery schedule");
  schedule->require_subcommand(1);
  auto* dump = schedule->add_subcommand("dump", "Print the schedule");
  auto* verify = schedule->add_subcommand("verify", "Check a schedule read from a file or stdin");
  for (auto* sub : {dump, verify}) {
    sub->add_option("--lambda", sched.lambda, "Number of cache states")->required();
    sub->add_option("--gamma", sched.gamma, "Cache fraction a/b")->required();
    sub->add_option("--users", sched.users, "Number of users")->required();
  }
  dump->add_option("--q", sched.q, "Users served per group in a round")->required();
  verify->add_option("file", sched.file, "Schedule file ('-' for stdin)");

  CLI11_PARSE(app, argc, argv);

  if (*dump) return cmd_schedule_dump(sched);
  if (*verify) return cmd_schedule_verify(sched);
  if (list) {
    Owned text;
    const vcc_status st = vcc_list_recipes(&text.s);
    if (st != VCC_OK) return report_error(st);
    std::cout << text.s;
    return 0;
  }
  if (opt.recipe.empty() && opt.config_files.empty()) {
    std::cerr << "error [invalid-argument]: give --recipe or --config (see --help)\n";
    return kExitError;
  }
  if (print_config) return cmd_echo(opt);
  return cmd_run(opt);
}
