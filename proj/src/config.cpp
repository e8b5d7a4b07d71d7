#include "vcc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "vcc/channel.hpp"
#include "vcc/error.hpp"

namespace vcc {
namespace {

const std::vector<std::string> kSchemes{"bdmrc", "zf", "asymptotic", "msv", "csi"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void mismatch(const std::string& key, const std::string& value, const char* expected) {
  throw Error(ErrorCode::kTypeMismatch,
              "config field '" + key + "': expected " + expected + ", got '" + value + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& text, const char* expected) {
  const std::string v = trim(text);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) mismatch(key, text, expected);
  return out;
}

int parse_int(const std::string& key, const std::string& v) { return parse_number<int>(key, v, "an integer"); }

double parse_double(const std::string& key, const std::string& v) {
  const double d = parse_number<double>(key, v, "a number");
  if (!std::isfinite(d)) mismatch(key, v, "a finite number");
  return d;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split(v, ',')) out.push_back(parse_int(key, item));
  return out;
}

// Comma list whose items may also be ranges "start:stop:step" (inclusive).
std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_double(key, item));
    } else if (parts.size() == 3) {
      const double start = parse_double(key, parts[0]);
      const double stop = parse_double(key, parts[1]);
      const double step = parse_double(key, parts[2]);
      if (!(step > 0.0) || stop < start) mismatch(key, item, "a range start:stop:step with step > 0");
      const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9));
      for (int i = 0; i <= n; ++i) out.push_back(start + i * step);
    } else {
      mismatch(key, item, "a number or start:stop:step");
    }
  }
  return out;
}

std::string fmt(double d) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, res.ptr);
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += f(v[i]);
  }
  return out;
}

std::string join_ints(const std::vector<int>& v) { return join(v, [](int x) { return std::to_string(x); }); }
std::string join_doubles(const std::vector<double>& v) { return join(v, fmt); }

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kInvalidConfiguration, "config field '" + field + "': " + why);
}

[[noreturn]] void infeasible(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::kInfeasibleDimension, "config field '" + field + "': " + why);
}

}  // namespace

bool Scenario::has_scheme(const std::string& s) const {
  return std::find(schemes.begin(), schemes.end(), s) != schemes.end();
}

int Scenario::q_cap(int m) const { return std::min(q_max_uniform(L, m, B), L / m); }

std::vector<int> Scenario::q_values(int m) const {
  if (!Q.empty()) return Q;
  std::vector<int> out;
  for (int q = 1; q <= q_cap(m); ++q) out.push_back(q);
  return out;
}

std::vector<int> Scenario::qp_values(int m) const {
  if (!Qp.empty()) return Qp;
  std::vector<int> out;
  for (int q = 1; q <= q_cap(m); ++q) out.push_back(q);
  return out;
}

void validate(const Scenario& s) {
  if (s.geometry != "macro" && s.geometry != "micro" && s.geometry != "symmetric") {
    invalid("geometry", "must be macro, micro or symmetric");
  }
  if (s.L < 1) invalid("L", "must be positive");
  if (s.lambda < 1) invalid("lambda", "must be positive");
  if (s.gamma.num > s.gamma.den) invalid("gamma", "must lie in [0, 1]");
  if ((static_cast<long>(s.lambda) * s.gamma.num) % s.gamma.den != 0) {
    invalid("gamma", "lambda*gamma must be an integer");
  }
  if (s.B < 1) invalid("B", "must be positive");
  if (s.M.empty()) invalid("M", "must not be empty");
  if (s.T < 1) invalid("T", "must be positive");
  if (s.theta < 0) invalid("theta", "must be non-negative");
  if (s.locations < 1) invalid("locations", "must be positive");
  if (s.fadings < 1) invalid("fadings", "must be positive");
  if (!(s.bandwidth_hz > 0.0)) invalid("bandwidth_hz", "must be positive");
  if (s.symmetric() ? s.snr_db.empty() : s.ptot_dbm.empty()) {
    invalid(s.symmetric() ? "snr_db" : "ptot_dbm", "sweep must not be empty");
  }
  if (s.schemes.empty()) invalid("schemes", "must not be empty");
  for (const auto& name : s.schemes) {
    if (std::find(kSchemes.begin(), kSchemes.end(), name) == kSchemes.end()) {
      invalid("schemes", "unknown scheme '" + name + "'");
    }
  }
  if (s.csit_var < 0.0 || s.csit_var > 1.0) invalid("csit_var", "must lie in [0, 1]");
  for (double v : s.csir_var) {
    if (v < 0.0) invalid("csir_var", "must be non-negative");
  }
  const bool single_antenna = std::all_of(s.M.begin(), s.M.end(), [](int m) { return m == 1; });
  for (const char* scheme : {"msv", "csi"}) {
    if (s.has_scheme(scheme) && (!s.symmetric() || !single_antenna)) {
      throw Error(ErrorCode::kUnsupportedConfiguration,
                  std::string("config field 'schemes': ") + scheme + " needs geometry=symmetric and M=1");
    }
  }
  if (s.has_scheme("msv") && s.L < 2) invalid("L", "msv needs L >= 2");

  for (int m : s.M) {
    if (m < 1) invalid("M", "antenna counts must be positive");
    if (m > s.L) infeasible("M", "M=" + std::to_string(m) + " exceeds L=" + std::to_string(s.L));
    const int qmax = q_max_uniform(s.L, m, s.B);
    for (const auto& [field, values] : {std::pair{"Q", s.q_values(m)}, std::pair{"Qp", s.qp_values(m)}}) {
      if (values.empty()) invalid(field, "no feasible value");
      for (int q : values) {
        if (q < 1) invalid(field, "must be positive");
        if (q > qmax) {
          infeasible(field, std::to_string(q) + " exceeds q_max=" + std::to_string(qmax) + " for M=" + std::to_string(m));
        }
        if (q * m > s.L) {
          infeasible(field, std::to_string(q) + " users with M=" + std::to_string(m) + " exceed L=" +
                                std::to_string(s.L) + " receive dimensions");
        }
      }
    }
    const auto& qs = s.q_values(m);
    const auto& qps = s.qp_values(m);
    const long worst = std::max(static_cast<long>(s.G()) * *std::max_element(qs.begin(), qs.end()) * m,
                                static_cast<long>(*std::max_element(qps.begin(), qps.end())) * m);
    csi_overhead(s.T, s.theta, worst);
    if (s.has_scheme("msv")) csi_overhead(s.T, s.theta, s.L + s.lambda_gamma());
  }
}

void apply_setting(Scenario& s, const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  const std::string v = trim(value);
  if (key == "recipe") {
    const auto names = recipe_names();
    if (std::find(names.begin(), names.end(), v) != names.end()) {
      s = recipe(v);
    } else {
      s.recipe = v;
    }
  } else if (key == "geometry") {
    s.geometry = v;
  } else if (key == "L") {
    s.L = parse_int(key, v);
  } else if (key == "lambda") {
    s.lambda = parse_int(key, v);
  } else if (key == "gamma") {
    try {
      s.gamma = Fraction::parse(v);
    } catch (const Error&) {
      mismatch(key, v, "a fraction a/b");
    }
  } else if (key == "M") {
    s.M = parse_int_list(key, v);
  } else if (key == "Q") {
    s.Q = v == "opt" ? std::vector<int>{} : parse_int_list(key, v);
    if (v != "opt" && s.Q.empty()) mismatch(key, v, "an integer list or 'opt'");
  } else if (key == "Qp") {
    s.Qp = v == "opt" ? std::vector<int>{} : parse_int_list(key, v);
    if (v != "opt" && s.Qp.empty()) mismatch(key, v, "an integer list or 'opt'");
  } else if (key == "ptot_dbm") {
    s.ptot_dbm = parse_double_list(key, v);
  } else if (key == "snr_db") {
    s.snr_db = parse_double_list(key, v);
  } else if (key == "T") {
    s.T = parse_int(key, v);
  } else if (key == "theta") {
    s.theta = parse_int(key, v);
  } else if (key == "noise_dbm_hz") {
    s.noise_dbm_hz = parse_double(key, v);
  } else if (key == "bandwidth_hz") {
    s.bandwidth_hz = parse_double(key, v);
  } else if (key == "schemes") {
    s.schemes = split(v, ',');
  } else if (key == "csit_var") {
    s.csit_var = parse_double(key, v);
  } else if (key == "csir_var") {
    s.csir_var = parse_double_list(key, v);
  } else if (key == "locations") {
    s.locations = parse_int(key, v);
  } else if (key == "fadings") {
    s.fadings = parse_int(key, v);
  } else if (key == "seed") {
    s.seed = parse_number<std::uint64_t>(key, v, "an unsigned 64-bit integer");
  } else if (key == "B") {
    s.B = parse_int(key, v);
  } else {
    throw Error(ErrorCode::kUnknownKey, "unknown config field '" + key + "'");
  }
}

void apply_config_text(Scenario& s, std::istream& in, bool accept_echo_comments) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (!accept_echo_comments) continue;
      t = trim(t.substr(1));
      if (t.find('=') == std::string::npos) continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidConfiguration, "config line " + std::to_string(line_no) + ": expected key=value");
    }
    apply_setting(s, t.substr(0, eq), t.substr(eq + 1));
  }
}

void apply_config_file(Scenario& s, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config file '" + path + "'");
  apply_config_text(s, in);
}

std::string echo(const Scenario& s) {
  std::ostringstream os;
  auto line = [&](const std::string& k, const std::string& v) { os << "# " << k << '=' << v << '\n'; };
  line("recipe", s.recipe);
  line("geometry", s.geometry);
  line("L", std::to_string(s.L));
  line("lambda", std::to_string(s.lambda));
  line("gamma", s.gamma.str());
  line("M", join_ints(s.M));
  line("Q", s.Q.empty() ? "opt" : join_ints(s.Q));
  line("Qp", s.Qp.empty() ? "opt" : join_ints(s.Qp));
  line("ptot_dbm", join_doubles(s.ptot_dbm));
  line("snr_db", join_doubles(s.snr_db));
  line("T", std::to_string(s.T));
  line("theta", std::to_string(s.theta));
  line("noise_dbm_hz", fmt(s.noise_dbm_hz));
  line("bandwidth_hz", fmt(s.bandwidth_hz));
  line("schemes", join(s.schemes, [](const std::string& x) { return x; }));
  line("csit_var", fmt(s.csit_var));
  line("csir_var", join_doubles(s.csir_var));
  line("locations", std::to_string(s.locations));
  line("fadings", std::to_string(s.fadings));
  line("seed", std::to_string(s.seed));
  line("B", std::to_string(s.B));
  return os.str();
}

Scenario parse_echo(const std::string& text) {
  // Only the leading comment block is the echo; a CSV body may follow it.
  std::istringstream lines(text);
  std::string header, line;
  while (std::getline(lines, line) && !line.empty() && line[0] == '#') header += line + '\n';
  Scenario s;
  std::istringstream in(header);
  apply_config_text(s, in, true);
  return s;
}

namespace {

struct RecipeEntry {
  const char* name;
  const char* description;
  const char* settings;
};

// Presets are expressed in the same key=value language as config files.
const std::vector<RecipeEntry>& recipe_table() {
  static const std::vector<RecipeEntry> table{
      {"fig2", "Macro, L=64, G=5, Q=4, J=M, M in {2,4,12}; BD-MRC, ZF with bounds, asymptotic",
       "geometry=macro\nL=64\nlambda=8\ngamma=1/2\nM=2,4,12\nQ=4\nQp=4\nptot_dbm=20:50:5\n"
       "schemes=bdmrc,zf,asymptotic\nB=16\n"},
      {"fig3", "Macro, M=4, L=24, G=6, Q=Q'=4; BD-MRC with asymptotic curve",
       "geometry=macro\nL=24\nlambda=10\ngamma=1/2\nM=4\nQ=4\nQp=4\n"
       "ptot_dbm=30,34,38,40,41,42,43,46\nschemes=bdmrc,asymptotic\nB=16\n"},
      {"fig4", "Macro, L=32, M=4, Q=2, Q'=8, G=4; BD-MRC",
       "geometry=macro\nL=32\nlambda=6\ngamma=1/2\nM=4\nQ=2\nQp=8\n"
       "ptot_dbm=30,34,38,40,41,42,43,46\nschemes=bdmrc\nB=16\n"},
      {"fig5", "Macro, L=32, M=4, G=6; Q and Q' optimised; BD-MRC and ZF",
       "geometry=macro\nL=32\nlambda=10\ngamma=1/2\nM=4\nQ=opt\nQp=opt\nptot_dbm=20:45:5\n"
       "schemes=bdmrc,zf\nB=16\n"},
      {"fig6", "Micro, L=32, M=2, G=6; Q and Q' optimised; ZF with bounds",
       "geometry=micro\nL=32\nlambda=10\ngamma=1/2\nM=2\nQ=opt\nQp=opt\nptot_dbm=20,25,30,33,35,40\n"
       "schemes=zf\nB=16\n"},
      {"fig7", "Micro, L=32, M=2, G=6; Q and Q' optimised; BD-MRC (gain at 33 dBm)",
       "geometry=micro\nL=32\nlambda=10\ngamma=1/2\nM=2\nQ=opt\nQp=opt\nptot_dbm=20,25,30,33,35,40\n"
       "schemes=bdmrc\nB=16\n"},
      {"fig8", "Symmetric Rayleigh, L=32, G=6, M=1; MSV and modified MSV vs VCC; SNR = P_tot/N0; the CSIT-error companion (beta~=0.01) is fig9",
       "geometry=symmetric\nL=32\nlambda=10\ngamma=1/2\nM=1\nQ=opt\nQp=opt\nsnr_db=0:40:5\n"
       "schemes=msv,bdmrc\nB=32\n"},
      {"fig9",
       "Symmetric Rayleigh, L=16, M=1, G=6; ZF equal power; CSIT error variance 0.01 (beta~=0.01), "
       "CSIR error variance in {1e-4,1e-3,1e-2}",
       "geometry=symmetric\nL=16\nlambda=10\ngamma=1/2\nM=1\nQ=opt\nQp=opt\nsnr_db=0:40:5\n"
       "schemes=csi\ncsit_var=0.01\ncsir_var=0.0001,0.001,0.01\nB=16\n"},
  };
  return table;
}

}  // namespace

std::vector<std::string> recipe_names() {
  std::vector<std::string> out;
  for (const auto& r : recipe_table()) out.emplace_back(r.name);
  return out;
}

Scenario recipe(const std::string& name) {
  for (const auto& r : recipe_table()) {
    if (name == r.name) {
      Scenario s;
      std::istringstream in(r.settings);
      apply_config_text(s, in);
      s.recipe = r.name;
      return s;
    }
  }
  throw Error(ErrorCode::kInvalidConfiguration, "unknown recipe '" + name + "'");
}

std::string list_recipes() {
  std::string out;
  for (const auto& r : recipe_table()) out += std::string(r.name) + "  " + r.description + "\n";
  return out;
}

}  // namespace vcc
