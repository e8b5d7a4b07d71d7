#include "vcc/caching.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "vcc/error.hpp"

namespace vcc {
namespace {

constexpr std::size_t kMaxReportedViolations = 32;

bool contains(const Subset& s, int x) { return std::binary_search(s.begin(), s.end(), x); }

std::string subset_str(const Subset& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s[i]);
  }
  return out + "}";
}

void add_violation(DeliveryReport& report, std::string message) {
  report.ok = false;
  ++report.violation_count;
  if (report.violations.size() < kMaxReportedViolations) report.violations.push_back(std::move(message));
}

}  // namespace

Fraction Fraction::make(long num, long den) {
  if (den <= 0 || num < 0) throw Error(ErrorCode::kInvalidArgument, "fraction must be non-negative with positive denominator");
  const long g = std::gcd(num, den);
  return {num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
}

Fraction Fraction::parse(const std::string& text) {
  auto parse_long = [&](std::string_view s) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "not a fraction: '" + text + "'");
    }
    return v;
  };
  const auto slash = text.find('/');
  if (slash == std::string::npos) return make(parse_long(text), 1);
  std::string_view view(text);
  return make(parse_long(view.substr(0, slash)), parse_long(view.substr(slash + 1)));
}

std::string Fraction::str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }

std::vector<Subset> colex_subsets(int n, int k) {
  if (n < 0 || k < 0 || n > 62) throw Error(ErrorCode::kInvalidArgument, "colex_subsets: need 0 <= n <= 62");
  std::vector<Subset> out;
  if (k > n) return out;
  if (k == 0) {
    out.emplace_back();
    return out;
  }
  const std::uint64_t limit = std::uint64_t{1} << n;
  std::uint64_t x = (std::uint64_t{1} << k) - 1;
  while (x < limit) {
    Subset s;
    for (int i = 0; i < n; ++i) {
      if (x & (std::uint64_t{1} << i)) s.push_back(i + 1);
    }
    out.push_back(std::move(s));
    const std::uint64_t c = x & (~x + 1);
    const std::uint64_t r = x + c;
    x = (((r ^ x) >> 2) / c) | r;
  }
  return out;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t v = 1;
  for (int i = 1; i <= k; ++i) v = v * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return v;
}

std::string SubfileLabel::str() const { return "(" + std::to_string(file) + "," + subset_str(subset) + ")"; }

std::vector<SubfileLabel> PlacementPlan::cached_labels(int group) const {
  std::vector<SubfileLabel> out;
  for (int n = 1; n <= N; ++n) {
    for (const auto& s : subsets) {
      if (contains(s, group)) out.push_back({n, s});
    }
  }
  return out;
}

bool PlacementPlan::caches(int user, const SubfileLabel& label) const {
  return contains(label.subset, cache_state(user));
}

PlacementPlan build_placement(int Lambda, Fraction gamma, int K, int N) {
  if (Lambda < 1) throw Error(ErrorCode::kInvalidConfiguration, "Lambda must be at least 1");
  if (gamma.num > gamma.den) throw Error(ErrorCode::kInvalidConfiguration, "gamma must lie in [0, 1]");
  if ((static_cast<long>(Lambda) * gamma.num) % gamma.den != 0) {
    throw Error(ErrorCode::kInvalidConfiguration,
                "Lambda*gamma = " + std::to_string(Lambda) + "*" + gamma.str() + " is not an integer");
  }
  if (K <= 0 || K % Lambda != 0) {
    throw Error(ErrorCode::kInvalidConfiguration, "K=" + std::to_string(K) + " is not a positive multiple of Lambda");
  }
  if (N < 1) throw Error(ErrorCode::kInvalidConfiguration, "library size N must be positive");
  PlacementPlan plan;
  plan.Lambda = Lambda;
  plan.gamma = gamma;
  plan.t = static_cast<int>(static_cast<long>(Lambda) * gamma.num / gamma.den);
  plan.K = K;
  plan.B = K / Lambda;
  plan.N = N;
  plan.subsets = colex_subsets(Lambda, plan.t);
  plan.user_cache_state.resize(static_cast<std::size_t>(K));
  for (int u = 1; u <= K; ++u) plan.user_cache_state[static_cast<std::size_t>(u - 1)] = plan.group_of(u);
  return plan;
}

std::vector<int> default_demands(const PlacementPlan& plan) {
  if (plan.N < plan.K) {
    throw Error(ErrorCode::kInvalidConfiguration, "distinct demands need N >= K");
  }
  std::vector<int> demands(static_cast<std::size_t>(plan.K));
  std::iota(demands.begin(), demands.end(), 1);
  return demands;
}

DeliverySchedule build_schedule(const PlacementPlan& plan, int Q, const std::vector<int>& demands) {
  if (Q < 1 || Q > plan.B) {
    throw Error(ErrorCode::kInvalidConfiguration,
                "Q=" + std::to_string(Q) + " must lie in [1, B=" + std::to_string(plan.B) + "]");
  }
  if (demands.size() != static_cast<std::size_t>(plan.K)) {
    throw Error(ErrorCode::kInvalidArgument, "demand list must have one entry per user");
  }
  DeliverySchedule schedule;
  schedule.G = plan.G();
  schedule.Q = Q;
  schedule.rounds = (plan.B + Q - 1) / Q;
  schedule.stages = colex_subsets(plan.Lambda, plan.G());
  for (std::size_t i = 0; i < schedule.stages.size(); ++i) {
    const Subset& psi_set = schedule.stages[i];
    for (int round = 0; round < schedule.rounds; ++round) {
      const int first = round * Q;
      const int last = std::min(first + Q, plan.B);
      for (int psi : psi_set) {
        Subset rest;
        for (int g : psi_set) {
          if (g != psi) rest.push_back(g);
        }
        for (int b = first; b < last; ++b) {
          const int user = plan.user_at(psi, b);
          schedule.items.push_back({static_cast<int>(i), round, psi, user,
                                    {demands[static_cast<std::size_t>(user - 1)], rest}});
        }
      }
    }
  }
  return schedule;
}

DeliveryReport verify_delivery(const DeliverySchedule& schedule, const PlacementPlan& plan,
                               const std::vector<int>& demands) {
  DeliveryReport report;
  std::vector<std::map<SubfileLabel, int>> received(static_cast<std::size_t>(plan.K));
  std::map<std::pair<int, int>, std::vector<const Transmission*>> slots;

  for (const auto& item : schedule.items) {
    if (item.user < 1 || item.user > plan.K) {
      add_violation(report, "transmission to unknown user " + std::to_string(item.user));
      continue;
    }
    if (plan.group_of(item.user) != item.group) {
      add_violation(report, "user " + std::to_string(item.user) + " scheduled under group " +
                                std::to_string(item.group) + " but belongs to group " +
                                std::to_string(plan.group_of(item.user)));
    }
    ++received[static_cast<std::size_t>(item.user - 1)][item.subfile];
    slots[{item.stage, item.round}].push_back(&item);
  }

  for (int u = 1; u <= plan.K; ++u) {
    const int want = demands[static_cast<std::size_t>(u - 1)];
    const int state = plan.cache_state(u);
    auto& got = received[static_cast<std::size_t>(u - 1)];
    for (const auto& s : plan.subsets) {
      if (contains(s, state)) continue;
      const SubfileLabel label{want, s};
      const auto it = got.find(label);
      const int count = it == got.end() ? 0 : it->second;
      if (count == 0) {
        add_violation(report, "user " + std::to_string(u) + " never receives subfile " + label.str());
      } else if (count > 1) {
        add_violation(report, "user " + std::to_string(u) + " receives subfile " + label.str() + " " +
                                  std::to_string(count) + " times");
      }
      if (it != got.end()) got.erase(it);
    }
    for (const auto& [label, count] : got) {
      add_violation(report, "user " + std::to_string(u) + " receives subfile " + label.str() +
                                " that it neither requested nor lacks");
    }
  }

  for (const auto& [slot, items] : slots) {
    for (const Transmission* rx : items) {
      const int state = plan.cache_state(rx->user);
      for (const Transmission* tx : items) {
        if (tx->group == rx->group) continue;
        if (!contains(tx->subfile.subset, state)) {
          add_violation(report, "stage " + std::to_string(slot.first) + " round " + std::to_string(slot.second) +
                                    ": user " + std::to_string(rx->user) + " cannot cancel " + tx->subfile.str() +
                                    " sent to group " + std::to_string(tx->group));
        }
      }
    }
  }
  return report;
}

int q_max_uniform(int L, int M, int B) {
  if (L < 1 || M < 1 || B < 1) throw Error(ErrorCode::kInvalidArgument, "q_max: L, M and B must be positive");
  return std::min((M + L - 1) / M, B);
}

int q_max(int L, const std::vector<std::vector<int>>& antenna_counts) {
  if (L < 1 || antenna_counts.empty()) throw Error(ErrorCode::kInvalidArgument, "q_max: need L >= 1 and a group");
  int best = std::numeric_limits<int>::max();
  for (const auto& group : antenna_counts) {
    int q = 0;
    int sum = 0;
    int smallest = std::numeric_limits<int>::max();
    for (int m : group) {
      if (m < 1) throw Error(ErrorCode::kInvalidArgument, "q_max: antenna counts must be positive");
      sum += m;
      smallest = std::min(smallest, m);
      if (sum - smallest > L - 1) break;
      ++q;
    }
    best = std::min(best, q);
  }
  return best;
}

void write_schedule(std::ostream& os, const DeliverySchedule& schedule) {
  for (const auto& item : schedule.items) {
    os << "stage " << item.stage << " round " << item.round << " group " << item.group << " user " << item.user
       << " subfile " << item.subfile.str() << '\n';
  }
}

DeliverySchedule read_schedule(std::istream& is) {
  DeliverySchedule schedule;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fail = [&] { throw Error(ErrorCode::kIo, "schedule line " + std::to_string(line_no) + " is malformed"); };
    std::istringstream ls(line);
    std::string w1, w2, w3, w4, w5, label;
    Transmission item;
    if (!(ls >> w1 >> item.stage >> w2 >> item.round >> w3 >> item.group >> w4 >> item.user >> w5 >> label)) fail();
    if (w1 != "stage" || w2 != "round" || w3 != "group" || w4 != "user" || w5 != "subfile") fail();
    // label: (n,{a,b,...})
    if (label.size() < 5 || label.front() != '(' || label.back() != ')') fail();
    const auto comma = label.find(',');
    const auto open = label.find('{');
    const auto close = label.find('}');
    if (comma == std::string::npos || open != comma + 1 || close == std::string::npos) fail();
    item.subfile.file = std::stoi(label.substr(1, comma - 1));
    std::string body = label.substr(open + 1, close - open - 1);
    std::istringstream bs(body);
    std::string tok;
    while (std::getline(bs, tok, ',')) {
      if (!tok.empty()) item.subfile.subset.push_back(std::stoi(tok));
    }
    std::sort(item.subfile.subset.begin(), item.subfile.subset.end());
    schedule.items.push_back(std::move(item));
  }
  return schedule;
}

}  // namespace vcc
