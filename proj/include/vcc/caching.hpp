#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace vcc {

// Reduced non-negative fraction num/den.
struct Fraction {
  long num = 0;
  long den = 1;

  static Fraction make(long num, long den);
  // Accepts "a/b" or an integer.
  static Fraction parse(const std::string& text);
  std::string str() const;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

using Subset = std::vector<int>;  // sorted, 1-based elements

// All size-k subsets of {1..n} in colexicographic order.
std::vector<Subset> colex_subsets(int n, int k);

std::uint64_t binomial(int n, int k);

struct SubfileLabel {
  int file = 0;  // 1-based
  Subset subset;
  auto operator<=>(const SubfileLabel&) const = default;
  std::string str() const;  // "(n,{a,b})"
};

struct PlacementPlan {
  int Lambda = 1;
  Fraction gamma;
  int t = 0;  // Lambda * gamma
  int K = 0;
  int B = 0;
  int N = 0;
  std::vector<Subset> subsets;         // every t-subset of [Lambda], colex order
  std::vector<int> user_cache_state;   // user u (1-based) -> user_cache_state[u-1] in [1, Lambda]

  int G() const { return t + 1; }
  // Membership group of user u: D_g = {(b-1)*Lambda + g}.
  int group_of(int user) const { return (user - 1) % Lambda + 1; }
  int cache_state(int user) const { return user_cache_state[static_cast<std::size_t>(user - 1)]; }
  // b-th user (0-based) of group g.
  int user_at(int group, int b) const { return b * Lambda + group; }
  std::vector<SubfileLabel> cached_labels(int group) const;
  bool caches(int user, const SubfileLabel& label) const;
};

// Throws kInvalidConfiguration when Lambda*gamma is not an integer, gamma is
// outside [0,1], or K is not a positive multiple of Lambda.
PlacementPlan build_placement(int Lambda, Fraction gamma, int K, int N);

// User u requests file u.
std::vector<int> default_demands(const PlacementPlan& plan);

struct Transmission {
  int stage = 0;  // 0-based
  int round = 0;  // 0-based
  int group = 0;  // 1-based
  int user = 0;   // 1-based
  SubfileLabel subfile;
  auto operator<=>(const Transmission&) const = default;
};

struct DeliverySchedule {
  int G = 0;
  int Q = 0;
  int rounds = 0;
  std::vector<Subset> stages;
  std::vector<Transmission> items;
};

// Every (t+1)-subset of groups is one stage; each stage is repeated over
// ceil(B/Q) rounds, the last one serving B mod Q users when Q does not divide B.
DeliverySchedule build_schedule(const PlacementPlan& plan, int Q, const std::vector<int>& demands);

struct DeliveryReport {
  bool ok = true;
  std::size_t violation_count = 0;
  std::vector<std::string> violations;  // first few, human readable
};

DeliveryReport verify_delivery(const DeliverySchedule& schedule, const PlacementPlan& plan,
                               const std::vector<int>& demands);

int q_max_uniform(int L, int M, int B);
// antenna_counts[g][k]: receive antennas of the k-th candidate user of group g.
// B per group is the length of its list.
int q_max(int L, const std::vector<std::vector<int>>& antenna_counts);

void write_schedule(std::ostream& os, const DeliverySchedule& schedule);
// Reads lines produced by write_schedule; only `items` is populated.
DeliverySchedule read_schedule(std::istream& is);

}  // namespace vcc
