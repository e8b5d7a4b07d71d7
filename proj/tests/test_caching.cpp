#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <sstream>

#include "vcc/caching.hpp"
#include "vcc/error.hpp"

using namespace vcc;

namespace {

bool throws_config(int Lambda, Fraction gamma, int K) {
  try {
    build_placement(Lambda, gamma, K, K);
  } catch (const Error& e) {
    return e.code() == ErrorCode::kInvalidConfiguration;
  }
  return false;
}

std::size_t file_labels_cached(const PlacementPlan& plan, int group, int file) {
  std::size_t n = 0;
  for (const auto& l : plan.cached_labels(group)) n += l.file == file;
  return n;
}

}  // namespace

TEST_CASE("binomials and colex order") {
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(6, 0) == 1);
  CHECK(binomial(3, 4) == 0);
  const auto s = colex_subsets(4, 2);
  REQUIRE(s.size() == 6);
  CHECK(s[0] == Subset{1, 2});
  CHECK(s[1] == Subset{1, 3});
  CHECK(s[2] == Subset{2, 3});
  CHECK(s[3] == Subset{1, 4});
  CHECK(s[5] == Subset{3, 4});
  CHECK(colex_subsets(3, 0) == std::vector<Subset>{Subset{}});
}

TEST_CASE("fractions") {
  CHECK(Fraction::parse("2/4") == Fraction{1, 2});
  CHECK(Fraction::parse("3") == Fraction{3, 1});
  CHECK(Fraction::make(0, 7).str() == "0");
  CHECK(Fraction::parse("1/5").value() == doctest::Approx(0.2));
}

TEST_CASE("placement with Lambda=5, gamma=1/5") {
  const PlacementPlan plan = build_placement(5, Fraction{1, 5}, 10, 10);
  CHECK(plan.subsets.size() == 5);
  CHECK(plan.G() == 2);
  CHECK(plan.B == 2);
  for (int g = 1; g <= 5; ++g) CHECK(file_labels_cached(plan, g, 1) * 5 == plan.subsets.size());
}

TEST_CASE("cacheless placement has a single empty subset") {
  const PlacementPlan plan = build_placement(3, Fraction{0, 1}, 6, 6);
  CHECK(plan.subsets.size() == 1);
  CHECK(plan.subsets[0].empty());
  CHECK(plan.G() == 1);
  CHECK(plan.cached_labels(1).empty());
}

TEST_CASE("two groups of four users") {
  const PlacementPlan plan = build_placement(2, Fraction{1, 2}, 8, 8);
  CHECK(plan.B == 4);
  CHECK(plan.G() == 2);
  const DeliverySchedule s = build_schedule(plan, 2, default_demands(plan));
  CHECK(s.stages.size() == 1);
  CHECK(s.rounds == 2);
  CHECK(s.items.size() == 8);
  CHECK(verify_delivery(s, plan, default_demands(plan)).ok);
}

TEST_CASE("invalid placements") {
  CHECK(throws_config(4, Fraction{1, 3}, 8));  // Lambda*gamma not an integer
  CHECK(throws_config(2, Fraction{1, 2}, 7));  // K not a multiple of Lambda
  CHECK(throws_config(2, Fraction{3, 2}, 4));  // gamma above one
}

TEST_CASE("stage counts") {
  const PlacementPlan p5 = build_placement(5, Fraction{1, 5}, 5, 5);
  CHECK(build_schedule(p5, 1, default_demands(p5)).stages.size() == 10);
  const PlacementPlan p0 = build_placement(4, Fraction{0, 1}, 8, 8);
  const DeliverySchedule s0 = build_schedule(p0, 2, default_demands(p0));
  CHECK(s0.stages.size() == 4);
  for (const auto& st : s0.stages) CHECK(st.size() == 1);
  CHECK(verify_delivery(s0, p0, default_demands(p0)).ok);
}

TEST_CASE("placement invariants and schedule conservation over a grid") {
  for (int Lambda = 1; Lambda <= 6; ++Lambda) {
    for (int t = 0; t <= Lambda; ++t) {
      for (int B = 1; B <= 4; ++B) {
        const PlacementPlan plan = build_placement(Lambda, Fraction::make(t, Lambda), Lambda * B, Lambda * B);
        CHECK(plan.subsets.size() == binomial(Lambda, t));
        for (int g = 1; g <= Lambda; ++g) {
          // Cache fraction, exact in integers.
          CHECK(file_labels_cached(plan, g, 1) * static_cast<std::size_t>(Lambda) ==
                plan.subsets.size() * static_cast<std::size_t>(t));
          CHECK(plan.cached_labels(g).size() == binomial(Lambda - 1, t - 1) * static_cast<std::size_t>(plan.N));
        }
        if (t == Lambda) continue;  // everything cached: nothing to deliver
        for (int Q = 1; Q <= B; ++Q) {
          const auto demands = default_demands(plan);
          const DeliverySchedule s = build_schedule(plan, Q, demands);
          CHECK(s.stages.size() == binomial(Lambda, t + 1));
          CHECK(s.items.size() == static_cast<std::size_t>(plan.G() * B) * s.stages.size());
          std::set<std::pair<int, SubfileLabel>> seen;
          for (const auto& it : s.items) CHECK(seen.insert({it.user, it.subfile}).second);
          const DeliveryReport r = verify_delivery(s, plan, demands);
          CHECK_MESSAGE(r.ok, "Lambda=", Lambda, " t=", t, " B=", B, " Q=", Q);
        }
      }
    }
  }
}

TEST_CASE("remainder round when Q does not divide B") {
  const PlacementPlan plan = build_placement(3, Fraction{1, 3}, 15, 15);
  const DeliverySchedule s = build_schedule(plan, 2, default_demands(plan));
  CHECK(s.rounds == 3);
  std::size_t last = 0;
  for (const auto& it : s.items) last += it.round == 2;
  CHECK(last == s.stages.size() * static_cast<std::size_t>(plan.G()));  // one user per group
  CHECK(verify_delivery(s, plan, default_demands(plan)).ok);
}

TEST_CASE("deleting one payload is reported as a missing subfile") {
  const PlacementPlan plan = build_placement(3, Fraction{1, 3}, 6, 6);
  DeliverySchedule s = build_schedule(plan, 1, default_demands(plan));
  const Transmission gone = s.items[3];
  s.items.erase(s.items.begin() + 3);
  const DeliveryReport r = verify_delivery(s, plan, default_demands(plan));
  CHECK_FALSE(r.ok);
  bool named = false;
  for (const auto& v : r.violations) named |= v.find("never receives subfile " + gone.subfile.str()) != std::string::npos;
  CHECK(named);
}

TEST_CASE("a user holding the wrong cache state breaks interference cancellation") {
  PlacementPlan plan = build_placement(3, Fraction{1, 3}, 6, 6);
  const DeliverySchedule s = build_schedule(plan, 1, default_demands(plan));
  plan.user_cache_state[0] = 2;  // user 1 belongs to group 1 but now stores group 2's content
  const DeliveryReport r = verify_delivery(s, plan, default_demands(plan));
  CHECK_FALSE(r.ok);
  bool interference = false;
  for (const auto& v : r.violations) interference |= v.find("cannot cancel") != std::string::npos;
  CHECK(interference);
}

TEST_CASE("schedule text round-trip") {
  const PlacementPlan plan = build_placement(4, Fraction{1, 2}, 8, 8);
  const DeliverySchedule s = build_schedule(plan, 2, default_demands(plan));
  std::stringstream ss;
  write_schedule(ss, s);
  CHECK(ss.str().rfind("stage 0 round 0 group ", 0) == 0);
  const DeliverySchedule back = read_schedule(ss);
  CHECK(back.items == s.items);
  CHECK(verify_delivery(back, plan, default_demands(plan)).ok);
}

TEST_CASE("multiplexing limit") {
  CHECK(q_max_uniform(32, 4, 8) == 8);
  CHECK(q_max_uniform(32, 4, 100) == 8);
  CHECK(q_max_uniform(2, 1, 2) == 2);
  CHECK(q_max_uniform(7, 7, 5) == 1);
  CHECK(q_max(32, {std::vector<int>(10, 4), std::vector<int>(10, 4)}) == 8);
  CHECK(q_max(10, {{1, 2, 3, 4}}) == 4);  // 1+2+3+4 minus the smallest count is exactly 9
  CHECK(q_max(9, {{1, 2, 3, 4}}) == 3);
}

TEST_CASE("q_max is monotone in L and in each antenna count") {
  const std::vector<std::vector<int>> base{{1, 3, 2, 2, 1}, {2, 2, 2, 1, 4}};
  for (int L = 1; L < 20; ++L) {
    CHECK(q_max(L + 1, base) >= q_max(L, base));
    for (std::size_t g = 0; g < base.size(); ++g) {
      for (std::size_t k = 0; k < base[g].size(); ++k) {
        auto bumped = base;
        ++bumped[g][k];
        CHECK(q_max(L, bumped) <= q_max(L, base));
      }
    }
  }
  for (int M = 1; M < 6; ++M) {
    for (int L = M; L < 40; ++L) CHECK(q_max_uniform(L, M, 64) == q_max(L, {std::vector<int>(64, M)}));
  }
}
