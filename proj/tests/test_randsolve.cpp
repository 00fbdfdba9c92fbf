#include <gtest/gtest.h>

#include <random>

#include "dynauc/randsolve.hpp"
#include "test_util.hpp"

using namespace dynauc;
using testutil::R;

namespace {

// The same lotteries for every report: IC by construction, since each
// report only changes which day-1 prices are taken.
RandomizedMechanism common_lottery(std::mt19937& rng, const TwoDayInstance& inst, int max_value) {
  TypeLotteries l{testutil::random_lottery(rng, max_value), testutil::random_lottery(rng, max_value)};
  return RandomizedMechanism{std::vector<TypeLotteries>(inst.size(), l)};
}

RandomizedMechanism mix(const RandomizedMechanism& a, const RandomizedMechanism& b, const Rational& w) {
  RandomizedMechanism out;
  for (size_t u = 0; u < a.lotteries.size(); ++u) {
    TypeLotteries l;
    for (auto& [p, m] : a.lotteries[u].day1) l.day1.emplace_back(p, w * m);
    for (auto& [p, m] : b.lotteries[u].day1) l.day1.emplace_back(p, (Rational(1) - w) * m);
    for (auto& [p, m] : a.lotteries[u].day2) l.day2.emplace_back(p, w * m);
    for (auto& [p, m] : b.lotteries[u].day2) l.day2.emplace_back(p, (Rational(1) - w) * m);
    l.day1 = canonical_lottery(std::move(l.day1));
    l.day2 = canonical_lottery(std::move(l.day2));
    out.lotteries.push_back(std::move(l));
  }
  return out;
}

bool on_grid(const TwoDayInstance& inst, const RandomizedMechanism& m) {
  auto g1 = day1_grid(inst), g2 = day2_grid(inst);
  for (auto& l : m.lotteries) {
    for (auto& [p, x] : l.day1)
      if (p.finite() && !g1.contains(p.value())) return false;
    for (auto& [p, x] : l.day2)
      if (p.finite() && !g2.contains(p.value())) return false;
  }
  return true;
}

}  // namespace

TEST(NormalizePrices, SplitsBetweenNeighbours) {
  TwoDayInstance inst{{{R(1), R(5), testutil::sample_dist()}}};
  RandomizedMechanism m{{{{{Price::no_sale(), R(1)}}, {{Price(R(3)), R(1)}}}}};
  auto out = normalize_prices(inst, m);
  Lottery expect{{Price(R(2)), R(1, 2)}, {Price(R(4)), R(1, 2)}};
  EXPECT_EQ(out.lotteries[0].day2, expect);
}

TEST(NormalizePrices, AboveSupportBecomesNoSale) {
  TwoDayInstance inst{{{R(1), R(5), testutil::sample_dist()}}};
  RandomizedMechanism m{{{{{Price(R(6)), R(1)}}, {{Price(R(9, 2)), R(1)}}}}};
  auto out = normalize_prices(inst, m);
  Lottery none{{Price::no_sale(), R(1)}};
  EXPECT_EQ(out.lotteries[0].day1, none);
  EXPECT_EQ(out.lotteries[0].day2, none);
}

TEST(NormalizePrices, OnGridIsFixpoint) {
  std::mt19937 rng(2);
  for (int k = 0; k < 50; ++k) {
    auto inst = testutil::random_instance(rng, 3, 3, 6);
    auto sol = solve_two_day(inst);
    auto m = RandomizedMechanism{};
    for (auto& l : sol.mechanism.lotteries)
      m.lotteries.push_back({canonical_lottery(l.day1), canonical_lottery(l.day2)});
    EXPECT_EQ(normalize_prices(inst, m), m);
  }
}

TEST(NormalizePrices, RevenueUpUtilitiesKeptIdempotent) {
  std::mt19937 rng(4);
  int feasible = 0;
  for (int k = 0; k < 200; ++k) {
    auto inst = testutil::random_instance(rng, 3, 3, 6);
    RandomizedMechanism m = common_lottery(rng, inst, 6);
    if (k % 2) m = mix(solve_two_day(inst).mechanism, m, R(1, 3));
    auto before = check_randomized(inst, m);
    auto out = normalize_prices(inst, m);
    auto after = check_randomized(inst, out);
    EXPECT_TRUE(on_grid(inst, out));
    EXPECT_GE(after.revenue, before.revenue);
    if (before.feasible) {
      EXPECT_TRUE(after.feasible) << k;
      ++feasible;
    }
    // Every (true, reported) utility is unchanged.
    for (size_t i = 0; i < inst.size(); ++i)
      for (size_t u = 0; u < inst.size(); ++u)
        EXPECT_EQ(rand_utility(inst.types[i], inst.types[u], m.lotteries[u]),
                  rand_utility(inst.types[i], inst.types[u], out.lotteries[u]));
    EXPECT_EQ(normalize_prices(inst, out), out);
  }
  EXPECT_EQ(feasible, 200);
}

TEST(SolveTwoDay, SingleType) {
  TwoDayInstance inst{{{R(1), R(2), testutil::sample_dist()}}};
  auto sol = solve_two_day(inst);
  EXPECT_EQ(sol.revenue, R(7, 2));
  // Brute force over two-point lotteries on a 1/2 grid with weights in quarters.
  Rational best = 0;
  std::vector<Price> prices{Price::no_sale()};
  for (int x = 0; x <= 10; ++x) prices.emplace_back(R(x, 2));
  for (auto& a : prices)
    for (auto& b : prices)
      for (int w = 0; w <= 4; ++w) {
        Lottery l{{a, R(w, 4)}, {b, R(4 - w, 4)}};
        l = canonical_lottery(l);
        for (auto& c : prices) {
          RandomizedMechanism m{{{{{c, R(1)}}, l}}};
          auto rep = check_randomized(inst, m);
          if (rep.feasible) best = max(best, rep.revenue);
        }
      }
  EXPECT_EQ(best, R(7, 2));
}

TEST(SolveTwoDay, AllZero) {
  TwoDayInstance inst{{{R(1), R(0), Distribution::point(R(0))}}};
  EXPECT_EQ(solve_two_day(inst).revenue, R(0));
}

TEST(SolveTwoDay, AuditAgreesExactly) {
  std::mt19937 rng(7);
  for (int k = 0; k < 100; ++k) {
    auto inst = testutil::random_instance(rng, 3, 4, 8);
    auto sol = solve_two_day(inst);
    auto rep = check_randomized(inst, sol.mechanism);
    ASSERT_TRUE(rep.feasible) << k;
    EXPECT_EQ(rep.revenue, sol.revenue);
    EXPECT_LE(sol.revenue, inst.social_welfare());
    EXPECT_TRUE(lp::check_feasible(sol.program, sol.lp_solution.values));
  }
}

TEST(SolveTwoDay, ProgramSize) {
  std::mt19937 rng(8);
  for (int k = 0; k < 20; ++k) {
    auto inst = testutil::random_instance(rng, 4, 4, 8);
    std::vector<std::vector<std::pair<Price, int>>> x1, x2;
    auto prob = two_day_program(inst, x1, x2);
    size_t n = inst.size(), g1 = day1_grid(inst).finite.size(), g2 = day2_grid(inst).finite.size();
    size_t d1 = 0;
    for (auto& t : inst.types)
      for (auto& p : day1_grid(inst).finite) d1 += p <= t.v1;
    EXPECT_EQ(prob.num_vars(), d1 + n + n * (g2 + 1));
    EXPECT_LE(prob.num_vars(), n * (g1 + 1 + g2 + 1));
    EXPECT_EQ(prob.constraints.size(), 2 * n + n * (n - 1));
  }
}

TEST(SolveTwoDay, BudgetCapsVariables) {
  std::mt19937 rng(9);
  auto inst = testutil::random_instance(rng, 3, 3, 6);
  Budget b;
  b.limit = 5;
  EXPECT_THROW(solve_two_day(inst, b), BudgetExceeded);
}
