#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "dynauc/detsolve.hpp"
#include "dynauc/randsolve.hpp"
#include "test_util.hpp"

using namespace dynauc;
using testutil::R;

namespace {

// Best audited revenue over every deterministic mechanism whose finite
// prices lie on the 1/2 grid.
Rational grid_brute_force(const TwoDayInstance& inst) {
  std::vector<std::vector<PricePair>> opts(inst.size());
  Rational top = inst.day2_values().back();
  for (size_t i = 0; i < inst.size(); ++i) {
    std::vector<Price> ps{Price::no_sale()}, qs{Price::no_sale()};
    for (Rational x = 0; x <= inst.types[i].v1; x += R(1, 2)) ps.emplace_back(x);
    for (Rational x = 0; x <= top; x += R(1, 2)) qs.emplace_back(x);
    for (auto& p : ps)
      for (auto& q : qs) opts[i].push_back({p, q});
  }
  Rational best = 0;
  DeterministicMechanism m;
  m.prices.resize(inst.size());
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == inst.size()) {
      auto rep = check_deterministic(inst, m);
      if (rep.feasible) best = max(best, rep.revenue);
      return;
    }
    for (auto& o : opts[i]) {
      m.prices[i] = o;
      rec(i + 1);
    }
  };
  rec(0);
  return best;
}

// Grid step that contains every finite price of `m` and every support point.
Rational containing_step(const TwoDayInstance& inst, const DeterministicMechanism& m) {
  mpz_class l = 1;
  auto take = [&](const Rational& x) { mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.den().get_mpz_t()); };
  for (auto& pq : m.prices)
    if (pq.q.finite()) take(pq.q.value());
  for (auto& v : inst.day2_values()) take(v);
  return Rational(mpz_class(1), l);
}

std::vector<Price> random_first_day(std::mt19937& rng, const TwoDayInstance& inst) {
  std::vector<Price> fd;
  for (auto& t : inst.types) {
    if (std::uniform_int_distribution<int>(0, 2)(rng) == 0)
      fd.push_back(Price::no_sale());
    else
      fd.emplace_back(R(std::uniform_int_distribution<long>(0, 2 * t.v1.floor().get_si())(rng), 2));
  }
  return fd;
}

}  // namespace

TEST(NonAdaptive, SingleType) {
  TwoDayInstance inst{{{R(1), R(2), Distribution::point(R(3))}}};
  auto r = non_adaptive_opt(inst);
  EXPECT_EQ(r.p, R(2));
  EXPECT_EQ(r.q, R(3));
  EXPECT_EQ(r.revenue, R(5));
}

TEST(ExactSmall, SingleType) {
  TwoDayInstance inst{{{R(1), R(2), testutil::sample_dist()}}};
  auto s = exact_small_solver(inst);
  EXPECT_EQ(s.revenue, R(7, 2));
  EXPECT_EQ(s.mechanism.prices[0].p, Price(R(2)));
  EXPECT_EQ(s.mechanism.prices[0].q, Price(R(2)));
  EXPECT_EQ(grid_brute_force(inst), R(7, 2));
}

TEST(ExactSmall, AtLeastGridBruteForce) {
  std::mt19937 rng(11);
  int equal = 0;
  for (int k = 0; k < 12; ++k) {
    auto inst = testutil::random_pool_instance(rng, 2, 3, 4);
    auto s = exact_small_solver(inst);
    auto brute = grid_brute_force(inst);
    EXPECT_GE(s.revenue, brute) << k;
    equal += s.revenue == brute;
  }
  EXPECT_GT(equal, 0);
}

TEST(ExactSmall, RevenueLadder) {
  std::mt19937 rng(12);
  int strict = 0;
  for (int k = 0; k < 60; ++k) {
    auto inst = testutil::random_pool_instance(rng, 3, 4, 8);
    auto na = non_adaptive_opt(inst);
    auto ex = exact_small_solver(inst);
    auto rs = solve_two_day(inst);
    auto rep = check_deterministic(inst, ex.mechanism);
    ASSERT_TRUE(rep.feasible) << k;
    EXPECT_EQ(rep.revenue, ex.revenue);
    EXPECT_LE(na.revenue, ex.revenue);
    EXPECT_LE(ex.revenue, rs.revenue);
    EXPECT_LE(rs.revenue, inst.social_welfare());
    strict += ex.revenue < rs.revenue;
  }
  EXPECT_GT(strict, 0);
}

TEST(ExactSmall, Deterministic) {
  std::mt19937 rng(13);
  auto inst = testutil::random_pool_instance(rng, 3, 4, 8);
  auto a = exact_small_solver(inst), b = exact_small_solver(inst);
  EXPECT_EQ(a.revenue, b.revenue);
  for (size_t i = 0; i < inst.size(); ++i) {
    EXPECT_EQ(a.mechanism.prices[i].p, b.mechanism.prices[i].p);
    EXPECT_EQ(a.mechanism.prices[i].q, b.mechanism.prices[i].q);
  }
}

TEST(ExactSmall, BudgetExceeded) {
  std::mt19937 rng(14);
  auto inst = testutil::random_pool_instance(rng, 3, 4, 8);
  Budget b;
  b.limit = 3;
  EXPECT_THROW(exact_small_solver(inst, b), lp::ResourceLimit);
  b.limit = 40;
  EXPECT_THROW(exact_small_solver(inst, b), BudgetExceeded);
}

TEST(Fptas, SingleTypeNoCoupling) {
  TwoDayInstance inst{{{R(1), R(3), Distribution::point(R(5))}}};
  auto r = fptas_fixed_first_day(inst, {Price(R(3))}, R(1, 2));
  ASSERT_EQ(r.status, lp::Status::Optimal);
  EXPECT_EQ(r.mechanism.prices[0].q, Price(R(5)));
  EXPECT_EQ(r.revenue, R(8));
}

TEST(Fptas, IntegralAuditedAndBelowExact) {
  std::mt19937 rng(15);
  int feasible = 0;
  for (int k = 0; k < 60; ++k) {
    auto inst = testutil::random_instance(rng, 2, 3, 6);
    auto fd = random_first_day(rng, inst);
    if (k % 2) {
      fd.clear();
      for (auto& pq : exact_small_solver(inst).mechanism.prices) fd.push_back(pq.p);
    }
    auto exact = exact_small_solver_opt(inst, {fd});
    Rational prev = -1;
    for (auto eps : {R(1), R(1, 2), R(1, 4), R(1, 8)}) {
      auto r = fptas_fixed_first_day(inst, fd, eps);
      if (r.status != lp::Status::Optimal) {
        EXPECT_FALSE(r.binding.empty());
        continue;
      }
      ASSERT_TRUE(exact.has_value()) << k;
      EXPECT_TRUE(r.integral);
      auto rep = check_deterministic(inst, r.mechanism);
      EXPECT_TRUE(rep.feasible);
      EXPECT_EQ(rep.revenue, r.revenue);
      EXPECT_LE(r.revenue, exact->revenue);
      EXPECT_GE(r.revenue, prev);  // nested grids
      prev = r.revenue;
    }
    if (!exact) continue;
    ++feasible;
    // A grid through the exact optimum's prices loses nothing.
    auto r = fptas_fixed_first_day(inst, fd, containing_step(inst, exact->mechanism));
    ASSERT_EQ(r.status, lp::Status::Optimal) << k;
    EXPECT_EQ(r.revenue, exact->revenue) << k;
  }
  EXPECT_GT(feasible, 30);
}

TEST(Fptas, InfeasibleReportsBinding) {
  // Same day 2 for both, so IC pins G(q_b) - G(q_a) to the first-day price
  // difference 1, more than the whole day-2 option value 1/2.
  TwoDayInstance inst{{{R(1, 2), R(1), Distribution::point(R(1, 2))}, {R(1, 2), R(2), Distribution::point(R(1, 2))}}};
  std::vector<Price> fd{Price(R(0)), Price(R(1))};
  auto r = fptas_fixed_first_day(inst, fd, R(1, 4));
  EXPECT_EQ(r.status, lp::Status::Infeasible);
  EXPECT_EQ(r.binding, "pair (1, 2)");
  EXPECT_FALSE(exact_small_solver_opt(inst, {fd}).has_value());
  r = fptas_fixed_first_day(inst, {Price(R(3, 2)), Price(R(1))}, R(1, 4));
  EXPECT_NE(r.binding.find("IR"), std::string::npos);
  EXPECT_THROW(fptas_fixed_first_day(inst, fd, R(0)), std::invalid_argument);
}

TEST(Independent, PointMassSeparates) {
  std::mt19937 rng(16);
  for (int k = 0; k < 30; ++k) {
    auto inst = testutil::random_independent_instance(rng, 3, 1, 8);
    Rational c = inst.types[0].day2.max_value();
    auto s = independent_days_solver(inst);
    EXPECT_EQ(s.revenue, myerson(inst.day1_marginal()).revenue + c);
    EXPECT_EQ(exact_small_solver(inst).revenue, s.revenue);
  }
}

TEST(Independent, MatchesExactSmall) {
  std::mt19937 rng(17);
  for (int k = 0; k < 60; ++k) {
    auto inst = testutil::random_independent_instance(rng, 2 + k % 3, 4, 8);
    auto a = independent_days_solver(inst);
    auto rep = check_deterministic(inst, a.mechanism);
    ASSERT_TRUE(rep.feasible) << k;
    EXPECT_EQ(rep.revenue, a.revenue);
    EXPECT_EQ(a.revenue, exact_small_solver(inst).revenue) << k;
  }
}

TEST(Independent, AdjacentPairsSuffice) {
  std::mt19937 rng(18);
  for (int k = 0; k < 60; ++k) {
    auto inst = testutil::random_independent_instance(rng, 4, 4, 8);
    auto s = independent_days_solver(inst);
    std::vector<size_t> order(inst.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return inst.types[a].v1 < inst.types[b].v1; });
    bool adjacent = true;
    for (size_t r = 0; r + 1 < order.size(); ++r) {
      size_t a = order[r], b = order[r + 1];
      adjacent = adjacent && det_utility(inst.types[a], s.mechanism.prices[a]) >= det_utility(inst.types[a], s.mechanism.prices[b]);
      adjacent = adjacent && det_utility(inst.types[b], s.mechanism.prices[b]) >= det_utility(inst.types[b], s.mechanism.prices[a]);
    }
    for (size_t i = 0; i < inst.size(); ++i)
      if (s.mechanism.prices[i].p.finite()) adjacent = adjacent && s.mechanism.prices[i].p.value() <= inst.types[i].v1;
    EXPECT_EQ(adjacent, check_deterministic(inst, s.mechanism).feasible);
  }
}

TEST(Independent, RejectsCorrelatedInstance) {
  TwoDayInstance inst{{{R(1, 2), R(1), Distribution::point(R(2))}, {R(1, 2), R(2), Distribution::point(R(3))}}};
  EXPECT_THROW(independent_days_solver(inst), std::invalid_argument);
}
