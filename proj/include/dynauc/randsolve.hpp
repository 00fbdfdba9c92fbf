#pragma once

#include <functional>
#include <set>

#include "dynauc/audit.hpp"
#include "dynauc/budget.hpp"
#include "dynauc/lp.hpp"
#include "dynauc/model.hpp"

namespace dynauc {

// Candidate prices for one day: the valuation support plus 0 and NoSale.
struct PriceGrid {
  std::vector<Rational> finite;  // sorted, contains 0

  static PriceGrid from_values(const std::vector<Rational>& values) {
    std::set<Rational> s(values.begin(), values.end());
    s.insert(Rational(0));
    return PriceGrid{{s.begin(), s.end()}};
  }
  bool contains(const Rational& x) const { return std::binary_search(finite.begin(), finite.end(), x); }
};

inline PriceGrid day1_grid(const TwoDayInstance& inst) {
  std::vector<Rational> v;
  for (auto& t : inst.types) v.push_back(t.v1);
  return PriceGrid::from_values(v);
}
inline PriceGrid day2_grid(const TwoDayInstance& inst) { return PriceGrid::from_values(inst.day2_values()); }

namespace detail {

// Splits an off-grid price onto its two grid neighbours, preserving the
// expected price. Prices above `cap` become NoSale.
inline void split_onto_grid(const PriceGrid& g, const Price& p, const Rational& mass, const Rational& cap, Lottery& out) {
  if (!p.finite() || p.value() > cap) {
    out.emplace_back(Price::no_sale(), mass);
    return;
  }
  const Rational& x = p.value();
  if (g.contains(x)) {
    out.emplace_back(p, mass);
    return;
  }
  auto hi = std::upper_bound(g.finite.begin(), g.finite.end(), x);
  const Rational& b = *hi;
  const Rational& a = *(hi - 1);
  Rational alpha = (b - x) / (b - a);  // x = alpha*a + (1-alpha)*b
  out.emplace_back(Price(a), alpha * mass);
  out.emplace_back(Price(b), (Rational(1) - alpha) * mass);
}

}  // namespace detail

// Moves every price onto the grid without changing any (true, reported)
// utility. Day-1 prices above the declared value are dropped to NoSale
// first, so a split never creates a price some deviator would pay.
inline RandomizedMechanism normalize_prices(const TwoDayInstance& inst, const RandomizedMechanism& mech) {
  auto g1 = day1_grid(inst);
  auto g2 = day2_grid(inst);
  const Rational& top2 = g2.finite.back();
  RandomizedMechanism out;
  for (size_t u = 0; u < inst.size(); ++u) {
    TypeLotteries l;
    for (auto& [p, m] : mech.lotteries[u].day1) detail::split_onto_grid(g1, p, m, inst.types[u].v1, l.day1);
    for (auto& [q, m] : mech.lotteries[u].day2) detail::split_onto_grid(g2, q, m, top2, l.day2);
    l.day1 = canonical_lottery(std::move(l.day1));
    l.day2 = canonical_lottery(std::move(l.day2));
    out.lotteries.push_back(std::move(l));
  }
  return out;
}

struct RandomizedSolution {
  RandomizedMechanism mechanism;
  Rational revenue;
  lp::Problem program;
  lp::Solution lp_solution;
};

// The semi-adaptive randomized optimum: one price lottery per day for each
// reported type, IC as U(v,v) >= U(v,u) over all ordered pairs.
inline lp::Problem two_day_program(const TwoDayInstance& inst, std::vector<std::vector<std::pair<Price, int>>>& x1,
                                   std::vector<std::vector<std::pair<Price, int>>>& x2) {
  using lp::Relation;
  using lp::Term;
  lp::Problem prob;
  auto g1 = day1_grid(inst);
  auto g2 = day2_grid(inst);
  const size_t n = inst.size();
  x1.assign(n, {});
  x2.assign(n, {});
  for (size_t u = 0; u < n; ++u) {
    const auto& t = inst.types[u];
    std::vector<Price> d1;
    for (auto& p : g1.finite)
      if (p <= t.v1) d1.emplace_back(p);
    d1.push_back(Price::no_sale());
    for (auto& p : d1) {
      int v = prob.add_var("x1[" + t.v1.str() + "][" + p.str() + "]");
      x1[u].emplace_back(p, v);
      if (p.finite()) prob.add_objective(v, t.prob * p.value());
    }
    std::vector<Price> d2(g2.finite.begin(), g2.finite.end());
    d2.push_back(Price::no_sale());
    for (auto& q : d2) {
      int v = prob.add_var("x2[" + t.v1.str() + "][" + q.str() + "]");
      x2[u].emplace_back(q, v);
      if (q.finite()) prob.add_objective(v, t.prob * q.value() * t.day2.tail(q.value()));
    }
    std::vector<Term> s1, s2;
    for (auto& [p, v] : x1[u]) s1.push_back({v, Rational(1)});
    for (auto& [q, v] : x2[u]) s2.push_back({v, Rational(1)});
    prob.add_constraint(std::move(s1), Relation::Equal, 1, "simplex1[" + t.v1.str() + "]");
    prob.add_constraint(std::move(s2), Relation::Equal, 1, "simplex2[" + t.v1.str() + "]");
  }
  // Utility of true type i from type u's lotteries, as LP terms with sign.
  auto utility_terms = [&](size_t i, size_t u, int sign, std::vector<Term>& out) {
    const auto& ti = inst.types[i];
    for (auto& [p, v] : x1[u])
      if (p.finite()) out.push_back({v, Rational(sign) * (ti.v1 - p.value())});
    for (auto& [q, v] : x2[u])
      if (q.finite()) out.push_back({v, Rational(sign) * ti.day2.tail_integral(q)});
  };
  for (size_t i = 0; i < n; ++i)
    for (size_t u = 0; u < n; ++u) {
      if (i == u) continue;
      std::vector<Term> row;
      utility_terms(i, i, 1, row);
      utility_terms(i, u, -1, row);
      prob.add_constraint(std::move(row), Relation::GreaterEq, 0,
                          "ic[" + inst.types[i].v1.str() + "->" + inst.types[u].v1.str() + "]");
    }
  return prob;
}

inline RandomizedSolution solve_two_day(const TwoDayInstance& inst, const Budget& budget = Budget::from_env()) {
  std::vector<std::vector<std::pair<Price, int>>> x1, x2;
  RandomizedSolution out;
  out.program = two_day_program(inst, x1, x2);
  budget.check_program(out.program, "two-day LP");
  out.lp_solution = lp::solve(out.program, budget.lp_options());
  if (out.lp_solution.status != lp::Status::Optimal)
    throw std::logic_error(std::string("two-day LP not optimal: ") + lp::to_string(out.lp_solution.status));
  for (size_t u = 0; u < inst.size(); ++u) {
    TypeLotteries l;
    for (auto& [p, v] : x1[u])
      if (!out.lp_solution.values[v].is_zero()) l.day1.emplace_back(p, out.lp_solution.values[v]);
    for (auto& [q, v] : x2[u])
      if (!out.lp_solution.values[v].is_zero()) l.day2.emplace_back(q, out.lp_solution.values[v]);
    out.mechanism.lotteries.push_back(std::move(l));
  }
  out.revenue = out.lp_solution.objective;
  return out;
}

}  // namespace dynauc
