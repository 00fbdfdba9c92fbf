#pragma once

#include <string>
#include <vector>

#include "dynauc/model.hpp"

namespace dynauc {

struct Violation {
  int type = -1;      // true type
  int reported = -1;  // -1 for an IR violation
  std::string kind;
  Rational lhs;  // required lhs >= rhs
  Rational rhs;
  Rational slack;  // rhs - lhs, strictly positive
};

struct AuditReport {
  bool feasible = true;
  std::vector<Violation> violations;
  Rational revenue;
  Rational day1_revenue;
  Rational day2_revenue;
};

inline Rational day2_utility(const Distribution& d, const Price& q) { return d.tail_integral(q); }

// Revenue of one type charged (p, q) when it reports truthfully.
inline Rational type_revenue(const BuyerType& t, const PricePair& pq) {
  Rational r = 0;
  if (pq.p.finite()) r += pq.p.value();
  if (pq.q.finite()) r += pq.q.value() * t.day2.tail(pq.q.value());
  return r;
}

// Utility of true type t when offered (p, q); a finite day-1 price is paid.
inline Rational det_utility(const BuyerType& t, const PricePair& pq) {
  Rational u = day2_utility(t.day2, pq.q);
  if (pq.p.finite()) u += t.v1 - pq.p.value();
  return u;
}

inline const char* det_case(const PricePair& a, const PricePair& b) {
  if (a.p.finite() && b.p.finite()) return "IC both-receive";
  if (!a.p.finite() && !b.p.finite()) return "IC neither-receives";
  return "IC mixed";
}

inline AuditReport check_deterministic(const TwoDayInstance& inst, const DeterministicMechanism& mech) {
  if (mech.prices.size() != inst.size())
    throw std::invalid_argument("mechanism has " + std::to_string(mech.prices.size()) + " entries for " +
                                std::to_string(inst.size()) + " types");
  AuditReport rep;
  rep.day1_revenue = 0;
  rep.day2_revenue = 0;
  const size_t n = inst.size();
  std::vector<Rational> truthful(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& t = inst.types[i];
    const auto& pq = mech.prices[i];
    if (pq.p.finite()) {
      rep.day1_revenue += t.prob * pq.p.value();
      if (pq.p.value() > t.v1)
        rep.violations.push_back({int(i), -1, "IR day-1", t.v1, pq.p.value(), pq.p.value() - t.v1});
    }
    if (pq.q.finite()) rep.day2_revenue += t.prob * pq.q.value() * t.day2.tail(pq.q.value());
    truthful[i] = det_utility(t, pq);
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      Rational dev = det_utility(inst.types[i], mech.prices[j]);
      if (truthful[i] < dev)
        rep.violations.push_back({int(i), int(j), det_case(mech.prices[i], mech.prices[j]), truthful[i], dev, dev - truthful[i]});
    }
  rep.revenue = rep.day1_revenue + rep.day2_revenue;
  rep.feasible = rep.violations.empty();
  return rep;
}

inline void check_lottery(const Lottery& l, const std::string& what) {
  Rational total = 0;
  for (auto& [p, m] : l) {
    if (m.sign() < 0) throw std::invalid_argument(what + ": negative probability");
    total += m;
  }
  if (total != 1) throw std::invalid_argument(what + ": lottery mass " + total.str() + " ≠ 1");
}

// U(v, u): prices above the declared value u are never purchased.
inline Rational rand_utility(const BuyerType& truth, const BuyerType& declared, const TypeLotteries& lot) {
  Rational u = 0;
  for (auto& [p, m] : lot.day1)
    if (p.finite() && p.value() <= declared.v1) u += m * (truth.v1 - p.value());
  for (auto& [q, m] : lot.day2)
    if (q.finite()) u += m * truth.day2.tail_integral(q);
  return u;
}

inline AuditReport check_randomized(const TwoDayInstance& inst, const RandomizedMechanism& mech) {
  if (mech.lotteries.size() != inst.size())
    throw std::invalid_argument("mechanism has " + std::to_string(mech.lotteries.size()) + " entries for " +
                                std::to_string(inst.size()) + " types");
  const size_t n = inst.size();
  for (size_t i = 0; i < n; ++i) {
    check_lottery(mech.lotteries[i].day1, "type " + std::to_string(i) + " day-1");
    check_lottery(mech.lotteries[i].day2, "type " + std::to_string(i) + " day-2");
  }
  AuditReport rep;
  rep.day1_revenue = 0;
  rep.day2_revenue = 0;
  std::vector<Rational> truthful(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& t = inst.types[i];
    for (auto& [p, m] : mech.lotteries[i].day1)
      if (p.finite() && p.value() <= t.v1) rep.day1_revenue += t.prob * m * p.value();
    for (auto& [q, m] : mech.lotteries[i].day2)
      if (q.finite()) rep.day2_revenue += t.prob * m * q.value() * t.day2.tail(q.value());
    truthful[i] = rand_utility(t, t, mech.lotteries[i]);
  }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      Rational dev = rand_utility(inst.types[i], inst.types[j], mech.lotteries[j]);
      if (truthful[i] < dev) rep.violations.push_back({int(i), int(j), "IC", truthful[i], dev, dev - truthful[i]});
    }
  rep.revenue = rep.day1_revenue + rep.day2_revenue;
  rep.feasible = rep.violations.empty();
  return rep;
}

struct MyersonResult {
  Rational price;
  Rational revenue;
};

// Posted price maximizing v * Pr[value >= v] over the support; lowest wins ties.
inline MyersonResult myerson(const Distribution& d) {
  MyersonResult best{Rational(0), Rational(0)};
  bool found = false;
  for (auto& [v, p] : d.atoms()) {
    if (v.is_zero()) continue;
    Rational r = v * d.tail(v);
    if (!found || r > best.revenue) {
      best = {v, r};
      found = true;
    }
  }
  return best;
}

}  // namespace dynauc
