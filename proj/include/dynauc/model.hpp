#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dynauc/distribution.hpp"
#include "dynauc/rational.hpp"

namespace dynauc {

struct BuyerType {
  Rational prob;
  Rational v1;
  Distribution day2;
};

// Buyer types are identified by their day-1 valuation.
struct TwoDayInstance {
  std::vector<BuyerType> types;

  size_t size() const { return types.size(); }

  void validate() const {
    if (types.empty()) throw std::invalid_argument("instance has no types");
    Rational total = 0;
    std::set<Rational> seen;
    for (size_t i = 0; i < types.size(); ++i) {
      const auto& t = types[i];
      if (t.prob.sign() <= 0) throw std::invalid_argument("types[" + std::to_string(i) + "].prob must be positive");
      if (t.v1.sign() < 0) throw std::invalid_argument("types[" + std::to_string(i) + "].v1 is negative");
      if (!seen.insert(t.v1).second) throw std::invalid_argument("duplicate v1 value " + t.v1.str());
      total += t.prob;
    }
    if (total != 1) throw std::invalid_argument("probability mass " + total.str() + " ≠ 1");
  }

  int index_of(const Rational& v1) const {
    for (size_t i = 0; i < types.size(); ++i)
      if (types[i].v1 == v1) return static_cast<int>(i);
    return -1;
  }

  // Sorted union of all day-2 supports.
  std::vector<Rational> day2_values() const {
    std::set<Rational> s;
    for (auto& t : types)
      for (auto& a : t.day2.atoms()) s.insert(a.first);
    return {s.begin(), s.end()};
  }

  Distribution day1_marginal() const {
    std::vector<Distribution::Atom> a;
    for (auto& t : types) a.emplace_back(t.v1, t.prob);
    return Distribution::from_weights(std::move(a));
  }

  Distribution day2_marginal() const {
    std::vector<std::pair<Rational, const Distribution*>> parts;
    for (auto& t : types) parts.emplace_back(t.prob, &t.day2);
    return Distribution::mixture(parts);
  }

  // Expected total value, the ceiling on any mechanism's revenue.
  Rational social_welfare() const {
    Rational sw = 0;
    for (auto& t : types) sw += t.prob * (t.v1 + t.day2.expectation());
    return sw;
  }

  bool days_independent() const {
    for (auto& t : types)
      if (!(t.day2 == types.front().day2)) return false;
    return true;
  }
};

struct PricePair {
  Price p;  // day 1
  Price q;  // day 2
};

struct DeterministicMechanism {
  std::vector<PricePair> prices;  // aligned with instance types
};

// price -> probability, sorted by price, no duplicates.
using Lottery = std::vector<std::pair<Price, Rational>>;

inline Lottery canonical_lottery(Lottery l) {
  std::sort(l.begin(), l.end(), [](auto& a, auto& b) { return a.first < b.first; });
  Lottery out;
  for (auto& e : l) {
    if (!out.empty() && out.back().first == e.first)
      out.back().second += e.second;
    else
      out.push_back(e);
  }
  std::erase_if(out, [](auto& e) { return e.second.is_zero(); });
  return out;
}

struct TypeLotteries {
  Lottery day1;
  Lottery day2;
  bool operator==(const TypeLotteries&) const = default;
};

struct RandomizedMechanism {
  std::vector<TypeLotteries> lotteries;  // aligned with instance types

  static RandomizedMechanism from_deterministic(const DeterministicMechanism& m) {
    RandomizedMechanism r;
    for (auto& pq : m.prices) r.lotteries.push_back({{{pq.p, Rational(1)}}, {{pq.q, Rational(1)}}});
    return r;
  }
  bool operator==(const RandomizedMechanism&) const = default;
};

// Several independent bidders over D days. Each bidder's day-d value is
// drawn from a table keyed by that bidder's own value history.
struct MultiDayBidder {
  std::vector<std::vector<Rational>> supports;                 // [day] -> values
  std::map<std::vector<Rational>, Distribution> conditionals;  // history -> next-day distribution
};

struct MultiDayInstance {
  int days = 0;
  std::vector<MultiDayBidder> bidders;

  const Distribution& conditional(size_t bidder, const std::vector<Rational>& history) const {
    auto& c = bidders.at(bidder).conditionals;
    auto it = c.find(history);
    if (it == c.end()) throw std::invalid_argument("missing conditional for bidder " + std::to_string(bidder));
    return it->second;
  }

  // Every history of positive probability needs a table whose atoms lie in
  // the day's support.
  void validate() const {
    if (days < 1) throw std::invalid_argument("days must be positive");
    if (bidders.empty()) throw std::invalid_argument("no bidders");
    for (size_t b = 0; b < bidders.size(); ++b) {
      auto& bd = bidders[b];
      if (bd.supports.size() != static_cast<size_t>(days))
        throw std::invalid_argument("bidder " + std::to_string(b) + ": supports must list one set per day");
      std::vector<std::vector<Rational>> frontier{{}};
      for (int d = 0; d < days; ++d) {
        std::vector<std::vector<Rational>> next;
        std::set<Rational> sup(bd.supports[d].begin(), bd.supports[d].end());
        for (auto& h : frontier) {
          auto& dist = conditional(b, h);
          for (auto& [v, p] : dist.atoms()) {
            if (!sup.count(v))
              throw std::invalid_argument("bidder " + std::to_string(b) + ": value " + v.str() + " outside day " +
                                          std::to_string(d + 1) + " support");
            auto h2 = h;
            h2.push_back(v);
            next.push_back(std::move(h2));
          }
        }
        frontier = std::move(next);
      }
    }
  }

  // One bidder, two days, built from a two-day instance.
  static MultiDayInstance from_two_day(const TwoDayInstance& inst) {
    MultiDayInstance m;
    m.days = 2;
    MultiDayBidder b;
    b.supports.resize(2);
    for (auto& t : inst.types) b.supports[0].push_back(t.v1);
    b.supports[1] = inst.day2_values();
    std::sort(b.supports[0].begin(), b.supports[0].end());
    b.conditionals.emplace(std::vector<Rational>{}, inst.day1_marginal());
    for (auto& t : inst.types) b.conditionals.emplace(std::vector<Rational>{t.v1}, t.day2);
    m.bidders.push_back(std::move(b));
    return m;
  }
};

}  // namespace dynauc
