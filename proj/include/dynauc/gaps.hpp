#pragma once

#include <optional>

#include "dynauc/audit.hpp"
#include "dynauc/budget.hpp"
#include "dynauc/detsolve.hpp"
#include "dynauc/randsolve.hpp"

namespace dynauc {

// c · pow2[a, b]: c·2^{a+i} with probability 2^{-i-1} for i = 0..b-a, and 0
// with the remaining 2^{-(b-a+1)}. The mean is c·2^{a-1}(b-a+1).
inline Distribution pow2_distribution(long a, long b, const Rational& c = Rational(1)) {
  if (b < a) throw std::invalid_argument("pow2 needs b >= a, got [" + std::to_string(a) + "," + std::to_string(b) + "]");
  if (c.sign() < 0) throw std::invalid_argument("pow2 scale must be non-negative");
  if (c.is_zero()) return Distribution::point(Rational(0));
  std::vector<Distribution::Atom> atoms;
  Rational v = c * Rational::pow(Rational(2), a), p(1, 2);
  for (long i = 0; i <= b - a; ++i) {
    atoms.emplace_back(v, p);
    v *= 2;
    p /= 2;
  }
  atoms.emplace_back(Rational(0), p * 2);  // 2^{-(b-a+1)}
  return Distribution(std::move(atoms));
}

// Equal-revenue distribution on {1..vmax}: Pr[v >= t] = 1/t.
inline Distribution equal_revenue_distribution(long vmax) {
  if (vmax < 1) throw std::invalid_argument("equal-revenue support needs vmax >= 1");
  std::vector<Distribution::Atom> atoms;
  for (long t = 1; t < vmax; ++t) atoms.emplace_back(Rational(t), Rational(1, t) - Rational(1, t + 1));
  atoms.emplace_back(Rational(vmax), Rational(1, vmax));
  return Distribution(std::move(atoms));
}

enum class GapKind { Harmonic, IntroIndependent, Correlated, RandVsDet };

inline std::string to_string(GapKind k) {
  switch (k) {
    case GapKind::Harmonic: return "harmonic";
    case GapKind::IntroIndependent: return "intro_independent";
    case GapKind::Correlated: return "correlated";
    case GapKind::RandVsDet: return "rand_vs_det";
  }
  return "?";
}

inline GapKind parse_gap_kind(const std::string& s) {
  for (auto k : {GapKind::Harmonic, GapKind::IntroIndependent, GapKind::Correlated, GapKind::RandVsDet})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown family \"" + s + "\" (expected harmonic, intro_independent, correlated or rand_vs_det)");
}

struct GapFamily {
  GapKind kind;
  long n = 0;
  std::optional<TwoDayInstance> instance;  // two-day families
  std::optional<Distribution> single_day;  // harmonic
  std::vector<std::pair<std::string, DeterministicMechanism>> deterministic;
  std::vector<std::pair<std::string, RandomizedMechanism>> randomized;
  // Analytic ceiling on deterministic revenue, stated rather than computed.
  std::optional<Rational> deterministic_bound;
};

namespace detail {

inline Rational two_pow(long e) { return Rational::pow(Rational(2), e); }

// Day-1 types 2^k with probability 2^{-k} (k = 1..n) and 0 with 2^{-n}.
template <class Day2>
TwoDayInstance pow2_first_day(long n, Day2 day2_of) {
  TwoDayInstance inst;
  inst.types.push_back({two_pow(-n), Rational(0), day2_of(0)});
  for (long k = 1; k <= n; ++k) inst.types.push_back({two_pow(-k), two_pow(k), day2_of(k)});
  return inst;
}

// Full price on day 1, the day-2 item free with probability x_k.
inline RandomizedMechanism full_price_free_lottery(const TwoDayInstance& inst, const std::vector<Rational>& x) {
  RandomizedMechanism m;
  for (size_t k = 0; k < inst.size(); ++k) {
    Lottery day2{{Price(Rational(0)), x[k]}, {Price::no_sale(), Rational(1) - x[k]}};
    m.lotteries.push_back({{{Price(inst.types[k].v1), Rational(1)}}, canonical_lottery(day2)});
  }
  return m;
}

}  // namespace detail

// Highest day-1 prices making (p_i, q_i) IC and ex-post IR with every type
// served on day 1, for fixed day-2 prices. IC reads p_i <= p_j + G_i(q_i) - G_i(q_j)
// and IR p_i <= v1_i, so the answer is the shortest-path potential
// (Bellman-Ford). Empty if a negative cycle or a negative price appears.
inline std::optional<DeterministicMechanism> highest_ic_first_day(const TwoDayInstance& inst, const std::vector<Price>& q) {
  const size_t n = inst.size();
  std::vector<Rational> p;
  for (auto& t : inst.types) p.push_back(t.v1);
  for (size_t round = 0; round <= n; ++round) {
    bool changed = false;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        const auto& F = inst.types[i].day2;
        Rational bound = p[j] + day2_utility(F, q[i]) - day2_utility(F, q[j]);
        if (bound < p[i]) {
          p[i] = bound;
          changed = true;
        }
      }
    if (!changed) {
      DeterministicMechanism m;
      for (size_t i = 0; i < n; ++i) {
        if (p[i].sign() < 0) return std::nullopt;
        m.prices.push_back({Price(p[i]), q[i]});
      }
      return m;
    }
  }
  return std::nullopt;
}

inline GapFamily gap_family(GapKind kind, long n) {
  using detail::two_pow;
  auto limit = [&](long lo, long hi) {
    if (n < lo) throw std::invalid_argument(to_string(kind) + " needs n >= " + std::to_string(lo));
    if (n > hi)
      throw BudgetExceeded(to_string(kind) + " with n=" + std::to_string(n) + " exceeds the materialization budget (n <= " +
                           std::to_string(hi) + ")");
  };
  GapFamily f{kind, n, {}, {}, {}, {}, {}};
  switch (kind) {
    case GapKind::Harmonic: {
      limit(1, 100000);
      f.single_day = equal_revenue_distribution(n);
      break;
    }
    case GapKind::IntroIndependent: {
      limit(1, 10);
      const long N = 1L << n;
      Distribution day2 = pow2_distribution(1, N);
      auto inst = detail::pow2_first_day(n, [&](long) { return day2; });
      // Lottery v1/N: every report leaves the buyer exactly v1.
      std::vector<Rational> x;
      for (auto& t : inst.types) x.push_back(t.v1 / Rational(N));
      f.randomized.push_back({"full price, free day-2 item w.p. v1/N", detail::full_price_free_lottery(inst, x)});
      // Day-2 price 2^{N-v1}; day-1 price equal to the day-2 utility it leaves.
      DeterministicMechanism d;
      d.prices.push_back({Price::no_sale(), Price::no_sale()});
      for (long k = 1; k <= n; ++k) {
        Price q(two_pow(N - (1L << k)));
        d.prices.push_back({Price(day2_utility(day2, q)), q});
      }
      f.deterministic.push_back({"day-1 price = day-2 utility at q = 2^(N-v1)", d});
      f.instance = std::move(inst);
      break;
    }
    case GapKind::Correlated: {
      limit(1, 5);
      auto inst = detail::pow2_first_day(n, [&](long k) {
        return k == 0 ? Distribution::point(Rational(0)) : pow2_distribution(1, n * n, two_pow(k) / Rational(n));
      });
      std::vector<Rational> x{Rational(0)};
      for (long k = 1; k <= n; ++k) x.push_back(Rational(k, n));
      f.randomized.push_back({"full price, free day-2 item w.p. k/n", detail::full_price_free_lottery(inst, x)});
      DeterministicMechanism d;
      d.prices.push_back({Price(Rational(0)), Price::no_sale()});
      for (long k = 1; k <= n; ++k) d.prices.push_back({Price(two_pow(k)), Price(two_pow(n * n - n * k) / Rational(n))});
      f.deterministic.push_back({"full price, day-2 price 2^(n^2-nk)/n", d});
      // The printed pair fails the audit; keep its day-2 prices and
      // lower the day-1 prices to the IC frontier.
      std::vector<Price> q;
      for (auto& pq : d.prices) q.push_back(pq.q);
      if (auto fixed = highest_ic_first_day(inst, q)) f.deterministic.push_back({"day-2 price 2^(n^2-nk)/n, IC day-1 prices", *fixed});
      f.instance = std::move(inst);
      break;
    }
    case GapKind::RandVsDet: {
      limit(1, 4);
      const long m = 2 * n * n;
      auto inst = detail::pow2_first_day(n, [&](long i) {
        if (i == 0) return Distribution::point(Rational(0));
        Distribution zero = Distribution::point(Rational(0));
        Distribution tail = pow2_distribution(1, n * n, two_pow((m + 1) * i) / Rational(n));
        Rational w = two_pow(-m * i);
        return Distribution::mixture({{Rational(1) - w, &zero}, {w, &tail}});
      });
      std::vector<Rational> x{Rational(0)};
      for (long k = 1; k <= n; ++k) x.push_back(Rational(k, n));
      f.randomized.push_back({"full price, free day-2 item w.p. k/n", detail::full_price_free_lottery(inst, x)});
      f.deterministic_bound = Rational(7);
      f.instance = std::move(inst);
      break;
    }
  }
  return f;
}

// Best fixed price on each day against the marginals, scanning every support value.
struct FixedPriceScan {
  Rational best_day1, best_day2;
  Rational price_day1, price_day2;
};

inline FixedPriceScan fixed_price_scan(const TwoDayInstance& inst) {
  FixedPriceScan s;
  auto scan = [](const Distribution& d, Rational& best, Rational& at) {
    best = 0;
    at = 0;
    for (auto& [v, p] : d.atoms())
      if (v * d.tail(v) > best) {
        best = v * d.tail(v);
        at = v;
      }
  };
  scan(inst.day1_marginal(), s.best_day1, s.price_day1);
  scan(inst.day2_marginal(), s.best_day2, s.price_day2);
  return s;
}

struct GapReport {
  struct Row {
    std::string name;
    Rational value;
  };
  struct Candidate {
    std::string name;
    bool randomized = false;
    bool feasible = false;
    Rational revenue;
  };
  struct Comparison {
    std::string lower, upper;
    bool ok = false;
  };
  struct Ratio {
    std::string upper, lower;
    Rational value;
  };

  GapKind kind;
  long n = 0;
  Rational social_welfare, non_adaptive;
  std::optional<Rational> deterministic_opt, randomized_opt, deterministic_bound;
  std::optional<bool> price_independent;  // harmonic only
  std::vector<Candidate> candidates;
  std::vector<std::string> skipped;
  std::vector<Comparison> ladder;
  std::vector<Ratio> ratios;

  bool ladder_ok() const {
    for (auto& c : ladder)
      if (!c.ok) return false;
    return true;
  }
  const Candidate* candidate(const std::string& name) const {
    for (auto& c : candidates)
      if (c.name == name) return &c;
    return nullptr;
  }
};

inline GapReport gap_report(const GapFamily& f, const Budget& budget = Budget::from_env()) {
  GapReport r;
  r.kind = f.kind;
  r.n = f.n;
  r.deterministic_bound = f.deterministic_bound;
  std::vector<GapReport::Row> rows;  // highest benchmark first
  auto cmp = [&](const std::string& lo, const Rational& a, const std::string& hi, const Rational& b) {
    r.ladder.push_back({lo, hi, a <= b});
  };

  if (f.single_day) {
    const Distribution& d = *f.single_day;
    r.social_welfare = d.expectation();
    r.non_adaptive = myerson(d).revenue;
    bool same = true;
    for (auto& [v, p] : d.atoms()) same = same && v * d.tail(v) == r.non_adaptive;
    r.price_independent = same;
    // A single day admits no adaptivity: every class collapses to the posted price.
    r.deterministic_opt = r.randomized_opt = r.non_adaptive;
    rows = {{"SW", r.social_welfare}, {"Rev(posted price)", r.non_adaptive}};
    cmp("Rev(posted price)", r.non_adaptive, "SW", r.social_welfare);
  } else {
    const TwoDayInstance& inst = *f.instance;
    r.social_welfare = inst.social_welfare();
    r.non_adaptive = non_adaptive_opt(inst).revenue;
    for (auto& [name, m] : f.deterministic) {
      auto a = check_deterministic(inst, m);
      r.candidates.push_back({name, false, a.feasible, a.revenue});
    }
    for (auto& [name, m] : f.randomized) {
      auto a = check_randomized(inst, m);
      r.candidates.push_back({name, true, a.feasible, a.revenue});
    }
    try {
      r.deterministic_opt = exact_small_solver(inst, budget).revenue;
    } catch (const lp::ResourceLimit& e) {
      r.skipped.push_back(std::string("deterministic optimum: ") + e.what());
    }
    try {
      r.randomized_opt = solve_two_day(inst, budget).revenue;
    } catch (const lp::ResourceLimit& e) {
      r.skipped.push_back(std::string("randomized optimum: ") + e.what());
    }
    rows.push_back({"SW", r.social_welfare});
    if (r.randomized_opt) rows.push_back({"Rev(randomized)", *r.randomized_opt});
    if (r.deterministic_opt) rows.push_back({"Rev(deterministic)", *r.deterministic_opt});
    for (auto& c : r.candidates)
      if (c.feasible) rows.push_back({c.name, c.revenue});
    rows.push_back({"Rev(non-adaptive)", r.non_adaptive});

    // Optima in order, then every candidate under the optimum of its class.
    std::vector<GapReport::Row> chain{{"Rev(non-adaptive)", r.non_adaptive}};
    if (r.deterministic_opt) chain.push_back({"Rev(deterministic)", *r.deterministic_opt});
    if (r.randomized_opt) chain.push_back({"Rev(randomized)", *r.randomized_opt});
    chain.push_back({"SW", r.social_welfare});
    for (size_t k = 0; k + 1 < chain.size(); ++k) cmp(chain[k].name, chain[k].value, chain[k + 1].name, chain[k + 1].value);
    for (auto& c : r.candidates) {
      if (!c.feasible) continue;
      if (!c.randomized && r.deterministic_opt) cmp(c.name, c.revenue, "Rev(deterministic)", *r.deterministic_opt);
      if (r.randomized_opt) cmp(c.name, c.revenue, "Rev(randomized)", *r.randomized_opt);
      cmp(c.name, c.revenue, "SW", r.social_welfare);
    }
  }
  for (size_t a = 0; a < rows.size(); ++a)
    for (size_t b = a + 1; b < rows.size(); ++b)
      if (rows[b].value.sign() > 0) r.ratios.push_back({rows[a].name, rows[b].name, rows[a].value / rows[b].value});
  return r;
}

}  // namespace dynauc
