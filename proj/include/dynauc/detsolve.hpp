#pragma once

#include <functional>
#include <optional>
#include <set>

#include "dynauc/audit.hpp"
#include "dynauc/budget.hpp"
#include "dynauc/lp.hpp"
#include "dynauc/model.hpp"

namespace dynauc {

struct NonAdaptiveResult {
  Rational p, q, revenue;
};

// Myerson on each day's marginal, independently.
inline NonAdaptiveResult non_adaptive_opt(const TwoDayInstance& inst) {
  auto m1 = myerson(inst.day1_marginal());
  auto m2 = myerson(inst.day2_marginal());
  return {m1.price, m2.price, m1.revenue + m2.revenue};
}

// The posted-price pair as a direct mechanism.
inline DeterministicMechanism posted_prices(const TwoDayInstance& inst, const Rational& p, const Rational& q) {
  DeterministicMechanism m;
  for (auto& t : inst.types) m.prices.push_back({t.v1 >= p ? Price(p) : Price::no_sale(), Price(q)});
  return m;
}

struct DeterministicSolution {
  DeterministicMechanism mechanism;
  Rational revenue;
  std::uint64_t lps_solved = 0;
};

struct ExactSmallOptions {
  std::optional<std::vector<Price>> first_day;  // fix day-1 prices per type
};

namespace detail {

// Breakpoints 0 = b_0 < ... < b_m of the union of day-2 supports. Interval
// k < m is [b_k, b_{k+1}]; F is constant on (b_k, b_{k+1}] so both revenue
// and every day-2 utility are affine in q there. k = m means NoSale.
struct Intervals {
  std::vector<Rational> b;
  size_t count() const { return b.size() - 1; }
};

inline Intervals intervals_of(const TwoDayInstance& inst) {
  std::set<Rational> s;
  s.insert(Rational(0));
  for (auto& v : inst.day2_values()) s.insert(v);
  return {{s.begin(), s.end()}};
}

struct Choice {
  bool win;
  size_t k;
};

class ExactSmall {
 public:
  ExactSmall(const TwoDayInstance& inst, const ExactSmallOptions& opt, const Budget& budget)
      : inst_(inst), opt_(opt), budget_(budget), iv_(intervals_of(inst)), n_(inst.size()) {
    const size_t m = iv_.count();
    // Per type: height on each interval and the tail integral beyond its right end.
    height_.assign(n_, std::vector<Rational>(m));
    beyond_.assign(n_, std::vector<Rational>(m));
    for (size_t i = 0; i < n_; ++i)
      for (size_t k = 0; k < m; ++k) {
        height_[i][k] = inst.types[i].day2.tail(iv_.b[k + 1]);
        beyond_[i][k] = inst.types[i].day2.tail_integral(Price(iv_.b[k + 1]));
      }
    rest_bound_.assign(n_ + 1, Rational(0));
    for (size_t i = n_; i-- > 0;) {
      const auto& t = inst.types[i];
      Rational day1 = t.v1;
      if (opt_.first_day) day1 = (*opt_.first_day)[i].finite() ? (*opt_.first_day)[i].value() : Rational(0);
      rest_bound_[i] = rest_bound_[i + 1] + t.prob * (day1 + myerson(t.day2).revenue);
    }
  }

  std::optional<DeterministicSolution> run(std::optional<DeterministicSolution> incumbent) {
    best_ = std::move(incumbent);
    std::vector<Choice> partial;
    dfs(partial);
    if (best_) best_->lps_solved = lps_;
    return best_;
  }

 private:
  std::vector<Choice> options(size_t i) const {
    std::vector<Choice> out;
    const size_t m = iv_.count();
    std::vector<bool> wins;
    if (opt_.first_day)
      wins = {(*opt_.first_day)[i].finite()};
    else
      wins = {true, false};
    for (bool w : wins)
      for (size_t k = 0; k <= m; ++k) out.push_back({w, k});
    return out;
  }

  struct Built {
    lp::Problem prob;
    std::vector<int> pvar, qvar;  // -1 when fixed / absent
  };

  Built build(const std::vector<Choice>& cs) const {
    using lp::Relation;
    using lp::Term;
    Built B;
    const size_t d = cs.size(), m = iv_.count();
    B.pvar.assign(d, -1);
    B.qvar.assign(d, -1);
    for (size_t i = 0; i < d; ++i) {
      const auto& t = inst_.types[i];
      if (cs[i].win && !opt_.first_day) {
        B.pvar[i] = B.prob.add_var("p" + std::to_string(i), Rational(0), t.v1);
        B.prob.add_objective(B.pvar[i], t.prob);
      }
      if (cs[i].k < m) {
        B.qvar[i] = B.prob.add_var("q" + std::to_string(i), iv_.b[cs[i].k], iv_.b[cs[i].k + 1]);
        B.prob.add_objective(B.qvar[i], t.prob * height_[i][cs[i].k]);
      }
    }
    // U(i <- j) = win_j (v_i - p_j) + G_i(q_j); rows U(i<-i) - U(i<-j) >= 0.
    auto add_utility = [&](size_t i, size_t j, const Rational& sign, std::vector<Term>& row, Rational& constant) {
      const auto& ti = inst_.types[i];
      if (cs[j].win) {
        constant += sign * ti.v1;
        if (B.pvar[j] >= 0)
          row.push_back({B.pvar[j], -sign});
        else
          constant -= sign * (*opt_.first_day)[j].value();
      }
      if (cs[j].k < m) {
        size_t k = cs[j].k;
        // (b_{k+1} - q) * F_i(b_{k+1}) + beyond
        constant += sign * (iv_.b[k + 1] * height_[i][k] + beyond_[i][k]);
        row.push_back({B.qvar[j], -sign * height_[i][k]});
      }
    };
    for (size_t i = 0; i < d; ++i)
      for (size_t j = 0; j < d; ++j) {
        if (i == j) continue;
        std::vector<Term> row;
        Rational constant = 0;
        add_utility(i, i, Rational(1), row, constant);
        add_utility(i, j, Rational(-1), row, constant);
        B.prob.add_constraint(std::move(row), Relation::GreaterEq, -constant, "ic" + std::to_string(i) + "_" + std::to_string(j));
      }
    return B;
  }

  Rational fixed_revenue(const std::vector<Choice>& cs) const {
    Rational r = 0;
    if (!opt_.first_day) return r;
    for (size_t i = 0; i < cs.size(); ++i)
      if (cs[i].win) r += inst_.types[i].prob * (*opt_.first_day)[i].value();
    return r;
  }

  void dfs(std::vector<Choice>& cs) {
    const size_t d = cs.size();
    if (d > 0) {
      budget_.check_enumeration(++lps_, "exact small-support search");
      Built B = build(cs);
      auto sol = lp::solve(B.prob, budget_.lp_options());
      if (sol.status != lp::Status::Optimal) return;
      Rational value = sol.objective + fixed_revenue(cs);
      if (best_ && value + rest_bound_[d] <= best_->revenue) return;
      if (d == n_) {
        DeterministicSolution s;
        s.revenue = value;
        for (size_t i = 0; i < n_; ++i) {
          Price p = Price::no_sale(), q = Price::no_sale();
          if (cs[i].win) p = B.pvar[i] >= 0 ? Price(sol.values[B.pvar[i]]) : (*opt_.first_day)[i];
          if (B.qvar[i] >= 0) q = Price(sol.values[B.qvar[i]]);
          s.mechanism.prices.push_back({p, q});
        }
        best_ = std::move(s);
        return;
      }
    }
    for (auto& c : options(d)) {
      cs.push_back(c);
      dfs(cs);
      cs.pop_back();
    }
  }

  const TwoDayInstance& inst_;
  ExactSmallOptions opt_;
  Budget budget_;
  Intervals iv_;
  size_t n_;
  std::vector<std::vector<Rational>> height_, beyond_;
  std::vector<Rational> rest_bound_;
  std::optional<DeterministicSolution> best_;
  std::uint64_t lps_ = 0;
};

}  // namespace detail

// Optimal deterministic mechanism by branch and bound over (day-1 outcome,
// day-2 interval) per type; each node is an LP over the assigned types.
// With fixed first-day prices the search is restricted accordingly and
// returns nullopt when no IC completion exists.
inline std::optional<DeterministicSolution> exact_small_solver_opt(const TwoDayInstance& inst, const ExactSmallOptions& opt = {},
                                                                   const Budget& budget = Budget::from_env()) {
  std::optional<DeterministicSolution> incumbent;
  if (!opt.first_day) {
    auto na = non_adaptive_opt(inst);
    DeterministicSolution s;
    s.mechanism = posted_prices(inst, na.p, na.q);
    s.revenue = check_deterministic(inst, s.mechanism).revenue;
    incumbent = std::move(s);
  } else {
    if (opt.first_day->size() != inst.size()) throw std::invalid_argument("first-day price count mismatch");
    for (size_t i = 0; i < inst.size(); ++i)
      if ((*opt.first_day)[i].finite() && (*opt.first_day)[i].value() > inst.types[i].v1) return std::nullopt;
  }
  detail::ExactSmall search(inst, opt, budget);
  return search.run(std::move(incumbent));
}

inline DeterministicSolution exact_small_solver(const TwoDayInstance& inst, const Budget& budget = Budget::from_env()) {
  return *exact_small_solver_opt(inst, {}, budget);
}

// ---------------------------------------------------------------------------
// Fixed first-day prices: 0-1 program over "q_i >= t * eps".

struct FptasResult {
  lp::Status status = lp::Status::Infeasible;
  DeterministicMechanism mechanism;
  Rational revenue;
  bool integral = false;
  std::string binding;  // pair that admits no completion, when infeasible
  size_t grid_points = 0;
};

namespace detail {

struct FptasModel {
  lp::Problem prob;
  std::vector<std::vector<int>> x;  // x[i][t-1] for t = 1..T
  bool trivially_infeasible = false;
};

inline FptasModel fptas_model(const TwoDayInstance& inst, const std::vector<Price>& first_day, const Rational& eps,
                              const std::vector<size_t>& subset) {
  using lp::Relation;
  const Rational top = inst.day2_values().back();
  // Levels t = 0..M are prices t*eps up to the support maximum; level M+1 is NoSale.
  const size_t M = static_cast<size_t>(Rational(top / eps).ceil().get_ui());
  const size_t T = M + 1;
  auto price_at = [&](size_t t) { return t <= M ? Price(eps * Rational(static_cast<long>(t))) : Price::no_sale(); };
  FptasModel fm;
  fm.x.assign(inst.size(), {});
  for (size_t i : subset) {
    const auto& ti = inst.types[i];
    for (size_t t = 1; t <= T; ++t) {
      int v = fm.prob.add_var("x[" + ti.v1.str() + "][" + std::to_string(t) + "]", Rational(0), Rational(1));
      fm.x[i].push_back(v);
      auto rev = [&](size_t s) {
        Price p = price_at(s);
        return p.finite() ? p.value() * ti.day2.tail(p.value()) : Rational(0);
      };
      fm.prob.add_objective(v, ti.prob * (rev(t) - rev(t - 1)));
      if (t >= 2) fm.prob.add_constraint({{v, 1}, {fm.x[i][t - 2], -1}}, Relation::LessEq, 0);
    }
  }
  // x_i^0 is the constant 1.
  auto x_at = [&](size_t i, size_t t) -> int { return t == 0 ? -1 : fm.x[i][t - 1]; };
  for (size_t i : subset)
    for (size_t j : subset) {
      if (i == j) continue;
      const auto& ti = inst.types[i];
      // IC(i, j): G_i(q_i) - G_i(q_j) >= c, c from the fixed day-1 prices.
      Rational c = 0;
      if (first_day[j].finite()) c += ti.v1 - first_day[j].value();
      if (first_day[i].finite()) c -= ti.v1 - first_day[i].value();
      std::vector<Rational> G(T + 1);
      for (size_t t = 0; t <= T; ++t) G[t] = ti.day2.tail_integral(price_at(t));
      // level(q_i) >= t requires level(q_j) >= L(t), the least s with G_i(t) - G_i(s) >= c.
      for (size_t t = 0; t <= T; ++t) {
        size_t s = 0;
        while (s <= T && G[t] - G[s] < c) ++s;
        if (s == 0) continue;
        int xi = x_at(i, t);
        if (s > T) {
          if (xi < 0) {
            fm.trivially_infeasible = true;
            return fm;
          }
          fm.prob.add_constraint({{xi, 1}}, Relation::LessEq, 0);
        } else if (xi < 0) {
          fm.prob.add_constraint({{x_at(j, s), 1}}, Relation::GreaterEq, 1);
        } else {
          fm.prob.add_constraint({{xi, 1}, {x_at(j, s), -1}}, Relation::LessEq, 0);
        }
      }
    }
  return fm;
}

}  // namespace detail

inline FptasResult fptas_fixed_first_day(const TwoDayInstance& inst, const std::vector<Price>& first_day, const Rational& grid_eps,
                                         const Budget& budget = Budget::from_env()) {
  if (grid_eps.sign() <= 0) throw std::invalid_argument("grid_eps must be positive");
  if (first_day.size() != inst.size()) throw std::invalid_argument("first-day price count mismatch");
  FptasResult res;
  for (size_t i = 0; i < inst.size(); ++i)
    if (first_day[i].finite() && first_day[i].value() > inst.types[i].v1) {
      res.binding = "IR of v1=" + inst.types[i].v1.str();
      return res;
    }
  std::vector<size_t> all(inst.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto fm = detail::fptas_model(inst, first_day, grid_eps, all);
  budget.check_program(fm.prob, "grid program");
  lp::Solution sol;
  if (!fm.trivially_infeasible) sol = lp::solve(fm.prob, budget.lp_options());
  if (fm.trivially_infeasible || sol.status != lp::Status::Optimal) {
    for (size_t i = 0; i < inst.size() && res.binding.empty(); ++i)
      for (size_t j = i + 1; j < inst.size() && res.binding.empty(); ++j) {
        auto pm = detail::fptas_model(inst, first_day, grid_eps, {i, j});
        if (pm.trivially_infeasible || lp::solve(pm.prob, budget.lp_options()).status != lp::Status::Optimal)
          res.binding = "pair (" + inst.types[i].v1.str() + ", " + inst.types[j].v1.str() + ")";
      }
    if (res.binding.empty()) res.binding = "joint";
    return res;
  }
  res.status = lp::Status::Optimal;
  res.integral = true;
  res.grid_points = fm.x.empty() ? 0 : fm.x[0].size();
  for (size_t i = 0; i < inst.size(); ++i) {
    size_t level = 0;
    for (int v : fm.x[i]) {
      const Rational& x = sol.values[v];
      if (x != 0 && x != 1) res.integral = false;
      if (x == 1) ++level;
    }
    Price q = level < fm.x[i].size() ? Price(grid_eps * Rational(static_cast<long>(level))) : Price::no_sale();
    res.mechanism.prices.push_back({first_day[i], q});
  }
  if (!res.integral) throw std::logic_error("grid program vertex is fractional");
  res.revenue = check_deterministic(inst, res.mechanism).revenue;
  Rational day1 = 0;
  for (size_t i = 0; i < inst.size(); ++i)
    if (first_day[i].finite()) day1 += inst.types[i].prob * first_day[i].value();
  if (res.revenue != sol.objective + day1) throw std::logic_error("grid program objective disagrees with audited revenue");
  return res;
}

// ---------------------------------------------------------------------------
// Independent days.
//
// With a common F, IC between two winners is the equality
// p_i - G(q_i) = p_j - G(q_j), where G(q) is the integral of F above q, so
// every winner shares one constant K. Given the losing set (a prefix of the
// types sorted by v1) and K, the types decouple:
//   winner i:  IR gives G(q_i) <= v_i - K; revenue K + G(q) + q F(q) only
//              drops as q grows, so q_i = 0 when v_i - K >= E[v2] (p = K + E)
//              and otherwise q_i = G^{-1}(v_i - K) with p_i = v_i;
//   losers:    one shared q_L with v_lmax - K <= G(q_L) <= v_wmin - K,
//              best at a support point of that window or its upper end.
// Revenue is piecewise linear in K and convex between anchors, so it peaks
// at an anchor: a winner's or loser-window end's q on a support point,
// a winner switching to q = 0, a loser-winner constraint becoming tight,
// or an end of the feasible K range.

namespace detail {

struct IndependentDays {
  const Distribution& F;
  std::vector<Rational> sup;  // support including 0, ascending
  std::vector<Rational> Gsup;
  Rational E;

  explicit IndependentDays(const Distribution& f) : F(f) {
    auto support = f.support();
    std::set<Rational> s(support.begin(), support.end());
    s.insert(Rational(0));
    sup.assign(s.begin(), s.end());
    for (auto& b : sup) Gsup.push_back(f.tail_integral(Price(b)));
    E = Gsup.front();
  }

  Rational G(const Rational& q) const { return F.tail_integral(Price(q)); }

  // Least q with G(q) = y, for 0 <= y <= E.
  Rational G_inverse(const Rational& y) const {
    if (y >= E) return Rational(0);
    for (size_t k = 1; k < sup.size(); ++k) {
      if (Gsup[k] <= y) {
        // G is affine on [b_{k-1}, b_k] with slope -F(b_k)
        Rational h = F.tail(sup[k]);
        return sup[k] - (y - Gsup[k]) / h;
      }
    }
    return sup.back();
  }
};

}  // namespace detail

inline DeterministicSolution independent_days_solver(const TwoDayInstance& inst, const Budget& budget = Budget::from_env()) {
  if (!inst.days_independent()) throw std::invalid_argument("independent-days solver requires identical day-2 distributions");
  const size_t n = inst.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return inst.types[a].v1 < inst.types[b].v1; });
  detail::IndependentDays D(inst.types.front().day2);
  const Rational& top = D.sup.back();

  std::optional<DeterministicSolution> best;
  std::uint64_t evaluated = 0;
  for (size_t losers = 0; losers <= n; ++losers) {
    Rational lose_prob = 0;
    for (size_t k = 0; k < losers; ++k) lose_prob += inst.types[order[k]].prob;
    if (losers == n) {
      // Nobody buys on day 1; one day-2 price for all.
      auto my = myerson(D.F);
      DeterministicSolution s;
      for (size_t i = 0; i < n; ++i) s.mechanism.prices.push_back({Price::no_sale(), my.revenue.is_zero() ? Price::no_sale() : Price(my.price)});
      s.revenue = check_deterministic(inst, s.mechanism).revenue;
      if (!best || s.revenue > best->revenue) best = std::move(s);
      continue;
    }
    const Rational& v_wmin = inst.types[order[losers]].v1;
    std::optional<Rational> v_lmax;
    if (losers > 0) v_lmax = inst.types[order[losers - 1]].v1;

    Rational k_lo = -D.E;
    if (v_lmax) k_lo = max(k_lo, *v_lmax - D.E);
    const Rational k_hi = v_wmin;
    if (k_hi < k_lo) continue;

    std::set<Rational> anchors{k_lo, k_hi};
    auto add = [&](const Rational& K) {
      if (K >= k_lo && K <= k_hi) anchors.insert(K);
    };
    for (size_t k = losers; k < n; ++k)
      for (auto& g : D.Gsup) add(inst.types[order[k]].v1 - g);
    for (auto& g : D.Gsup) {
      add(v_wmin - g);
      if (v_lmax) add(*v_lmax - g);
    }
    budget.check_enumeration(evaluated += anchors.size(), "independent-days anchors");

    for (const Rational& K : anchors) {
      DeterministicMechanism m;
      m.prices.resize(n);
      Rational rev = 0;
      bool ok = true;
      for (size_t k = losers; k < n; ++k) {
        size_t i = order[k];
        const auto& t = inst.types[i];
        Rational room = t.v1 - K;
        Rational q = room >= D.E ? Rational(0) : D.G_inverse(room);
        Rational p = K + D.G(q);
        if (p.sign() < 0 || p > t.v1) {
          ok = false;
          break;
        }
        m.prices[i] = {Price(p), Price(q)};
        rev += t.prob * (p + q * D.F.tail(q));
      }
      if (!ok) continue;
      if (losers > 0) {
        // Window for q_L: G(q_L) in [v_lmax - K, v_wmin - K].
        Rational g_hi = *v_lmax - K, g_lo = v_wmin - K;
        std::optional<Rational> q_hi;  // largest admissible finite q, none = unbounded
        if (g_hi.sign() > 0) q_hi = D.G_inverse(g_hi);
        Rational q_lo = g_lo >= D.E ? Rational(0) : D.G_inverse(g_lo);
        Price best_q = Price::no_sale();
        Rational best_r = 0;
        auto consider = [&](const Rational& q) {
          if (q < q_lo || (q_hi && q > *q_hi)) return;
          Rational r = q * D.F.tail(q);
          if (r > best_r || (r == best_r && best_q.finite() && q < best_q.value())) {
            best_r = r;
            best_q = Price(q);
          }
        };
        for (auto& b : D.sup) consider(b);
        if (q_hi) consider(*q_hi);
        if (best_q.is_no_sale() && q_hi && *q_hi < top) {
          // Every admissible price earns zero; keep the window's lower end.
          best_q = Price(q_lo);
        }
        for (size_t k = 0; k < losers; ++k) m.prices[order[k]] = {Price::no_sale(), best_q};
        rev += lose_prob * best_r;
      }
      if (best && rev <= best->revenue) continue;
      auto rep = check_deterministic(inst, m);
      if (!rep.feasible || rep.revenue != rev) continue;
      best = DeterministicSolution{std::move(m), rev, 0};
    }
  }
  best->lps_solved = evaluated;
  return *best;
}

}  // namespace dynauc
