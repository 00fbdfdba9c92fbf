#pragma once

#include <algorithm>
#include <set>

#include "dynauc/audit.hpp"

namespace dynauc {

// Two-day sale without commitment: the seller posts the Myerson price for
// its day-2 belief, so day 1 must elicit the buyer's day-2 prior credibly.
// The buyer knows whether the day-2 value comes from D1 or D2; the seller
// starts at (1/2, 1/2).

enum class Prior { D1, D2 };

struct SetupCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct NoContractSetup {
  long k = 0, l = 0;
  Rational eps, delta, alpha, beta;
  Distribution D1, D2, first_day;
  Rational theta;     // OTR value, D2 side
  Rational theta_D1;  // OTR value, D1 side (equal after balancing)
  Rational R;         // (Rev(D1) + Rev(D2)) / 2
  Rational rev_mix;   // Rev(D1/2 + D2/2)
  std::vector<SetupCheck> bullets;

  bool valid() const {
    for (auto& b : bullets)
      if (!b.ok) return false;
    return true;
  }
  std::string failures() const {
    std::string s;
    for (auto& b : bullets)
      if (!b.ok) s += (s.empty() ? "" : "; ") + b.name + ": " + b.detail;
    return s;
  }
  // lambda on D1, 1 - lambda on D2.
  Distribution mix(const Rational& lambda) const {
    return Distribution::mixture({{lambda, &D1}, {Rational(1) - lambda, &D2}});
  }
  const Distribution& prior(Prior p) const { return p == Prior::D1 ? D1 : D2; }
};

// Buyer's day-2 utility when her value follows `truth` and the seller posts
// the Myerson price of `reported`.
inline Rational u2(const Distribution& reported, const Distribution& truth) {
  return truth.tail_integral(Price(myerson(reported).price));
}

inline Rational u2(const NoContractSetup& s, const Rational& reported_lambda, Prior truth) {
  return u2(s.mix(reported_lambda), s.prior(truth));
}

inline Rational lambda_of(Prior p) { return p == Prior::D1 ? Rational(1) : Rational(0); }

namespace detail {

inline Distribution nocommit_D1(long k, const Rational& eps, const Rational& alpha) {
  const Rational e2 = eps * eps;
  std::vector<Distribution::Atom> a{{Rational(0), Rational(1) - alpha}, {Rational(1) + eps, alpha / 2 - 2 * e2}};
  for (long v = 2; v < k; ++v) a.emplace_back(Rational(v), alpha * (Rational(1, v) - Rational(1, v + 1)));
  a.emplace_back(Rational(k), alpha / Rational(k) + 2 * e2);
  return Distribution::from_weights(std::move(a));
}

inline Distribution nocommit_D2(long k, const Rational& eps, const Rational& beta) {
  const Rational e2 = eps * eps, K(k);
  return Distribution::from_weights({{Rational(0), Rational(1) - beta},
                                     {Rational(1), beta / 2 + (K / 2 + 1) * e2},
                                     {Rational(2), beta * (Rational(1, 2) - Rational(1) / K) - K / 2 * e2},
                                     {K, beta / K - e2}});
}

// Day-1 values δj, j = 1..l, with Pr[v >= δj] = 1/j.
inline Distribution equal_revenue_first_day(const Rational& delta, long l) {
  std::vector<Distribution::Atom> a;
  for (long j = 1; j < l; ++j) a.emplace_back(delta * Rational(j), Rational(1, j) - Rational(1, j + 1));
  a.emplace_back(delta * Rational(l), Rational(1, l));
  return Distribution(std::move(a));
}

}  // namespace detail

struct MixtureScanPoint {
  Rational lambda;
  std::vector<Rational> prices;  // every revenue-maximizing price
  bool breakpoint = false;
};

struct MixtureScan {
  std::vector<MixtureScanPoint> points;  // sorted by lambda
  std::vector<Rational> breakpoints;
  std::vector<Rational> allowed;
  bool ok = true;
  std::string failure;
};

// Myerson prices of λD1 + (1-λ)D2 over λ in [0, 1]. Each posted price earns
// a revenue linear in λ, so the optimum changes only where the upper
// envelope of those lines bends; the envelope is walked exactly.
inline MixtureScan myerson_mixture_scan(const NoContractSetup& s, const std::vector<Rational>& grid) {
  struct Line {
    Rational p, b, m;  // revenue = b + m λ
  };
  std::set<Rational> prices;
  for (auto* d : {&s.D1, &s.D2})
    for (auto& [v, q] : d->atoms())
      if (v.sign() > 0) prices.insert(v);
  std::vector<Line> lines;
  for (auto& p : prices) lines.push_back({p, p * s.D2.tail(p), p * (s.D1.tail(p) - s.D2.tail(p))});

  auto argmax = [&](const Rational& lam) {
    Rational best;
    std::vector<Rational> at;
    bool first = true;
    for (auto& L : lines) {
      Rational r = L.b + L.m * lam;
      if (first || r > best) {
        best = r;
        at = {L.p};
        first = false;
      } else if (r == best) {
        at.push_back(L.p);
      }
    }
    return at;
  };

  MixtureScan out;
  out.allowed = {Rational(1), Rational(1) + s.eps, Rational(s.k)};
  // Walk right from λ = 0 along the steepest maximizer.
  Rational lam = 0;
  while (true) {
    Rational best_val;
    const Line* cur = nullptr;
    for (auto& L : lines) {
      Rational r = L.b + L.m * lam;
      if (!cur || r > best_val || (r == best_val && L.m > cur->m)) {
        best_val = r;
        cur = &L;
      }
    }
    std::optional<Rational> next;
    for (auto& L : lines) {
      if (L.m <= cur->m) continue;
      Rational x = (cur->b - L.b) / (L.m - cur->m);
      if (x > lam && x <= 1 && (!next || x < *next)) next = x;
    }
    if (!next) break;
    out.breakpoints.push_back(*next);
    lam = *next;
  }

  std::set<std::pair<Rational, bool>> where;
  for (auto& g : grid) {
    if (g.sign() < 0 || g > 1) throw std::invalid_argument("mixture weight " + g.str() + " outside [0, 1]");
    where.insert({g, false});
  }
  for (auto& b : out.breakpoints) where.insert({b, true});
  // One interior point per envelope segment.
  std::vector<Rational> cuts{Rational(0)};
  for (auto& b : out.breakpoints) cuts.push_back(b);
  cuts.push_back(Rational(1));
  for (size_t i = 0; i + 1 < cuts.size(); ++i) where.insert({(cuts[i] + cuts[i + 1]) / 2, false});
  where.insert({Rational(0), false});
  where.insert({Rational(1), false});

  for (auto& [x, is_break] : where) {
    if (!out.points.empty() && out.points.back().lambda == x) {
      out.points.back().breakpoint = out.points.back().breakpoint || is_break;
      continue;
    }
    MixtureScanPoint pt{x, argmax(x), is_break};
    for (auto& p : pt.prices)
      if (std::find(out.allowed.begin(), out.allowed.end(), p) == out.allowed.end() && out.ok) {
        out.ok = false;
        out.failure = "λ = " + x.str() + " has optimal price " + p.str();
      }
    out.points.push_back(std::move(pt));
  }
  return out;
}

inline std::vector<Rational> default_lambda_grid(int steps = 100) {
  std::vector<Rational> g;
  for (int i = 0; i <= steps; ++i) g.emplace_back(i, steps);
  return g;
}

// Builds D1, D2 and the day-1 equal-revenue distribution, solves the OTR
// balancing equation for α (β fixed), and checks every lemma bullet exactly.
inline NoContractSetup build_setup(long k, const Rational& eps, const Rational& delta, long l,
                                   const Rational& beta = Rational(1)) {
  if (k < 3) throw std::invalid_argument("k must be at least 3");
  if (l < 1) throw std::invalid_argument("l must be positive");
  if (eps.sign() <= 0 || delta.sign() <= 0) throw std::invalid_argument("ε and δ must be positive");
  if (!(Rational(k) * eps * eps < delta))
    throw std::invalid_argument("parameter ordering needs k·ε² < δ (got " + (Rational(k) * eps * eps).str() + " vs " + delta.str() + ")");
  if (!(delta * Rational(k) < 1)) throw std::invalid_argument("parameter ordering needs δ·k < 1");
  if (beta.sign() <= 0 || beta > 1) throw std::invalid_argument("β must lie in (0, 1]");

  NoContractSetup s;
  s.k = k;
  s.l = l;
  s.eps = eps;
  s.delta = delta;
  s.beta = beta;
  const Rational K(k), fifth = eps / 5;
  s.D2 = detail::nocommit_D2(k, eps, beta);

  // θ from the D1 side is affine in α once the posted prices are fixed at
  // 1+ε (report D1) and k (no report); solve it against the D2 side.
  auto theta1_at = [&](const Rational& a) {
    Distribution d = detail::nocommit_D1(k, eps, a);
    return d.tail_integral(Price(Rational(1) + eps)) + fifth - d.tail_integral(Price(K));
  };
  Rational theta2 = s.D2.tail_integral(Price(Rational(1))) - s.D2.tail_integral(Price(K));
  Rational t0 = theta1_at(Rational(1, 2)), t1 = theta1_at(Rational(1));
  Rational slope = (t1 - t0) * 2;
  s.alpha = Rational(1) + (theta2 - t1) / slope;
  if (s.alpha.sign() <= 0 || s.alpha >= 1)
    throw std::invalid_argument("OTR balancing gives α = " + s.alpha.str() + ", outside (0, 1)");
  s.D1 = detail::nocommit_D1(k, eps, s.alpha);
  s.first_day = detail::equal_revenue_first_day(delta, l);

  const Distribution half = s.mix(Rational(1, 2));
  s.theta_D1 = u2(s.D1, s.D1) + fifth - u2(half, s.D1);
  s.theta = u2(s.D2, s.D2) - u2(half, s.D2);
  s.R = (myerson(s.D1).revenue + myerson(s.D2).revenue) / 2;
  s.rev_mix = myerson(half).revenue;

  auto unique_price = [](const Distribution& d, const Rational& want) {
    for (auto& [v, q] : d.atoms())
      if (v.sign() > 0 && v != want && v * d.tail(v) >= want * d.tail(want)) return false;
    return myerson(d).price == want;
  };
  auto add = [&](const std::string& name, bool ok, const std::string& detail) { s.bullets.push_back({name, ok, detail}); };
  add("Myerson pricing",
      unique_price(s.D1, Rational(1) + eps) && unique_price(s.D2, Rational(1)) && unique_price(half, K),
      "prices " + myerson(s.D1).price.str() + ", " + myerson(s.D2).price.str() + ", " + myerson(half).price.str() +
          " (want 1+ε, 1, k)");
  auto scan = myerson_mixture_scan(s, default_lambda_grid());
  add("Myerson prices of every mixture", scan.ok, scan.ok ? std::to_string(scan.breakpoints.size()) + " breakpoints" : scan.failure);
  Rational a1 = u2(s.D1, s.D1) + fifth, b1 = u2(s.D2, s.D1);
  Rational a2 = u2(s.D2, s.D2), b2 = u2(s.D1, s.D2) + fifth;
  add("Truthfulness", a1 > b1 && a2 > b2,
      "u2(D1|D1)+ε/5 - u2(D2|D1) = " + (a1 - b1).sci() + ", u2(D2|D2) - u2(D1|D2) - ε/5 = " + (a2 - b2).sci() +
          " (both must be positive; the first needs α < 1/5, α = " + s.alpha.sci() + ")");
  add("Value of OTR", s.theta_D1 == s.theta, "θ from D1 " + s.theta_D1.sci(12) + ", from D2 " + s.theta.sci(12));
  add("Auctioneer's revenue", s.rev_mix <= s.R && s.R <= s.rev_mix + 2 * eps,
      "Rev(mix) = " + s.rev_mix.sci(12) + ", R = " + s.R.sci(12) + " (O(ε) taken as 2ε)");
  return s;
}

struct ProtocolResult {
  Rational rev3, rev1_bound, gap;
  Rational lower_target;  // R + δ H_l - 2ε
  bool ic = true;         // expected utility independent of the day-1 report
  std::vector<std::string> ic_detail;
  Prior d1_round3_report = Prior::D1;  // best round-3 report of a D1 buyer
  Prior d2_round3_report = Prior::D2;
};

// Three-round protocol: bid v1; with probability v1/θ the seller grants the
// opportunity to report the day-2 prior; day 1 is always sold at v1, less ε/5
// when the report is D1; day 2 is priced at the Myerson price of the belief.
inline ProtocolResult protocol_revenues(const NoContractSetup& s) {
  if (s.delta * Rational(s.l) > s.theta)
    throw std::invalid_argument("δ·l = " + (s.delta * Rational(s.l)).str() + " exceeds θ = " + s.theta.sci() +
                                "; v1/θ would not be a probability");
  ProtocolResult out;
  const Rational fifth = s.eps / 5;
  const Distribution half = s.mix(Rational(1, 2));
  const Rational pk = myerson(half).price;

  struct Side {
    Prior report;
    Rational otr_utility;  // day-2 utility plus discount when granted the OTR
    Rational discount;
    Rational rev2_otr, rev2_none, u2_none;
  };
  auto side = [&](Prior truth) {
    const Distribution& T = s.prior(truth);
    Side best{};
    bool first = true;
    for (Prior rep : {Prior::D1, Prior::D2}) {
      Rational disc = rep == Prior::D1 ? fifth : Rational(0);
      Rational u = u2(s.prior(rep), T) + disc;
      // Ties go to the truthful report.
      if (first || u > best.otr_utility || (u == best.otr_utility && rep == truth)) {
        Rational price = myerson(s.prior(rep)).price;
        best = {rep, u, disc, price * T.tail(price), Rational(0), Rational(0)};
        first = false;
      }
    }
    best.rev2_none = pk * T.tail(pk);
    best.u2_none = u2(half, T);
    return best;
  };
  Side s1 = side(Prior::D1), s2 = side(Prior::D2);
  out.d1_round3_report = s1.report;
  out.d2_round3_report = s2.report;

  out.rev3 = 0;
  for (auto& [v1, pr] : s.first_day.atoms()) {
    Rational x = v1 / s.theta;
    for (auto* sd : {&s1, &s2}) {
      Rational day1 = v1 - x * sd->discount;
      Rational day2 = x * sd->rev2_otr + (Rational(1) - x) * sd->rev2_none;
      out.rev3 += pr * (day1 + day2) / 2;
    }
  }
  // Utility of reporting v' (true v1 cancels): -v' + (v'/θ)(OTR utility) + (1 - v'/θ) u2(mix).
  for (auto [sd, name] : {std::pair{&s1, "D1"}, std::pair{&s2, "D2"}}) {
    std::set<Rational> utilities;
    for (auto& [v, pr] : s.first_day.atoms()) {
      Rational x = v / s.theta;
      utilities.insert(-v + x * sd->otr_utility + (Rational(1) - x) * sd->u2_none);
    }
    if (utilities.size() != 1) {
      out.ic = false;
      out.ic_detail.push_back(std::string("prior ") + name + ": utility varies with the day-1 report (" +
                              std::to_string(utilities.size()) + " distinct values, spread " +
                              (*utilities.rbegin() - *utilities.begin()).sci() + ")");
    }
  }
  out.rev1_bound = s.R + 3 * s.delta;
  out.gap = out.rev3 - out.rev1_bound;
  out.lower_target = s.R + s.delta * harmonic(s.l) - 2 * s.eps;
  return out;
}

}  // namespace dynauc
