#pragma once

#include <cmath>
#include <set>

#include "dynauc/audit.hpp"
#include "dynauc/model.hpp"

namespace dynauc {

// Undirected graph on vertices 1..n.
struct Graph {
  int n = 0;
  std::set<std::pair<int, int>> edges;  // (i, j) with i < j

  Graph() = default;
  Graph(int n_, const std::vector<std::pair<int, int>>& es) : n(n_) {
    for (auto [a, b] : es) add_edge(a, b);
  }

  void add_edge(int a, int b) {
    if (a == b) throw std::invalid_argument("self-loop at vertex " + std::to_string(a));
    if (a < 1 || b < 1 || a > n || b > n)
      throw std::invalid_argument("edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range 1.." + std::to_string(n));
    edges.insert({std::min(a, b), std::max(a, b)});
  }
  bool has_edge(int a, int b) const { return edges.count({std::min(a, b), std::max(a, b)}) > 0; }

  bool independent(const std::vector<int>& s) const {
    for (size_t x = 0; x < s.size(); ++x)
      for (size_t y = x + 1; y < s.size(); ++y)
        if (has_edge(s[x], s[y])) return false;
    return true;
  }

  static Graph complete(int n) {
    Graph g;
    g.n = n;
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j) g.edges.insert({i, j});
    return g;
  }
};

// A tail function as consecutive bands: F = height on (previous right, right].
using Bands = std::vector<std::pair<Rational, Rational>>;

inline Rational band_value(const Bands& b, const Rational& x) {
  for (auto& [right, h] : b)
    if (x <= right) return h;
  return Rational(0);
}

// Integral of the band function over [lo, hi].
inline Rational band_integral(const Bands& b, const Rational& lo, const Rational& hi) {
  Rational total = 0, left = 0;
  for (auto& [right, h] : b) {
    Rational a = max(left, lo), z = min(right, hi);
    if (z > a) total += (z - a) * h;
    left = right;
  }
  return total;
}

inline Distribution bands_to_distribution(const Bands& b) {
  std::vector<Distribution::Atom> atoms;
  Rational prev = 1;
  for (size_t k = 0; k < b.size(); ++k) {
    if (b[k].second > prev) throw std::logic_error("tail function increases at band " + std::to_string(k));
    prev = b[k].second;
  }
  if (!b.empty() && b.front().second < 1) atoms.emplace_back(Rational(0), Rational(1) - b.front().second);
  for (size_t k = 0; k < b.size(); ++k) {
    Rational next = k + 1 < b.size() ? b[k + 1].second : Rational(0);
    Rational mass = b[k].second - next;
    if (mass.sign() > 0) atoms.emplace_back(b[k].first, mass);
  }
  return Distribution(std::move(atoms));
}

struct HardnessParams {
  int n = 0;
  Rational gamma, eps, p, r, P, Q, h_star;
  long K = 0, K_default = 0;
  // Indexed 1..n+1 (slot 0 unused).
  std::vector<Rational> h, ri, C, D, A, B;
  std::vector<Rational> w;  // 1..n
  // Constants of the soundness argument, exposed for reference only.
  Rational zeta1, zeta_star1, zeta_star2;
  std::vector<Rational> zeta2;  // 1..n
};

struct HardnessInstance {
  Graph graph;
  HardnessParams params;
  TwoDayInstance instance;  // types: t* first, then t_1..t_n
  std::vector<Bands> F;     // 1..n
  Bands F_star;
  std::string recursion = "eq1 (alternate form identical)";
  bool recursions_agree = true;
};

namespace detail {

inline Rational rpow(const Rational& x, long e) { return Rational::pow(x, e); }

// The backward recursion as printed, and the form the soundness computation
// uses (γ r_i + (γ−1)[ε(γ⁴−γ²)+γ²] = γ⁵ r_{i+1}), solved for r_i.
inline Rational recursion_printed(const Rational& g, const Rational& e, const Rational& next) {
  return rpow(g, 4) * next - (g - 1) * (e * (rpow(g, 3) - g) + g);
}
inline Rational recursion_soundness(const Rational& g, const Rational& e, const Rational& next) {
  return (rpow(g, 5) * next - (g - 1) * (e * (rpow(g, 4) - rpow(g, 2)) + rpow(g, 2))) / g;
}

inline HardnessParams hardness_params(int n, long K, long K_default) {
  HardnessParams P;
  P.n = n;
  P.K = K;
  P.K_default = K_default;
  P.eps = Rational(1, static_cast<long>(n) * n);
  P.gamma = Rational(1) + Rational(1, n);
  const Rational& g = P.gamma;
  const Rational& e = P.eps;
  P.P = Rational(n);
  P.h.assign(n + 2, Rational(0));
  P.ri = P.C = P.D = P.A = P.B = P.h;
  for (int i = 1; i <= n + 1; ++i) {
    P.B[i] = Rational(static_cast<long>(n) * n + 2 * n + 1 - i);
    P.A[i] = P.B[i] - e;
    P.h[i] = rpow(g, -4L * i);
  }
  // (A_{n+1}−P*)(γ−1)/(2γ^{4(n+1)}) with γ^{4(n+1)} = K/8.
  P.ri[n + 1] = Rational(4) * (g - 1) * (P.A[n + 1] - P.P) / Rational(K);
  for (int i = n; i >= 1; --i) P.ri[i] = recursion_printed(g, e, P.ri[i + 1]);
  for (int i = 1; i <= n + 1; ++i) {
    P.C[i] = (g / (g - 1) * P.ri[i] - e) / P.h[i];
    P.D[i] = g * P.ri[i] / ((g - 1) * P.h[i]);
  }
  Rational inv = 0;
  for (int i = 1; i <= n; ++i) inv += Rational(1) / P.ri[i];
  P.r = inv.is_zero() ? Rational(0) : Rational(1) / inv;
  P.w.assign(n + 1, Rational(0));
  for (int i = 1; i <= n; ++i) P.w[i] = P.r / P.ri[i];
  P.p = e / (Rational(16) * Rational(n) * P.r);
  P.Q = Rational::pow(Rational(2), K) * P.D[n + 1];
  P.h_star = (P.A[n + 1] - P.P) / (P.Q - P.D[n + 1]);
  P.zeta1 = e / 4;
  P.zeta_star1 = e / 8;
  P.zeta_star2 = e / (Rational(8) * P.h_star);
  P.zeta2.assign(n + 1, Rational(0));
  for (int i = 1; i <= n; ++i) P.zeta2[i] = e / (Rational(4) * g * g * P.h[i]);
  return P;
}

inline Bands build_F(const HardnessParams& P, const Graph& G, int i, bool with_tail = true) {
  const int n = P.n;
  const Rational& g = P.gamma;
  const Rational& e = P.eps;
  Bands b{{P.C[i], P.h[i]}, {P.D[i], P.h[i] / g}};
  for (int j = i + 1; j <= n + 1; ++j) {
    bool edge = j <= n && G.has_edge(i, j);
    Rational before, on;
    if (j == i + 1)
      before = edge ? P.h[i] / (g * g) : (Rational(1) - e / g) / (Rational(1) - e) * P.h[i] / (g * g);
    else
      before = edge ? (Rational(1) - e * (Rational(2) - Rational(1) / g)) / (Rational(1) - e) * P.h[j - 1] / (g * g)
                    : P.h[j - 1] / (g * g);
    on = edge ? (Rational(2) - Rational(1) / g) * P.h[j] : P.h[j];
    b.push_back({P.C[j], before});
    b.push_back({P.D[j], on});
  }
  if (with_tail) {
    // Band (2^{k-1} D_{n+1}, 2^k D_{n+1}] carries h_{n+1} / (2^{k+1} γ).
    Rational right = P.D[n + 1], height = P.h[n + 1] / (Rational(2) * g);
    for (long k = 1; k <= P.K; ++k) {
      right *= 2;
      height /= 2;
      b.push_back({right, height});
    }
  }
  return b;
}

inline Bands build_F_star(const HardnessParams& P) {
  const Rational& g = P.gamma;
  Bands b{{P.C[1], P.h[1]}, {P.D[1], P.h[1]}};
  for (int j = 2; j <= P.n + 1; ++j) {
    b.push_back({P.C[j], P.h[j - 1] / (g * g)});
    b.push_back({P.D[j], P.h[j]});
  }
  b.push_back({P.Q, P.h_star});
  return b;
}

inline bool heights_ok(const Bands& b) {
  Rational prev = 1;
  for (auto& [x, h] : b) {
    if (h.sign() < 0 || h > prev) return false;
    prev = h;
  }
  return true;
}

// Support order, monotone tails for every edge pattern (empty and complete
// graphs bound each band from both sides), and the soundness margin.
inline bool params_valid(const HardnessParams& P) {
  const int n = P.n;
  if (P.C[1].sign() <= 0) return false;
  for (int i = 1; i <= n + 1; ++i) {
    if (!(P.C[i] < P.D[i])) return false;
    if (i <= n && !(P.D[i] < P.C[i + 1])) return false;
  }
  for (int i = 1; i <= n; ++i)
    if (P.ri[i].sign() <= 0) return false;
  Graph empty, full = Graph::complete(n);
  empty.n = n;
  for (const Graph* G : {&empty, &full})
    for (int i = 1; i <= n; ++i) {
      Bands b = build_F(P, *G, i, false);
      b.push_back({P.D[n + 1] * 2, P.h[n + 1] / (Rational(4) * P.gamma)});
      if (!heights_ok(b)) return false;
    }
  if (!heights_ok(build_F_star(P))) return false;
  Rational margin = 0;
  for (int i = 1; i <= n; ++i) margin += P.eps / P.ri[i];
  return margin < 1;
}

inline long default_K(int n) {
  double g = 1.0 + 1.0 / n;
  return static_cast<long>(std::ceil(8.0 * std::pow(g, 4.0 * (n + 1)) - 1e-9));
}

}  // namespace detail

// Largest K <= ⌈8γ^{4(n+1)}⌉ giving a valid instance; depends on n only.
inline long hardness_K(int n) {
  long Kd = detail::default_K(n);
  for (long K = Kd; K >= 1; --K)
    if (detail::params_valid(detail::hardness_params(n, K, Kd))) return K;
  throw std::runtime_error("no tail length gives a valid construction for n=" + std::to_string(n));
}

inline HardnessInstance generate(const Graph& g) {
  if (g.n < 2) throw std::invalid_argument("hardness construction needs n >= 2");
  HardnessInstance H;
  H.graph = g;
  const long K = hardness_K(g.n);
  H.params = detail::hardness_params(g.n, K, detail::default_K(g.n));
  const auto& P = H.params;
  for (int i = P.n; i >= 1; --i)
    if (detail::recursion_printed(P.gamma, P.eps, P.ri[i + 1]) != detail::recursion_soundness(P.gamma, P.eps, P.ri[i + 1]))
      H.recursions_agree = false;
  H.F.assign(P.n + 1, {});
  for (int i = 1; i <= P.n; ++i) H.F[i] = detail::build_F(P, g, i);
  H.F_star = detail::build_F_star(P);
  H.instance.types.push_back({Rational(1) - P.p, P.P, bands_to_distribution(H.F_star)});
  for (int i = 1; i <= P.n; ++i) H.instance.types.push_back({P.p * P.w[i], P.B[i], bands_to_distribution(H.F[i])});
  H.instance.validate();
  return H;
}

// Completeness pricing: (B_i, C_i) on S, (A_j, D_j) off S, (P*, Q*) for t*.
inline DeterministicMechanism completeness_pricing(const HardnessInstance& H, const std::vector<int>& S) {
  const auto& P = H.params;
  std::set<int> in(S.begin(), S.end());
  DeterministicMechanism m;
  m.prices.push_back({Price(P.P), Price(P.Q)});
  for (int i = 1; i <= P.n; ++i)
    m.prices.push_back(in.count(i) ? PricePair{Price(P.B[i]), Price(P.C[i])} : PricePair{Price(P.A[i]), Price(P.D[i])});
  return m;
}

inline Rational predicted_revenue(const HardnessInstance& H, const std::vector<int>& S) {
  const auto& P = H.params;
  const auto& T = H.instance.types;
  Rational base = (Rational(1) - P.p) * type_revenue(T[0], {Price(P.P), Price(P.Q)});
  for (int i = 1; i <= P.n; ++i) base += P.p * P.w[i] * type_revenue(T[i], {Price(P.A[i]), Price(P.D[i])});
  return base + P.p * P.r * Rational(static_cast<long>(S.size()));
}

inline Rational predicted_revenue(const Graph& g, const std::vector<int>& S) { return predicted_revenue(generate(g), S); }

struct HardnessCheck {
  std::string group;  // identity, distance, completeness, edge, bonus, margin, optimality
  std::string name;
  bool ok = false;
  Rational lhs, rhs;
};

struct VerificationReport {
  std::vector<HardnessCheck> checks;
  bool recursions_agree = true;
  std::string recursion;

  // Everything except the optimality spot checks, which are diagnostics.
  bool passed() const {
    for (auto& c : checks)
      if (c.group != "optimality" && !c.ok) return false;
    return true;
  }
  bool group_ok(const std::string& g) const {
    for (auto& c : checks)
      if (c.group == g && !c.ok) return false;
    return true;
  }
  size_t count(const std::string& g) const {
    size_t k = 0;
    for (auto& c : checks) k += c.group == g;
    return k;
  }
};

inline std::vector<std::vector<int>> independent_sets(const Graph& g) {
  std::vector<std::vector<int>> out;
  for (unsigned long mask = 0; mask < (1UL << g.n); ++mask) {
    std::vector<int> s;
    for (int v = 1; v <= g.n; ++v)
      if (mask >> (v - 1) & 1) s.push_back(v);
    if (g.independent(s)) out.push_back(s);
  }
  return out;
}

inline std::string set_name(const std::vector<int>& s) {
  std::string r = "{";
  for (size_t k = 0; k < s.size(); ++k) r += (k ? "," : "") + std::to_string(s[k]);
  return r + "}";
}

inline VerificationReport verify_construction(const HardnessInstance& H) {
  VerificationReport rep;
  rep.recursions_agree = H.recursions_agree;
  rep.recursion = H.recursion;
  const auto& P = H.params;
  const int n = P.n;
  const Rational& g = P.gamma;
  const Rational& e = P.eps;
  auto add = [&](const std::string& grp, const std::string& name, const Rational& lhs, const Rational& rhs) {
    rep.checks.push_back({grp, name, lhs == rhs, lhs, rhs});
  };
  auto I = [](const Bands& b, const Rational& lo, const Rational& hi) { return band_integral(b, lo, hi); };
  const Rational two_minus = Rational(2) - Rational(1) / g;

  // Distances between special prices.
  for (int i = 1; i <= n + 1; ++i) {
    add("distance", "B_" + std::to_string(i) + "-A_" + std::to_string(i), P.B[i] - P.A[i], e);
    add("distance", "D_" + std::to_string(i) + "-C_" + std::to_string(i), P.D[i] - P.C[i], e / P.h[i]);
    if (i <= n) {
      add("distance", "A_" + std::to_string(i) + "-B_" + std::to_string(i + 1), P.A[i] - P.B[i + 1], Rational(1) - e);
      add("distance", "C_" + std::to_string(i + 1) + "-D_" + std::to_string(i), P.C[i + 1] - P.D[i], g * g * (Rational(1) - e) / P.h[i]);
    }
  }
  add("distance", "Q*-D_{n+1}", P.Q - P.D[n + 1], (Rational::pow(Rational(2), P.K) - 1) * P.D[n + 1]);

  // Integrals of F_i.
  for (int i = 1; i <= n; ++i) {
    const Bands& F = H.F[i];
    std::string s = std::to_string(i);
    add("identity", "∫F_" + s + " on [C_" + s + ",D_" + s + "]", I(F, P.C[i], P.D[i]), e / g);
    for (int j = i + 1; j <= n + 1; ++j) {
      bool edge = j <= n && H.graph.has_edge(i, j);
      std::string t = std::to_string(j), tag = edge ? " (edge)" : " (no edge)";
      Rational before = j == i + 1 ? (edge ? Rational(1) - e : Rational(1) - e / g) : (edge ? Rational(1) - two_minus * e : Rational(1) - e);
      add("identity", "∫F_" + s + " on [D_" + std::to_string(j - 1) + ",C_" + t + "]" + tag, I(F, P.D[j - 1], P.C[j]), before);
      add("identity", "∫F_" + s + " on [C_" + t + ",D_" + t + "]" + tag, I(F, P.C[j], P.D[j]), edge ? two_minus * e : e);
      add("identity", "∫F_" + s + " on [C_" + s + ",D_" + t + "] = B_" + s + "-A_" + t, I(F, P.C[i], P.D[j]), P.B[i] - P.A[j]);
    }
    add("identity", "∫F_" + s + " on [D_{n+1},Q*]", I(F, P.D[n + 1], P.Q), P.A[n + 1] - P.P);
    add("identity", "F_" + s + " vanishes beyond Q*", band_value(F, P.Q + 1), Rational(0));
  }
  // Integrals of F_*.
  for (int i = 1; i <= n + 1; ++i) {
    std::string s = std::to_string(i);
    add("identity", "∫F_* on [C_" + s + ",D_" + s + "]", I(H.F_star, P.C[i], P.D[i]), e);
    if (i <= n) {
      add("identity", "∫F_* on [D_" + s + ",C_" + std::to_string(i + 1) + "]", I(H.F_star, P.D[i], P.C[i + 1]), Rational(1) - e);
      add("identity", "∫F_* on [C_" + s + ",C_" + std::to_string(i + 1) + "]", I(H.F_star, P.C[i], P.C[i + 1]), Rational(1));
      add("identity", "∫F_* on [C_" + s + ",Q*] = B_" + s + "-P*", I(H.F_star, P.C[i], P.Q), P.B[i] - P.P);
    }
  }
  add("identity", "∫F_* on [D_{n+1},Q*]", I(H.F_star, P.D[n + 1], P.Q), P.A[n + 1] - P.P);
  // The generated atoms reproduce the bands.
  for (int i = 0; i <= n; ++i) {
    const Bands& F = i == 0 ? H.F_star : H.F[i];
    const auto& d = H.instance.types[i].day2;
    bool same = true;
    for (auto& [x, h] : F) same = same && d.tail(x) == h;
    add("identity", "atoms of type " + std::to_string(i) + " match the tail function", Rational(same), Rational(1));
  }
  Rational mass = 0;
  for (auto& t : H.instance.types) mass += t.prob;
  add("identity", "type probabilities sum to 1", mass, Rational(1));

  // Completeness and the per-vertex bonus.
  Rational base = check_deterministic(H.instance, completeness_pricing(H, {})).revenue;
  for (auto& S : independent_sets(H.graph)) {
    auto a = check_deterministic(H.instance, completeness_pricing(H, S));
    rep.checks.push_back({"completeness", "pricing for " + set_name(S) + " is IC and IR", a.feasible, Rational(a.violations.size()), Rational(0)});
    add("bonus", "revenue for " + set_name(S) + " minus base", a.revenue - base, P.p * P.r * Rational(static_cast<long>(S.size())));
    add("bonus", "predicted revenue for " + set_name(S), predicted_revenue(H, S), a.revenue);
  }
  // Edges cannot both take (B, C).
  for (auto [i, j] : H.graph.edges) {
    auto a = check_deterministic(H.instance, completeness_pricing(H, {i, j}));
    rep.checks.push_back({"edge", "pricing with both " + std::to_string(i) + "," + std::to_string(j) + " at (B,C) violates IC", !a.feasible,
                          Rational(a.violations.size()), Rational(0)});
  }
  Rational margin = 0;
  for (int i = 1; i <= n; ++i) margin += e / P.ri[i];
  rep.checks.push_back({"margin", "Σ ε/r_i < 1", margin < 1, margin, Rational(1)});
  Rational wsum = 0;
  for (int i = 1; i <= n; ++i) wsum += P.w[i] * e;
  rep.checks.push_back({"margin", "p·r > p·Σ w_i ε", P.p * P.r > P.p * wsum, P.p * P.r, P.p * wsum});

  // Optimality spot checks (diagnostics).
  auto rev2 = [](const BuyerType& t, const Rational& x) { return x * t.day2.tail(x); };
  const auto& T = H.instance.types;
  Rational at_Q = rev2(T[0], P.Q);
  for (int i = 1; i <= n + 1; ++i) {
    std::string s = std::to_string(i);
    rep.checks.push_back({"optimality", "Rev²(t*,Q*) > Rev²(t*,C_" + s + ")", at_Q > rev2(T[0], P.C[i]), at_Q, rev2(T[0], P.C[i])});
    rep.checks.push_back({"optimality", "Rev²(t*,Q*) > Rev²(t*,D_" + s + ")", at_Q > rev2(T[0], P.D[i]), at_Q, rev2(T[0], P.D[i])});
  }
  for (int i = 1; i <= n; ++i) {
    Rational at_C = rev2(T[i], P.C[i]);
    for (auto& [x, pr] : T[i].day2.atoms()) {
      if (x == P.C[i]) continue;
      rep.checks.push_back({"optimality", "Rev²(t_" + std::to_string(i) + ",C_" + std::to_string(i) + ") > Rev²(t_" + std::to_string(i) + "," + x.sci() + ")",
                            at_C > rev2(T[i], x), at_C, rev2(T[i], x)});
    }
  }
  return rep;
}

inline VerificationReport verify_construction(const Graph& g) { return verify_construction(generate(g)); }

struct IndependentSetResult {
  int size = 0;
  std::vector<int> witness;
};

// Exhaustive; the first maximum in mask order.
inline IndependentSetResult brute_max_independent_set(const Graph& g) {
  if (g.n > 24) throw std::invalid_argument("brute-force independent set limited to 24 vertices");
  std::vector<unsigned long> adj(g.n + 1, 0);
  for (auto [a, b] : g.edges) {
    adj[a] |= 1UL << (b - 1);
    adj[b] |= 1UL << (a - 1);
  }
  IndependentSetResult best;
  unsigned long best_mask = 0;
  for (unsigned long mask = 0; mask < (1UL << g.n); ++mask) {
    int size = __builtin_popcountl(mask);
    if (size <= best.size) continue;
    bool ok = true;
    for (int v = 1; v <= g.n && ok; ++v)
      if ((mask >> (v - 1) & 1) && (adj[v] & mask)) ok = false;
    if (ok) {
      best.size = size;
      best_mask = mask;
    }
  }
  for (int v = 1; v <= g.n; ++v)
    if (best_mask >> (v - 1) & 1) best.witness.push_back(v);
  return best;
}

}  // namespace dynauc
