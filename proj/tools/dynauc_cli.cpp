// dynauc: command-line front end for the two-day auction toolkit.
//
// Exit status: 0 success, 1 infeasible or a failed check, 2 usage, file,
// schema or budget errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dynauc/detsolve.hpp"
#include "dynauc/gaps.hpp"
#include "dynauc/hardness.hpp"
#include "dynauc/io.hpp"
#include "dynauc/multiday.hpp"
#include "dynauc/nocommit.hpp"
#include "dynauc/randsolve.hpp"

using namespace dynauc;
using io::Json;

namespace {

constexpr int kOk = 0, kFinding = 1, kUsage = 2;

// Raised for bad flag values that CLI11 cannot catch on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  bool json = false;
  std::uint64_t budget = 0;  // 0: environment or default

  Budget make_budget() const {
    Budget b = Budget::from_env();
    if (budget) b.limit = budget;
    return b;
  }
};

void add_globals(CLI::App* sub, Globals& g) {
  sub->add_flag("--json", g.json, "Print a JSON report with exact rationals");
  sub->add_option("--budget", g.budget, "Cap on LP variables, pivots and enumerated nodes (overrides DYNAUC_BUDGET)")
      ->check(CLI::PositiveNumber);
}

std::string approx(const Rational& r) { return r.sci(6); }

std::string pad(std::string s, size_t w) {
  // Width in code points, so the occasional non-ASCII glyph lines up.
  size_t cps = 0;
  for (unsigned char c : s) cps += (c & 0xC0) != 0x80;
  if (cps < w) s.append(w - cps, ' ');
  return s;
}

void print_table(std::ostream& os, const std::vector<std::string>& head, const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> w(head.size());
  auto width = [](const std::string& s) {
    size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
  };
  for (size_t c = 0; c < head.size(); ++c) w[c] = width(head[c]);
  for (auto& r : rows)
    for (size_t c = 0; c < r.size(); ++c) w[c] = std::max(w[c], width(r[c]));
  auto line = [&](const std::vector<std::string>& r) {
    std::string s;
    for (size_t c = 0; c < r.size(); ++c) s += (c ? "  " : "") + (c + 1 < r.size() ? pad(r[c], w[c]) : r[c]);
    os << s << "\n";
  };
  line(head);
  for (auto& r : rows) line(r);
}

TwoDayInstance load_two_day(const std::string& path) {
  auto any = io::parse_instance(io::read_json_file(path));
  if (auto* t = std::get_if<TwoDayInstance>(&any)) return *t;
  throw ParseError(path + ": expected a two-day instance (\"types\"), found a multi-day one");
}

std::string type_label(const TwoDayInstance& inst, int i) { return i < 0 ? "-" : "v1=" + inst.types[size_t(i)].v1.str(); }

Json audit_json(const AuditReport& a, const TwoDayInstance& inst) {
  Json j;
  j["feasible"] = a.feasible;
  j["revenue"] = a.revenue.str();
  j["day1_revenue"] = a.day1_revenue.str();
  j["day2_revenue"] = a.day2_revenue.str();
  Json v = Json::array();
  for (auto& x : a.violations) {
    Json o;
    o["type"] = inst.types[size_t(x.type)].v1.str();
    o["reported"] = x.reported < 0 ? Json(nullptr) : Json(inst.types[size_t(x.reported)].v1.str());
    o["kind"] = x.kind;
    o["lhs"] = x.lhs.str();
    o["rhs"] = x.rhs.str();
    o["slack"] = x.slack.str();
    v.push_back(std::move(o));
  }
  j["violations"] = std::move(v);
  return j;
}

void print_audit(std::ostream& os, const AuditReport& a, const TwoDayInstance& inst) {
  os << (a.feasible ? "feasible" : "infeasible") << ", revenue " << a.revenue.str() << "  (" << approx(a.revenue) << ")\n";
  if (a.violations.empty()) return;
  std::vector<std::vector<std::string>> rows;
  for (auto& x : a.violations)
    rows.push_back({type_label(inst, x.type), type_label(inst, x.reported), x.kind, x.lhs.str(), x.rhs.str(), approx(x.slack)});
  print_table(os, {"type", "reports", "constraint", "truthful", "deviation", "slack"}, rows);
}

void print_deterministic(std::ostream& os, const DeterministicMechanism& m, const TwoDayInstance& inst) {
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < inst.size(); ++i)
    rows.push_back({inst.types[i].v1.str(), inst.types[i].prob.str(), m.prices[i].p.str(), m.prices[i].q.str()});
  print_table(os, {"v1", "prob", "day-1 price", "day-2 price"}, rows);
}

std::string lottery_str(const Lottery& l) {
  std::string s;
  for (auto& [p, m] : l) s += (s.empty() ? "" : ", ") + p.str() + " w.p. " + m.str();
  return s;
}

void print_randomized(std::ostream& os, const RandomizedMechanism& m, const TwoDayInstance& inst) {
  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < inst.size(); ++i)
    rows.push_back({inst.types[i].v1.str(), lottery_str(m.lotteries[i].day1), lottery_str(m.lotteries[i].day2)});
  print_table(os, {"v1", "day-1 lottery", "day-2 lottery"}, rows);
}

Json adaptive_json(const AdaptiveMechanism& m) {
  Json entries = Json::array();
  for (auto& e : m.entries) {
    Json rep = Json::array();
    for (auto& prof : e.reports) {
      Json p = Json::array();
      for (auto& v : prof) p.push_back(v.str());
      rep.push_back(std::move(p));
    }
    Json out = Json::array();
    for (auto& o : e.outcomes) {
      Json x;
      x["bidder"] = o.sold() ? Json(o.bidder) : Json(nullptr);
      x["price"] = o.sold() ? Json(o.price.str()) : Json(nullptr);
      out.push_back(std::move(x));
    }
    Json j;
    j["reports"] = std::move(rep);
    j["outcomes"] = std::move(out);
    j["prob"] = e.prob.str();
    entries.push_back(std::move(j));
  }
  Json j;
  j["kind"] = "adaptive";
  j["days"] = m.days;
  j["entries"] = std::move(entries);
  return j;
}

void dump_lp(const std::string& path, const lp::Problem& p) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  lp::write_lp(p, out);
}

void emit(const Globals& g, const Json& j, const std::string& text) {
  if (g.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

Rational parse_rational_flag(const std::string& s, const char* flag) {
  try {
    return Rational::parse(s);
  } catch (const ParseError& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

int cmd_verify(const Globals& g, const std::string& inst_path, const std::string& mech_path) {
  auto inst = load_two_day(inst_path);
  auto mech = io::parse_mechanism(io::read_json_file(mech_path), inst);
  AuditReport a = std::visit(
      [&](auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DeterministicMechanism>)
          return check_deterministic(inst, m);
        else
          return check_randomized(inst, m);
      },
      mech);
  std::ostringstream os;
  print_audit(os, a, inst);
  emit(g, audit_json(a, inst), os.str());
  return a.feasible ? kOk : kFinding;
}

int cmd_solve_rand(const Globals& g, const std::string& inst_path, const std::string& lp_path) {
  auto any = io::parse_instance(io::read_json_file(inst_path));
  Budget budget = g.make_budget();
  Json j;
  std::ostringstream os;
  if (auto* inst = std::get_if<TwoDayInstance>(&any)) {
    auto sol = solve_two_day(*inst, budget);
    dump_lp(lp_path, sol.program);
    auto a = check_randomized(*inst, sol.mechanism);
    j["kind"] = "two-day";
    j["revenue"] = sol.revenue.str();
    j["audit_feasible"] = a.feasible;
    j["audit_revenue"] = a.revenue.str();
    j["mechanism"] = io::to_json(sol.mechanism, *inst);
    os << "revenue " << sol.revenue.str() << "  (" << approx(sol.revenue) << ")\n";
    os << "audit: " << (a.feasible ? "feasible" : "INFEASIBLE") << ", revenue " << a.revenue.str() << "\n";
    print_randomized(os, sol.mechanism, *inst);
    emit(g, j, os.str());
    return a.feasible && a.revenue == sol.revenue ? kOk : kFinding;
  }
  const auto& m = std::get<MultiDayInstance>(any);
  auto sol = solve_multi_day(m, budget);
  dump_lp(lp_path, sol.program);
  j["kind"] = "multi-day";
  j["days"] = m.days;
  j["revenue"] = sol.revenue.str();
  j["mechanism"] = adaptive_json(sol.mechanism);
  os << "revenue " << sol.revenue.str() << "  (" << approx(sol.revenue) << ")\n";
  os << sol.mechanism.entries.size() << " outcome-table entries; use --json for the mechanism\n";
  emit(g, j, os.str());
  return kOk;
}

std::vector<Price> load_first_day(const std::string& path, const TwoDayInstance& inst) {
  // Either a bare list or a mechanism-style object; q entries are ignored.
  Json doc = io::read_json_file(path);
  const Json& list = doc.is_object() && doc.contains("prices") ? doc["prices"] : doc;
  if (!list.is_array()) throw ParseError(path + ": expected a list of {\"v1\", \"p\"} entries");
  std::vector<std::optional<Price>> got(inst.size());
  for (size_t e = 0; e < list.size(); ++e) {
    std::string where = path + ": prices[" + std::to_string(e) + "]";
    if (!list[e].is_object() || !list[e].contains("v1") || !list[e].contains("p") || !list[e]["v1"].is_string() ||
        !list[e]["p"].is_string())
      throw ParseError(where + ": expected {\"v1\": \"...\", \"p\": \"...\"}");
    Rational v1 = Rational::parse(list[e]["v1"].get<std::string>());
    int idx = inst.index_of(v1);
    if (idx < 0) throw ParseError(where + ".v1: no type with v1 = " + v1.str());
    if (got[size_t(idx)]) throw ParseError(where + ".v1: duplicate entry for v1 = " + v1.str());
    got[size_t(idx)] = Price::parse(list[e]["p"].get<std::string>());
  }
  std::vector<Price> out;
  for (size_t i = 0; i < inst.size(); ++i) {
    if (!got[i]) throw ParseError(path + ": missing first-day price for v1 = " + inst.types[i].v1.str());
    out.push_back(*got[i]);
  }
  return out;
}

int cmd_solve_det(const Globals& g, const std::string& inst_path, const std::string& method, const std::string& first_path,
                  const std::string& grid_eps_s, const std::string& lp_path) {
  auto inst = load_two_day(inst_path);
  Budget budget = g.make_budget();
  std::optional<std::vector<Price>> first;
  if (!first_path.empty()) first = load_first_day(first_path, inst);
  if (method != "fptas" && !lp_path.empty()) throw UsageError("--dump-lp applies to --method fptas only");
  Json j;
  j["method"] = method;
  std::ostringstream os;
  std::optional<DeterministicMechanism> mech;
  Rational revenue;
  if (method == "exact") {
    ExactSmallOptions opt;
    opt.first_day = first;
    auto sol = exact_small_solver_opt(inst, opt, budget);
    if (sol) {
      mech = sol->mechanism;
      revenue = sol->revenue;
      j["lps_solved"] = sol->lps_solved;
    }
  } else if (method == "independent") {
    if (first) throw UsageError("--first-day-prices is not used by --method independent");
    auto sol = independent_days_solver(inst, budget);
    mech = sol.mechanism;
    revenue = sol.revenue;
  } else {
    if (!first) throw UsageError("--method fptas needs --first-day-prices");
    Rational eps = parse_rational_flag(grid_eps_s, "--grid-eps");
    if (eps.sign() <= 0) throw UsageError("--grid-eps must be positive");
    if (!lp_path.empty()) {
      std::vector<size_t> all(inst.size());
      for (size_t i = 0; i < all.size(); ++i) all[i] = i;
      dump_lp(lp_path, detail::fptas_model(inst, *first, eps, all).prob);
    }
    auto res = fptas_fixed_first_day(inst, *first, eps, budget);
    j["grid_eps"] = eps.str();
    j["grid_points"] = res.grid_points;
    j["lp_status"] = lp::to_string(res.status);
    j["integral"] = res.integral;
    if (res.status == lp::Status::Optimal) {
      mech = res.mechanism;
      revenue = res.revenue;
    } else if (!res.binding.empty()) {
      j["binding"] = res.binding;
    }
  }
  if (!mech) {
    j["feasible"] = false;
    os << "no IC completion for the given first-day prices";
    if (j.contains("binding")) os << " (blocked by " << j["binding"].get<std::string>() << ")";
    os << "\n";
    emit(g, j, os.str());
    return kFinding;
  }
  auto a = check_deterministic(inst, *mech);
  j["feasible"] = true;
  j["revenue"] = revenue.str();
  j["audit_feasible"] = a.feasible;
  j["audit_revenue"] = a.revenue.str();
  j["mechanism"] = io::to_json(*mech, inst);
  os << "revenue " << revenue.str() << "  (" << approx(revenue) << ")\n";
  os << "audit: " << (a.feasible ? "feasible" : "INFEASIBLE") << ", revenue " << a.revenue.str() << "\n";
  print_deterministic(os, *mech, inst);
  emit(g, j, os.str());
  return a.feasible && a.revenue == revenue ? kOk : kFinding;
}

int cmd_myerson(const Globals& g, const std::string& dist_path, const std::string& inst_path) {
  Json j;
  std::ostringstream os;
  auto one = [&](const std::string& label, const Distribution& d) {
    auto m = myerson(d);
    Json o;
    o["price"] = m.price.str();
    o["revenue"] = m.revenue.str();
    o["expectation"] = d.expectation().str();
    os << pad(label, 8) << "price " << m.price.str() << ", revenue " << m.revenue.str() << "  (" << approx(m.revenue)
       << "), mean " << d.expectation().str() << "\n";
    return o;
  };
  if (!dist_path.empty()) {
    Json doc = io::read_json_file(dist_path);
    j["distribution"] = one("dist", io::detail::dist_at(doc, dist_path));
  } else {
    auto inst = load_two_day(inst_path);
    j["day1"] = one("day 1", inst.day1_marginal());
    j["day2"] = one("day 2", inst.day2_marginal());
    auto na = non_adaptive_opt(inst);
    j["non_adaptive_revenue"] = na.revenue.str();
    os << "non-adaptive revenue " << na.revenue.str() << "  (" << approx(na.revenue) << ")\n";
  }
  emit(g, j, os.str());
  return kOk;
}

Graph load_graph(const std::string& path) {
  Json doc = io::read_json_file(path);
  if (!doc.is_object() || !doc.contains("n") || !doc["n"].is_number_integer())
    throw ParseError(path + ": expected {\"n\": <vertices>, \"edges\": [[u, v], ...]}");
  Graph g;
  g.n = doc["n"].get<int>();
  if (g.n < 1 || g.n > 24) throw ParseError(path + ".n: vertex count must be between 1 and 24");
  if (doc.contains("edges")) {
    const Json& e = doc["edges"];
    if (!e.is_array()) throw ParseError(path + ".edges: expected a list of [u, v] pairs");
    for (size_t k = 0; k < e.size(); ++k) {
      if (!e[k].is_array() || e[k].size() != 2 || !e[k][0].is_number_integer() || !e[k][1].is_number_integer())
        throw ParseError(path + ".edges[" + std::to_string(k) + "]: expected [u, v] with 1-based vertices");
      try {
        g.add_edge(e[k][0].get<int>(), e[k][1].get<int>());
      } catch (const std::invalid_argument& ex) {
        throw ParseError(path + ".edges[" + std::to_string(k) + "]: " + ex.what());
      }
    }
  }
  return g;
}

int cmd_gen_hardness(const Globals& g, const std::string& graph_path, const std::string& out_path, bool check) {
  Graph graph = load_graph(graph_path);
  auto H = generate(graph);
  const auto& P = H.params;
  if (!out_path.empty()) io::write_json_file(out_path, io::to_json(H.instance));
  auto mis = brute_max_independent_set(graph);
  Json j;
  j["n"] = graph.n;
  j["edges"] = graph.edges.size();
  j["types"] = H.instance.size();
  j["recursion"] = H.recursion;
  Json par;
  par["gamma"] = P.gamma.str();
  par["eps"] = P.eps.str();
  par["K"] = P.K;
  par["K_default"] = P.K_default;
  par["p"] = P.p.str();
  par["r"] = P.r.str();
  par["bonus_per_vertex"] = (P.p * P.r).str();
  j["params"] = std::move(par);
  j["max_independent_set"] = set_name(mis.witness);
  j["predicted_revenue"] = predicted_revenue(H, mis.witness).str();
  std::ostringstream os;
  os << "graph: " << graph.n << " vertices, " << graph.edges.size() << " edges; instance: " << H.instance.size() << " types\n";
  os << "γ = " << P.gamma.str() << ", ε = " << P.eps.str() << ", tail steps K = " << P.K << "\n";
  os << "bonus per chosen vertex p·r = " << approx(P.p * P.r) << "\n";
  os << "max independent set " << set_name(mis.witness) << ", predicted revenue " << approx(predicted_revenue(H, mis.witness)) << "\n";
  if (!out_path.empty()) os << "wrote " << out_path << "\n";
  int rc = kOk;
  if (check) {
    auto rep = verify_construction(H);
    Json groups = Json::object();
    std::vector<std::vector<std::string>> rows;
    for (auto grp : {"identity", "distance", "completeness", "edge", "bonus", "margin", "optimality"}) {
      size_t n = rep.count(grp);
      if (!n) continue;
      bool ok = rep.group_ok(grp);
      size_t held = 0;
      for (auto& c : rep.checks) held += c.group == grp && c.ok;
      groups[grp] = {{"checks", n}, {"held", held}, {"ok", ok}};
      std::string status = ok ? "ok" : "FAIL";
      // Optimality spot checks are diagnostics and do not gate the result.
      if (std::string(grp) == "optimality") status = "diagnostic, " + std::to_string(held) + " hold";
      rows.push_back({grp, std::to_string(n), status});
    }
    Json failed = Json::array();
    for (auto& c : rep.checks)
      if (!c.ok) failed.push_back({{"group", c.group}, {"name", c.name}, {"lhs", c.lhs.sci(12)}, {"rhs", c.rhs.sci(12)}});
    j["check"] = {{"passed", rep.passed()}, {"groups", groups}, {"failed", failed}};
    print_table(os, {"group", "checks", "status"}, rows);
    for (auto& c : rep.checks)
      if (!c.ok) os << (c.group == "optimality" ? "note" : "FAIL") << ": " << c.group << " / " << c.name << ": " << c.lhs.sci(12) << " vs " << c.rhs.sci(12) << "\n";
    os << (rep.passed() ? "construction verified\n" : "construction FAILED\n");
    if (!rep.passed()) rc = kFinding;
  }
  emit(g, j, os.str());
  return rc;
}

Json opt_json(const std::optional<Rational>& r) { return r ? Json(r->str()) : Json(nullptr); }

int cmd_gen_gap(const Globals& g, const std::string& family, long n, bool report, const std::string& out_path) {
  GapKind kind;
  try {
    kind = parse_gap_kind(family);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--family: ") + e.what());
  }
  auto f = gap_family(kind, n);
  if (!out_path.empty()) io::write_json_file(out_path, f.instance ? io::to_json(*f.instance) : io::to_json(*f.single_day));
  Json j;
  j["family"] = to_string(kind);
  j["n"] = n;
  std::ostringstream os;
  os << to_string(kind) << ", n = " << n << ": ";
  if (f.instance)
    os << f.instance->size() << " types\n";
  else
    os << "single-day distribution with " << f.single_day->atoms().size() << " atoms\n";
  if (!out_path.empty()) os << "wrote " << out_path << "\n";
  int rc = kOk;
  if (report) {
    auto r = gap_report(f, g.make_budget());
    Json rep;
    rep["social_welfare"] = r.social_welfare.str();
    rep["non_adaptive"] = r.non_adaptive.str();
    rep["deterministic_opt"] = opt_json(r.deterministic_opt);
    rep["randomized_opt"] = opt_json(r.randomized_opt);
    rep["deterministic_bound"] = opt_json(r.deterministic_bound);
    if (r.price_independent) rep["price_independent"] = *r.price_independent;
    Json cands = Json::array();
    for (auto& c : r.candidates)
      cands.push_back({{"name", c.name}, {"randomized", c.randomized}, {"feasible", c.feasible}, {"revenue", c.revenue.str()}});
    rep["candidates"] = std::move(cands);
    rep["skipped"] = r.skipped;
    Json ladder = Json::array();
    for (auto& c : r.ladder) ladder.push_back({{"lower", c.lower}, {"upper", c.upper}, {"ok", c.ok}});
    rep["ladder"] = std::move(ladder);
    Json ratios = Json::array();
    for (auto& q : r.ratios) ratios.push_back({{"upper", q.upper}, {"lower", q.lower}, {"value", q.value.str()}});
    rep["ratios"] = std::move(ratios);
    rep["ladder_ok"] = r.ladder_ok();
    j["report"] = std::move(rep);

    std::vector<std::vector<std::string>> rows{{"SW", r.social_welfare.str(), approx(r.social_welfare)},
                                               {"Rev(non-adaptive)", r.non_adaptive.str(), approx(r.non_adaptive)}};
    if (r.deterministic_opt) rows.push_back({"Rev(deterministic)", r.deterministic_opt->str(), approx(*r.deterministic_opt)});
    if (r.randomized_opt) rows.push_back({"Rev(randomized)", r.randomized_opt->str(), approx(*r.randomized_opt)});
    if (r.deterministic_bound) rows.push_back({"deterministic bound", r.deterministic_bound->str(), "(stated)"});
    for (auto& c : r.candidates)
      rows.push_back({c.name, c.feasible ? c.revenue.str() : "infeasible", c.feasible ? approx(c.revenue) : ""});
    print_table(os, {"quantity", "exact", "approx"}, rows);
    for (auto& s : r.skipped) os << "skipped " << s << "\n";
    for (auto& q : r.ratios) os << "ratio " << q.upper << " / " << q.lower << " = " << approx(q.value) << "\n";
    if (r.price_independent) os << "every support price earns the same: " << (*r.price_independent ? "yes" : "no") << "\n";
    os << "revenue ladder " << (r.ladder_ok() ? "holds" : "BROKEN") << "\n";
    if (!r.ladder_ok()) rc = kFinding;
  }
  emit(g, j, os.str());
  return rc;
}

int cmd_no_contract(const Globals& g, long k, const std::string& eps_s, const std::string& delta_s, long l,
                    const std::string& beta_s, bool report) {
  Rational eps = parse_rational_flag(eps_s, "--eps"), delta = parse_rational_flag(delta_s, "--delta"),
           beta = parse_rational_flag(beta_s, "--beta");
  NoContractSetup s;
  try {
    s = build_setup(k, eps, delta, l, beta);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Json j;
  j["k"] = k;
  j["eps"] = eps.str();
  j["delta"] = delta.str();
  j["l"] = l;
  j["beta"] = beta.str();
  j["alpha"] = s.alpha.str();
  j["theta"] = s.theta.str();
  j["R"] = s.R.str();
  Json bullets = Json::array();
  for (auto& b : s.bullets) bullets.push_back({{"name", b.name}, {"ok", b.ok}, {"detail", b.detail}});
  j["bullets"] = std::move(bullets);
  j["valid"] = s.valid();
  std::ostringstream os;
  os << "k = " << k << ", ε = " << eps.str() << ", δ = " << delta.str() << ", l = " << l << ", β = " << beta.str() << "\n";
  os << "α = " << approx(s.alpha) << ", θ = " << approx(s.theta) << ", R = " << approx(s.R) << "\n";
  for (auto& b : s.bullets) os << (b.ok ? "ok    " : "FAIL  ") << b.name << ": " << b.detail << "\n";
  bool ok = s.valid();
  if (report) {
    try {
      auto r = protocol_revenues(s);
      auto name = [](Prior p) { return p == Prior::D1 ? "D1" : "D2"; };
      j["protocol"] = {{"rev3", r.rev3.str()},
                       {"lower_target", r.lower_target.str()},
                       {"rev3_meets_target", r.rev3 >= r.lower_target},
                       {"rev1_bound", r.rev1_bound.str()},
                       {"gap", r.gap.str()},
                       {"ic", r.ic},
                       {"ic_detail", r.ic_detail},
                       {"round3_report_D1", name(r.d1_round3_report)},
                       {"round3_report_D2", name(r.d2_round3_report)}};
      os << "three-round revenue " << approx(r.rev3) << " vs R + δH_l - 2ε = " << approx(r.lower_target)
         << (r.rev3 >= r.lower_target ? "  ok" : "  FAIL") << "\n";
      os << "one-round bound R + 3δ = " << approx(r.rev1_bound) << ", gap " << approx(r.gap) << (r.gap.sign() > 0 ? "  ok" : "  FAIL") << "\n";
      os << "round-3 reports: D1 buyer -> " << name(r.d1_round3_report) << ", D2 buyer -> " << name(r.d2_round3_report) << "\n";
      os << "protocol IC " << (r.ic ? "holds" : "FAILS") << "\n";
      for (auto& d : r.ic_detail) os << "  " << d << "\n";
      ok = ok && r.ic && r.rev3 >= r.lower_target && r.gap.sign() > 0;
    } catch (const std::invalid_argument& e) {
      j["protocol"] = {{"error", e.what()}};
      os << "protocol not evaluated: " << e.what() << "\n";
      ok = false;
    }
  }
  emit(g, j, os.str());
  return ok ? kOk : kFinding;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact revenue-optimal two-day auctions: solvers, audits and constructions", "dynauc"};
  app.require_subcommand(1);
  app.footer("Exit status: 0 ok, 1 infeasible or failed check, 2 usage/file/schema/budget error.\n"
             "Environment: DYNAUC_BUDGET sets the default budget.");
  Globals g;
  std::function<int()> run;

  std::string inst, mech, lp_path, method = "exact", first_day, grid_eps = "1/10", dist, graph, out, family;
  long n = 0, k = 20, l = 100;
  std::string eps = "1/10000", delta = "1/100", beta = "1";
  bool check = false, report = false;

  auto* verify = app.add_subcommand("verify", "Audit a mechanism for IC and IR and report its revenue");
  verify->add_option("--instance", inst, "Two-day instance file")->required();
  verify->add_option("--mechanism", mech, "Mechanism file (deterministic or randomized)")->required();
  add_globals(verify, g);
  verify->callback([&] { run = [&] { return cmd_verify(g, inst, mech); }; });

  auto* srand = app.add_subcommand("solve-rand", "Optimal randomized mechanism (two-day or multi-day instance)");
  srand->add_option("--instance", inst, "Instance file")->required();
  srand->add_option("--dump-lp", lp_path, "Write the LP in text form (coefficients as decimals, lossy)");
  add_globals(srand, g);
  srand->callback([&] { run = [&] { return cmd_solve_rand(g, inst, lp_path); }; });

  auto* sdet = app.add_subcommand("solve-det", "Optimal deterministic mechanism");
  sdet->add_option("--instance", inst, "Two-day instance file")->required();
  sdet->add_option("--method", method, "exact | independent | fptas")->check(CLI::IsMember({"exact", "independent", "fptas"}))->capture_default_str();
  sdet->add_option("--first-day-prices", first_day, "JSON list of {\"v1\", \"p\"}; fixes day-1 prices");
  sdet->add_option("--grid-eps", grid_eps, "Day-2 price grid step for fptas (rational)")->capture_default_str();
  sdet->add_option("--dump-lp", lp_path, "Write the fptas grid program in text form (lossy)");
  add_globals(sdet, g);
  sdet->callback([&] { run = [&] { return cmd_solve_det(g, inst, method, first_day, grid_eps, lp_path); }; });

  auto* my = app.add_subcommand("myerson", "Myerson price of a distribution or of an instance's daily marginals");
  auto* dopt = my->add_option("--dist", dist, "Distribution file: list of [value, prob] pairs");
  auto* iopt = my->add_option("--instance", inst, "Two-day instance file");
  dopt->excludes(iopt);
  add_globals(my, g);
  my->callback([&] {
    if (dist.empty() && inst.empty()) throw CLI::RequiredError("one of --dist or --instance");
    run = [&] { return cmd_myerson(g, dist, inst); };
  });

  auto* gh = app.add_subcommand("gen-hardness", "Build the reduction instance for a graph");
  gh->add_option("--graph", graph, "Graph file {\"n\": N, \"edges\": [[u, v], ...]}")->required();
  gh->add_option("--out", out, "Write the instance here");
  gh->add_flag("--check", check, "Verify every identity, completeness and edge check exactly");
  add_globals(gh, g);
  gh->callback([&] { run = [&] { return cmd_gen_hardness(g, graph, out, check); }; });

  auto* gg = app.add_subcommand("gen-gap", "Materialize a gap family and optionally report its revenue ladder");
  gg->add_option("--family", family, "harmonic | intro_independent | correlated | rand_vs_det")->required();
  gg->add_option("--n", n, "Family size parameter")->required();
  gg->add_flag("--report", report, "Solve and compare every benchmark");
  gg->add_option("--out", out, "Write the instance (or single-day distribution) here");
  add_globals(gg, g);
  gg->callback([&] { run = [&] { return cmd_gen_gap(g, family, n, report, out); }; });

  auto* nc = app.add_subcommand("no-contract", "Build the no-commitment construction and check it");
  nc->add_option("--k", k, "Top value of the day-2 priors")->capture_default_str();
  nc->add_option("--eps", eps, "ε (rational)")->capture_default_str();
  nc->add_option("--delta", delta, "δ (rational)")->capture_default_str();
  nc->add_option("--l", l, "Number of day-1 values")->capture_default_str();
  nc->add_option("--beta", beta, "Mass of D2 above zero, in (0, 1]")->capture_default_str();
  nc->add_flag("--report", report, "Evaluate the three-round protocol");
  add_globals(nc, g);
  nc->callback([&] { run = [&] { return cmd_no_contract(g, k, eps, delta, l, beta, report); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "dynauc: " << e.what() << " (see dynauc --help)\n";
    return kUsage;
  }

  try {
    return run();
  } catch (const UsageError& e) {
    std::cerr << "dynauc: " << e.what() << "\n";
  } catch (const BudgetExceeded& e) {
    std::cerr << "dynauc: budget exceeded: " << e.what() << "\n";
  } catch (const lp::ResourceLimit& e) {
    std::cerr << "dynauc: budget exceeded: " << e.what() << "; raise --budget or DYNAUC_BUDGET\n";
  } catch (const ParseError& e) {
    std::cerr << "dynauc: invalid input: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "dynauc: invalid input: " << e.what() << "\n";
  } catch (const std::runtime_error& e) {
    std::cerr << "dynauc: " << e.what() << "\n";
  }
  return kUsage;
}
