#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynauc/rational.hpp"

namespace dynauc::lp {

enum class Relation { LessEq, Equal, GreaterEq };
enum class Status { Optimal, Infeasible, Unbounded };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "?";
}

struct Term {
  int var;
  Rational coef;
};

struct Constraint {
  std::vector<Term> terms;
  Relation rel;
  Rational rhs;
  std::string name;
};

// maximize objective . x subject to constraints and per-variable bounds.
struct Problem {
  std::vector<std::string> names;
  std::vector<std::optional<Rational>> lower;  // nullopt = -inf
  std::vector<std::optional<Rational>> upper;  // nullopt = +inf
  std::vector<Term> objective;
  std::vector<Constraint> constraints;

  int add_var(std::string name, std::optional<Rational> lo = Rational(0), std::optional<Rational> hi = std::nullopt) {
    names.push_back(std::move(name));
    lower.push_back(std::move(lo));
    upper.push_back(std::move(hi));
    return static_cast<int>(names.size()) - 1;
  }
  void add_objective(int var, const Rational& c) {
    if (!c.is_zero()) objective.push_back({var, c});
  }
  void add_constraint(std::vector<Term> terms, Relation rel, Rational rhs, std::string name = {}) {
    std::erase_if(terms, [](const Term& t) { return t.coef.is_zero(); });
    constraints.push_back({std::move(terms), rel, std::move(rhs), std::move(name)});
  }
  size_t num_vars() const { return names.size(); }

  void validate() const {
    auto check = [&](int v) {
      if (v < 0 || static_cast<size_t>(v) >= names.size()) throw std::invalid_argument("term references undeclared variable");
    };
    for (auto& t : objective) check(t.var);
    for (auto& c : constraints)
      for (auto& t : c.terms) check(t.var);
    for (size_t j = 0; j < names.size(); ++j)
      if (lower[j] && upper[j] && *upper[j] < *lower[j]) throw std::invalid_argument("empty bound range for " + names[j]);
  }
};

struct Solution {
  Status status = Status::Infeasible;
  std::vector<Rational> values;
  Rational objective;
  size_t pivots = 0;
  std::string diagnostic;  // names an offending row when infeasible is detected structurally
};

class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PivotRule { Bland, Dantzig };

struct Options {
  size_t pivot_cap = 1'000'000;
  PivotRule rule = PivotRule::Bland;
};

inline Rational row_activity(const Constraint& c, const std::vector<Rational>& x) {
  Rational s = 0;
  for (auto& t : c.terms) s += t.coef * x[t.var];
  return s;
}

// Exact check of bounds and every constraint; on failure names the first
// offending item in *why.
inline bool check_feasible(const Problem& p, const std::vector<Rational>& x, std::string* why = nullptr) {
  auto fail = [&](const std::string& s) {
    if (why) *why = s;
    return false;
  };
  if (x.size() != p.num_vars()) return fail("assignment size mismatch");
  for (size_t j = 0; j < x.size(); ++j) {
    if (p.lower[j] && x[j] < *p.lower[j]) return fail("lower bound of " + p.names[j]);
    if (p.upper[j] && x[j] > *p.upper[j]) return fail("upper bound of " + p.names[j]);
  }
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    auto& c = p.constraints[i];
    Rational a = row_activity(c, x);
    bool ok = c.rel == Relation::LessEq ? a <= c.rhs : c.rel == Relation::GreaterEq ? a >= c.rhs : a == c.rhs;
    if (!ok) return fail("constraint " + (c.name.empty() ? std::to_string(i) : c.name));
  }
  return true;
}

inline Rational objective_value(const Problem& p, const std::vector<Rational>& x) {
  Rational s = 0;
  for (auto& t : p.objective) s += t.coef * x[t.var];
  return s;
}

namespace detail {

// Standard form: maximize c.x, A x (rel) b with b >= 0, x >= 0.
struct StandardForm {
  struct Col {
    int col;
    int sign;
  };
  std::vector<Rational> offset;             // per original var
  std::vector<std::vector<Col>> var_cols;   // per original var
  size_t ncols = 0;
  std::vector<std::vector<std::pair<int, Rational>>> rows;
  std::vector<Relation> rel;
  std::vector<Rational> rhs;
  std::vector<Rational> cost;
  Rational cost_offset;
  bool trivially_infeasible = false;
  std::string diagnostic;
};

inline StandardForm standardize(const Problem& p) {
  StandardForm sf;
  const size_t n = p.num_vars();
  sf.offset.assign(n, Rational(0));
  sf.var_cols.resize(n);
  struct BoundRow {
    int col;
    Rational ub;
  };
  std::vector<BoundRow> bound_rows;
  for (size_t j = 0; j < n; ++j) {
    if (p.lower[j]) {
      sf.offset[j] = *p.lower[j];
      int c = static_cast<int>(sf.ncols++);
      sf.var_cols[j].push_back({c, 1});
      if (p.upper[j]) bound_rows.push_back({c, *p.upper[j] - *p.lower[j]});
    } else if (p.upper[j]) {
      sf.offset[j] = *p.upper[j];
      sf.var_cols[j].push_back({static_cast<int>(sf.ncols++), -1});
    } else {
      sf.var_cols[j].push_back({static_cast<int>(sf.ncols++), 1});
      sf.var_cols[j].push_back({static_cast<int>(sf.ncols++), -1});
    }
  }
  sf.cost.assign(sf.ncols, Rational(0));
  sf.cost_offset = 0;
  for (auto& t : p.objective) {
    sf.cost_offset += t.coef * sf.offset[t.var];
    for (auto& c : sf.var_cols[t.var]) {
      if (c.sign > 0)
        sf.cost[c.col] += t.coef;
      else
        sf.cost[c.col] -= t.coef;
    }
  }
  auto push_row = [&](std::vector<std::pair<int, Rational>> row, Relation rel, Rational rhs, const std::string& name) {
    std::sort(row.begin(), row.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, Rational>> merged;
    for (auto& e : row) {
      if (!merged.empty() && merged.back().first == e.first)
        merged.back().second += e.second;
      else
        merged.push_back(std::move(e));
    }
    std::erase_if(merged, [](auto& e) { return e.second.is_zero(); });
    if (merged.empty()) {
      int s = rhs.sign();
      bool ok = rel == Relation::LessEq ? s >= 0 : rel == Relation::GreaterEq ? s <= 0 : s == 0;
      if (!ok && !sf.trivially_infeasible) {
        sf.trivially_infeasible = true;
        sf.diagnostic = "empty row " + name + " cannot hold";
      }
      return;
    }
    if (rhs.sign() < 0) {
      for (auto& e : merged) e.second = -e.second;
      rhs = -rhs;
      if (rel == Relation::LessEq)
        rel = Relation::GreaterEq;
      else if (rel == Relation::GreaterEq)
        rel = Relation::LessEq;
    }
    sf.rows.push_back(std::move(merged));
    sf.rel.push_back(rel);
    sf.rhs.push_back(std::move(rhs));
  };
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    auto& c = p.constraints[i];
    std::vector<std::pair<int, Rational>> row;
    Rational rhs = c.rhs;
    for (auto& t : c.terms) {
      rhs -= t.coef * sf.offset[t.var];
      for (auto& col : sf.var_cols[t.var]) row.emplace_back(col.col, col.sign > 0 ? t.coef : -t.coef);
    }
    push_row(std::move(row), c.rel, std::move(rhs), c.name.empty() ? std::to_string(i) : c.name);
  }
  for (auto& b : bound_rows) push_row({{b.col, Rational(1)}}, Relation::LessEq, b.ub, "bound");
  return sf;
}

class Tableau {
 public:
  Tableau(const StandardForm& sf, const Options& opt) : sf_(sf), opt_(opt), bland_(opt.rule == PivotRule::Bland) {
    m_ = sf.rows.size();
    ns_ = sf.ncols;
    // Column layout: structural | one slack/surplus per inequality row | one artificial per >=/= row.
    size_t col = ns_;
    slack_col_.assign(m_, -1);
    art_col_.assign(m_, -1);
    for (size_t i = 0; i < m_; ++i)
      if (sf.rel[i] != Relation::Equal) slack_col_[i] = static_cast<int>(col++);
    first_art_ = col;
    for (size_t i = 0; i < m_; ++i)
      if (sf.rel[i] != Relation::LessEq) art_col_[i] = static_cast<int>(col++);
    ncols_ = col;
    rhs_ = ncols_;
    T_.assign(m_, std::vector<Rational>(ncols_ + 1, Rational(0)));
    basis_.assign(m_, 0);
    for (size_t i = 0; i < m_; ++i) {
      for (auto& [c, a] : sf.rows[i]) T_[i][c] = a;
      T_[i][rhs_] = sf.rhs[i];
      if (sf.rel[i] == Relation::LessEq) {
        T_[i][slack_col_[i]] = 1;
        basis_[i] = slack_col_[i];
      } else {
        if (sf.rel[i] == Relation::GreaterEq) T_[i][slack_col_[i]] = -1;
        T_[i][art_col_[i]] = 1;
        basis_[i] = art_col_[i];
      }
    }
    d_.assign(ncols_, Rational(0));
  }

  size_t pivots() const { return pivots_; }

  // Phase 1 then phase 2. Returns the status of the original problem.
  Status run() {
    bool any_art = first_art_ < ncols_;
    if (any_art) {
      z_ = 0;
      for (size_t i = 0; i < m_; ++i) {
        if (art_col_[i] < 0 || basis_[i] != static_cast<size_t>(art_col_[i])) continue;
        z_ -= T_[i][rhs_];
        for (size_t k = 0; k < first_art_; ++k)
          if (!T_[i][k].is_zero()) d_[k] += T_[i][k];
      }
      Status s = optimize();
      if (s != Status::Optimal) throw std::logic_error("phase 1 unbounded");
      if (z_.sign() < 0) return Status::Infeasible;
      drive_out_artificials();
    }
    // Phase 2 reduced costs over every column, artificials included (cost 0).
    z_ = 0;
    for (size_t k = 0; k < ncols_; ++k) d_[k] = k < ns_ ? sf_.cost[k] : Rational(0);
    for (size_t i = 0; i < m_; ++i) {
      size_t b = basis_[i];
      if (b >= ns_ || sf_.cost[b].is_zero()) continue;
      const Rational& cb = sf_.cost[b];
      for (size_t k = 0; k <= ncols_; ++k) {
        if (T_[i][k].is_zero()) continue;
        if (k == rhs_)
          z_ += cb * T_[i][k];
        else
          d_[k].submul(cb, T_[i][k]);
      }
    }
    return optimize();
  }

  std::vector<Rational> primal() const {
    std::vector<Rational> x(ns_, Rational(0));
    for (size_t i = 0; i < m_; ++i)
      if (basis_[i] < ns_) x[basis_[i]] = T_[i][rhs_];
    return x;
  }
  const Rational& value() const { return z_; }

  // Row duals read off the final reduced costs; verified against the
  // original standard-form data, not the tableau.
  void certify() const {
    std::vector<Rational> y(m_);
    for (size_t i = 0; i < m_; ++i) {
      if (sf_.rel[i] == Relation::LessEq)
        y[i] = -d_[slack_col_[i]];
      else if (sf_.rel[i] == Relation::GreaterEq)
        y[i] = d_[slack_col_[i]];
      else
        y[i] = -d_[art_col_[i]];
      if (sf_.rel[i] == Relation::LessEq && y[i].sign() < 0) throw std::logic_error("dual sign violated on <= row");
      if (sf_.rel[i] == Relation::GreaterEq && y[i].sign() > 0) throw std::logic_error("dual sign violated on >= row");
    }
    std::vector<Rational> aty(ns_, Rational(0));
    Rational by = 0;
    for (size_t i = 0; i < m_; ++i) {
      if (y[i].is_zero()) continue;
      for (auto& [c, a] : sf_.rows[i]) aty[c] += a * y[i];
      by += sf_.rhs[i] * y[i];
    }
    for (size_t k = 0; k < ns_; ++k)
      if (aty[k] < sf_.cost[k]) throw std::logic_error("dual infeasible at optimum");
    if (by != z_) throw std::logic_error("duality gap at optimum");
  }

 private:
  bool enterable(size_t k) const { return k < first_art_; }

  Status optimize() {
    for (;;) {
      int enter = -1;
      for (size_t k = 0; k < first_art_; ++k) {
        if (d_[k].sign() <= 0) continue;
        if (bland_) {
          enter = static_cast<int>(k);
          break;
        }
        if (enter < 0 || d_[k] > d_[enter]) enter = static_cast<int>(k);
      }
      if (enter < 0) return Status::Optimal;
      int leave = -1;
      Rational best;
      for (size_t i = 0; i < m_; ++i) {
        const Rational& a = T_[i][enter];
        if (a.sign() <= 0) continue;
        Rational ratio = T_[i][rhs_] / a;
        if (leave < 0 || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
          leave = static_cast<int>(i);
          best = std::move(ratio);
        }
      }
      if (leave < 0) return Status::Unbounded;
      // A long run of degenerate pivots may be a cycle; Bland's rule from
      // here on guarantees termination.
      degenerate_run_ = best.is_zero() ? degenerate_run_ + 1 : 0;
      if (degenerate_run_ > m_ + 10) bland_ = true;
      pivot(static_cast<size_t>(leave), static_cast<size_t>(enter));
    }
  }

  void drive_out_artificials() {
    for (size_t i = 0; i < m_; ++i) {
      if (basis_[i] < first_art_) continue;
      for (size_t k = 0; k < first_art_; ++k)
        if (!T_[i][k].is_zero()) {
          pivot(i, k);
          break;
        }
      // Otherwise the row is redundant; it stays inert at zero.
    }
  }

  void pivot(size_t r, size_t c) {
    if (++pivots_ > opt_.pivot_cap)
      throw ResourceLimit("LP pivot cap " + std::to_string(opt_.pivot_cap) + " exceeded (" + std::to_string(m_) + " rows, " +
                          std::to_string(ncols_) + " columns)");
    auto& pr = T_[r];
    if (pr[c] != 1) {
      Rational inv = Rational(1) / pr[c];
      for (size_t k = 0; k <= ncols_; ++k)
        if (!pr[k].is_zero()) pr[k] *= inv;
    }
    nz_.clear();
    for (size_t k = 0; k <= ncols_; ++k)
      if (!pr[k].is_zero()) nz_.push_back(k);
    for (size_t i = 0; i < m_; ++i) {
      if (i == r || T_[i][c].is_zero()) continue;
      Rational f = T_[i][c];
      auto& row = T_[i];
      for (size_t k : nz_) row[k].submul(f, pr[k]);
    }
    if (!d_[c].is_zero()) {
      Rational f = d_[c];
      for (size_t k : nz_) {
        if (k == rhs_)
          z_ += f * pr[k];
        else
          d_[k].submul(f, pr[k]);
      }
    }
    basis_[r] = c;
  }

  const StandardForm& sf_;
  Options opt_;
  size_t m_ = 0, ns_ = 0, ncols_ = 0, rhs_ = 0, first_art_ = 0;
  std::vector<int> slack_col_, art_col_;
  std::vector<std::vector<Rational>> T_;
  std::vector<size_t> basis_;
  std::vector<Rational> d_;
  Rational z_;
  std::vector<size_t> nz_;
  size_t pivots_ = 0;
  bool bland_;
  size_t degenerate_run_ = 0;
};

}  // namespace detail

inline Solution solve(const Problem& p, const Options& opt = {}) {
  p.validate();
  Solution sol;
  detail::StandardForm sf = detail::standardize(p);
  if (sf.trivially_infeasible) {
    sol.status = Status::Infeasible;
    sol.diagnostic = sf.diagnostic;
    return sol;
  }
  detail::Tableau tab(sf, opt);
  sol.status = tab.run();
  sol.pivots = tab.pivots();
  if (sol.status != Status::Optimal) return sol;
  tab.certify();
  std::vector<Rational> xs = tab.primal();
  sol.values.assign(p.num_vars(), Rational(0));
  for (size_t j = 0; j < p.num_vars(); ++j) {
    Rational v = sf.offset[j];
    for (auto& c : sf.var_cols[j]) {
      if (c.sign > 0)
        v += xs[c.col];
      else
        v -= xs[c.col];
    }
    sol.values[j] = std::move(v);
  }
  sol.objective = objective_value(p, sol.values);
  if (sol.objective != tab.value() + sf.cost_offset) throw std::logic_error("objective mismatch after back-substitution");
  std::string why;
  if (!check_feasible(p, sol.values, &why)) throw std::logic_error("optimal point fails " + why);
  return sol;
}

// CPLEX-LP style text. Coefficients are printed as decimals, so the dump
// is lossy and meant only for cross-checking with external tools.
inline void write_lp(const Problem& p, std::ostream& os) {
  auto num = [](const Rational& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", r.to_double());
    return std::string(buf);
  };
  auto name = [&](int v) {
    std::string s = p.names[v];
    for (auto& ch : s)
      if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '.') ch = '_';
    return "x" + std::to_string(v) + "_" + s;
  };
  auto expr = [&](const std::vector<Term>& terms) {
    std::string s;
    for (auto& t : terms) {
      s += (t.coef.sign() < 0 ? " - " : " + ") + num(abs(t.coef)) + " " + name(t.var);
    }
    return s.empty() ? std::string(" 0 x0") : s;
  };
  os << "\\ lossy decimal rendering of an exact rational program\n";
  os << "Maximize\n obj:" << expr(p.objective) << "\nSubject To\n";
  for (size_t i = 0; i < p.constraints.size(); ++i) {
    auto& c = p.constraints[i];
    const char* rel = c.rel == Relation::LessEq ? "<=" : c.rel == Relation::GreaterEq ? ">=" : "=";
    os << " c" << i << ":" << expr(c.terms) << " " << rel << " " << num(c.rhs) << "\n";
  }
  os << "Bounds\n";
  for (size_t j = 0; j < p.num_vars(); ++j) {
    std::string lo = p.lower[j] ? num(*p.lower[j]) : "-inf";
    std::string hi = p.upper[j] ? num(*p.upper[j]) : "+inf";
    os << " " << lo << " <= " << name(static_cast<int>(j)) << " <= " << hi << "\n";
  }
  os << "End\n";
}

}  // namespace dynauc::lp
