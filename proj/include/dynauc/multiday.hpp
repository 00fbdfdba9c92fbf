#pragma once

#include <map>
#include <set>

#include "dynauc/budget.hpp"
#include "dynauc/lp.hpp"
#include "dynauc/model.hpp"

namespace dynauc {

// One day's allocation: a bidder and a price, or nobody.
struct Outcome {
  int bidder = -1;  // -1: item not sold
  Rational price;

  bool sold() const { return bidder >= 0; }
  auto operator<=>(const Outcome&) const = default;
  bool operator==(const Outcome&) const = default;
};

using Profile = std::vector<Rational>;         // one value per bidder
using ProfileHistory = std::vector<Profile>;   // one profile per day so far
using OutcomeHistory = std::vector<Outcome>;

struct AdaptiveEntry {
  ProfileHistory reports;
  OutcomeHistory outcomes;
  Rational prob;  // joint probability of `outcomes` given `reports`
};

// Joint outcome distributions for every reported history of positive
// probability, one table per day.
struct AdaptiveMechanism {
  int days = 0;
  std::vector<AdaptiveEntry> entries;  // nonzero entries only, sorted by (day, reports, outcomes)
};

struct MultiDaySolution {
  AdaptiveMechanism mechanism;
  Rational revenue;
  lp::Problem program;
  lp::Solution lp_solution;
};

namespace detail {

using Path = std::vector<Rational>;

inline Path own_path(const ProfileHistory& h, size_t b) {
  Path p;
  for (auto& prof : h) p.push_back(prof[b]);
  return p;
}

class MultiDayBuilder {
 public:
  MultiDayBuilder(const MultiDayInstance& inst, const Budget& budget) : inst_(inst), budget_(budget), k_(inst.bidders.size()) {
    grid_.assign(k_, {});
    for (size_t b = 0; b < k_; ++b)
      for (auto& sup : inst.bidders[b].supports) {
        std::set<Rational> s(sup.begin(), sup.end());
        s.insert(Rational(0));
        grid_[b].push_back({s.begin(), s.end()});
      }
  }

  lp::Problem build() {
    build_probabilities();
    build_ic();
    return std::move(prob_);
  }

  // Day d (1-based) outcomes allowed for a reported profile on that day.
  std::vector<Outcome> outcomes_for(int d, const Profile& reported) const {
    std::vector<Outcome> out{Outcome{}};
    for (size_t b = 0; b < k_; ++b)
      for (auto& p : grid_[b][d - 1])
        if (p <= reported[b]) out.push_back({static_cast<int>(b), p});
    return out;
  }

  // pi index by (reports, outcomes), day = reports.size().
  std::map<std::pair<ProfileHistory, OutcomeHistory>, int> pi;

 private:
  // One-day extensions of a profile history with their probability, over
  // every bidder except `skip` (whose slot is left for the caller).
  std::vector<std::pair<Profile, Rational>> extensions(const ProfileHistory& h, int skip = -1) const {
    std::vector<std::pair<Profile, Rational>> out{{Profile(k_, Rational(0)), Rational(1)}};
    for (size_t b = 0; b < k_; ++b) {
      if (static_cast<int>(b) == skip) continue;
      std::vector<std::pair<Profile, Rational>> next;
      for (auto& [prof, p] : out)
        for (auto& [v, q] : inst_.conditional(b, own_path(h, b)).atoms()) {
          Profile np = prof;
          np[b] = v;
          next.push_back({std::move(np), p * q});
        }
      out = std::move(next);
    }
    return out;
  }

  int add_pi(const ProfileHistory& h, const OutcomeHistory& o, const Rational& weight) {
    budget_.check_variables(prob_.num_vars() + 1, "multi-day LP");
    std::string name = "pi[d" + std::to_string(h.size()) + "]";
    for (auto& x : o) name += x.sold() ? "(" + std::to_string(x.bidder) + "@" + x.price.str() + ")" : "(-)";
    int v = prob_.add_var(name + "#" + std::to_string(prob_.num_vars()));
    if (o.back().sold()) prob_.add_objective(v, weight * o.back().price);
    pi.emplace(std::make_pair(h, o), v);
    return v;
  }

  void build_probabilities() {
    using lp::Relation;
    struct Node {
      ProfileHistory h;
      Rational prob;
      std::vector<OutcomeHistory> outs;
    };
    std::vector<Node> frontier{{{}, Rational(1), {OutcomeHistory{}}}};
    for (int d = 1; d <= inst_.days; ++d) {
      std::vector<Node> next;
      for (auto& node : frontier) {
        for (auto& [ext, q] : extensions(node.h)) {
          Node child{node.h, node.prob * q, {}};
          child.h.push_back(ext);
          auto today = outcomes_for(d, ext);
          for (auto& past : node.outs) {
            std::vector<lp::Term> row;
            for (auto& o : today) {
              OutcomeHistory oh = past;
              oh.push_back(o);
              row.push_back({add_pi(child.h, oh, child.prob), Rational(1)});
              child.outs.push_back(std::move(oh));
            }
            // The day-d table for this continuation reproduces the prefix mass.
            if (d == 1)
              prob_.add_constraint(std::move(row), Relation::Equal, 1, "simplex");
            else {
              row.push_back({pi.at({node.h, past}), Rational(-1)});
              prob_.add_constraint(std::move(row), Relation::Equal, 0, "consistent");
            }
          }
          next.push_back(std::move(child));
        }
      }
      frontier = std::move(next);
    }
  }

  // Epigraph state: bidder, true path so far (including today), reported
  // path before today, others' reported history before today, outcomes.
  struct State {
    size_t bidder;
    Path truth;
    Path reported;
    ProfileHistory others;  // full profiles; the bidder's own slot is ignored
    OutcomeHistory outcomes;
    auto operator<=>(const State&) const = default;
  };

  int wstar(const State& s) {
    auto it = wvar_.find(s);
    if (it != wvar_.end()) return it->second;
    budget_.check_variables(prob_.num_vars() + 1, "multi-day LP");
    int v = prob_.add_var("W*[b" + std::to_string(s.bidder) + ",d" + std::to_string(s.truth.size()) + "]#" +
                          std::to_string(prob_.num_vars()));
    wvar_.emplace(s, v);
    pending_.push_back(s);
    return v;
  }

  // Utility terms of reporting u today in state s.
  std::vector<lp::Term> utility(const State& s, const Rational& u) {
    std::vector<lp::Term> row;
    const size_t i = s.bidder;
    const int d = static_cast<int>(s.truth.size());
    const Rational& today = s.truth.back();
    for (auto& [ext, q] : extensions(s.others, static_cast<int>(i))) {
      Profile prof = ext;
      prof[i] = u;
      ProfileHistory h = s.others;
      for (size_t day = 0; day < h.size(); ++day) h[day][i] = s.reported[day];
      h.push_back(prof);
      for (auto& o : outcomes_for(d, prof)) {
        OutcomeHistory oh = s.outcomes;
        oh.push_back(o);
        auto it = pi.find({h, oh});
        if (it == pi.end()) continue;
        if (o.sold() && o.bidder == static_cast<int>(i)) row.push_back({it->second, q * (today - o.price)});
        if (d < inst_.days) {
          Path reported = s.reported;
          reported.push_back(u);
          for (auto& [v, r] : inst_.conditional(i, s.truth).atoms()) {
            State t{i, s.truth, reported, h, oh};
            t.truth.push_back(v);
            row.push_back({wstar(t), q * r});
          }
        }
      }
    }
    return row;
  }

  void build_ic() {
    using lp::Relation;
    for (size_t i = 0; i < k_; ++i)
      for (auto& [v, r] : inst_.conditional(i, {}).atoms()) wstar(State{i, {v}, {}, {}, {}});
    while (!pending_.empty()) {
      State s = pending_.back();
      pending_.pop_back();
      const int w = wvar_.at(s);
      Path truth_before(s.truth.begin(), s.truth.end() - 1);
      const bool truthful = truth_before == s.reported;
      for (auto& [u, r] : inst_.conditional(s.bidder, s.reported).atoms()) {
        auto row = utility(s, u);
        row.push_back({w, Rational(-1)});
        bool honest = truthful && u == s.truth.back();
        prob_.add_constraint(std::move(row), honest ? Relation::Equal : Relation::LessEq, 0, honest ? "truthful" : "deviation");
      }
    }
  }

  const MultiDayInstance& inst_;
  Budget budget_;
  size_t k_;
  std::vector<std::vector<std::vector<Rational>>> grid_;  // [bidder][day] finite prices
  lp::Problem prob_;
  std::map<State, int> wvar_;
  std::vector<State> pending_;
};

}  // namespace detail

// Optimal adaptive randomized auction for k independent bidders over D days.
// IC is embedded as a backward recursion: for every state a bidder can be in
// (true path, reported path, what the others reported, outcomes so far) an
// epigraph variable W* bounds the best continuation from below by every
// report available today. W* is scaled by the probability of the outcome
// history, which keeps the recursion linear. Reports off the support of the
// reported path are treated as forfeiting all future items, so W* >= 0.
// On truthful states W* equals the truthful continuation, which is IC.
inline MultiDaySolution solve_multi_day(const MultiDayInstance& inst, const Budget& budget = Budget::from_env()) {
  inst.validate();
  detail::MultiDayBuilder B(inst, budget);
  MultiDaySolution out;
  out.program = B.build();
  out.lp_solution = lp::solve(out.program, budget.lp_options());
  if (out.lp_solution.status != lp::Status::Optimal)
    throw std::logic_error(std::string("multi-day LP not optimal: ") + lp::to_string(out.lp_solution.status));
  out.revenue = out.lp_solution.objective;
  out.mechanism.days = inst.days;
  for (auto& [key, v] : B.pi) {
    const Rational& x = out.lp_solution.values[v];
    if (!x.is_zero()) out.mechanism.entries.push_back({key.first, key.second, x});
  }
  std::stable_sort(out.mechanism.entries.begin(), out.mechanism.entries.end(),
                   [](const AdaptiveEntry& a, const AdaptiveEntry& b) { return a.reports.size() < b.reports.size(); });
  return out;
}

}  // namespace dynauc
