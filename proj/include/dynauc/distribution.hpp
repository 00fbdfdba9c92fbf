#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "dynauc/rational.hpp"

namespace dynauc {

// A finite price or NoSale (infinity).
class Price {
 public:
  Price() = default;
  Price(const Rational& v) : v_(v) {
    if (v.sign() < 0) throw std::domain_error("negative price " + v.str());
  }
  Price(int v) : Price(Rational(v)) {}
  static Price no_sale() {
    Price p;
    p.inf_ = true;
    return p;
  }
  static Price parse(std::string_view s) {
    if (s == "inf" || s == "Infinity" || s == "nosale") return no_sale();
    return Price(Rational::parse(s));
  }

  bool finite() const { return !inf_; }
  bool is_no_sale() const { return inf_; }
  const Rational& value() const {
    if (inf_) throw std::logic_error("value of NoSale price");
    return v_;
  }
  std::string str() const { return inf_ ? "inf" : v_.str(); }

  friend bool operator==(const Price& a, const Price& b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
  }
  friend std::strong_ordering operator<=>(const Price& a, const Price& b) {
    if (a.inf_ || b.inf_) return a.inf_ <=> b.inf_;
    return a.v_ <=> b.v_;
  }

 private:
  bool inf_ = false;
  Rational v_;
};

// Finite distribution over non-negative values. F(x) = Pr[v >= x].
class Distribution {
 public:
  using Atom = std::pair<Rational, Rational>;

  Distribution() = default;

  // Atoms may come in any order; values must be distinct, probabilities
  // positive and summing to exactly one.
  explicit Distribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.first < b.first; });
    Rational total = 0;
    for (size_t i = 0; i < atoms_.size(); ++i) {
      if (atoms_[i].first.sign() < 0) throw std::invalid_argument("negative value " + atoms_[i].first.str());
      if (atoms_[i].second.sign() <= 0)
        throw std::invalid_argument("non-positive probability " + atoms_[i].second.str() + " at value " + atoms_[i].first.str());
      if (i > 0 && atoms_[i].first == atoms_[i - 1].first)
        throw std::invalid_argument("duplicate value " + atoms_[i].first.str());
      total += atoms_[i].second;
    }
    if (atoms_.empty()) throw std::invalid_argument("empty distribution");
    if (total != 1) throw std::invalid_argument("probability mass " + total.str() + " ≠ 1");
    suffix_.assign(atoms_.size() + 1, Rational(0));
    for (size_t i = atoms_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + atoms_[i].second;
  }

  static Distribution point(const Rational& v) { return Distribution({{v, Rational(1)}}); }

  // Merges equal values and drops zero-probability atoms before validating.
  static Distribution from_weights(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.first < b.first; });
    std::vector<Atom> out;
    for (auto& a : atoms) {
      if (!out.empty() && out.back().first == a.first)
        out.back().second += a.second;
      else
        out.push_back(a);
    }
    std::erase_if(out, [](const Atom& a) { return a.second.is_zero(); });
    return Distribution(std::move(out));
  }

  // Sum of w_k * d_k; weights must sum to one.
  static Distribution mixture(const std::vector<std::pair<Rational, const Distribution*>>& parts) {
    std::vector<Atom> all;
    for (auto& [w, d] : parts)
      for (auto& [v, p] : d->atoms()) all.emplace_back(v, w * p);
    return from_weights(std::move(all));
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  size_t size() const { return atoms_.size(); }
  const Rational& max_value() const { return atoms_.back().first; }
  std::vector<Rational> support() const {
    std::vector<Rational> s;
    for (auto& a : atoms_) s.push_back(a.first);
    return s;
  }

  // Pr[v >= x]
  Rational tail(const Rational& x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x, [](const Atom& a, const Rational& y) { return a.first < y; });
    return suffix_[static_cast<size_t>(it - atoms_.begin())];
  }
  Rational tail(const Price& x) const { return x.finite() ? tail(x.value()) : Rational(0); }

  // Integral of F over [a, b], summed band by band. F is constant on
  // (v_{k-1}, v_k], so each band contributes width times height.
  Rational tail_integral(const Rational& a, const Price& b) const {
    if (a.sign() < 0) throw std::invalid_argument("integral lower bound " + a.str() + " < 0");
    if (b.finite() && b.value() < a)
      throw std::invalid_argument("integral bounds reversed: " + a.str() + " > " + b.str());
    Rational total = 0;
    Rational left = 0;
    for (size_t k = 0; k < atoms_.size(); ++k) {
      const Rational& right = atoms_[k].first;
      Rational lo = max(left, a);
      Rational hi = b.finite() ? min(right, b.value()) : right;
      if (lo < hi) total += (hi - lo) * suffix_[k];
      left = right;
    }
    return total;
  }
  // Integral from a to infinity; NoSale lower bound gives 0.
  Rational tail_integral(const Price& a) const {
    return a.finite() ? tail_integral(a.value(), Price::no_sale()) : Rational(0);
  }

  Rational expectation() const {
    Rational e = 0;
    for (auto& [v, p] : atoms_) e += v * p;
    return e;
  }

  friend bool operator==(const Distribution& a, const Distribution& b) { return a.atoms_ == b.atoms_; }

 private:
  std::vector<Atom> atoms_;
  std::vector<Rational> suffix_;  // suffix_[k] = Pr[v >= v_k]
};

inline Rational tail_integral(const Distribution& d, const Rational& a, const Price& b) { return d.tail_integral(a, b); }
inline Rational expectation(const Distribution& d) { return d.expectation(); }

}  // namespace dynauc
