#pragma once

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstdio>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dynauc {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact fraction. Every operation evaluates eagerly, so `auto` is safe.
class Rational {
 public:
  Rational() = default;
  Rational(int v) : q_(v) {}
  Rational(long v) : q_(v) {}
  Rational(long long v) : q_(std::to_string(v)) {}
  Rational(unsigned v) : q_(v) {}
  Rational(unsigned long v) : q_(v) {}
  Rational(long num, long den) {
    if (den == 0) throw std::domain_error("zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }
  explicit Rational(const mpz_class& z) : q_(z) {}
  Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw std::domain_error("zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }
  explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

  // Accepts "a", "a/b", decimals "1.25" and scientific "1e-4".
  static Rational parse(std::string_view text) {
    std::string s(text);
    auto fail = [&]() -> Rational { throw ParseError("malformed rational \"" + s + "\""); };
    if (s.empty()) return fail();
    auto valid_int = [](std::string_view t) {
      size_t i = 0;
      if (!t.empty() && (t[0] == '-' || t[0] == '+')) i = 1;
      if (i == t.size()) return false;
      for (; i < t.size(); ++i)
        if (t[i] < '0' || t[i] > '9') return false;
      return true;
    };
    auto to_z = [](std::string_view t) {
      if (!t.empty() && t[0] == '+') t.remove_prefix(1);
      return mpz_class(std::string(t), 10);
    };
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      std::string_view a(s.data(), slash), b(s.data() + slash + 1, s.size() - slash - 1);
      if (!valid_int(a) || !valid_int(b)) return fail();
      mpz_class den = to_z(b);
      if (den == 0) return fail();
      return Rational(to_z(a), den);
    }
    std::string_view mant(s);
    long exp10 = 0;
    auto e = s.find_first_of("eE");
    if (e != std::string::npos) {
      std::string_view ex(s.data() + e + 1, s.size() - e - 1);
      if (!valid_int(ex) || ex.size() > 6) return fail();
      exp10 = std::stol(std::string(ex));
      mant = std::string_view(s.data(), e);
    }
    std::string digits;
    auto dot = mant.find('.');
    if (dot != std::string_view::npos) {
      std::string_view ip = mant.substr(0, dot), fp = mant.substr(dot + 1);
      if (fp.empty() || fp.find_first_not_of("0123456789") != std::string_view::npos) return fail();
      std::string ips(ip);
      if (ips.empty() || ips == "-" || ips == "+") ips += "0";
      if (!valid_int(ips)) return fail();
      digits = ips + std::string(fp);
      exp10 -= static_cast<long>(fp.size());
    } else {
      if (!valid_int(mant)) return fail();
      digits = std::string(mant);
    }
    Rational r(to_z(digits));
    if (exp10 != 0) r *= pow(Rational(10), exp10);
    return r;
  }

  static Rational pow(const Rational& base, long e) {
    mpz_class n, d;
    unsigned long k = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_pow_ui(n.get_mpz_t(), base.q_.get_num_mpz_t(), k);
    mpz_pow_ui(d.get_mpz_t(), base.q_.get_den_mpz_t(), k);
    if (e < 0) std::swap(n, d);
    return Rational(n, d);
  }

  std::string str() const {
    if (q_.get_den() == 1) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }
  double to_double() const { return q_.get_d(); }
  // Scientific-notation view for display of very large or small numbers.
  std::string sci(int digits = 6) const {
    if (is_zero()) return "0";
    long e2n, e2d;
    double n = mpz_get_d_2exp(&e2n, q_.get_num_mpz_t());
    double d = mpz_get_d_2exp(&e2d, q_.get_den_mpz_t());
    double lg = std::log10(std::abs(n / d)) + (e2n - e2d) * std::log10(2.0);
    long ex = static_cast<long>(std::floor(lg));
    double m = std::pow(10.0, lg - ex) * (sign() < 0 ? -1 : 1);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*fe%+ld", digits - 1, m, ex);
    return buf;
  }

  const mpq_class& raw() const { return q_; }
  mpz_class num() const { return q_.get_num(); }
  mpz_class den() const { return q_.get_den(); }
  int sign() const { return sgn(q_); }
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }
  mpz_class floor() const {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
    return r;
  }
  mpz_class ceil() const {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), q_.get_num_mpz_t(), q_.get_den_mpz_t());
    return r;
  }
  size_t bits() const {
    return mpz_sizeinbase(q_.get_num_mpz_t(), 2) + mpz_sizeinbase(q_.get_den_mpz_t(), 2);
  }

  Rational& operator+=(const Rational& o) { mpq_add(q_.get_mpq_t(), q_.get_mpq_t(), o.q_.get_mpq_t()); return *this; }
  Rational& operator-=(const Rational& o) { mpq_sub(q_.get_mpq_t(), q_.get_mpq_t(), o.q_.get_mpq_t()); return *this; }
  Rational& operator*=(const Rational& o) { mpq_mul(q_.get_mpq_t(), q_.get_mpq_t(), o.q_.get_mpq_t()); return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("division by zero");
    mpq_div(q_.get_mpq_t(), q_.get_mpq_t(), o.q_.get_mpq_t());
    return *this;
  }
  // this -= a * b, without a temporary Rational.
  void submul(const Rational& a, const Rational& b) {
    thread_local mpq_class t;
    mpq_mul(t.get_mpq_t(), a.q_.get_mpq_t(), b.q_.get_mpq_t());
    mpq_sub(q_.get_mpq_t(), q_.get_mpq_t(), t.get_mpq_t());
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const {
    Rational r(*this);
    mpq_neg(r.q_.get_mpq_t(), r.q_.get_mpq_t());
    return r;
  }

  friend bool operator==(const Rational& a, const Rational& b) { return mpq_equal(a.q_.get_mpq_t(), b.q_.get_mpq_t()) != 0; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = mpq_cmp(a.q_.get_mpq_t(), b.q_.get_mpq_t());
    return c < 0 ? std::strong_ordering::less : c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  mpq_class q_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

// 1 + 1/2 + ... + 1/n
inline Rational harmonic(long n) {
  Rational h = 0;
  for (long i = 1; i <= n; ++i) h += Rational(1, i);
  return h;
}

}  // namespace dynauc
