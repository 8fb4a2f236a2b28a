#include "sja/rational.hpp"

#include <algorithm>
#include <cctype>

namespace sja {

namespace {

bool is_integer_literal(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

// mpz's string constructor rejects a leading '+'.
std::string strip_plus(const std::string& s) {
  return (!s.empty() && s[0] == '+') ? s.substr(1) : s;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(),
                         [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw std::invalid_argument("empty rational literal");

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_integer_literal(num) || !is_integer_literal(den))
      throw std::invalid_argument("bad fraction literal: " + text);
    // Explicit base 10: GMP's auto-detecting constructor would read a
    // leading zero as octal.
    Integer n(strip_plus(num), 10), d(strip_plus(den), 10);
    if (d == 0) throw std::invalid_argument("zero denominator: " + text);
    Rational q(n, d);
    q.canonicalize();
    return q;
  }

  // Exact decimal, optionally with exponent: [-]ddd[.ddd][e[-]dd]
  long exp10 = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string::npos) {
    std::string es = s.substr(epos + 1);
    if (!is_integer_literal(es))
      throw std::invalid_argument("bad exponent in literal: " + text);
    exp10 = std::stol(es);
    s = s.substr(0, epos);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string frac = s.substr(dot + 1);
    s = s.substr(0, dot) + frac;
    exp10 -= static_cast<long>(frac.size());
    if (s == "" || s == "-" || s == "+") s += "0";
  }
  if (!is_integer_literal(s))
    throw std::invalid_argument("bad rational literal: " + text);

  Rational q{Integer(strip_plus(s), 10)};
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10,
                static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  if (exp10 >= 0)
    q *= scale;
  else
    q /= Rational(scale);
  q.canonicalize();
  return q;
}

std::string fraction_string(const Rational& q) {
  Rational c = q;  // materialize lowest terms even for raw constructions
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

std::string decimal_string(const Rational& q, int digits) {
  if (digits < 0) throw std::invalid_argument("negative digit count");
  bool negative = q < 0;
  Rational a = negative ? Rational(-q) : q;

  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  // a * scale = quot + rem/den; round half to even on the fractional part.
  Integer num = a.get_num() * scale, den = a.get_den();
  Integer quot, rem;
  mpz_fdiv_qr(quot.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(),
              den.get_mpz_t());
  Integer twice = rem * 2;
  int c = cmp(twice, den);
  if (c > 0 || (c == 0 && mpz_odd_p(quot.get_mpz_t())))
    quot += 1;

  std::string s = quot.get_str();
  if (digits > 0) {
    if (static_cast<int>(s.size()) <= digits)
      s.insert(0, std::string(digits + 1 - s.size(), '0'));
    s.insert(s.size() - digits, ".");
  }
  if (negative && s.find_first_not_of("0.") != std::string::npos)
    s.insert(0, "-");
  return s;
}

double to_double(const Rational& q) { return q.get_d(); }

Integer binomial(unsigned long n, unsigned long k) {
  Integer r;
  if (k > n) return Integer(0);
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

Integer factorial(unsigned long n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

Rational rational_pow(const Rational& base, unsigned long e) {
  // base is canonical, so num^e / den^e is already canonical.
  Rational r;
  mpz_pow_ui(mpq_numref(r.get_mpq_t()), mpq_numref(base.get_mpq_t()), e);
  mpz_pow_ui(mpq_denref(r.get_mpq_t()), mpq_denref(base.get_mpq_t()), e);
  return r;
}

Rational Interval::mag() const {
  Rational a = abs(lo), b = abs(hi);
  return a > b ? a : b;
}

Interval& Interval::operator+=(const Interval& o) {
  lo += o.lo;
  hi += o.hi;
  return *this;
}

Interval& Interval::operator-=(const Interval& o) {
  Rational nlo = lo - o.hi;
  hi -= o.lo;
  lo = nlo;
  return *this;
}

Interval operator*(const Interval& a, const Interval& b) {
  Rational p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo,
           p4 = a.hi * b.hi;
  Interval r;
  r.lo = std::min(std::min(p1, p2), std::min(p3, p4));
  r.hi = std::max(std::max(p1, p2), std::max(p3, p4));
  return r;
}

Interval operator*(const Interval& a, const Rational& s) {
  if (s >= 0) return Interval(a.lo * s, a.hi * s);
  return Interval(a.hi * s, a.lo * s);
}

Interval Interval::pow(unsigned long e) const {
  if (e == 0) return Interval(Rational(1));
  if (lo >= 0) return Interval(rational_pow(lo, e), rational_pow(hi, e));
  if (hi <= 0) {
    Rational plo = rational_pow(lo, e), phi = rational_pow(hi, e);
    if (e % 2 == 0) return Interval(phi, plo);
    return Interval(plo, phi);
  }
  // Straddles zero.
  Rational plo = rational_pow(lo, e), phi = rational_pow(hi, e);
  if (e % 2 == 1) return Interval(plo, phi);
  return Interval(Rational(0), std::max(plo, phi));
}

IntervalSign interval_sign(const Interval& v) {
  if (v.lo > 0) return IntervalSign::Positive;
  if (v.hi < 0) return IntervalSign::Negative;
  if (v.lo == 0 && v.hi == 0) return IntervalSign::Zero;
  return IntervalSign::Indeterminate;
}

Interval interval_hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

}  // namespace sja
