#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sja {

// All arithmetic in this library is exact. Rational is GMP's canonical
// arbitrary-precision rational; Integer its integer counterpart.
using Rational = mpq_class;
using Integer = mpz_class;

// Thrown when an operation is asked to exceed its configured size limit.
class DeskLimitError : public std::runtime_error {
 public:
  explicit DeskLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Accepts "a/b", integers ("-3"), and exact decimal literals ("0.25", "1e-3").
// Throws std::invalid_argument on anything else.
Rational parse_rational(const std::string& text);

// Canonical fraction rendering: "157/3", "-2/5", "4".
std::string fraction_string(const Rational& q);

// Fixed-point decimal with `digits` places after the point, rounded
// half-to-even. digits must be >= 0.
std::string decimal_string(const Rational& q, int digits);

double to_double(const Rational& q);

Integer binomial(unsigned long n, unsigned long k);
Integer factorial(unsigned long n);

Rational rational_pow(const Rational& base, unsigned long e);

// Closed interval [lo, hi] with exact rational endpoints. Used to carry
// certified enclosures of algebraic numbers through polynomial evaluation.
struct Interval {
  Rational lo, hi;

  Interval() : lo(0), hi(0) {}
  explicit Interval(const Rational& v) : lo(v), hi(v) {}
  Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw std::invalid_argument("interval endpoints out of order");
  }

  bool exact() const { return lo == hi; }
  Rational width() const { return hi - lo; }
  Rational mid() const { return (lo + hi) / 2; }
  // Largest absolute value attained on the interval.
  Rational mag() const;

  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
  friend Interval operator*(const Interval& a, const Interval& b);
  Interval operator-() const { return Interval(-hi, -lo); }

  friend Interval operator+(Interval a, const Rational& b) {
    a.lo += b;
    a.hi += b;
    return a;
  }
  friend Interval operator-(Interval a, const Rational& b) {
    a.lo -= b;
    a.hi -= b;
    return a;
  }
  friend Interval operator*(const Interval& a, const Rational& s);

  Interval pow(unsigned long e) const;
};

// Sign of every point in the interval, when that is decided.
enum class IntervalSign { Negative, Zero, Positive, Indeterminate };

IntervalSign interval_sign(const Interval& v);

// Smallest interval containing both arguments.
Interval interval_hull(const Interval& a, const Interval& b);

}  // namespace sja
