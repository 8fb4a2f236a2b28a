#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sja/rational.hpp"

namespace sja {

// Exponent vector of a monomial; entry i is the power of variable i.
using ExpVec = std::vector<unsigned>;

// Graded-lexicographic comparison: lower total degree first, ties broken
// lexicographically. This is the canonical term order used everywhere a
// deterministic ordering matters (serialization, iteration, reporting).
struct GradedLexLess {
  bool operator()(const ExpVec& a, const ExpVec& b) const;
};

// Dense univariate polynomial over the rationals; coeffs[i] multiplies x^i,
// so the constant term comes first. Trailing zero coefficients are trimmed.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> coeffs);

  static UniPoly zero() { return UniPoly(); }
  static UniPoly constant(const Rational& c);

  const std::vector<Rational>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  // Degree of the zero polynomial is reported as -1.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  Rational coeff(int i) const;

  Rational evaluate(const Rational& x) const;
  UniPoly derivative() const;

  UniPoly& operator+=(const UniPoly& o);
  UniPoly& operator*=(const Rational& s);

  bool operator==(const UniPoly& o) const { return coeffs_ == o.coeffs_; }

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

// Hessian inertia: eigenvalue counts by sign.
struct SignatureTriple {
  int positive = 0;
  int negative = 0;
  int zero = 0;
  bool operator==(const SignatureTriple&) const = default;
};

struct LorentzianReport {
  bool pass = false;
  // Human-readable reason when pass is false.
  std::string reason;
  // Variable multiset (sorted indices) of the first failing iterated
  // derivative, when the Hessian condition is what failed.
  std::vector<int> failing_derivative;
  SignatureTriple failing_signature;
};

// Sparse multivariate polynomial with exact rational coefficients over a
// fixed number of variables. The zero polynomial has an empty term map;
// coefficients are never zero. Terms are kept in graded-lex order.
class MultiPoly {
 public:
  using TermMap = std::map<ExpVec, Rational, GradedLexLess>;

  explicit MultiPoly(int num_vars = 0);

  static MultiPoly zero(int num_vars) { return MultiPoly(num_vars); }
  static MultiPoly constant(int num_vars, const Rational& c);
  // The monomial c * x_var.
  static MultiPoly variable(int num_vars, int var, const Rational& c = 1);

  int num_vars() const { return num_vars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  // Adds c * x^exp; erases the slot if the result cancels to zero.
  void add_term(const ExpVec& exp, const Rational& c);
  Rational coeff(const ExpVec& exp) const;

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  MultiPoly& operator*=(const Rational& s);
  bool operator==(const MultiPoly& o) const;

  // Total degree of the zero polynomial is reported as -1.
  int total_degree() const;
  // Degree when homogeneous, nullopt otherwise.
  std::optional<int> homogeneous_degree() const;

  Rational evaluate(const std::vector<Rational>& point) const;
  Interval evaluate(const std::vector<Interval>& point) const;

  MultiPoly partial_derivative(int var) const;

  // Substitutes variable i by forms[i], an (affine) polynomial over a new
  // variable set. All forms must share the same variable count.
  MultiPoly substitute_linear(const std::vector<MultiPoly>& forms) const;

  // Fixes every variable except `free_var` to the given values
  // (fixed[free_var] is ignored) and returns the univariate restriction.
  UniPoly restrict_univariate(const std::vector<Rational>& fixed,
                              int free_var) const;

 private:
  void check_exp(const ExpVec& e) const;
  int num_vars_;
  TermMap terms_;
};

// Inertia of the symmetric Hessian matrix of a homogeneous quadratic,
// computed exactly: characteristic polynomial by Faddeev-LeVerrier, then
// sign-variation counts (exact for real-rooted polynomials).
SignatureTriple hessian_signature(const MultiPoly& quadratic);

// Inertia counts for an explicit symmetric rational matrix.
SignatureTriple symmetric_signature(const std::vector<std::vector<Rational>>& m);

// A polynomial passes when it is homogeneous with positive coefficients and
// every iterated partial derivative of degree two has a Hessian with exactly
// one positive eigenvalue. Degree <= 1 passes vacuously.
LorentzianReport is_lorentzian(const MultiPoly& p);

// JSON de/serialization per the documented schema:
//   {"vars": n, "terms": [{"exp": [...], "num": "...", "den": "..."}]}
// with terms emitted in graded-lex order, leading term first.
std::string multipoly_to_json(const MultiPoly& p);
MultiPoly multipoly_from_json(const std::string& text);

}  // namespace sja
