#include "sja/multipoly.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "json.hpp"

namespace sja {

bool GradedLexLess::operator()(const ExpVec& a, const ExpVec& b) const {
  unsigned da = std::accumulate(a.begin(), a.end(), 0u);
  unsigned db = std::accumulate(b.begin(), b.end(), 0u);
  if (da != db) return da < db;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// ---------------------------------------------------------------- UniPoly

UniPoly::UniPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  trim();
}

UniPoly UniPoly::constant(const Rational& c) {
  UniPoly p;
  if (c != 0) p.coeffs_.push_back(c);
  return p;
}

Rational UniPoly::coeff(int i) const {
  if (i < 0 || i >= static_cast<int>(coeffs_.size())) return Rational(0);
  return coeffs_[i];
}

Rational UniPoly::evaluate(const Rational& x) const {
  Rational acc(0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
    acc = acc * x + *it;
  return acc;
}

UniPoly UniPoly::derivative() const {
  std::vector<Rational> d;
  for (std::size_t i = 1; i < coeffs_.size(); ++i)
    d.push_back(coeffs_[i] * Rational(static_cast<long>(i)));
  return UniPoly(std::move(d));
}

UniPoly& UniPoly::operator+=(const UniPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0);
  for (std::size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  trim();
  return *this;
}

UniPoly& UniPoly::operator*=(const Rational& s) {
  if (s == 0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& c : coeffs_) c *= s;
  return *this;
}

void UniPoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

// --------------------------------------------------------------- MultiPoly

MultiPoly::MultiPoly(int num_vars) : num_vars_(num_vars) {
  if (num_vars < 0) throw std::invalid_argument("negative variable count");
}

MultiPoly MultiPoly::constant(int num_vars, const Rational& c) {
  MultiPoly p(num_vars);
  p.add_term(ExpVec(num_vars, 0), c);
  return p;
}

MultiPoly MultiPoly::variable(int num_vars, int var, const Rational& c) {
  if (var < 0 || var >= num_vars) throw std::invalid_argument("bad variable");
  MultiPoly p(num_vars);
  ExpVec e(num_vars, 0);
  e[var] = 1;
  p.add_term(e, c);
  return p;
}

void MultiPoly::check_exp(const ExpVec& e) const {
  if (static_cast<int>(e.size()) != num_vars_)
    throw std::invalid_argument("exponent vector length mismatch");
}

void MultiPoly::add_term(const ExpVec& exp, const Rational& c) {
  check_exp(exp);
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(exp, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Rational MultiPoly::coeff(const ExpVec& exp) const {
  check_exp(exp);
  auto it = terms_.find(exp);
  return it == terms_.end() ? Rational(0) : it->second;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  if (o.num_vars_ != num_vars_)
    throw std::invalid_argument("variable count mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  if (o.num_vars_ != num_vars_)
    throw std::invalid_argument("variable count mismatch");
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.num_vars_ != b.num_vars_)
    throw std::invalid_argument("variable count mismatch");
  MultiPoly r(a.num_vars_);
  ExpVec e(a.num_vars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (int i = 0; i < a.num_vars_; ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

MultiPoly& MultiPoly::operator*=(const Rational& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

bool MultiPoly::operator==(const MultiPoly& o) const {
  return num_vars_ == o.num_vars_ && terms_ == o.terms_;
}

int MultiPoly::total_degree() const {
  if (terms_.empty()) return -1;
  // Graded order: the last term has maximal total degree.
  const ExpVec& e = terms_.rbegin()->first;
  return static_cast<int>(std::accumulate(e.begin(), e.end(), 0u));
}

std::optional<int> MultiPoly::homogeneous_degree() const {
  if (terms_.empty()) return 0;  // zero polynomial: homogeneous of any degree
  unsigned first =
      std::accumulate(terms_.begin()->first.begin(),
                      terms_.begin()->first.end(), 0u);
  unsigned last = std::accumulate(terms_.rbegin()->first.begin(),
                                  terms_.rbegin()->first.end(), 0u);
  if (first != last) return std::nullopt;
  return static_cast<int>(first);
}

Rational MultiPoly::evaluate(const std::vector<Rational>& point) const {
  if (static_cast<int>(point.size()) != num_vars_)
    throw std::invalid_argument("evaluation point length mismatch");
  Rational total(0);
  for (const auto& [e, c] : terms_) {
    Rational v = c;
    for (int i = 0; i < num_vars_; ++i)
      if (e[i]) v *= rational_pow(point[i], e[i]);
    total += v;
  }
  return total;
}

Interval MultiPoly::evaluate(const std::vector<Interval>& point) const {
  if (static_cast<int>(point.size()) != num_vars_)
    throw std::invalid_argument("evaluation point length mismatch");
  Interval total{Rational(0)};
  for (const auto& [e, c] : terms_) {
    Interval v{c};
    for (int i = 0; i < num_vars_; ++i)
      if (e[i]) v = v * point[i].pow(e[i]);
    total += v;
  }
  return total;
}

MultiPoly MultiPoly::partial_derivative(int var) const {
  if (var < 0 || var >= num_vars_) throw std::invalid_argument("bad variable");
  MultiPoly r(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    ExpVec d = e;
    d[var] -= 1;
    r.add_term(d, c * Rational(static_cast<long>(e[var])));
  }
  return r;
}

MultiPoly MultiPoly::substitute_linear(
    const std::vector<MultiPoly>& forms) const {
  if (static_cast<int>(forms.size()) != num_vars_)
    throw std::invalid_argument("one substitution form per variable required");
  int nv2 = forms.empty() ? 0 : forms[0].num_vars();
  for (const auto& f : forms)
    if (f.num_vars() != nv2)
      throw std::invalid_argument("substitution forms disagree on variables");

  // Cache powers of each form as needed.
  std::vector<std::vector<MultiPoly>> powers(num_vars_);
  auto form_power = [&](int i, unsigned e) -> const MultiPoly& {
    auto& cache = powers[i];
    if (cache.empty()) cache.push_back(MultiPoly::constant(nv2, 1));
    while (cache.size() <= e) cache.push_back(cache.back() * forms[i]);
    return cache[e];
  };

  MultiPoly out(nv2);
  for (const auto& [e, c] : terms_) {
    MultiPoly term = MultiPoly::constant(nv2, c);
    for (int i = 0; i < num_vars_; ++i)
      if (e[i]) term = term * form_power(i, e[i]);
    out += term;
  }
  return out;
}

UniPoly MultiPoly::restrict_univariate(const std::vector<Rational>& fixed,
                                       int free_var) const {
  if (static_cast<int>(fixed.size()) != num_vars_)
    throw std::invalid_argument("fixed-value vector length mismatch");
  if (free_var < 0 || free_var >= num_vars_)
    throw std::invalid_argument("bad free variable");
  std::vector<Rational> coeffs;
  for (const auto& [e, c] : terms_) {
    Rational v = c;
    for (int i = 0; i < num_vars_; ++i)
      if (i != free_var && e[i]) v *= rational_pow(fixed[i], e[i]);
    unsigned d = e[free_var];
    if (coeffs.size() <= d) coeffs.resize(d + 1, 0);
    coeffs[d] += v;
  }
  return UniPoly(std::move(coeffs));
}

// ------------------------------------------------------ Hessian signature

SignatureTriple symmetric_signature(
    const std::vector<std::vector<Rational>>& m) {
  const int n = static_cast<int>(m.size());
  for (const auto& row : m)
    if (static_cast<int>(row.size()) != n)
      throw std::invalid_argument("matrix not square");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (m[i][j] != m[j][i])
        throw std::invalid_argument("matrix not symmetric");

  // Characteristic polynomial det(xI - M) by Faddeev-LeVerrier:
  //   N_1 = M, c_{n-1} = -tr(N_1), N_{k+1} = M (N_k + c_{n-k} I).
  std::vector<Rational> charpoly(n + 1, 0);  // ascending powers of x
  charpoly[n] = 1;
  std::vector<std::vector<Rational>> nk = m;
  for (int k = 1; k <= n; ++k) {
    Rational tr(0);
    for (int i = 0; i < n; ++i) tr += nk[i][i];
    Rational ck = -tr / k;
    charpoly[n - k] = ck;
    if (k == n) break;
    for (int i = 0; i < n; ++i) nk[i][i] += ck;
    std::vector<std::vector<Rational>> next(n, std::vector<Rational>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        if (m[i][l] == 0) continue;
        for (int j = 0; j < n; ++j) next[i][j] += m[i][l] * nk[l][j];
      }
    nk = std::move(next);
  }

  // All roots are real, so Descartes' rule is exact: sign variations of
  // p(x) count positive roots, of p(-x) negative roots; the order of the
  // vanishing tail is the multiplicity of 0.
  SignatureTriple sig;
  int zero_tail = 0;
  while (zero_tail <= n && charpoly[zero_tail] == 0) ++zero_tail;
  sig.zero = zero_tail;
  int prev = 0;
  for (int i = zero_tail; i <= n; ++i) {
    int s = sgn(charpoly[i]);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++sig.positive;
    prev = s;
  }
  prev = 0;
  for (int i = zero_tail; i <= n; ++i) {
    int s = sgn(charpoly[i]);
    if (s == 0) continue;
    if (i % 2 == 1) s = -s;  // p(-x)
    if (prev != 0 && s != prev) ++sig.negative;
    prev = s;
  }
  return sig;
}

SignatureTriple hessian_signature(const MultiPoly& quadratic) {
  auto deg = quadratic.homogeneous_degree();
  if (!deg || (*deg != 2 && !quadratic.is_zero()))
    throw std::invalid_argument(
        "hessian_signature requires a homogeneous quadratic");
  const int n = quadratic.num_vars();
  std::vector<std::vector<Rational>> h(n, std::vector<Rational>(n, 0));
  for (const auto& [e, c] : quadratic.terms()) {
    int i = -1, j = -1;
    for (int v = 0; v < n; ++v) {
      if (e[v] == 2) i = j = v;
      if (e[v] == 1) (i < 0 ? i : j) = v;
    }
    if (i == j) {
      h[i][i] = 2 * c;
    } else {
      h[i][j] = c;
      h[j][i] = c;
    }
  }
  return symmetric_signature(h);
}

LorentzianReport is_lorentzian(const MultiPoly& p) {
  LorentzianReport rep;
  auto deg = p.homogeneous_degree();
  if (!deg) {
    rep.reason = "polynomial is not homogeneous";
    return rep;
  }
  if (p.is_zero()) {
    rep.reason = "zero polynomial";
    return rep;
  }
  for (const auto& [e, c] : p.terms()) {
    if (c < 0) {
      rep.reason = "negative coefficient present";
      return rep;
    }
  }
  if (*deg <= 1) {
    rep.pass = true;
    return rep;
  }

  // Walk all variable multisets of size deg-2 (non-decreasing indices),
  // reusing shared derivative prefixes.
  const int n = p.num_vars();
  std::vector<int> stack;
  std::function<bool(const MultiPoly&, int, int)> walk =
      [&](const MultiPoly& q, int min_var, int remaining) -> bool {
    if (remaining == 0) {
      if (q.is_zero()) return true;  // vanishing derivative: nothing to test
      SignatureTriple sig = hessian_signature(q);
      if (sig.positive != 1) {
        rep.failing_derivative = stack;
        rep.failing_signature = sig;
        rep.reason = "iterated derivative Hessian has " +
                     std::to_string(sig.positive) +
                     " positive eigenvalues (expected exactly 1)";
        return false;
      }
      return true;
    }
    for (int v = min_var; v < n; ++v) {
      stack.push_back(v);
      MultiPoly d = q.partial_derivative(v);
      if (!walk(d, v, remaining - 1)) return false;
      stack.pop_back();
    }
    return true;
  };
  rep.pass = walk(p, 0, *deg - 2);
  return rep;
}

// ------------------------------------------------------------------- JSON

std::string multipoly_to_json(const MultiPoly& p) {
  nlohmann::ordered_json j;
  j["vars"] = p.num_vars();
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  // Leading term first: reverse graded-lex map order.
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    nlohmann::ordered_json t;
    t["exp"] = it->first;
    t["num"] = it->second.get_num().get_str();
    t["den"] = it->second.get_den().get_str();
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j.dump();
}

MultiPoly multipoly_from_json(const std::string& text) {
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    MultiPoly p(j.at("vars").get<int>());
    for (const auto& t : j.at("terms")) {
      ExpVec e = t.at("exp").get<ExpVec>();
      // Explicit base 10: the auto-detecting constructor would read a
      // leading zero as octal.
      Integer num(t.at("num").get<std::string>(), 10);
      Integer den(t.at("den").get<std::string>(), 10);
      if (den == 0) throw std::invalid_argument("zero denominator in term");
      Rational c(num, den);
      c.canonicalize();
      if (p.coeff(e) != 0)
        throw std::invalid_argument("duplicate exponent vector in terms");
      p.add_term(e, c);
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("polynomial JSON: ") + e.what());
  }
}

}  // namespace sja
