#include "sja/auction.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "sja/volume.hpp"

namespace sja {

namespace {

constexpr int kSymbolicDesk = 8;
constexpr int kNumericDesk = 12;

// Positive-coefficient volume polynomials keyed by dimension. All certified
// interval evaluation in this module goes through these: with nonnegative
// inputs each term is monotone, so enclosures stay as tight as the inputs.
const MultiPoly& cached_beta_poly(int k, int threads) {
  static std::mutex mu;
  static std::map<int, MultiPoly> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it == cache.end())
    it = cache.emplace(k, beta_volume_poly(k, kSymbolicDesk, threads)).first;
  return it->second;
}

// True volume of Lambda(alphas) at an exact rational point, routed through
// the symbolic polynomial when available and the term-wise vertex sum above
// that.
Rational volume_at(const std::vector<Rational>& alphas, int threads) {
  const int k = static_cast<int>(alphas.size());
  if (k == 0) return Rational(1);
  if (k <= kSymbolicDesk) {
    const MultiPoly& p = cached_volume_poly(k, kSymbolicDesk, threads);
    return p.evaluate(alphas) / Rational(factorial(k));
  }
  return lawrence_value(alphas);
}

// Certified vol_j Lambda(gamma_1, ..., gamma_j) for weakly descending
// nonnegative interval parameters, via the positive-coefficient polynomial
// in the increments (gamma_1 - gamma_2, ..., gamma_{j-1} - gamma_j, gamma_j).
Interval volume_interval(const std::vector<Interval>& gammas, int threads) {
  const int j = static_cast<int>(gammas.size());
  if (j == 0) return Interval(Rational(1));
  if (j > kSymbolicDesk)
    throw DeskLimitError("volume_interval: beyond the symbolic desk");
  std::vector<Interval> args;
  args.reserve(j);
  for (int i = 0; i + 1 < j; ++i) args.push_back(gammas[i] - gammas[i + 1]);
  args.push_back(gammas[j - 1]);
  Interval v = cached_beta_poly(j, threads).evaluate(args);
  return v * (Rational(1) / Rational(factorial(j)));
}

// The layer polynomial k! * w(y), w(y) = vol_k(beta_1..beta_m, y, 0, ..., 0),
// comes from the positive-coefficient polynomial at the increment arguments
//   (beta_1 - beta_2, ..., beta_{m-1} - beta_m, beta_m - y, y, 0, ..., 0).
// Only the two middle slots depend on y, so collect
//   k! w(y) = sum_{a,c} P[a][c] * (beta_m - y)^a * y^c
// with P[a][c] accumulated over the fixed prefix increments. Everything in
// sight is a nonnegative quantity (up to enclosure width), which keeps the
// evaluation monotone per term and the output width proportional to the
// input widths.
struct LayerPoly {
  int k = 0, m = 0;
  Interval beta_m;
  std::vector<std::vector<Interval>> P;  // [a][c], a + c <= k
};

LayerPoly build_layer_poly(const MultiPoly& lam,
                           const std::vector<Interval>& prefix, int k) {
  const int m = static_cast<int>(prefix.size());
  LayerPoly lp;
  lp.k = k;
  lp.m = m;
  if (m >= 1) lp.beta_m = prefix[m - 1];
  std::vector<Interval> d;  // prefix increments beta_j - beta_{j+1}
  for (int j = 0; j + 1 < m; ++j) d.push_back(prefix[j] - prefix[j + 1]);
  lp.P.assign(k + 1, std::vector<Interval>(k + 1));
  for (const auto& [e, c] : lam.terms()) {
    bool dead = false;
    for (int j = m + 1; j < k; ++j)
      if (e[j] != 0) {
        dead = true;
        break;
      }
    if (dead) continue;
    Interval term{c};
    for (int j = 0; j + 1 < m; ++j)
      if (e[j] != 0) term = term * d[j].pow(e[j]);
    const unsigned a = (m >= 1) ? e[m - 1] : 0;
    lp.P[a][e[m >= 1 ? m : 0]] += term;
  }
  return lp;
}

Interval eval_layer_poly(const LayerPoly& lp, const Rational& y) {
  std::vector<Interval> upow(lp.k + 1, Interval(Rational(1)));
  if (lp.m >= 1) {
    Interval u = lp.beta_m - y;
    for (int a = 1; a <= lp.k; ++a) upow[a] = u.pow(a);
  }
  std::vector<Rational> ypow(lp.k + 1, Rational(1));
  for (int c = 1; c <= lp.k; ++c) ypow[c] = ypow[c - 1] * y;
  Interval acc;
  for (int a = 0; a <= lp.k; ++a)
    for (int c = 0; c + a <= lp.k; ++c) {
      const Interval& p = lp.P[a][c];
      if (p.lo == 0 && p.hi == 0) continue;
      acc += p * upow[a] * Interval(ypow[c]);
    }
  return acc;
}

struct CertifiedRoot {
  RootStatus status = RootStatus::NoRootBelow;
  Interval y;  // root enclosure in the shifted variable, when Enclosed
};

// Bisection for W(y) = T on [0, ymax]; W is weakly increasing there (the
// body only grows with the free parameter). Narrows to width_target; stalls
// (indeterminate signs from the prefix precision) are accepted only if the
// enclosure is already within tol.
CertifiedRoot solve_certified(const LayerPoly& W, const Rational& T,
                              const Rational& ymax,
                              const Rational& width_target,
                              const Rational& tol) {
  CertifiedRoot out;
  if (ymax <= 0) {
    out.status = RootStatus::NoRootBelow;
    return out;
  }

  IntervalSign slo = interval_sign(eval_layer_poly(W, Rational(0)) - T);
  if (slo == IntervalSign::Positive) {
    out.status = RootStatus::NoRootBelow;
    return out;
  }
  if (slo == IntervalSign::Zero) {
    out.status = RootStatus::Enclosed;
    out.y = Interval(Rational(0));
    return out;
  }
  if (slo == IntervalSign::Indeterminate)
    throw std::logic_error(
        "layer solve: cannot certify the bracket's lower sign; prefix "
        "precision too coarse for the requested tolerance");

  IntervalSign shi = interval_sign(eval_layer_poly(W, ymax) - T);
  if (shi == IntervalSign::Negative) {
    out.status = RootStatus::NoRootAbove;
    return out;
  }
  if (shi == IntervalSign::Zero) {
    out.status = RootStatus::Enclosed;
    out.y = Interval(ymax);
    return out;
  }
  if (shi == IntervalSign::Indeterminate)
    throw std::logic_error(
        "layer solve: cannot certify the bracket's upper sign; prefix "
        "precision too coarse for the requested tolerance");

  Rational ylo(0), yhi = ymax;
  while (yhi - ylo > width_target) {
    Rational mid = (ylo + yhi) / 2;
    IntervalSign s = interval_sign(eval_layer_poly(W, mid) - T);
    if (s == IntervalSign::Negative) {
      ylo = mid;
    } else if (s == IntervalSign::Positive) {
      yhi = mid;
    } else if (s == IntervalSign::Zero) {
      out.status = RootStatus::Enclosed;
      out.y = Interval(mid);
      return out;
    } else {
      break;  // stalled at the precision carried by the prefix
    }
  }
  if (yhi - ylo > tol)
    throw std::logic_error(
        "layer solve: enclosure stalled above the requested tolerance");
  out.status = RootStatus::Enclosed;
  out.y = Interval(ylo, yhi);
  return out;
}

// Structural tightness of the submodularity chain. Increments are equal in
// the exact sense only along merged groups (runs of zero increments); a run
// beta_a = ... = beta_b = 0 with b > a makes layers a-1..b tight: b and the
// window lower ends' predecessors on the left side, the interior on the
// right side.
struct TightFlags {
  std::vector<bool> left, right;
  bool any = false;
};

TightFlags tight_flags(const PriceSchedule& ps) {
  const int n = ps.n;
  TightFlags tf;
  tf.left.assign(n + 1, false);
  tf.right.assign(n + 1, false);
  int run_start = 0;  // current run of structurally zero increments
  auto flush = [&](int a, int b) {
    if (a == 0 || b - a < 1) return;  // need at least two equal increments
    tf.any = true;
    for (int lo = a; lo <= b - 1; ++lo) {
      if (lo - 1 >= 1) tf.left[lo - 1] = true;
      for (int hi = lo + 1; hi <= b; ++hi) tf.left[hi] = true;
      for (int j = lo; j <= b - 1; ++j) tf.right[j] = true;
    }
  };
  for (int k = 2; k <= n; ++k) {
    bool zero = ps.prices[k - 1].group == ps.prices[k - 2].group;
    if (zero) {
      if (run_start == 0) run_start = k;
    } else {
      if (run_start != 0) flush(run_start, k - 1);
      run_start = 0;
    }
  }
  if (run_start != 0) flush(run_start, n);
  return tf;
}

std::string bracket_diagnostic(int layer, int level, const Rational& lower,
                               const Rational& upper) {
  std::ostringstream os;
  os << "layer " << layer << ", merge level " << level << ", bracket ["
     << fraction_string(lower) << ", " << fraction_string(upper) << "]";
  return os.str();
}

}  // namespace

// ------------------------------------------------------------- root finding

RootResult solve_layer_root(const UniPoly& w, const Rational& lower,
                            const Rational& upper, const Rational& target,
                            const Rational& tol) {
  if (lower > upper) throw std::invalid_argument("empty bracket");
  if (tol <= 0) throw std::invalid_argument("tol must be positive");
  RootResult out;

  Rational wlo = w.evaluate(lower);
  if (wlo == target) {
    out.status = RootStatus::Enclosed;
    out.enclosure = Interval(lower);
    return out;
  }
  if (wlo > target) {
    out.status = RootStatus::NoRootBelow;
    return out;
  }
  Rational whi = w.evaluate(upper);
  if (whi == target) {
    out.status = RootStatus::Enclosed;
    out.enclosure = Interval(upper);
    return out;
  }
  if (whi < target) {
    out.status = RootStatus::NoRootAbove;
    return out;
  }

  if (w.degree() == 1) {
    Rational root = (target - w.coeff(0)) / w.coeff(1);
    out.status = RootStatus::Enclosed;
    out.enclosure = Interval(root);
    return out;
  }

  Rational lo = lower, hi = upper;
  while (hi - lo > tol) {
    Rational mid = (lo + hi) / 2;
    Rational v = w.evaluate(mid);
    if (v == target) {
      out.status = RootStatus::Enclosed;
      out.enclosure = Interval(mid);
      return out;
    }
    (v < target ? lo : hi) = mid;
  }
  out.status = RootStatus::Enclosed;
  out.enclosure = Interval(lo, hi);
  return out;
}

// ------------------------------------------------------------ price system

Interval PriceSchedule::beta(int k) const {
  if (k == 1) return prices[0].value;
  const PriceEnclosure& a = prices[k - 1];
  const PriceEnclosure& b = prices[k - 2];
  if (a.group == b.group) return Interval(Rational(0));
  return a.value - b.value;
}

std::vector<Rational> PriceSchedule::beta_mids(int upto) const {
  std::vector<Rational> out;
  out.reserve(upto);
  Rational prev(0);
  for (int k = 1; k <= upto; ++k) {
    Rational m = price_mid(k);
    out.push_back(m - prev);
    prev = m;
  }
  return out;
}

PriceSchedule solve_prices(int n, const Rational& tol, int desk_limit,
                           int threads) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (tol <= 0) throw std::invalid_argument("tol must be positive");
  if (n > desk_limit)
    throw DeskLimitError(
        "solve_prices: n exceeds the desk limit (raise it to opt in)");
  if (n > kNumericDesk)
    throw DeskLimitError("solve_prices: n exceeds the numeric range");

  PriceSchedule ps;
  ps.n = n;
  ps.tol = tol;
  ps.prices.resize(n);
  ps.sold.assign(n, false);

  for (int k = 1; k <= n; ++k) {
    const Rational target = Rational(n + 1 - k) / Rational(n + 1);
    // Enclosure ladder: earlier layers are solved tighter so the widths they
    // inject into later layer polynomials stay far below those layers' own
    // targets (and final audits keep certified headroom under 1e-9).
    const Rational width_target =
        tol / Rational(Integer(1) << static_cast<unsigned long>(
                           10 * (n - k + 1)));

    bool accepted = false;
    for (int i = 1; i <= k && !accepted; ++i) {
      const int m = k - i;
      const Rational pm = (m >= 1) ? ps.price_mid(m) : Rational(0);
      const Rational pm_prev = (m >= 2)   ? ps.price_mid(m - 1)
                               : (m == 1) ? Rational(0)
                                          : Rational(-1);
      const Rational cap = 2 * pm - pm_prev;  // submodularity bound on p_k
      if (cap <= pm) continue;                // collapsed bracket: merge on

      Interval x_enclosure;
      RootStatus status;
      if (k == 1) {
        // vol_1 Lambda(x) = x: the first price is exact.
        status = RootStatus::Enclosed;
        x_enclosure = Interval(target);
      } else if (k <= kSymbolicDesk) {
        std::vector<Interval> prefix;
        prefix.reserve(m);
        for (int j = 1; j <= m; ++j) prefix.push_back(ps.beta(j));
        const MultiPoly& lam = cached_beta_poly(k, threads);
        LayerPoly W = build_layer_poly(lam, prefix, k);
        const Rational T = target * Rational(factorial(k));
        CertifiedRoot root =
            solve_certified(W, T, cap - pm, width_target, tol);
        status = root.status;
        if (status == RootStatus::Enclosed) {
          x_enclosure = (m >= 1) ? root.y + ps.price(m) : root.y;
        }
      } else {
        // Beyond the symbolic desk the layer polynomial is built from
        // enclosure midpoints: exact arithmetic, uncertified propagation, so
        // the graded width ladder buys nothing and tol is used directly.
        ps.certified = false;
        UniPoly w = lawrence_univariate(k, ps.beta_mids(m));
        RootResult root = solve_layer_root(w, pm, cap, target, tol);
        status = root.status;
        if (status == RootStatus::Enclosed) x_enclosure = root.enclosure;
      }

      switch (status) {
        case RootStatus::NoRootBelow:
          continue;  // root under the bracket: merge the next layer down
        case RootStatus::NoRootAbove:
          throw UnsolvableError(
              "no admissible root at or below the submodularity cap (" +
              bracket_diagnostic(k, i, pm, cap) + ")");
        case RootStatus::Enclosed:
          break;
      }

      for (int j = k - i + 1; j <= k; ++j) {
        ps.prices[j - 1].value = x_enclosure;
        ps.prices[j - 1].group = k;
        ps.sold[j - 1] = (j == k);
      }
      accepted = true;
    }
    if (!accepted)
      throw UnsolvableError("merge levels exhausted at layer " +
                            std::to_string(k));
  }

  int k_star = 0;
  for (int j = 1; j < n; ++j)
    if (ps.sold[j - 1]) k_star = j;
  ps.gap = n - k_star - 1;
  return ps;
}

// -------------------------------------------------------------- region data

RegionFactorization region_volume(const PriceSchedule& p, int k,
                                  int desk_limit, int threads) {
  (void)desk_limit;
  if (k < 1 || k > p.n) throw std::invalid_argument("layer out of range");
  std::vector<Rational> betas = p.beta_mids(p.n);

  std::vector<Rational> low;
  low.reserve(k);
  for (int i = k; i >= 1; --i) low.push_back(1 - betas[i - 1]);
  std::vector<Rational> high(betas.begin() + k, betas.end());

  return RegionFactorization{k, AlphaVector(low), AlphaVector(high),
                             volume_at(low, threads) *
                                 volume_at(high, threads)};
}

Rational revenue(const PriceSchedule& p, int desk_limit, int threads) {
  Rational total(0);
  for (int k = 1; k <= p.n; ++k) {
    RegionFactorization rf = region_volume(p, k, desk_limit, threads);
    total += p.price_mid(k) * Rational(binomial(p.n, k)) * rf.volume;
  }
  return total;
}

// ------------------------------------------------------------------- audits

namespace {

// Interval betas of the full schedule, group-aware.
std::vector<Interval> beta_intervals(const PriceSchedule& ps) {
  std::vector<Interval> out;
  out.reserve(ps.n);
  for (int k = 1; k <= ps.n; ++k) out.push_back(ps.beta(k));
  return out;
}

Interval region_volume_interval(const std::vector<Interval>& betas, int k,
                                int threads) {
  std::vector<Interval> low;
  low.reserve(k);
  for (int i = k; i >= 1; --i) low.push_back(-betas[i - 1] + Rational(1));
  std::vector<Interval> high(betas.begin() + k, betas.end());
  if (static_cast<int>(low.size()) > kSymbolicDesk ||
      static_cast<int>(high.size()) > kSymbolicDesk) {
    // Beyond the symbolic desk: exact value at midpoints, zero-width.
    std::vector<Rational> lm, hm;
    for (const auto& v : low) lm.push_back(v.mid());
    for (const auto& v : high) hm.push_back(v.mid());
    return Interval(volume_at(lm, threads) * volume_at(hm, threads));
  }
  return volume_interval(low, threads) * volume_interval(high, threads);
}

}  // namespace

AuditReport criticality_audit(const PriceSchedule& p, const Rational& audit_tol,
                              int desk_limit, int threads) {
  (void)desk_limit;
  AuditReport rep;
  rep.audit_tol = audit_tol;
  TightFlags tf = tight_flags(p);
  rep.degenerate = tf.any;
  std::vector<Interval> betas = beta_intervals(p);

  // The tightness classification above treats increments as equal only when
  // their layers were merged. That is sound only if unmerged neighbours are
  // certifiably distinct, so insist their enclosures separate.
  for (int k = 2; k <= p.n; ++k) {
    if (p.prices[k - 1].group == p.prices[k - 2].group) continue;
    if (!(betas[k - 2].lo > betas[k - 1].hi))
      throw std::logic_error(
          "criticality audit: neighbouring increments not certifiably "
          "distinct; re-solve with a tighter tolerance");
  }

  for (int k = 1; k <= p.n; ++k) {
    LayerAudit la;
    la.layer = k;
    la.sold = p.sold[k - 1];
    la.left_tight = tf.left[k];
    la.right_tight = tf.right[k];

    const Rational target = Rational(p.n + 1 - k) / Rational(p.n + 1);
    if (k <= kSymbolicDesk) {
      std::vector<Interval> gammas(betas.begin(), betas.begin() + k);
      la.residual = -volume_interval(gammas, threads) + target;
    } else {
      std::vector<Rational> mids = p.beta_mids(k);
      la.residual = Interval(target - volume_at(mids, threads));
    }

    // vol D_[k] > 0 exactly when the layer sells (the high factor picks up a
    // zero parameter otherwise), so `sold` doubles as the volume flag.
    if (!la.left_tight && !la.right_tight)
      la.condition = la.sold ? 1 : 2;
    else if (la.left_tight && !la.right_tight)
      la.condition = 3;
    else if (la.right_tight && !la.left_tight)
      la.condition = la.sold ? 4 : 0;
    else
      la.condition = 0;

    switch (la.condition) {
      case 1:
        la.pass = la.residual.mag() <= audit_tol;
        break;
      case 2:
        la.pass = la.residual.lo > 0;
        break;
      case 3:
        la.pass = la.residual.hi >= -audit_tol;
        break;
      case 4:
        la.pass = la.residual.lo <= audit_tol;
        break;
      default:
        la.pass = true;
        break;
    }
    rep.pass = rep.pass && la.pass;
    rep.layers.push_back(std::move(la));
  }
  return rep;
}

PartitionReport partition_check(const PriceSchedule& p, int desk_limit,
                                int threads) {
  (void)desk_limit;
  std::vector<Interval> betas = beta_intervals(p);
  PartitionReport rep;
  if (p.n <= kSymbolicDesk) {
    rep.d_empty_volume = volume_interval(betas, threads);
  } else {
    rep.d_empty_volume =
        Interval(volume_at(p.beta_mids(p.n), threads));
  }
  Interval sum = rep.d_empty_volume;
  for (int k = 1; k <= p.n; ++k) {
    Interval vk = region_volume_interval(betas, k, threads);
    sum += vk * Rational(binomial(p.n, k));
  }
  rep.residual = -sum + Rational(1);
  rep.d_empty_residual = rep.d_empty_volume - Rational(1, p.n + 1);
  return rep;
}

// --------------------------------------------------- general price schedules

GeneralPriceSchedule::GeneralPriceSchedule(int n) : n_(n) {
  if (n < 1 || n > 20)
    throw std::invalid_argument("item count out of range");
  prices_.assign(std::size_t(1) << n, Rational(0));
}

GeneralPriceSchedule GeneralPriceSchedule::from_layered(
    const PriceSchedule& p) {
  GeneralPriceSchedule g(p.n);
  for (std::uint32_t mask = 1; mask < (1u << p.n); ++mask)
    g.prices_[mask] = p.price_mid(std::popcount(mask));
  return g;
}

const Rational& GeneralPriceSchedule::price(std::uint32_t bundle) const {
  if (bundle >= prices_.size())
    throw std::invalid_argument("bundle out of range");
  return prices_[bundle];
}

void GeneralPriceSchedule::set_price(std::uint32_t bundle, const Rational& v) {
  if (bundle == 0)
    throw std::invalid_argument("the empty bundle's price is fixed at zero");
  if (bundle >= prices_.size())
    throw std::invalid_argument("bundle out of range");
  prices_[bundle] = v;
}

SubmodularityReport submodularity_check(const GeneralPriceSchedule& s) {
  SubmodularityReport rep;
  const std::uint32_t top = 1u << s.n();
  std::set<std::pair<std::uint32_t, bool>> seen;
  auto mark = [&](std::uint32_t bundle, bool left) {
    if (seen.insert({bundle, left}).second)
      rep.tight.push_back({bundle, left});
  };
  for (std::uint32_t i = 1; i < top; ++i) {
    for (std::uint32_t j = i + 1; j < top; ++j) {
      std::uint32_t inter = i & j;
      if (inter == i || inter == j) continue;  // comparable: trivially tight
      std::uint32_t uni = i | j;
      Rational slack =
          s.price(i) + s.price(j) - s.price(uni) - s.price(inter);
      if (slack < 0) {
        rep.pass = false;
        rep.violations.push_back({i, j, slack});
      } else if (slack == 0) {
        rep.degenerate = true;
        mark(uni, true);
        mark(inter, true);
        mark(i, false);
        mark(j, false);
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------- mechanism

namespace {

// Lexicographic order on bundles viewed as ascending item lists.
bool lex_smaller(std::uint32_t a, std::uint32_t b) {
  while (a != 0 && b != 0) {
    int ia = std::countr_zero(a), ib = std::countr_zero(b);
    if (ia != ib) return ia < ib;
    a &= a - 1;
    b &= b - 1;
  }
  return false;
}

}  // namespace

Allocation allocate(const GeneralPriceSchedule& s,
                    const std::vector<Rational>& x) {
  if (static_cast<int>(x.size()) != s.n())
    throw std::invalid_argument("valuation dimension mismatch");
  for (const Rational& v : x)
    if (v < 0 || v > 1)
      throw std::invalid_argument("valuation outside the unit cube");

  Allocation best;  // empty bundle: price 0, utility 0
  best.price = Rational(0);
  best.utility = Rational(0);
  for (std::uint32_t mask = 1; mask < (1u << s.n()); ++mask) {
    Rational value(0);
    for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1)
      value += x[std::countr_zero(rest)];
    Rational utility = value - s.price(mask);
    bool better = false;
    if (utility > best.utility) {
      better = true;
    } else if (utility == best.utility) {
      int pc = std::popcount(mask), bpc = std::popcount(best.bundle);
      better = pc > bpc || (pc == bpc && lex_smaller(mask, best.bundle));
    }
    if (better) {
      best.bundle = mask;
      best.price = s.price(mask);
      best.utility = utility;
    }
  }
  return best;
}

}  // namespace sja
