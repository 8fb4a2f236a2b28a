#include "sja/volume.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

namespace sja {

// ------------------------------------------------------------ Hall counts

namespace {

// Counts neighborhood tuples for one fixed arrangement of d via DFS with an
// incrementally maintained maximum matching: a prefix that cannot be fully
// matched violates Hall's condition and no extension can repair it.
class HallEnumerator {
 public:
  HallEnumerator(const std::vector<int>& d, int n) : n_(n), d_(d) {
    for (int s = 1; s <= n; ++s) {
      std::vector<std::uint32_t>& list = by_size_.emplace_back();
      for (std::uint32_t m = 0; m < (1u << n); ++m)
        if (std::popcount(m) == s) list.push_back(m);
    }
    match_right_.assign(n, -1);
    neigh_.assign(n, 0);
  }

  unsigned long count() { return dfs(0); }

 private:
  bool augment(int u, std::uint32_t& seen) {
    std::uint32_t avail = neigh_[u] & ~seen;
    while (avail) {
      int v = std::countr_zero(avail);
      avail &= avail - 1;
      seen |= 1u << v;
      if (match_right_[v] < 0 || augment(match_right_[v], seen)) {
        match_right_[v] = u;
        return true;
      }
    }
    return false;
  }

  unsigned long dfs(int i) {
    if (i == n_) return 1;
    unsigned long total = 0;
    std::vector<int> saved = match_right_;
    for (std::uint32_t mask : by_size_[d_[i] - 1]) {
      neigh_[i] = mask;
      std::uint32_t seen = 0;
      if (augment(i, seen)) total += dfs(i + 1);
      match_right_ = saved;
    }
    return total;
  }

  int n_;
  std::vector<int> d_;
  std::vector<std::vector<std::uint32_t>> by_size_;
  std::vector<int> match_right_;
  std::vector<std::uint32_t> neigh_;
};

// Number of distinct rearrangements of the ascending vector d.
Integer arrangement_count(const std::vector<int>& d) {
  Integer count = factorial(d.size());
  int run = 1;
  for (std::size_t i = 1; i <= d.size(); ++i) {
    if (i < d.size() && d[i] == d[i - 1]) {
      ++run;
    } else {
      count /= factorial(run);
      run = 1;
    }
  }
  return count;
}

}  // namespace

Integer hall_graph_count(const std::vector<int>& d, int desk_limit) {
  const int n = static_cast<int>(d.size());
  if (n == 0) throw std::invalid_argument("empty degree vector");
  if (n > desk_limit)
    throw DeskLimitError("hall_graph_count: n exceeds desk limit");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 1 || d[i] > n)
      throw std::invalid_argument("degree out of range");
    if (i > 0 && d[i] < d[i - 1])
      throw std::invalid_argument("degree vector must be weakly ascending");
  }
  HallEnumerator e(d, n);
  return arrangement_count(d) * Integer(e.count());
}

// ------------------------------------------------------------------ dragon

namespace {

// omega_k = sum_{i=0}^{k-1} (-1)^{i+k-1} C(k-1,i) alpha_{n-i}
MultiPoly omega_form(int k, int n) {
  MultiPoly f(n);
  for (int i = 0; i < k; ++i) {
    Rational c{binomial(k - 1, i)};
    if ((i + k - 1) % 2 == 1) c = -c;
    f += MultiPoly::variable(n, (n - i) - 1, c);
  }
  return f;
}

void ascending_vectors(int n, int lo, std::vector<int>& cur,
                       const std::function<void(const std::vector<int>&)>& f) {
  if (static_cast<int>(cur.size()) == n) {
    f(cur);
    return;
  }
  for (int v = lo; v <= n; ++v) {
    cur.push_back(v);
    ascending_vectors(n, v, cur, f);
    cur.pop_back();
  }
}

}  // namespace

MultiPoly volume_poly_dragon(int n, int desk_limit) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (n > desk_limit)
    throw DeskLimitError("volume_poly_dragon: n exceeds desk limit");

  std::vector<MultiPoly> omegas;
  for (int k = 1; k <= n; ++k) omegas.push_back(omega_form(k, n));

  MultiPoly out(n);
  std::vector<int> cur;
  ascending_vectors(n, 1, cur, [&](const std::vector<int>& d) {
    Integer m = hall_graph_count(d, n);
    MultiPoly prod = MultiPoly::constant(n, Rational(m));
    for (int k : d) prod = prod * omegas[k - 1];
    out += prod;
  });
  return out;
}

// --------------------------------------------------------------- Lawrence

namespace {

// Lexicographic ranking of compositions of `deg` into `parts` slots lets the
// power expansion accumulate into a flat array instead of a term map.
struct CompositionIndex {
  int deg, parts;
  // step[i][c][v] = rank offset when slot i takes value v after c units have
  // been consumed by slots 0..i-1.
  std::vector<std::vector<std::vector<long>>> step;
  long total = 0;

  CompositionIndex(int deg_, int parts_) : deg(deg_), parts(parts_) {
    // count[r][p] = number of compositions of r into p ordered parts.
    std::vector<std::vector<long>> count(deg + 1,
                                         std::vector<long>(parts + 1, 0));
    for (int r = 0; r <= deg; ++r)
      for (int p = 0; p <= parts; ++p)
        count[r][p] =
            (p == 0) ? (r == 0 ? 1 : 0) : binomial(r + p - 1, p - 1).get_si();
    total = count[deg][parts];
    step.assign(parts, {});
    for (int i = 0; i < parts; ++i) {
      step[i].assign(deg + 1, {});
      for (int c = 0; c <= deg; ++c) {
        step[i][c].assign(deg - c + 1, 0);
        long acc = 0;
        for (int v = 0; v <= deg - c; ++v) {
          step[i][c][v] = acc;
          acc += count[deg - c - v][parts - i - 1];
        }
      }
    }
  }
};

Integer int128_to_integer(__int128 v) {
  bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v)
                            : static_cast<unsigned __int128>(v);
  Integer r;
  mpz_set_ui(r.get_mpz_t(), static_cast<unsigned long>(u >> 64));
  mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), 64);
  mpz_add_ui(r.get_mpz_t(), r.get_mpz_t(), static_cast<unsigned long>(u));
  if (neg) r = -r;
  return r;
}

// Requires |z| < 2^126.
__int128 integer_to_int128(const Integer& z) {
  Integer hi, lo;
  mpz_tdiv_q_2exp(hi.get_mpz_t(), z.get_mpz_t(), 64);
  mpz_tdiv_r_2exp(lo.get_mpz_t(), z.get_mpz_t(), 64);
  unsigned __int128 u =
      (static_cast<unsigned __int128>(mpz_get_ui(hi.get_mpz_t())) << 64) |
      mpz_get_ui(lo.get_mpz_t());
  return z < 0 ? -static_cast<__int128>(u) : static_cast<__int128>(u);
}

// Signed 128-bit accumulator array; adds that would overflow spill the
// running value into a GMP integer keyed by slot.
struct SpillAccumulator {
  std::vector<__int128> fast;
  std::map<long, Integer> spill;

  explicit SpillAccumulator(long slots) : fast(slots, 0) {}

  void add(long slot, __int128 v) {
    __int128 out;
    if (__builtin_add_overflow(fast[slot], v, &out)) {
      spill[slot] += int128_to_integer(fast[slot]);
      fast[slot] = v;
    } else {
      fast[slot] = out;
    }
  }

  Integer total(long slot) const {
    Integer r = int128_to_integer(fast[slot]);
    auto it = spill.find(slot);
    if (it != spill.end()) r += it->second;
    return r;
  }

  void merge(const SpillAccumulator& o) {
    for (std::size_t s = 0; s < fast.size(); ++s)
      add(static_cast<long>(s), o.fast[s]);
    for (const auto& [s, v] : o.spill) spill[s] += v;
  }
};

// Expands factor * (u_0 alpha_0 + ... + u_{k-1} alpha_{k-1})^n into the slot
// array. Direct recursion keeps this inner loop cheap; products stay within
// __int128 because the caller checked the worst-case bit bound.
struct PowerExpander {
  const CompositionIndex& index;
  const std::vector<std::vector<long>>& binom;
  const long* upow;  // upow[i * (deg + 1) + e] = u_i^e
  SpillAccumulator& acc;
  int k;
  __int128 factor;

  void run(int i, int consumed, __int128 coef, long rank) const {
    const int rem = index.deg - consumed;
    const long* row = upow + static_cast<std::size_t>(i) * (index.deg + 1);
    if (i == k - 1) {
      acc.add(rank + index.step[i][consumed][rem], coef * row[rem] * factor);
      return;
    }
    const auto& steps = index.step[i][consumed];
    const auto& b = binom[rem];
    for (int v = 0; v <= rem; ++v)
      run(i + 1, consumed + v, coef * b[v] * row[v], rank + steps[v]);
  }
};

void for_each_ascending_subset(
    int n, int k, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> l(k);
  std::function<void(int, int)> gen = [&](int pos, int lo) {
    if (pos == k) {
      f(l);
      return;
    }
    for (int v = lo; v <= n; ++v) {
      l[pos] = v;
      gen(pos + 1, v + 1);
    }
  };
  gen(0, 1);
}

// prod_{i not in l} (-i) over [1, n].
__int128 complement_product(const std::vector<int>& l, int n) {
  __int128 comp = 1;
  std::size_t li = 0;
  for (int i = 1; i <= n; ++i) {
    if (li < l.size() && l[li] == i) {
      ++li;
      continue;
    }
    comp *= -i;
  }
  return comp;
}

// sigma(L)_last * prod (sigma(L)_i - sigma(L)_{i+1}) * prod_{i not in L} (-i)
__int128 term_denominator(const std::vector<int>& u, __int128 complement) {
  __int128 denom = u.back() * complement;
  for (std::size_t i = 0; i + 1 < u.size(); ++i) denom *= (u[i] - u[i + 1]);
  return denom;
}

}  // namespace

MultiPoly volume_poly_lawrence(int n, int desk_limit, int threads) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (n > desk_limit)
    throw DeskLimitError("volume_poly_lawrence: n exceeds desk limit");
  if (threads < 1) threads = 1;

  CompositionIndex index(n, n);
  const long slots = index.total;

  std::vector<std::vector<long>> binom(n + 1, std::vector<long>(n + 1, 0));
  for (int r = 0; r <= n; ++r)
    for (int v = 0; v <= r; ++v) binom[r][v] = binomial(r, v).get_si();

  // Per-k sums are accumulated over a common denominator
  // dks[k] = lcm of all term denominators at that vertex support size.
  std::vector<Integer> dks(n + 1, Integer(1));
  std::vector<SpillAccumulator> acc_k;
  acc_k.reserve(n + 1);
  for (int k = 0; k <= n; ++k) acc_k.emplace_back(slots);

  for (int k = 1; k <= n; ++k) {
    std::vector<std::vector<int>> subsets;
    for_each_ascending_subset(
        n, k, [&](const std::vector<int>& l) { subsets.push_back(l); });

    Integer dk(1);
    for (const std::vector<int>& l : subsets) {
      __int128 comp = complement_product(l, n);
      std::vector<int> u = l;
      do {
        __int128 denom = term_denominator(u, comp);
        Integer d = int128_to_integer(denom < 0 ? -denom : denom);
        mpz_lcm(dk.get_mpz_t(), dk.get_mpz_t(), d.get_mpz_t());
      } while (std::next_permutation(u.begin(), u.end()));
    }
    dks[k] = dk;

    // Every intermediate product is bounded by (sum u_i)^n * dk; refuse up
    // front if that could overflow the 128-bit fast path.
    {
      Integer bound = rational_pow(Rational(n * (n + 1) / 2), n).get_num();
      bound *= dk;
      if (mpz_sizeinbase(bound.get_mpz_t(), 2) > 126)
        throw DeskLimitError(
            "volume_poly_lawrence: coefficient bound exceeds the fast "
            "accumulator range at this size");
    }

    auto worker = [&](std::size_t begin, std::size_t end,
                      SpillAccumulator& acc) {
      std::vector<long> upow(static_cast<std::size_t>(k) * (n + 1), 1);
      for (std::size_t si = begin; si < end; ++si) {
        const std::vector<int>& l = subsets[si];
        __int128 comp = complement_product(l, n);
        std::vector<int> u = l;
        do {
          __int128 denom = term_denominator(u, comp);
          Integer q;
          Integer d = int128_to_integer(denom < 0 ? -denom : denom);
          mpz_divexact(q.get_mpz_t(), dks[k].get_mpz_t(), d.get_mpz_t());
          __int128 factor = integer_to_int128(q);
          if (denom < 0) factor = -factor;

          for (int i = 0; i < k; ++i) {
            long* row = upow.data() + static_cast<std::size_t>(i) * (n + 1);
            row[0] = 1;
            for (int e = 1; e <= n; ++e) row[e] = row[e - 1] * u[i];
          }

          PowerExpander ex{index, binom, upow.data(), acc, k, factor};
          ex.run(0, 0, 1, 0);
        } while (std::next_permutation(u.begin(), u.end()));
      }
    };

    if (threads == 1 || subsets.size() < 2) {
      worker(0, subsets.size(), acc_k[k]);
    } else {
      std::size_t nt = std::min<std::size_t>(threads, subsets.size());
      std::vector<SpillAccumulator> parts;
      parts.reserve(nt);
      for (std::size_t t = 0; t < nt; ++t) parts.emplace_back(slots);
      std::vector<std::thread> pool;
      std::size_t chunk = (subsets.size() + nt - 1) / nt;
      for (std::size_t t = 0; t < nt; ++t) {
        std::size_t b = t * chunk, e = std::min(subsets.size(), b + chunk);
        if (b >= e) break;
        pool.emplace_back(worker, b, e, std::ref(parts[t]));
      }
      for (auto& th : pool) th.join();
      for (auto& p : parts) acc_k[k].merge(p);
    }
  }

  // Combine the per-k sums over a global common denominator. The normalized
  // polynomial must come out with integer coefficients; anything else means
  // the vertex terms failed to cancel and is a hard error.
  Integer d_all(1);
  for (int k = 1; k <= n; ++k)
    mpz_lcm(d_all.get_mpz_t(), d_all.get_mpz_t(), dks[k].get_mpz_t());

  MultiPoly out(n);
  ExpVec e(n, 0);
  long slot = 0;
  std::function<void(int, int)> walk = [&](int i, int consumed) {
    if (i == n - 1) {
      e[i] = static_cast<unsigned>(n - consumed);
      Integer num(0);
      for (int k = 1; k <= n; ++k) {
        Integer scale;
        mpz_divexact(scale.get_mpz_t(), d_all.get_mpz_t(), dks[k].get_mpz_t());
        num += acc_k[k].total(slot) * scale;
      }
      ++slot;
      if (num != 0) {
        Rational c(num, d_all);
        c.canonicalize();
        if (c.get_den() != 1)
          throw std::logic_error(
              "volume_poly_lawrence: non-integer normalized coefficient");
        out.add_term(e, c);
      }
      e[i] = 0;
      return;
    }
    for (int v = 0; v <= n - consumed; ++v) {
      e[i] = static_cast<unsigned>(v);
      walk(i + 1, consumed + v);
    }
    e[i] = 0;
  };
  walk(0, 0);
  return out;
}

const MultiPoly& cached_volume_poly(int n, int desk_limit, int threads) {
  static std::mutex mu;
  static std::map<int, MultiPoly> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, volume_poly_lawrence(n, desk_limit, threads)).first;
  return it->second;
}

// ------------------------------------------------------------------ oracle

Rational closed_form_oracle(const AlphaVector& av) {
  const int n = av.n();
  if (n > 3)
    throw DeskLimitError("closed_form_oracle: closed forms cover n <= 3");
  const auto& v = av.alphas();
  if (n == 1) return v[0];
  if (n == 2) {
    const Rational &a = v[0], &b = v[1];
    return a * a / 2 + a * b - b * b / 2;
  }
  const Rational &a = v[0], &b = v[1], &c = v[2];
  Rational s = c * c * c;
  s += 3 * c * c * (b - 2 * a);
  s -= 3 * c * (2 * b * b - 2 * b * a - a * a);
  s += -2 * b * b * b + 3 * b * b * a + 3 * b * a * a + a * a * a;
  return s / 6;
}

Rational volume(const AlphaVector& a, VolumeMethod method, int desk_limit,
                int threads) {
  const int n = a.n();
  switch (method) {
    case VolumeMethod::Oracle:
      return closed_form_oracle(a);
    case VolumeMethod::Dragon: {
      MultiPoly p = volume_poly_dragon(n, desk_limit);
      return p.evaluate(a.alphas()) / Rational(factorial(n));
    }
    case VolumeMethod::Lawrence: {
      if (n <= desk_limit) {
        const MultiPoly& p = cached_volume_poly(n, desk_limit, threads);
        return p.evaluate(a.alphas()) / Rational(factorial(n));
      }
      return lawrence_value(a.alphas());
    }
  }
  throw std::logic_error("unreachable");
}

// ------------------------------------------------- substituted polynomials

MultiPoly price_polynomial(int k, int desk_limit, int threads) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  const MultiPoly& vk = cached_volume_poly(k, desk_limit, threads);
  std::vector<MultiPoly> forms;
  forms.reserve(k);
  for (int j = 0; j < k; ++j) {
    MultiPoly f = MultiPoly::variable(k, j);
    if (j > 0) f -= MultiPoly::variable(k, j - 1);
    forms.push_back(std::move(f));
  }
  MultiPoly g = vk.substitute_linear(forms);
  g *= Rational(1) / Rational(factorial(k));
  return g;
}

MultiPoly beta_volume_poly(int n, int desk_limit, int threads) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  const MultiPoly& vn = cached_volume_poly(n, desk_limit, threads);
  std::vector<MultiPoly> forms;
  forms.reserve(n);
  for (int k = 0; k < n; ++k) {
    MultiPoly f(n);
    for (int j = k; j < n; ++j) f += MultiPoly::variable(n, j);
    forms.push_back(std::move(f));
  }
  return vn.substitute_linear(forms);
}

// ------------------------------------------------------- direct evaluation

namespace {

// Shared Lawrence-sum driver over k items at the parameter point
// (vals_0, ..., vals_{m-1}, x - shift, 0, ..., 0), where x is symbolic when
// with_symbol is set and the point is fully numeric otherwise. Returns the
// true-volume-scale polynomial in x (a constant when fully numeric).
UniPoly lawrence_sum(int k, const std::vector<Rational>& vals,
                     bool with_symbol, const Rational& shift) {
  const int m = static_cast<int>(vals.size());
  std::vector<Rational> coeffs(k + 1, Rational(0));

  std::vector<std::vector<long>> binom(k + 1, std::vector<long>(k + 1, 0));
  for (int r = 0; r <= k; ++r)
    for (int v = 0; v <= r; ++v) binom[r][v] = binomial(r, v).get_si();

  for (int j = 1; j <= k; ++j) {
    for_each_ascending_subset(k, j, [&](const std::vector<int>& l) {
      __int128 comp = complement_product(l, k);
      std::vector<int> u = l;
      do {
        __int128 denom = term_denominator(u, comp);
        Rational invd{Integer(1),
                      int128_to_integer(denom < 0 ? -denom : denom)};
        if (denom < 0) invd = -invd;

        // <sigma(L), alpha> restricted to the nonzero prefix of alpha.
        Rational a(0);
        long b = 0;
        int upto = std::min(j, with_symbol ? m + 1 : m);
        for (int i = 0; i < upto; ++i) {
          if (i < m) {
            a += u[i] * vals[i];
          } else {
            a -= u[i] * shift;
            b = u[i];
          }
        }

        if (b == 0) {
          coeffs[0] += rational_pow(a, k) * invd;
        } else {
          // (a + b x)^k by the binomial theorem.
          std::vector<Rational> apows(k + 1);
          apows[0] = 1;
          for (int i = 1; i <= k; ++i) apows[i] = apows[i - 1] * a;
          long bpow = 1;
          for (int i = 0; i <= k; ++i) {
            coeffs[i] += Rational(binom[k][i]) * apows[k - i] * bpow * invd;
            bpow *= b;
          }
        }
      } while (std::next_permutation(u.begin(), u.end()));
    });
  }

  Rational kfact{factorial(k)};
  for (auto& c : coeffs) c /= kfact;
  return UniPoly(std::move(coeffs));
}

}  // namespace

UniPoly lawrence_univariate(int k, const std::vector<Rational>& prefix_betas) {
  if (k < 1) throw std::invalid_argument("k must be positive");
  if (static_cast<int>(prefix_betas.size()) >= k)
    throw std::invalid_argument(
        "lawrence_univariate: prefix must leave a free slot");
  Rational shift(0);
  for (const auto& b : prefix_betas) shift += b;
  return lawrence_sum(k, prefix_betas, true, shift);
}

Rational lawrence_value(const std::vector<Rational>& alphas) {
  const int k = static_cast<int>(alphas.size());
  if (k == 0) return Rational(1);
  return lawrence_sum(k, alphas, false, Rational(0)).coeff(0);
}

}  // namespace sja
