#include "sja/polytope.hpp"

#include <algorithm>
#include <bit>
#include <set>

namespace sja {

AlphaVector::AlphaVector(std::vector<Rational> alphas)
    : alphas_(std::move(alphas)) {
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    if (alphas_[i] < 0)
      throw std::invalid_argument("alpha entries must be nonnegative");
    if (i > 0 && alphas_[i] > alphas_[i - 1])
      throw std::invalid_argument("alpha entries must be weakly descending");
  }
}

std::vector<Rational> AlphaVector::betas() const {
  std::vector<Rational> b(alphas_.size());
  if (b.empty()) return b;
  for (std::size_t i = 0; i + 1 < alphas_.size(); ++i)
    b[i] = alphas_[i] - alphas_[i + 1];
  b.back() = alphas_.back();
  return b;
}

bool AlphaVector::proper() const {
  if (alphas_.empty()) return true;
  for (std::size_t i = 0; i + 1 < alphas_.size(); ++i)
    if (alphas_[i] <= alphas_[i + 1]) return false;
  return alphas_.back() > 0;
}

Rational AlphaVector::total() const {
  Rational t(0);
  for (const auto& a : alphas_) t += a;
  return t;
}

HRep h_description(const AlphaVector& av) {
  const int n = av.n();
  if (n > 25) throw DeskLimitError("h_description: 2^n rows is impractical");
  HRep h;
  h.n = n;
  // Prefix sums alpha_1 + ... + alpha_k.
  std::vector<Rational> prefix(n + 1, 0);
  for (int k = 1; k <= n; ++k) prefix[k] = prefix[k - 1] + av.alpha(k);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    HRow row;
    row.subset_mask = mask;
    row.a.assign(n, 0);
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) row.a[i] = 1;
    row.b = prefix[std::popcount(mask)];
    h.rows.push_back(std::move(row));
  }
  for (int i = 0; i < n; ++i) {
    HRow row;
    row.a.assign(n, 0);
    row.a[i] = -1;
    row.b = 0;
    h.rows.push_back(std::move(row));
  }
  return h;
}

std::vector<std::vector<Rational>> vertices(const AlphaVector& av) {
  const int n = av.n();
  std::set<std::vector<Rational>> seen;
  for (int k = 0; k <= n; ++k) {
    std::vector<Rational> base(n, 0);
    for (int j = 0; j < k; ++j) base[j] = av.alpha(j + 1);
    std::sort(base.begin(), base.end());
    do {
      seen.insert(base);
    } while (std::next_permutation(base.begin(), base.end()));
  }
  return {seen.begin(), seen.end()};
}

Integer proper_vertex_count(int n) {
  Integer total(0);
  for (int k = 0; k <= n; ++k)
    total += factorial(static_cast<unsigned long>(n)) /
             factorial(static_cast<unsigned long>(k));
  return total;
}

namespace {

// Rank of a rational matrix by Gaussian elimination (exact).
int matrix_rank(std::vector<std::vector<Rational>> m) {
  if (m.empty()) return 0;
  const int rows = static_cast<int>(m.size());
  const int cols = static_cast<int>(m[0].size());
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (m[r][c] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(m[rank], m[pivot]);
    for (int r = rank + 1; r < rows; ++r) {
      if (m[r][c] == 0) continue;
      Rational f = m[r][c] / m[rank][c];
      for (int cc = c; cc < cols; ++cc) m[r][cc] -= f * m[rank][cc];
    }
    ++rank;
  }
  return rank;
}

std::vector<int> tight_rows(const HRep& h, const std::vector<Rational>& v) {
  std::vector<int> out;
  for (int r = 0; r < static_cast<int>(h.rows.size()); ++r) {
    Rational lhs(0);
    for (int i = 0; i < h.n; ++i)
      if (h.rows[r].a[i] != 0) lhs += h.rows[r].a[i] * v[i];
    if (lhs == h.rows[r].b) out.push_back(r);
  }
  return out;
}

}  // namespace

CombinatoricsReport combinatorics_report(int n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (n > 12) throw DeskLimitError("combinatorics_report: n > 12");
  std::vector<Rational> a;
  for (int k = n; k >= 1; --k) a.emplace_back(k);
  AlphaVector av(std::move(a));

  CombinatoricsReport rep;
  rep.n = n;
  rep.expected_vertex_count = proper_vertex_count(n);
  rep.facet_count = Integer(1) << n;
  rep.facet_count += n - 1;

  auto verts = vertices(av);
  rep.vertex_count = Integer(static_cast<unsigned long>(verts.size()));
  rep.vertex_count_matches = rep.vertex_count == rep.expected_vertex_count;

  HRep h = h_description(av);
  rep.is_simple = true;
  for (const auto& v : verts) {
    if (static_cast<int>(tight_rows(h, v).size()) != n) {
      rep.is_simple = false;
      break;
    }
  }
  return rep;
}

EdgeReport edge_directions_check(const AlphaVector& av, int desk_limit) {
  EdgeReport rep;
  rep.n = av.n();
  const int n = av.n();
  if (n > desk_limit)
    throw DeskLimitError("edge_directions_check: n exceeds desk limit");

  HRep h = h_description(av);
  auto verts = vertices(av);
  const int nv = static_cast<int>(verts.size());
  std::vector<std::vector<int>> tight(nv);
  for (int i = 0; i < nv; ++i) tight[i] = tight_rows(h, verts[i]);

  for (int i = 0; i < nv; ++i) {
    for (int j = i + 1; j < nv; ++j) {
      std::vector<int> common;
      std::set_intersection(tight[i].begin(), tight[i].end(),
                            tight[j].begin(), tight[j].end(),
                            std::back_inserter(common));
      std::vector<std::vector<Rational>> rows;
      for (int r : common) rows.push_back(h.rows[r].a);
      if (matrix_rank(std::move(rows)) != n - 1) continue;

      ++rep.edge_count;
      // Lift the direction to the homogenization: append the negated sum.
      std::vector<Rational> d(n + 1, 0);
      Rational sum(0);
      for (int c = 0; c < n; ++c) {
        d[c] = verts[i][c] - verts[j][c];
        sum += d[c];
      }
      d[n] = -sum;
      int nonzero = 0;
      Rational pos(0), neg(0);
      for (const auto& x : d) {
        if (x == 0) continue;
        ++nonzero;
        if (x > 0) pos = x;
        else neg = x;
      }
      if (nonzero != 2 || pos != -neg) {
        rep.all_root_directions = false;
        rep.bad_direction = d;
        rep.note = "edge direction not parallel to any e_i - e_j";
        return rep;
      }
    }
  }
  return rep;
}

DelzantReport delzant_check(int n) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (n > 64) throw DeskLimitError("delzant_check: n > 64");
  DelzantReport rep;
  rep.n = n;
  rep.pass = true;
  for (int k = 0; k <= n; ++k) {
    // A_k = [[C_k, 0], [0, -I_{n-k}]], C_k lower-triangular ones.
    std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n, 0));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j <= i; ++j) m[i][j] = 1;
    for (int i = k; i < n; ++i) m[i][i] = -1;
    // Exact determinant via fraction-free-ish elimination on rationals.
    Rational det(1);
    for (int c = 0; c < n; ++c) {
      int pivot = -1;
      for (int r = c; r < n; ++r)
        if (m[r][c] != 0) {
          pivot = r;
          break;
        }
      if (pivot < 0) {
        det = 0;
        break;
      }
      if (pivot != c) {
        std::swap(m[pivot], m[c]);
        det = -det;
      }
      det *= m[c][c];
      for (int r = c + 1; r < n; ++r) {
        if (m[r][c] == 0) continue;
        Rational f = m[r][c] / m[c][c];
        for (int cc = c; cc < n; ++cc) m[r][cc] -= f * m[c][cc];
      }
    }
    Integer d = abs(det.get_num()) / det.get_den();
    if (det.get_den() != 1) {
      // Determinant of an integer matrix is an integer; defensive only.
      rep.pass = false;
    }
    rep.determinants.push_back(d);
    if (d != 1) rep.pass = false;
  }
  return rep;
}

}  // namespace sja
