#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sja/rational.hpp"

namespace sja {

// Parameter vector of a SIM-body: weakly descending, nonnegative rationals
// (alpha_1 >= alpha_2 >= ... >= alpha_n >= 0). The body it parametrizes is
//   { x >= 0 : sum_{i in I} x_i <= alpha_1 + ... + alpha_{|I|}  for all I }.
// The empty vector is allowed and stands for the zero-dimensional point body
// (volume 1), which shows up as the trivial factor of a region product.
class AlphaVector {
 public:
  explicit AlphaVector(std::vector<Rational> alphas);

  int n() const { return static_cast<int>(alphas_.size()); }
  const std::vector<Rational>& alphas() const { return alphas_; }
  const Rational& alpha(int k) const { return alphas_.at(k - 1); }  // 1-based

  // Differences beta_k = alpha_k - alpha_{k+1}, beta_n = alpha_n.
  std::vector<Rational> betas() const;
  // Strictly descending with alpha_n > 0.
  bool proper() const;
  Rational total() const;

 private:
  std::vector<Rational> alphas_;
};

// One inequality <a, x> <= b.
struct HRow {
  std::vector<Rational> a;
  Rational b;
  // For subset rows, the bitmask of the subset (bit i-1 <-> coordinate i);
  // 0 for nonnegativity rows.
  std::uint32_t subset_mask = 0;
};

struct HRep {
  int n = 0;
  std::vector<HRow> rows;  // 2^n - 1 subset rows, then n nonnegativity rows
};

// Full halfspace description: one row per nonempty subset I with right-hand
// side alpha_1 + ... + alpha_{|I|}, plus -x_i <= 0 for each coordinate.
HRep h_description(const AlphaVector& a);

// All vertices, deduplicated: coordinate permutations of
// (alpha_1,...,alpha_k,0,...,0) for k = 0..n. Deterministic order.
std::vector<std::vector<Rational>> vertices(const AlphaVector& a);

// Expected vertex count for a proper parameter vector: sum_{k=0}^n n!/k!.
Integer proper_vertex_count(int n);

struct CombinatoricsReport {
  int n = 0;
  Integer vertex_count;
  Integer expected_vertex_count;
  Integer facet_count;           // 2^n + n - 1
  bool is_simple = false;        // every vertex tight on exactly n rows
  bool vertex_count_matches = false;
};

// Counts vertices/facets of the regular body Lambda(n, n-1, ..., 1) and
// verifies simplicity via tight-row counts.
CombinatoricsReport combinatorics_report(int n);

struct EdgeReport {
  int n = 0;
  long edge_count = 0;
  bool all_root_directions = true;
  // First offending edge when all_root_directions is false.
  std::vector<Rational> bad_direction;
  std::string note;
};

// Checks that every edge of the homogenization (append x_{n+1} so that
// coordinates sum to alpha_1 + ... + alpha_n) is parallel to some e_i - e_j.
// Vertex pairs are adjacent iff their common tight rows have rank n-1.
EdgeReport edge_directions_check(const AlphaVector& a, int desk_limit = 5);

struct DelzantReport {
  int n = 0;
  bool pass = false;
  std::vector<Integer> determinants;  // |det(A_k)| for k = 0..n
};

// Vertex-basis matrices A_k = [[C_k, 0], [0, -I_{n-k}]] with C_k the
// lower-triangular all-ones k x k block; checks |det| = 1 for all k.
DelzantReport delzant_check(int n);

}  // namespace sja
