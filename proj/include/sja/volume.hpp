#pragma once

#include <vector>

#include "sja/multipoly.hpp"
#include "sja/polytope.hpp"
#include "sja/rational.hpp"

namespace sja {

// Volume polynomials are stored normalized: every polynomial-returning
// routine here yields n! * vol_n, which has integer coefficients. Callers
// that need the true volume divide by n! on evaluation.

// Number of labeled bipartite graphs on [n] x [n] whose left degree vector,
// sorted ascending, equals d, and which satisfy Hall's condition. d must be
// weakly ascending with entries in [1, n]. Brute-force enumeration of
// left-neighborhood tuples with an augmenting-path matching test, folded
// over the d-arrangement symmetry.
Integer hall_graph_count(const std::vector<int>& d, int desk_limit = 6);

// n! * vol via the dragon-marriage expansion:
//   sum over weakly ascending d in [n]^n of M_d * omega_{d_1}...omega_{d_n},
// where omega_k = sum_{i=0}^{k-1} (-1)^{i+k-1} C(k-1,i) alpha_{n-i}.
MultiPoly volume_poly_dragon(int n, int desk_limit = 6);

// n! * vol via the specialized Lawrence vertex sum with objective
// c = (1, ..., n): for every k, ascending k-subset L, and permutation
// sigma of L,
//   <sigma(L), (alpha_1..alpha_k)>^n
//   / ( sigma(L)_k * prod_i (sigma(L)_i - sigma(L)_{i+1}) * prod_{i not in L} (-i) ).
MultiPoly volume_poly_lawrence(int n, int desk_limit = 8, int threads = 1);

// Process-wide memo of Lawrence-built volume polynomials.
const MultiPoly& cached_volume_poly(int n, int desk_limit = 8,
                                    int threads = 1);

// Printed closed forms for n <= 3; returns the true volume.
Rational closed_form_oracle(const AlphaVector& a);

enum class VolumeMethod { Dragon, Lawrence, Oracle };

// True volume of the SIM-body with the given parameters.
Rational volume(const AlphaVector& a, VolumeMethod method,
                int desk_limit = 8, int threads = 1);

// True-volume-scale polynomial in the cumulative price variables:
//   g_k(q_1..q_k) = vol_k(q_1, q_2-q_1, ..., q_k-q_{k-1}).
MultiPoly price_polynomial(int k, int desk_limit = 8, int threads = 1);

// n! * vol after alpha_k -> beta_k + ... + beta_n; all coefficients are
// positive, which feeds the Lorentzian check.
MultiPoly beta_volume_poly(int n, int desk_limit = 8, int threads = 1);

// Univariate restriction computed directly from the Lawrence sum without
// building the full symbolic polynomial:
//   w(x) = vol_k(b_1, ..., b_m, x - (b_1+...+b_m), 0, ..., 0)
// in true-volume scale, for exact rational b. Exact but expensive for
// large k; used for solves beyond the symbolic desk range.
UniPoly lawrence_univariate(int k, const std::vector<Rational>& prefix_betas);

// True volume at an explicit parameter point via the Lawrence sum; exact.
Rational lawrence_value(const std::vector<Rational>& alphas);

}  // namespace sja
