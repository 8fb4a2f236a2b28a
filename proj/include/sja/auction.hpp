#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sja/multipoly.hpp"
#include "sja/polytope.hpp"
#include "sja/rational.hpp"

namespace sja {

// Raised when the layered price search exhausts every merge level without an
// admissible root; carries the bracket diagnostics of the failing layer.
class UnsolvableError : public std::runtime_error {
 public:
  explicit UnsolvableError(const std::string& what)
      : std::runtime_error(what) {}
};

// ------------------------------------------------------------- root finding

enum class RootStatus {
  Enclosed,     // certified enclosure of the unique bracketed root
  NoRootBelow,  // w(lower) already exceeds the target (root below bracket)
  NoRootAbove,  // w(upper) still under the target (root above bracket)
};

struct RootResult {
  RootStatus status = RootStatus::NoRootBelow;
  Interval enclosure;  // meaningful only when status == Enclosed
};

// Certified bisection for w(x) = target on [lower, upper], where w has exact
// rational coefficients and is weakly increasing on the bracket. Signs are
// evaluated exactly; linear w is solved in closed form (zero-width
// enclosure). Stops once the enclosure width drops below tol.
RootResult solve_layer_root(const UniPoly& w, const Rational& lower,
                            const Rational& upper, const Rational& target,
                            const Rational& tol);

// ------------------------------------------------------------ price system

// One solved price with its certified enclosure. Prices equalized by layer
// merging share a group id; differences inside a group are exactly zero,
// which keeps downstream interval arithmetic from widening spuriously.
struct PriceEnclosure {
  Interval value;
  int group = 0;
};

struct PriceSchedule {
  int n = 0;
  Rational tol;
  // True when every enclosure is certified. The solver clears this beyond
  // the symbolic desk range, where layer polynomials are built from
  // enclosure midpoints instead of intervals.
  bool certified = true;
  std::vector<PriceEnclosure> prices;  // prices[k-1] is p_k
  std::vector<bool> sold;              // sold[k-1]: layer k sells
  int gap = 0;                         // n - (largest sold layer below n) - 1

  const Interval& price(int k) const { return prices[k - 1].value; }
  Rational price_mid(int k) const { return prices[k - 1].value.mid(); }
  // Group-aware increment p_k - p_{k-1} (beta(1) = p_1): exactly [0, 0]
  // inside a merge group.
  Interval beta(int k) const;
  // Midpoint increments (beta_1, ..., beta_upto) as SIM-body parameters.
  std::vector<Rational> beta_mids(int upto) const;
};

// Layered price solve: for k = 1..n fix p_k as the root of
//   vol_k(p_1, p_2 - p_1, ..., p_{k-i} - p_{k-i-1}, x - p_{k-i}, 0, ..., 0)
//     = 1 - k/(n+1)
// over the bracket [p_{k-i}, 2 p_{k-i} - p_{k-i-1}] (conventions p_0 = 0,
// p_{-1} = -1), escalating the merge level i when the root falls below the
// bracket and back-filling merged prices on acceptance. Layers k within the
// symbolic desk use certified interval arithmetic end to end; larger layers
// fall back to exact polynomials built at enclosure midpoints.
PriceSchedule solve_prices(int n, const Rational& tol, int desk_limit = 8,
                           int threads = 1);

// -------------------------------------------------------------- region data

struct RegionFactorization {
  int k = 0;
  // Parameters of the two SIM-body factors, from enclosure midpoints:
  // factor_low = (1-(p_k - p_{k-1}), ..., 1-p_1),
  // factor_high = (p_{k+1} - p_k, ..., p_n - p_{n-1}) (empty for k = n).
  AlphaVector factor_low;
  AlphaVector factor_high;
  Rational volume;  // product of the factor volumes
};

// Volume of the region where exactly the k cheapest layers are worth buying,
// factored per the product decomposition.
RegionFactorization region_volume(const PriceSchedule& p, int k,
                                  int desk_limit = 8, int threads = 1);

// Expected revenue sum_k p_k * C(n,k) * vol D_[k] at enclosure midpoints.
Rational revenue(const PriceSchedule& p, int desk_limit = 8, int threads = 1);

// ------------------------------------------------------------------- audits

struct LayerAudit {
  int layer = 0;
  bool sold = false;
  bool left_tight = false;
  bool right_tight = false;
  // Which of the four necessary criticality conditions applies:
  // 1 = not tight, positive volume  -> residual ~ 0
  // 2 = not tight, zero volume     -> residual >= 0
  // 3 = just left tight            -> residual >= 0
  // 4 = just right tight, pos vol  -> residual <= 0
  // 0 = no condition applies
  int condition = 0;
  Interval residual;  // (1 - k/(n+1)) - vol_k Lambda(beta_1, ..., beta_k)
  bool pass = true;
};

struct AuditReport {
  Rational audit_tol;
  std::vector<LayerAudit> layers;
  bool degenerate = false;  // some submodularity inequality is tight
  bool pass = true;
};

// Residual audit of the critical-point conditions, evaluated with certified
// interval arithmetic (positive-coefficient representation, so unsold-layer
// signs come out certified).
AuditReport criticality_audit(const PriceSchedule& p,
                              const Rational& audit_tol = Rational(1,
                                                                   1000000000),
                              int desk_limit = 8, int threads = 1);

struct PartitionReport {
  // 1 - [vol D_empty + sum_k C(n,k) vol D_[k]]
  Interval residual;
  Interval d_empty_volume;
  // vol D_empty - 1/(n+1)
  Interval d_empty_residual;
};

// Partition-of-unity check: the buy-nothing region and the layer regions
// must tile the unit cube.
PartitionReport partition_check(const PriceSchedule& p, int desk_limit = 8,
                                int threads = 1);

// --------------------------------------------------- general price schedules

// Price map over all bundles of [n], p_empty = 0. Bundles are bitmasks with
// item i on bit i-1.
class GeneralPriceSchedule {
 public:
  explicit GeneralPriceSchedule(int n);
  // Symmetric schedule p_I = p_{|I|} from solved layer prices (midpoints).
  static GeneralPriceSchedule from_layered(const PriceSchedule& p);

  int n() const { return n_; }
  const Rational& price(std::uint32_t bundle) const;
  void set_price(std::uint32_t bundle, const Rational& v);

 private:
  int n_;
  std::vector<Rational> prices_;
};

struct TightBundle {
  std::uint32_t bundle = 0;
  bool left = false;  // left tight (a union/intersection side) vs right
};

struct SubmodularityViolation {
  std::uint32_t i = 0, j = 0;
  Rational slack;  // p_i + p_j - p_union - p_intersection, negative here
};

struct SubmodularityReport {
  bool pass = true;
  bool degenerate = false;  // some pair is tight
  std::vector<TightBundle> tight;
  std::vector<SubmodularityViolation> violations;
};

// Checks p_{I u J} + p_{I n J} <= p_I + p_J over all incomparable pairs;
// exact equalities are recorded with their left/right tight labels.
SubmodularityReport submodularity_check(const GeneralPriceSchedule& s);

// ---------------------------------------------------------------- mechanism

struct Allocation {
  std::uint32_t bundle = 0;
  Rational price;
  Rational utility;
};

// Utility-maximizing bundle for valuation x in [0,1]^n. Ties go to the
// largest bundle, then the lexicographically smallest item set.
Allocation allocate(const GeneralPriceSchedule& s,
                    const std::vector<Rational>& x);

}  // namespace sja
