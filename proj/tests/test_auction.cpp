#include <doctest.h>

#include <bit>
#include <cstdint>
#include <random>
#include <vector>

#include "sja/auction.hpp"

using namespace sja;

namespace {

const Rational kTol(1, Integer(1000000000000));  // 1e-12

bool close(const Rational& a, double b, double eps) {
  return std::abs(to_double(a) - b) <= eps;
}

// Reference argmax with the documented tie rule (largest bundle first,
// then lexicographically smallest item set).
Allocation brute_force(const GeneralPriceSchedule& s,
                       const std::vector<Rational>& x) {
  auto lex_smaller = [](std::uint32_t a, std::uint32_t b) {
    while (a != 0 && b != 0) {
      int ia = std::countr_zero(a), ib = std::countr_zero(b);
      if (ia != ib) return ia < ib;
      a &= a - 1;
      b &= b - 1;
    }
    return a != 0 ? false : b != 0;
  };
  Allocation best;
  best.price = Rational(0);
  best.utility = Rational(0);
  for (std::uint32_t mask = 1; mask < (1u << s.n()); ++mask) {
    Rational value(0);
    for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1)
      value += x[std::countr_zero(rest)];
    Rational u = value - s.price(mask);
    bool better = u > best.utility;
    if (u == best.utility) {
      int pc = std::popcount(mask), bpc = std::popcount(best.bundle);
      better = pc > bpc || (pc == bpc && lex_smaller(mask, best.bundle));
    }
    if (better) best = Allocation{mask, s.price(mask), u};
  }
  return best;
}

GeneralPriceSchedule fig2_schedule() {
  GeneralPriceSchedule s(2);
  s.set_price(0b01, Rational(2, 3));
  s.set_price(0b10, Rational(1, 2));
  s.set_price(0b11, Rational(5, 6));
  return s;
}

}  // namespace

TEST_CASE("certified layer-root bisection") {
  SUBCASE("linear layers solve in closed form") {
    UniPoly w(std::vector<Rational>{Rational(0), Rational(1)});
    RootResult r = solve_layer_root(w, Rational(0), Rational(1),
                                    Rational(3, 4), kTol);
    CHECK(r.status == RootStatus::Enclosed);
    CHECK(r.enclosure.exact());
    CHECK(r.enclosure.lo == Rational(3, 4));
  }

  SUBCASE("the first quadratic layer") {
    // w(x) = vol_2(2/3, x - 2/3); the root at target 1/3 is 4/3 - sqrt(2)/3.
    UniPoly w(std::vector<Rational>{Rational(-4, 9), Rational(4, 3),
                                    Rational(-1, 2)});
    RootResult r = solve_layer_root(w, Rational(2, 3), Rational(4, 3),
                                    Rational(1, 3), kTol);
    CHECK(r.status == RootStatus::Enclosed);
    CHECK(r.enclosure.width() <= kTol);
    // w is increasing on the bracket, so the root lies inside iff the
    // endpoint values straddle the target.
    CHECK(w.evaluate(r.enclosure.lo) <= Rational(1, 3));
    CHECK(w.evaluate(r.enclosure.hi) >= Rational(1, 3));
    CHECK(close(r.enclosure.mid(), 0.8619288125423016, 1e-9));

    // The maximum on the bracket is w(4/3) = 4/9 < 1/2: root above.
    CHECK(solve_layer_root(w, Rational(2, 3), Rational(4, 3), Rational(1, 2),
                           kTol)
              .status == RootStatus::NoRootAbove);
    // w(2/3) = 2/9 > 1/5: root below.
    CHECK(solve_layer_root(w, Rational(2, 3), Rational(4, 3), Rational(1, 5),
                           kTol)
              .status == RootStatus::NoRootBelow);
  }

  SUBCASE("constant layers never bracket") {
    UniPoly hi = UniPoly::constant(Rational(1));
    UniPoly lo = UniPoly::constant(Rational(0));
    CHECK(solve_layer_root(hi, Rational(0), Rational(1), Rational(3, 4), kTol)
              .status == RootStatus::NoRootBelow);
    CHECK(solve_layer_root(lo, Rational(0), Rational(1), Rational(3, 4), kTol)
              .status == RootStatus::NoRootAbove);
  }

  SUBCASE("roots at bracket endpoints come back exact") {
    UniPoly w(std::vector<Rational>{Rational(0), Rational(1)});
    RootResult r =
        solve_layer_root(w, Rational(0), Rational(1), Rational(1), kTol);
    CHECK(r.status == RootStatus::Enclosed);
    CHECK(r.enclosure.exact());
    CHECK(r.enclosure.lo == Rational(1));
  }
}

TEST_CASE("layered price solve, small n") {
  SUBCASE("n = 1") {
    PriceSchedule ps = solve_prices(1, kTol);
    CHECK(ps.certified);
    CHECK(ps.price(1).exact());
    CHECK(ps.price(1).lo == Rational(1, 2));
    CHECK(ps.sold == std::vector<bool>{true});
    CHECK(ps.gap == 0);
  }

  SUBCASE("n = 2") {
    PriceSchedule ps = solve_prices(2, kTol);
    CHECK(ps.price(1).exact());
    CHECK(ps.price(1).lo == Rational(2, 3));
    CHECK(ps.price(2).width() <= kTol);
    CHECK(close(ps.price_mid(2), 0.8619288125423016, 1e-9));
    CHECK(ps.gap == 0);
    CHECK(ps.prices[0].group != ps.prices[1].group);
    CHECK(ps.beta(2).lo > 0);
  }

  SUBCASE("n = 3 matches the reference digits") {
    PriceSchedule ps = solve_prices(3, kTol);
    CHECK(ps.price(1).lo == Rational(3, 4));
    CHECK(close(ps.price_mid(2), 1.146, 5e-4));
    CHECK(close(ps.price_mid(3), 1.226, 5e-4));
    CHECK(ps.sold == std::vector<bool>{true, true, true});
    CHECK(ps.gap == 0);
  }

  SUBCASE("n = 5 merges the unsold fourth layer") {
    PriceSchedule ps = solve_prices(5, kTol);
    CHECK(ps.price(1).lo == Rational(5, 6));
    CHECK(close(ps.price_mid(2), 1.431, 5e-4));
    CHECK(close(ps.price_mid(3), 1.817, 5e-4));
    CHECK(close(ps.price_mid(5), 1.986, 5e-4));
    CHECK(ps.sold == std::vector<bool>{true, true, true, false, true});
    CHECK(ps.gap == 1);
    CHECK(ps.prices[3].group == ps.prices[4].group);
    CHECK(ps.price(4).lo == ps.price(5).lo);
    // Inside a merge group the increment is exactly zero.
    CHECK(ps.beta(5).exact());
    CHECK(ps.beta(5).lo == Rational(0));
    // The schedule is weakly increasing and concave in the midpoints.
    std::vector<Rational> b = ps.beta_mids(5);
    for (std::size_t i = 0; i + 1 < b.size(); ++i) CHECK(b[i] >= b[i + 1]);
    CHECK(b.back() >= 0);
  }

  SUBCASE("n = 6 skips layer five") {
    PriceSchedule ps = solve_prices(6, kTol);
    CHECK(ps.sold ==
          std::vector<bool>{true, true, true, true, false, true});
    CHECK(ps.gap == 1);
    CHECK(close(ps.price_mid(6), 2.377, 5e-4));
  }

  SUBCASE("argument validation") {
    CHECK_THROWS_AS(solve_prices(0, kTol), std::invalid_argument);
    CHECK_THROWS_AS(solve_prices(3, Rational(0)), std::invalid_argument);
    // Layers beyond the symbolic desk need an explicit opt-in.
    CHECK_THROWS_AS(solve_prices(9, kTol), DeskLimitError);
    CHECK_THROWS_AS(solve_prices(13, kTol, 13), DeskLimitError);
  }
}

TEST_CASE("uniqueness and stability under refinement") {
  PriceSchedule coarse = solve_prices(4, kTol);
  PriceSchedule fine = solve_prices(4, kTol / 10);
  REQUIRE(fine.n == coarse.n);
  Rational max_p(0);
  for (int k = 1; k <= 4; ++k) {
    CAPTURE(k);
    // The critical schedule is unique, so the refined price stays inside
    // the coarse enclosure.
    CHECK(fine.price_mid(k) >= coarse.price(k).lo);
    CHECK(fine.price_mid(k) <= coarse.price(k).hi);
    CHECK(fine.price(k).width() <= coarse.price(k).width());
    if (coarse.price_mid(k) > max_p) max_p = coarse.price_mid(k);
  }
  Rational drift = revenue(coarse) - revenue(fine);
  if (drift < 0) drift = -drift;
  CHECK(drift <= Rational(10) * kTol * Rational(4) * max_p);
}

TEST_CASE("region volumes") {
  SUBCASE("single item") {
    PriceSchedule ps = solve_prices(1, kTol);
    RegionFactorization r = region_volume(ps, 1);
    CHECK(r.factor_low.alphas() == std::vector<Rational>{Rational(1, 2)});
    CHECK(r.factor_high.n() == 0);
    CHECK(r.volume == Rational(1, 2));
  }

  SUBCASE("two items") {
    PriceSchedule ps = solve_prices(2, kTol);
    RegionFactorization top = region_volume(ps, 2);
    CHECK(top.factor_high.n() == 0);
    CHECK(top.volume > 0);

    RegionFactorization bottom = region_volume(ps, 1);
    Rational beta2 = ps.price_mid(2) - ps.price_mid(1);
    CHECK(bottom.factor_low.alphas() ==
          std::vector<Rational>{Rational(1, 3)});
    CHECK(bottom.factor_high.alphas() == std::vector<Rational>{beta2});
    CHECK(bottom.volume == Rational(1, 3) * beta2);
  }

  SUBCASE("merged layers have zero volume") {
    PriceSchedule ps = solve_prices(5, kTol);
    RegionFactorization r = region_volume(ps, 4);
    CHECK(r.volume == Rational(0));
    CHECK(r.factor_high.alphas().front() == Rational(0));
  }
}

TEST_CASE("expected revenue") {
  CHECK(revenue(solve_prices(1, kTol)) == Rational(1, 4));
  CHECK(close(revenue(solve_prices(2, kTol)), 0.549, 5e-4));
  CHECK(close(revenue(solve_prices(3, kTol)), 0.875, 5e-4));
}

TEST_CASE("criticality audit") {
  SUBCASE("all layers sold") {
    PriceSchedule ps = solve_prices(3, kTol);
    AuditReport rep = criticality_audit(ps);
    CHECK(rep.pass);
    CHECK(!rep.degenerate);
    REQUIRE(rep.layers.size() == 3);
    // p_1 = n/(n+1) makes the first residual vanish identically.
    CHECK(rep.layers[0].residual.exact());
    CHECK(rep.layers[0].residual.lo == Rational(0));
    for (const LayerAudit& a : rep.layers) {
      CHECK(a.sold);
      CHECK(a.condition == 1);
      CHECK(a.residual.mag() <= rep.audit_tol);
    }
  }

  SUBCASE("unsold layer keeps a positive residual") {
    PriceSchedule ps = solve_prices(5, kTol);
    AuditReport rep = criticality_audit(ps);
    CHECK(rep.pass);
    CHECK(!rep.degenerate);
    CHECK(!rep.layers[3].sold);
    CHECK(rep.layers[3].condition == 2);
    CHECK(rep.layers[3].residual.lo > 0);
    CHECK(rep.layers[4].condition == 1);
  }
}

TEST_CASE("partition of the unit cube") {
  SUBCASE("n = 1 is exact") {
    PartitionReport rep = partition_check(solve_prices(1, kTol));
    CHECK(rep.residual.exact());
    CHECK(rep.residual.lo == Rational(0));
    CHECK(rep.d_empty_volume.lo == Rational(1, 2));
    CHECK(rep.d_empty_residual.lo == Rational(0));
  }

  SUBCASE("n = 3") {
    PartitionReport rep = partition_check(solve_prices(3, kTol));
    CHECK(rep.residual.mag() < Rational(1, 1000000000));
    CHECK(rep.d_empty_residual.mag() < Rational(1, 1000000000));
  }

  SUBCASE("n = 5 exercises the merged-layer path") {
    PartitionReport rep = partition_check(solve_prices(5, kTol));
    CHECK(rep.residual.mag() < Rational(1, 1000000000));
    CHECK(rep.d_empty_residual.mag() < Rational(1, 1000000000));
  }
}

TEST_CASE("general price schedules and submodularity") {
  SUBCASE("the pentagon schedule is strictly submodular") {
    SubmodularityReport rep = submodularity_check(fig2_schedule());
    CHECK(rep.pass);
    CHECK(!rep.degenerate);
    CHECK(rep.tight.empty());
    CHECK(rep.violations.empty());
  }

  SUBCASE("additive prices are tight everywhere") {
    GeneralPriceSchedule s(2);
    s.set_price(0b01, Rational(1, 2));
    s.set_price(0b10, Rational(1, 2));
    s.set_price(0b11, Rational(1));
    SubmodularityReport rep = submodularity_check(s);
    CHECK(rep.pass);
    CHECK(rep.degenerate);
    REQUIRE(rep.tight.size() == 4);
    bool union_left = false;
    for (const TightBundle& t : rep.tight)
      if (t.bundle == 0b11 && t.left) union_left = true;
    CHECK(union_left);
  }

  SUBCASE("superadditive pair is a violation") {
    GeneralPriceSchedule s(2);
    s.set_price(0b01, Rational(1, 2));
    s.set_price(0b10, Rational(1, 2));
    s.set_price(0b11, Rational(3, 2));
    SubmodularityReport rep = submodularity_check(s);
    CHECK(!rep.pass);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].slack == Rational(-1, 2));
  }

  SUBCASE("layered SJA prices are submodular") {
    GeneralPriceSchedule s =
        GeneralPriceSchedule::from_layered(solve_prices(4, kTol));
    SubmodularityReport rep = submodularity_check(s);
    CHECK(rep.pass);
    CHECK(!rep.degenerate);
  }

  SUBCASE("schedule validation") {
    CHECK_THROWS_AS(GeneralPriceSchedule(0), std::invalid_argument);
    GeneralPriceSchedule s(2);
    CHECK_THROWS_AS(s.set_price(0, Rational(1)), std::invalid_argument);
    CHECK_THROWS_AS(s.set_price(4, Rational(1)), std::invalid_argument);
    CHECK(s.price(0) == Rational(0));
  }
}

TEST_CASE("allocation mechanism") {
  GeneralPriceSchedule s = fig2_schedule();

  SUBCASE("reference regions") {
    Allocation a = allocate(s, {Rational(4, 5), Rational(1, 20)});
    CHECK(a.bundle == 0b01);
    CHECK(a.price == Rational(2, 3));

    Allocation b = allocate(s, {Rational(1, 10), Rational(1, 10)});
    CHECK(b.bundle == 0);
    CHECK(b.price == Rational(0));
    CHECK(b.utility == Rational(0));

    CHECK(allocate(s, {Rational(0), Rational(0)}).bundle == 0);
  }

  SUBCASE("ties prefer the larger bundle") {
    GeneralPriceSchedule t(2);
    t.set_price(0b01, Rational(1, 2));
    t.set_price(0b10, Rational(3, 5));
    t.set_price(0b11, Rational(1));
    // {1} and {1,2} both give utility 1/2 at x = (1, 1/2).
    Allocation a = allocate(t, {Rational(1), Rational(1, 2)});
    CHECK(a.bundle == 0b11);
  }

  SUBCASE("equal-size ties prefer the lexicographically smaller set") {
    GeneralPriceSchedule t(4);
    for (std::uint32_t mask = 1; mask < 16; ++mask)
      t.set_price(mask, Rational(10));
    t.set_price(0b1001, Rational(1, 5));  // {1,4}
    t.set_price(0b0110, Rational(1, 5));  // {2,3}
    Allocation a = allocate(t, {Rational(3, 5), Rational(1, 2), Rational(1, 2),
                                Rational(2, 5)});
    CHECK(a.bundle == 0b1001);
    CHECK(a.utility == Rational(4, 5));
  }

  SUBCASE("matches the exhaustive oracle") {
    std::mt19937_64 rng(20240817);
    std::uniform_int_distribution<int> grid(0, 1000);
    for (int n = 2; n <= 4; ++n) {
      GeneralPriceSchedule layered =
          GeneralPriceSchedule::from_layered(solve_prices(n, kTol));
      for (int trial = 0; trial < 200; ++trial) {
        std::vector<Rational> x;
        for (int i = 0; i < n; ++i) x.push_back(Rational(grid(rng), 1000));
        Allocation got = allocate(layered, x);
        Allocation want = brute_force(layered, x);
        CAPTURE(n);
        CAPTURE(trial);
        CHECK(got.bundle == want.bundle);
        CHECK(got.utility == want.utility);
      }
    }
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(allocate(s, {Rational(1)}), std::invalid_argument);
    CHECK_THROWS_AS(allocate(s, {Rational(2), Rational(0)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(allocate(s, {Rational(-1, 10), Rational(0)}),
                    std::invalid_argument);
  }
}
