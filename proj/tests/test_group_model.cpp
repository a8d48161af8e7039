#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "zkt/descriptor.hpp"
#include "zkt/element.hpp"

using namespace zkt;

namespace {

GroupDescriptor Zd(Cardinal r = Cardinal::fin(1)) { return GroupDescriptor::integers(r); }
GroupDescriptor Zn(std::uint64_t n, Cardinal m = Cardinal::fin(1)) {
    return GroupDescriptor::cyclic(n, m);
}
Cardinal W() { return Cardinal::omega(); }

// Reference model: direct sum of cyclic groups given by raw moduli. The checks
// below recompute subgroup sizes elementwise, independent of the descriptor
// formulas.
struct CyclicTuple {
    std::vector<std::uint64_t> mods;
    std::uint64_t size() const {
        std::uint64_t s = 1;
        for (auto m : mods) s *= m;
        return s;
    }
    std::uint64_t torsion_count(std::uint64_t n) const {
        // |Z(m)[n]| = gcd(n, m)
        std::uint64_t c = 1;
        for (auto m : mods) c *= std::gcd(n, m);
        return c;
    }
    std::uint64_t multiplied_count(std::uint64_t n) const {
        // |n Z(m)| = m / gcd(n, m)
        std::uint64_t c = 1;
        for (auto m : mods) c *= m / std::gcd(n, m);
        return c;
    }
    std::uint64_t exponent() const {
        std::uint64_t e = 1;
        for (auto m : mods) e = std::lcm(e, m);
        return e;
    }
    GroupDescriptor descriptor() const {
        GroupDescriptor d;
        for (auto m : mods) d = d.direct_sum(GroupDescriptor::cyclic(m));
        return d;
    }
};

}  // namespace

TEST_CASE("cardinal ordering and arithmetic") {
    CHECK(Cardinal::fin(3) < Cardinal::fin(5));
    CHECK(Cardinal::fin(5) < Cardinal::omega());
    CHECK(Cardinal::omega() == Cardinal::omega());
    CHECK((Cardinal::fin(2) + Cardinal::omega()) == Cardinal::omega());
    CHECK(Cardinal::omega().times(0) == Cardinal::fin(0));
}

TEST_CASE("order conventions around 0") {
    CHECK(order_gcd(0, 12) == 12);
    CHECK(order_lcm(4, 0) == 0);
    CHECK(order_divides(5, 0));
    CHECK(!order_divides(0, 5));
    CHECK(is_proper_divisor(7, 0));
    CHECK(!is_proper_divisor(0, 0));
    CHECK(!is_proper_divisor(4, 4));
    CHECK(is_proper_divisor(2, 4));
}

TEST_CASE("torsion subgroup formulas") {
    // Z + Z(4)^w restricted to 2-torsion is Z(2)^w.
    GroupDescriptor g = Zd().direct_sum(Zn(4, W()));
    CHECK(g.torsion_subgroup(2) == Zn(2, W()));
    // Z(6)^w restricted to 3-torsion is Z(3)^w.
    CHECK(Zn(6, W()).torsion_subgroup(3) == Zn(3, W()));
    // G[0] = G.
    CHECK(g.torsion_subgroup(0) == g);
    // quasicyclic: Zp(2,inf)[8] = Z(8)
    CHECK(GroupDescriptor::quasicyclic(2).torsion_subgroup(8) == Zn(8));
    CHECK(GroupDescriptor::quasicyclic(2).torsion_subgroup(3).is_trivial());
}

TEST_CASE("torsion counts against elementwise enumeration") {
    // Every Z(n1)+...+Z(nk) with order <= 64 small sample; the full sweep lives
    // in the oracle suite.
    std::vector<CyclicTuple> groups = {
        {{12}}, {{2, 2, 2}}, {{4, 4}}, {{2, 4}}, {{6, 6}}, {{8, 4}}, {{9, 3}}, {{60}},
    };
    for (auto& t : groups) {
        GroupDescriptor d = t.descriptor();
        CHECK(d.finite_order() == t.size());
        CHECK(d.exponent() == t.exponent());
        for (std::uint64_t n = 1; n <= t.exponent() + 1; ++n) {
            CHECK(d.torsion_subgroup(n).finite_order() == t.torsion_count(n));
            CHECK(d.multiplied_by(n).finite_order() == t.multiplied_count(n));
        }
    }
}

TEST_CASE("exponent examples") {
    CHECK(Zn(2, Cardinal::fin(3)).direct_sum(Zn(9)).exponent() == 18);
    CHECK(Zd().exponent() == 0);
    CHECK(GroupDescriptor::quasicyclic(3).exponent() == 0);
    CHECK(GroupDescriptor::trivial().exponent() == 1);
    CHECK(Zn(4, W()).exponent() == 4);
}

TEST_CASE("multiply examples") {
    CHECK(Zd().multiplied_by(5) == Zd());
    CHECK(GroupDescriptor::rationals().multiplied_by(7) == GroupDescriptor::rationals());
    CHECK(GroupDescriptor::quasicyclic(2).multiplied_by(2) == GroupDescriptor::quasicyclic(2));
    CHECK(Zn(4).multiplied_by(2) == Zn(2));
    CHECK(Zn(4, W()).multiplied_by(3) == Zn(4, W()));
    CHECK(Zn(2).direct_sum(Zn(4)).multiplied_by(2) == Zn(2));
    CHECK_THROWS_AS(Zd().multiplied_by(0), std::invalid_argument);
}

TEST_CASE("essential order") {
    CHECK(Zn(4, W()).direct_sum(Zn(2, W())).essential_order() == 4);
    CHECK(Zn(8).essential_order() == 1);
    CHECK(Zd().essential_order() == 0);
    CHECK(Zn(6, W()).essential_order() == 6);
    CHECK(Zn(2, W()).direct_sum(Zn(4)).essential_order() == 2);
    // Independent divisor-minimality search: smallest m >= 1 with mG finite.
    auto eo_search = [](const GroupDescriptor& g) -> Order {
        if (!g.is_bounded()) return 0;
        for (Order m = 1; m <= g.exponent(); ++m)
            if (order_divides(m, g.exponent()) && g.multiplied_by(m).is_finite()) return m;
        return 0;
    };
    for (auto& g : {Zn(4, W()).direct_sum(Zn(2, W())), Zn(8), Zn(6, W()),
                    Zn(2, W()).direct_sum(Zn(4)), Zn(12, W()), Zn(9, Cardinal::fin(2))})
        CHECK(g.essential_order() == eo_search(g));
}

TEST_CASE("canonical torsion order") {
    CHECK(Zn(2, W()).canonical_torsion_order(4) == 2);
    CHECK(Zd().canonical_torsion_order(6) == 1);
    CHECK(Zn(4, W()).canonical_torsion_order(0) == 4);
    CHECK(Zn(12).canonical_torsion_order(8) == 4);
}

TEST_CASE("torsion irreducibility certificates") {
    CHECK(Zn(4, W()).torsion_irreducibility(4).irreducible);
    auto cert = Zn(2, W()).direct_sum(Zn(4)).torsion_irreducibility(4);
    CHECK(!cert.irreducible);
    REQUIRE(cert.leading.size() == 1);
    CHECK(cert.leading[0].p == 2);
    CHECK(cert.leading[0].s == 2);
    CHECK(cert.leading[0].multiplicity == Cardinal::fin(1));
    CHECK(Zd().torsion_irreducibility(0).irreducible);
    CHECK(Zn(6, W()).torsion_irreducibility(6).irreducible);
    CHECK(Zn(6, W()).torsion_irreducibility(2).irreducible);
    CHECK(GroupDescriptor::trivial().torsion_irreducibility(1).irreducible);
    // non-canonical order is a contract violation
    CHECK_THROWS_AS(Zn(2, W()).torsion_irreducibility(4), std::invalid_argument);
}

TEST_CASE("almost torsion free and cofinite classification") {
    CHECK(Zd().almost_torsion_free());
    CHECK(Zd().cofinite_zariski());
    CHECK(!Zn(3, W()).almost_torsion_free());
    CHECK(Zn(3, W()).cofinite_zariski());  // prime exponent
    CHECK(!Zn(4, W()).almost_torsion_free());
    CHECK(!Zn(4, W()).cofinite_zariski());
    CHECK(GroupDescriptor::quasicyclic(2).almost_torsion_free());
    CHECK(GroupDescriptor::quasicyclic(2, W()).almost_torsion_free() == false);
}

TEST_CASE("element arithmetic in a CRT-split cyclic group") {
    // Z(12) splits as Z(4) + Z(3); generator = (1,1).
    Group g = make_group(Zn(12));
    Element e(g);
    e.set(Coord::cyclic(2, 2, 0), Rat::of(1));
    e.set(Coord::cyclic(3, 1, 0), Rat::of(1));
    CHECK(e.order_of() == 12);
    CHECK(e.scalar_mul(6).order_of() == 2);
    CHECK(e.scalar_mul(12).is_zero());
    CHECK(e.scalar_mul(-1).add(e).is_zero());
    CHECK(e.in_torsion(12));
    CHECK(e.in_torsion(0));
    CHECK(!e.in_torsion(4));
}

TEST_CASE("element order with infinite coordinates") {
    Group g = make_group(Zd().direct_sum(GroupDescriptor::quasicyclic(2)));
    Element x(g);
    x.set(Coord::free(0), Rat::of(3));
    CHECK(x.order_of() == 0);
    Element y(g);
    y.set(Coord::quasicyclic(2, 0), Rat::of(1, 8));
    CHECK(y.order_of() == 8);
    CHECK(y.scalar_mul(4).order_of() == 2);
    Element z = x.add(y);
    CHECK(z.order_of() == 0);
}

TEST_CASE("quasicyclic coordinate canonicalization") {
    Group g = make_group(GroupDescriptor::quasicyclic(2));
    Element a(g);
    a.set(Coord::quasicyclic(2, 0), Rat::of(5, 8));
    Element b = a.scalar_mul(2);  // 10/8 = 5/4 = 1/4 mod 1
    CHECK(b.at(Coord::quasicyclic(2, 0)) == Rat::of(1, 4));
    Element c = a.scalar_mul(8);
    CHECK(c.is_zero());
}

TEST_CASE("element reduction modulo torsion traces") {
    Group g = make_group(Zn(4, W()));
    Element x(g);
    x.set(Coord::cyclic(2, 2, 0), Rat::of(3));
    // modulo G[2] (trace 2Z(4)) the representative keeps the low digit
    CHECK(x.reduce_mod_torsion(2).at(Coord::cyclic(2, 2, 0)) == Rat::of(1));
    CHECK(x.reduce_mod_torsion(4).is_zero());
    CHECK(x.reduce_mod_torsion(0).is_zero());
    Group q = make_group(GroupDescriptor::quasicyclic(2));
    Element y(q);
    y.set(Coord::quasicyclic(2, 0), Rat::of(5, 8));
    // 5/8 - 1/2 = 1/8: reduction mod Z(2) keeps the deep digits
    CHECK(y.reduce_mod_torsion(2).at(Coord::quasicyclic(2, 0)) == Rat::of(1, 8));
    CHECK(y.reduce_mod_torsion(8).is_zero());
}

TEST_CASE("descriptor element validation") {
    Group g = make_group(Zn(4, Cardinal::fin(2)));
    Element x(g);
    CHECK_THROWS_AS(x.set(Coord::cyclic(2, 2, 5), Rat::of(1)), std::invalid_argument);
    CHECK_THROWS_AS(x.set(Coord::cyclic(3, 1, 0), Rat::of(1)), std::invalid_argument);
    CHECK_THROWS_AS(x.set(Coord::free(0), Rat::of(1)), std::invalid_argument);
}

TEST_CASE("descriptor text form") {
    GroupDescriptor g = Zd(Cardinal::fin(2))
                            .direct_sum(GroupDescriptor::rationals())
                            .direct_sum(GroupDescriptor::quasicyclic(2, W()))
                            .direct_sum(Zn(4, W()))
                            .direct_sum(Zn(3, Cardinal::fin(5)));
    CHECK(g.str() == "Z^2 + Q + Zp(2,inf)^w + Z(4)^w + Z(3)^5");
}
