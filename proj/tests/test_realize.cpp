#include "zkt/realize.hpp"

#include "doctest.h"
#include "zkt/closed_set.hpp"
#include "zkt/descriptor.hpp"
#include "zkt/generators.hpp"

using namespace zkt;

namespace {

Group Z4w() { return make_group(GroupDescriptor::cyclic(4, Cardinal::omega())); }
Group Zint() { return make_group(GroupDescriptor::integers()); }

}  // namespace

TEST_CASE("sqrt2 fraction bits match the classic constant") {
    unsigned __int128 f = sqrt2_fraction_bits();
    CHECK(static_cast<std::uint64_t>(f >> 64) == 0x6A09E667F3BCC908ull);
    // strictly below 1/2: sqrt(2) - 1 < 0.5
    CHECK(static_cast<std::uint64_t>(f >> 120) < (1u << 7));
}

TEST_CASE("torus values compute exactly on rationals") {
    TorusValue a = TorusValue::rational(Rat::of(3, 4));
    TorusValue b = TorusValue::rational(Rat::of(3, 4));
    CHECK(a.add(b) == TorusValue::rational(Rat::of(1, 2)));
    CHECK(a.scalar_mul(-1) == TorusValue::rational(Rat::of(1, 4)));
    CHECK(a.scalar_mul(4) == TorusValue::zero());
    CHECK(a.sub(b) == TorusValue::zero());

    CHECK(a.grid_index(4) == 3);
    CHECK(a.grid_index(8) == 6);
    CHECK(!a.grid_index(2).has_value());
    CHECK(TorusValue::zero().grid_index(1) == 0);

    CHECK(a.cell(4) == 3);
    CHECK(a.circle_distance(b) == 0.0);
    CHECK(a.circle_distance(TorusValue::zero()) == doctest::Approx(0.25));
    CHECK(TorusValue::rational(Rat::of(9, 10)).circle_distance(TorusValue::zero()) ==
          doctest::Approx(0.1));
    CHECK(a.str() == "3/4");
}

TEST_CASE("irrational torus values wrap in fixed point") {
    TorusValue w = TorusValue::irrational(sqrt2_fraction_bits());
    CHECK(!w.exact());
    CHECK(!w.grid_index(4).has_value());
    // 2 * frac(sqrt 2) = 0.828..., and the negative wraps
    CHECK(w.scalar_mul(2).circle_distance(TorusValue::zero()) == doctest::Approx(0.171573).epsilon(1e-4));
    CHECK(w.add(w.scalar_mul(-1)) == TorusValue::zero());
    CHECK(w.cell(10) == 4);  // 0.414... in [0.4, 0.5)
}

TEST_CASE("characters are homomorphisms with torsion-compatible values") {
    Group g = make_group(GroupDescriptor::integers().direct_sum(
        GroupDescriptor::cyclic(4, Cardinal::omega())
            .direct_sum(GroupDescriptor::quasicyclic(3))));
    CharacterFamily chi(g, 3, 7);

    Element a = Element::zero(g)
                    .with(Coord::free(0), Rat::of(2))
                    .with(Coord::cyclic(2, 2, 1), Rat::of(3))
                    .with(Coord::quasicyclic(3, 0), Rat::of(2, 9));
    Element b = Element::zero(g)
                    .with(Coord::free(0), Rat::of(-5))
                    .with(Coord::cyclic(2, 2, 1), Rat::of(2))
                    .with(Coord::quasicyclic(3, 0), Rat::of(1, 3));
    CHECK(chi.additive_on(a, b));
    CHECK(chi.additive_on(a, a));
    CHECK(chi.additive_on(b, b.negate()));

    // torsion part of the image is exactly rational with matching denominator
    Element t = Element::unit(g, Coord::cyclic(2, 2, 0));
    for (std::uint32_t r = 0; r < chi.rows(); ++r) {
        TorusValue v = chi.apply(r, t);
        CHECK(v.exact());
        CHECK(v.grid_index(4).has_value());
    }
    // lazy values: far-out coordinates exist and stay consistent
    CHECK(chi.generator_value(2, Coord::cyclic(2, 2, 1000)) ==
          chi.generator_value(2, Coord::cyclic(2, 2, 1000)));
}

TEST_CASE("the unique nontrivial character of Z(2) is found") {
    Group g = make_group(GroupDescriptor::cyclic(2));
    CharacterBuild build = build_characters(g, {}, 1);
    CHECK(build.chi.generator_value(0, Coord::cyclic(2, 1, 0)) ==
          TorusValue::rational(Rat::of(1, 2)));
    CHECK(build.chi.separates({Element::zero(g), Element::unit(g, Coord::cyclic(2, 1, 0))}));
}

TEST_CASE("round basis images cover the torsion grid") {
    Group g = Z4w();
    RoundAtom target{Element::zero(g), make_round(g, 4)};

    Config cfg;
    cfg.realize_prefix = 2000;
    CharacterBuild b3 = build_characters(g, {target}, 3, cfg);
    CHECK(b3.reports.size() == 1);
    CHECK(b3.reports[0].pass);
    CHECK(b3.reports[0].cells == 64);
    CHECK(b3.reports[0].covering == 1.0);

    CharacterBuild b4 = build_characters(g, {target}, 4, cfg);
    CHECK(b4.reports[0].cells == 256);
    CHECK(b4.reports[0].covering == 1.0);
    CHECK(b4.reports[0].grid_order == 4);

    // a short prefix cannot cover and the report says so without throwing
    CharacterFamily chi(g, 4, cfg.seed);
    DensityReport starved = verify_density(chi, target, 5, cfg.eps);
    CHECK(!starved.pass);
    CHECK(starved.hit <= 5);
    CHECK(starved.covering < 1.0);
    CHECK(!starved.worst_empty.empty());
}

TEST_CASE("a Weyl orbit is eps dense in the circle") {
    Group g = Zint();
    RoundAtom target{Element::zero(g), make_round(g, 0)};
    Config cfg;
    cfg.realize_prefix = 10000;
    cfg.eps = 0.01;
    CharacterBuild build = build_characters(g, {target}, 1, cfg);
    CHECK(build.retries <= 3);
    CHECK(build.reports[0].pass);
    CHECK(build.reports[0].cells == 100);
    CHECK(build.reports[0].covering == 1.0);
    CHECK(build.reports[0].grid_order == 0);
}

TEST_CASE("realize_closure passes the three basis scenarios") {
    Group g = Z4w();
    DescribedSet S = DescribedSet::round(make_round(g, 4));
    DescribedSet SU2S = S.union_with(DescribedSet::round(make_round(g, 4).scaled(2)));
    DescribedSet S2 = DescribedSet::round(make_round(g, 2));

    RealizeVerdict vs = realize_closure(S);
    INFO(vs.str());
    CHECK(vs.pass);
    CHECK(vs.sound);
    CHECK(vs.tight);

    RealizeVerdict vu = realize_closure(SU2S);
    INFO(vu.str());
    CHECK(vu.pass);
    CHECK(vu.targets.size() == 2);

    // the 2-round basis closes onto the proper subgroup G[2]: outside points
    // must stay separated
    RealizeVerdict v2 = realize_closure(S2);
    INFO(v2.str());
    CHECK(v2.pass);
    CHECK(closure(S2) == AlgebraicSet(g, {TorsionCoset::subgroup(g, 2)}));
}

TEST_CASE("realize_closure is trivial on finite sets") {
    Group g = Z4w();
    Element e0 = Element::unit(g, Coord::cyclic(2, 2, 0));
    DescribedSet x = DescribedSet::finite(g, {Element::zero(g), e0});
    RealizeVerdict v = realize_closure(x);
    INFO(v.str());
    CHECK(v.pass);
    CHECK(v.targets.empty());
}

TEST_CASE("image csv lists one labeled row per point") {
    Group g = Zint();
    CharacterFamily chi(g, 2, 0);
    std::string csv = image_csv(chi, {Element::zero(g), Element::unit(g, Coord::free(0))});
    CHECK(csv.find("element,chi1,chi2") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("0.00000000") != std::string::npos);
}
