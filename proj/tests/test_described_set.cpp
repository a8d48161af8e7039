// Described sets: trace classes, closures with certificates, density by both
// routes, the curve test, components, isolated points, scaling, dimension.
// Expected values are frozen from hand computation in small groups.
#include "doctest.h"

#include <set>
#include <stdexcept>
#include <vector>

#include "zkt/described_set.hpp"

using namespace zkt;

namespace {

Group Z4w() {
  return make_group(GroupDescriptor::cyclic_prime_power(2, 2, Cardinal::omega()));
}
Group Z6w() { return make_group(GroupDescriptor::cyclic(6, Cardinal::omega())); }
Group Zint() { return make_group(GroupDescriptor::integers()); }
Group Mixed() {  // Z + Z(4)^w
  return make_group(
      GroupDescriptor::integers().direct_sum(GroupDescriptor::cyclic_prime_power(2, 2, Cardinal::omega())));
}
Group Z2wZ4() {  // Z(2)^w + Z(4)
  return make_group(GroupDescriptor::cyclic_prime_power(2, 1, Cardinal::omega())
                        .direct_sum(GroupDescriptor::cyclic_prime_power(2, 2, Cardinal::fin(1))));
}

Element e4(const Group& g, std::uint64_t i, std::int64_t v = 1) {
  return Element::zero(g).with(Coord::cyclic(2, 2, i), Rat{v, 1});
}

}  // namespace

TEST_CASE("infinite trace classes of rounds, cosets and their unions") {
  Group g = Z4w();
  DescribedSet s = DescribedSet::round(make_round(g, 4));
  CHECK(infinite_trace_classes(s) == std::vector<Order>{4});
  CHECK(least_infinite_trace(s) == 4);

  DescribedSet s2 = DescribedSet::round(make_round(g, 4).scaled(2));
  CHECK(infinite_trace_classes(s2) == std::vector<Order>{2});

  DescribedSet x = s.union_with(s2);
  CHECK(infinite_trace_classes(x) == std::vector<Order>{2});  // 2 divides 4
  CHECK(least_infinite_trace(x) == 2);

  DescribedSet c = DescribedSet::coset(TorsionCoset::subgroup(g, 2));
  CHECK(infinite_trace_classes(s.union_with(c)) == std::vector<Order>{2});

  DescribedSet fin = DescribedSet::finite(g, {Element::zero(g), e4(g, 0)});
  CHECK(infinite_trace_classes(fin).empty());
  CHECK(least_infinite_trace(fin) == 0);
}

TEST_CASE("closure of a round set is its torsion level") {
  Group g = Z4w();
  DescribedSet s = DescribedSet::round(make_round(g, 4));
  AlgebraicSet cl = closure(s);
  REQUIRE(cl.parts().size() == 1);
  CHECK(cl.parts()[0] == TorsionCoset::subgroup(g, 4));
  // G[4] is all of Z(4)^w, so the round set is dense
  CHECK(is_dense(s));
  CHECK(is_irreducible_set(s));
  CHECK(dim_of_set(s) == DimValue::fin(1));
  CHECK(isolated_points(s).empty());
}

TEST_CASE("union of a round set with its double: dense, irreducible, not a curve") {
  Group g = Z4w();
  DescribedSet s = DescribedSet::round(make_round(g, 4));
  DescribedSet x = s.union_with(DescribedSet::round(make_round(g, 4).scaled(2)));

  CHECK(least_infinite_trace(x) == 2);
  AlgebraicSet cl = closure(x);
  REQUIRE(cl.parts().size() == 1);  // G[2] is absorbed into G[4]
  CHECK(cl.parts()[0] == TorsionCoset::subgroup(g, 4));
  CHECK(is_dense(x));
  CHECK(is_irreducible_set(x));

  CurveVerdict v = is_curve(x);
  CHECK_FALSE(v.curve);
  CHECK(v.round_order == 2);

  CHECK(dim_of_set(x) == DimValue::fin(2));
  CHECK_THROWS_AS(dense_by_multiples(x), std::domain_error);  // bounded group
}

TEST_CASE("a torsion level with no infinite proper trace is a curve") {
  Group g = Z4w();
  // G[2] inside Z(4)^w: the only proper divisor level is trivial
  DescribedSet c2 = DescribedSet::coset(TorsionCoset::subgroup(g, 2));
  CurveVerdict v2 = is_curve(c2);
  CHECK(v2.curve);
  CHECK(v2.round_order == 2);

  // the whole group has an infinite trace at level 2, so it is not a curve
  DescribedSet cg = DescribedSet::coset(TorsionCoset::whole_group(g));
  CurveVerdict vg = is_curve(cg);
  CHECK_FALSE(vg.curve);
  CHECK(vg.round_order == 2);

  CHECK_FALSE(is_dense(c2));
  CHECK(is_dense(cg));
}

TEST_CASE("two torsion levels in Z(6)^w: connected, reducible, two components") {
  Group g = Z6w();
  DescribedSet f = DescribedSet::coset(TorsionCoset::subgroup(g, 2))
                       .union_with(DescribedSet::coset(TorsionCoset::subgroup(g, 3)));
  AlgebraicSet cl = closure(f);
  REQUIRE(cl.parts().size() == 2);
  CHECK(is_connected(cl, {}));  // the levels share 0
  CHECK_FALSE(is_irreducible_set(f));

  auto comps = components_of_set(f);
  REQUIRE(comps.size() == 2);
  std::set<TorsionCoset> parts{comps[0].closure_part, comps[1].closure_part};
  CHECK(parts.count(TorsionCoset::subgroup(g, 2)) == 1);
  CHECK(parts.count(TorsionCoset::subgroup(g, 3)) == 1);
  for (const auto& comp : comps) {
    // the component's own level is in the trace in full; the other level
    // contributes only its meeting point {0}
    REQUIRE(comp.trace.atoms().size() == 2);
    bool has_full = false;
    for (const SetAtom& a : comp.trace.atoms())
      if (const auto* c = std::get_if<CosetAtom>(&a))
        if (c->coset == comp.closure_part) has_full = true;
    CHECK(has_full);
    CHECK(comp.trace.contains(Element::zero(g)));
  }

  CHECK(dim_of_set(DescribedSet::coset(TorsionCoset::whole_group(g))) == DimValue::fin(2));
}

TEST_CASE("isolated point next to an infinite level") {
  Group g = Mixed();
  Element efree = Element::zero(g).with(Coord::free(0), Rat{1, 1});
  DescribedSet x = DescribedSet::coset(TorsionCoset::subgroup(g, 2))
                       .union_with(DescribedSet::finite(g, {efree}));

  ClosureCertificate cert = closure_with_certificate(x);
  REQUIRE(cert.closure.parts().size() == 2);
  REQUIRE(cert.pieces.size() == 1);
  CHECK(cert.pieces[0].coset == TorsionCoset::subgroup(g, 2));
  CHECK(cert.pieces[0].witness_atom == 0);
  REQUIRE(cert.isolated.size() == 1);
  CHECK(cert.isolated[0] == efree);
  CHECK(cert.index_set.size() == 2);

  CHECK_FALSE(is_irreducible_set(x));
  CHECK(components_of_set(x).size() == 2);
  CHECK(dim_of_set(x) == DimValue::fin(1));

  // translation moves the isolated point along
  DescribedSet xt = x.translate(efree.scalar_mul(3));
  auto iso = isolated_points(xt);
  REQUIRE(iso.size() == 1);
  CHECK(iso[0] == efree.scalar_mul(4));
  CHECK(closure(xt) == closure(x).translate(efree.scalar_mul(3)));
}

TEST_CASE("integer ladder: dense by both routes, a curve of order zero") {
  Group g = Zint();
  DescribedSet l = DescribedSet::round(make_round(g, 0));
  CHECK(is_dense(l));
  CHECK(dense_by_multiples(l));
  CHECK(least_infinite_trace(l) == 0);

  CurveVerdict v = is_curve(l);
  CHECK(v.curve);
  CHECK(v.round_order == 0);
  CHECK(dim_of_set(l) == DimValue::fin(1));

  PotentialDensityVerdict pd = is_potentially_dense(l);
  CHECK(pd.zariski_dense);
  CHECK(pd.potentially_dense);
  CHECK_FALSE(pd.note.empty());
}

TEST_CASE("spans: the whole lattice versus a finite cyclic block") {
  Group zi = Zint();
  Element one = Element::zero(zi).with(Coord::free(0), Rat{1, 1});
  DescribedSet whole = DescribedSet::span(zi, {one});
  CHECK(is_dense(whole));
  CHECK(dense_by_multiples(whole));
  CHECK(closure(whole).parts()[0].is_whole_group());
  CHECK(dim_of_set(whole) == DimValue::fin(1));

  Group g = Z4w();
  DescribedSet block = DescribedSet::span(g, {e4(g, 0)});
  AlgebraicSet cl = closure(block);
  CHECK(cl.parts().size() == 4);  // singletons 0, e0, 2e0, 3e0
  CHECK(isolated_points(block).size() == 4);
  CHECK(dim_of_set(block) == DimValue::fin(0));
  CHECK_FALSE(is_dense(block));
  CHECK(block.contains(e4(g, 0, 2)));
  CHECK_FALSE(block.contains(e4(g, 1)));

  DescribedSet shifted = DescribedSet::span(g, {e4(g, 0)}, e4(g, 1));
  CHECK(shifted.contains(e4(g, 1).add(e4(g, 0, 3))));
  CHECK_FALSE(shifted.contains(e4(g, 0)));
}

TEST_CASE("scaling a described set") {
  Group g = Z4w();
  DescribedSet s = DescribedSet::round(make_round(g, 4));

  DescribedSet s2 = s.scaled(2);
  REQUIRE(s2.atoms().size() == 1);
  CHECK(closure(s2).parts()[0] == TorsionCoset::subgroup(g, 2));

  DescribedSet s3 = s.scaled(3);  // 3 is a unit at 2, the tag survives
  CHECK(closure(s3).parts()[0] == TorsionCoset::subgroup(g, 4));

  DescribedSet s4 = s.scaled(4);  // the tag divides 4: collapses to a point
  REQUIRE(s4.atoms().size() == 1);
  CHECK(closure(s4).parts()[0] == TorsionCoset::singleton(Element::zero(g)));

  CHECK(closure(s.scaled(0)).parts()[0] == TorsionCoset::singleton(Element::zero(g)));

  // exact coset image: 2 * G[4] = G[2] in Z(4)^w
  DescribedSet cg = DescribedSet::coset(TorsionCoset::subgroup(g, 4));
  CHECK(closure(cg.scaled(2)).parts()[0] == TorsionCoset::subgroup(g, 2));

  // finite image that is not a coset of the same shape: 2 * (Z(2)^w + Z(4))
  Group h = Z2wZ4();
  DescribedSet ch = DescribedSet::coset(TorsionCoset::whole_group(h));
  DescribedSet ch2 = ch.scaled(2);
  REQUIRE(ch2.atoms().size() == 1);
  const auto* fin = std::get_if<FiniteAtom>(&ch2.atoms()[0]);
  REQUIRE(fin != nullptr);
  CHECK(fin->points.size() == 2);

  // infinite image that is not a torsion level: rejected
  Group big = make_group(
      GroupDescriptor::cyclic_prime_power(2, 2, Cardinal::omega())
          .direct_sum(GroupDescriptor::cyclic_prime_power(2, 3, Cardinal::omega())));
  DescribedSet cbig = DescribedSet::coset(TorsionCoset::whole_group(big));
  CHECK_THROWS_AS(cbig.scaled(2), std::domain_error);

  // negation is always exact
  DescribedSet fin1 = DescribedSet::finite(g, {e4(g, 0)});
  CHECK(fin1.scaled(-1).contains(e4(g, 0, 3)));
}

TEST_CASE("valid translation bases for a scaled round set") {
  Group g = Z4w();
  DescribedSet x2 = DescribedSet::round(make_round(g, 4).scaled(2));
  CHECK(least_infinite_trace(x2) == 2);
  CHECK(valid_round_base(x2, e4(g, 0, 2)));       // lies in G[2] = X + G[2]
  CHECK(valid_round_base(x2, Element::zero(g)));
  CHECK_FALSE(valid_round_base(x2, e4(g, 0)));    // order 4, outside G[2]
}

TEST_CASE("user round atoms are certified before acceptance") {
  Group g = Z4w();
  std::vector<Element> constant(40, e4(g, 0));
  RoundGenerator bad = RoundGenerator::user(g, 4, constant);
  CHECK_THROWS_AS(DescribedSet::round(bad), std::invalid_argument);

  std::vector<Element> genuine;
  for (std::uint64_t i = 0; i < 40; ++i) genuine.push_back(e4(g, i));
  DescribedSet ok = DescribedSet::round(RoundGenerator::user(g, 4, genuine));
  CHECK(closure(ok).parts()[0] == TorsionCoset::subgroup(g, 4));
}

TEST_CASE("translation equivariance of closures") {
  Group g = Z4w();
  DescribedSet s = DescribedSet::round(make_round(g, 4));
  DescribedSet x = s.union_with(DescribedSet::round(make_round(g, 4).scaled(2)))
                       .union_with(DescribedSet::finite(g, {e4(g, 7)}));
  Element t = e4(g, 5, 3);
  CHECK(closure(x.translate(t)) == closure(x).translate(t));
  CHECK(closure(x.translate(t).translate(t.negate())) == closure(x));
}

TEST_CASE("samples stay inside the set") {
  Group g = Z4w();
  DescribedSet x = DescribedSet::round(make_round(g, 4))
                       .union_with(DescribedSet::coset(TorsionCoset::of(e4(g, 0), 2)))
                       .union_with(DescribedSet::span(g, {e4(g, 1)}))
                       .union_with(DescribedSet::finite(g, {e4(g, 2, 3)}));
  std::vector<Element> pts = x.sample(48);
  CHECK(pts.size() >= 12);
  for (const Element& p : pts) CHECK(x.contains(p));

  // coset sampling alone: all sampled points lie in the coset
  TorsionCoset c = TorsionCoset::of(e4(g, 0), 2);
  DescribedSet cs = DescribedSet::coset(c);
  for (const Element& p : cs.sample(24)) CHECK(c.contains(p));
}

TEST_CASE("antichain absorption of nested levels") {
  Group g = Z4w();
  std::vector<TorsionCoset> parts{TorsionCoset::subgroup(g, 2), TorsionCoset::subgroup(g, 4)};
  auto canon = canonicalize_parts(parts);
  REQUIRE(canon.size() == 1);
  CHECK(canon[0] == TorsionCoset::subgroup(g, 4));
}

TEST_CASE("potential density verdicts explain themselves") {
  Group g = Z4w();
  PotentialDensityVerdict yes = is_potentially_dense(DescribedSet::round(make_round(g, 4)));
  CHECK(yes.potentially_dense);
  PotentialDensityVerdict no =
      is_potentially_dense(DescribedSet::coset(TorsionCoset::subgroup(g, 2)));
  CHECK_FALSE(no.potentially_dense);
  CHECK(no.zariski_dense == no.potentially_dense);
  CHECK(yes.str() != no.str());
}

TEST_CASE("round atom with a base point closes onto a shifted level") {
  Group g = Mixed();
  Element base = Element::zero(g).with(Coord::free(0), Rat{2, 1});
  DescribedSet x = DescribedSet::round(base, make_round(g, 2));
  AlgebraicSet cl = closure(x);
  REQUIRE(cl.parts().size() == 1);
  CHECK(cl.parts()[0] == TorsionCoset::of(base, 2));
  CHECK_FALSE(is_dense(x));
  CHECK(dim_of_set(x) == DimValue::fin(1));

  CurveVerdict v = is_curve(x);
  CHECK(v.curve);
  CHECK(v.round_order == 2);
  REQUIRE(v.base.has_value());
  CHECK(TorsionCoset::of(*v.base, 2) == TorsionCoset::of(base, 2));
}

TEST_CASE("finite sets: no curve verdict, zero dimension") {
  Group g = Z4w();
  DescribedSet fin = DescribedSet::finite(g, {Element::zero(g), e4(g, 0)});
  CHECK_THROWS_AS(is_curve(fin), std::domain_error);
  CHECK(dim_of_set(fin) == DimValue::fin(0));
  CHECK_FALSE(is_dense(fin));
  CHECK(isolated_points(fin).size() == 2);
  CHECK_FALSE(is_irreducible_set(fin));
  CHECK(is_irreducible_set(DescribedSet::finite(g, {e4(g, 0)})));
}
