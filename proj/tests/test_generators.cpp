// Round sequences: canonical bases, ladders, towers, scaling, certification,
// and the greedy split.  Counting here is deliberately naive — it rechecks the
// structural claims by brute force over prefixes.
#include "doctest.h"

#include <map>
#include <set>

#include "zkt/generators.hpp"

using namespace zkt;

namespace {

Group Z4w() {
  return make_group(GroupDescriptor::cyclic_prime_power(2, 2, Cardinal::omega()));
}
Group Z6w() { return make_group(GroupDescriptor::cyclic(6, Cardinal::omega())); }

// Independent collision counter: max |{i : d*x_i = v}| over values v.
std::size_t max_collisions(const std::vector<Element>& pre, Order d) {
  std::map<Element, std::size_t> hits;
  std::size_t best = 0;
  for (const auto& x : pre)
    best = std::max(best, ++hits[x.scalar_mul(static_cast<std::int64_t>(d))]);
  return best;
}

}  // namespace

TEST_CASE("canonical basis of Z(4)^w") {
  auto gen = make_round(Z4w(), 4);
  CHECK(gen.order_tag() == 4);
  CHECK(gen.structural());
  auto pre = gen.prefix(200);
  for (const auto& x : pre) CHECK(x.order_of() == 4);
  CHECK(std::set<Element>(pre.begin(), pre.end()).size() == 200);
  CHECK(max_collisions(pre, 1) == 1);
  CHECK(max_collisions(pre, 2) == 1);

  auto cert = certify_round(gen, 1000);
  CHECK(cert.certified);
  CHECK(cert.structural);
  CHECK(cert.max_count == 1);
  CHECK(cert.divisors_checked == std::vector<Order>{1, 2});
}

TEST_CASE("canonical basis of Z(6)^w checks all proper divisors") {
  auto gen = make_round(Z6w(), 6);
  auto cert = certify_round(gen, 1000);
  CHECK(cert.certified);
  CHECK(cert.max_count == 1);
  CHECK(cert.divisors_checked == std::vector<Order>{1, 2, 3});
  for (const auto& x : gen.prefix(50)) CHECK(x.order_of() == 6);
}

TEST_CASE("basis sources can mix cyclic and quasicyclic supplies") {
  auto g = make_group(GroupDescriptor::cyclic(2, Cardinal::omega())
                          .direct_sum(GroupDescriptor::quasicyclic(3, Cardinal::omega())));
  auto gen = make_round(g, 6);
  auto pre = gen.prefix(100);
  for (const auto& x : pre) CHECK(x.order_of() == 6);
  CHECK(certify_round(gen, 500).certified);
}

TEST_CASE("make_round rejects unsupported orders") {
  CHECK_THROWS_AS(make_round(Z4w(), 1), std::domain_error);
  // eo(G[4]) = 2 in Z(2)^w + Z(4): only one independent order-4 element.
  auto g = make_group(GroupDescriptor::cyclic(2, Cardinal::omega())
                          .direct_sum(GroupDescriptor::cyclic(4)));
  CHECK_THROWS_AS(make_round(g, 4), std::domain_error);
  try {
    make_round(g, 4);
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("eo(G[4]) = 2") != std::string::npos);
  }
  // Non-canonical order: G[8] = G[4] in Z(4)^w.
  CHECK_THROWS_AS(make_round(Z4w(), 8), std::domain_error);
  // Bounded groups have no 0-round subsets.
  CHECK_THROWS_AS(make_round(Z4w(), 0), std::domain_error);
  CHECK_THROWS_AS(make_round(make_group(GroupDescriptor::cyclic(8)), 0),
                  std::domain_error);
}

TEST_CASE("0-round ladders in Z and Q") {
  for (auto desc : {GroupDescriptor::integers(), GroupDescriptor::rationals()}) {
    auto gen = make_round(make_group(desc), 0);
    CHECK(gen.order_tag() == 0);
    auto pre = gen.prefix(100);
    for (const auto& x : pre) CHECK(x.order_of() == 0);
    auto cert = certify_round(gen, 1000);
    CHECK(cert.certified);
    CHECK(cert.max_count == 1);
    CHECK(cert.divisors_checked.size() == Config{}.zero_divisor_window);
  }
}

TEST_CASE("0-round tower in the Prüfer group") {
  auto g = make_group(GroupDescriptor::quasicyclic(2));
  auto gen = make_round(g, 0);
  CHECK(gen.kind() == RoundKind::GreedyEscape);
  auto pre = gen.prefix(30);
  // Depths strictly increase: 1/2, 1/4, 1/8, ...
  for (std::size_t i = 0; i < pre.size(); ++i)
    CHECK(pre[i].order_of() == pow_u64(2, static_cast<std::uint32_t>(i + 1)));
  auto cert = certify_round(gen, 200);
  CHECK(cert.certified);
  // d = 64 kills the six shallowest levels at once; that is the worst case.
  CHECK(cert.max_count == 6);
  CHECK(max_collisions(pre, 64) == 6);
}

TEST_CASE("scaling a round sequence") {
  auto S = make_round(Z4w(), 4);

  SUBCASE("2S lives in G[2] and stays round") {
    auto S2 = S.scaled(2);
    CHECK(S2.order_tag() == 2);
    CHECK(S2.structural());
    for (const auto& x : S2.prefix(50)) CHECK(x.order_of() == 2);
    auto cert = certify_round(S2, 1000);
    CHECK(cert.certified);
    CHECK(cert.max_count == 1);
  }
  SUBCASE("coprime scaling keeps the tag") {
    auto S3 = S.scaled(3);
    CHECK(S3.order_tag() == 4);
    CHECK(certify_round(S3, 500).certified);
  }
  SUBCASE("scaling by the tag collapses") {
    CHECK_THROWS_AS(S.scaled(4), std::domain_error);
    CHECK_THROWS_AS(S.scaled(0), std::domain_error);
  }
  SUBCASE("scaled tower skips the killed levels") {
    auto tower = make_round(make_group(GroupDescriptor::quasicyclic(2)), 0);
    auto t2 = tower.scaled(2);
    CHECK(t2.at(0) == tower.at(0));  // 2 * (1/4) = 1/2
    CHECK(certify_round(t2, 200).certified);
  }
  SUBCASE("negated ladder") {
    auto ladder = make_round(make_group(GroupDescriptor::integers()), 0);
    auto neg = ladder.scaled(-1);
    CHECK(neg.at(2) == ladder.at(2).negate());
    CHECK(certify_round(neg, 500).certified);
  }
}

TEST_CASE("user sequences are verified, not trusted") {
  auto g = Z4w();
  auto e = [&](std::uint64_t i) {
    return Element::zero(g).with(Coord::cyclic(2, 2, i), Rat::of(1));
  };

  SUBCASE("constant sequence refuted at d = 1") {
    auto gen = RoundGenerator::user(g, 4, {e(0), e(0), e(0)});
    auto cert = certify_round(gen, 10);
    CHECK(!cert.certified);
    REQUIRE(cert.refutation.has_value());
    CHECK(cert.refutation->divisor == 1);
  }
  SUBCASE("element outside G[n] throws") {
    auto gen = RoundGenerator::user(g, 2, {e(0)});  // e0 has order 4
    CHECK_THROWS_AS(certify_round(gen, 10), std::invalid_argument);
  }
  SUBCASE("a genuine prefix passes with the user bound") {
    std::vector<Element> pre;
    for (std::uint64_t i = 0; i < 64; ++i) pre.push_back(e(i));
    auto cert = certify_round(RoundGenerator::user(g, 4, pre), 64);
    CHECK(cert.certified);
    CHECK(!cert.structural);
    CHECK(cert.max_count == 1);
  }
  SUBCASE("doubling collisions exceed the bound at d = 2") {
    // x_i = e_i + e_0 - e_i ... craft pairs with equal doubles: e_i and
    // e_i + 2e_0 share 2x; nine such pairs exceed the default bound of 8.
    std::vector<Element> pre;
    for (std::uint64_t i = 1; i <= 9; ++i) {
      pre.push_back(e(i));
      pre.push_back(e(i).add(e(0).scalar_mul(2)));
    }
    auto cert = certify_round(RoundGenerator::user(g, 4, pre), pre.size());
    CHECK(cert.certified);  // 2 per value, bound is 8
    // Now pile 9 distinct elements onto one double: e_1 + t*2e_k all double
    // to 2e_1.
    std::vector<Element> bad;
    bad.push_back(e(1));
    for (std::uint64_t k = 2; k <= 9; ++k)
      bad.push_back(e(1).add(e(k).scalar_mul(2)));
    auto cert2 = certify_round(RoundGenerator::user(g, 4, bad), bad.size());
    CHECK(!cert2.certified);
    REQUIRE(cert2.refutation.has_value());
    CHECK(cert2.refutation->divisor == 2);
    CHECK(cert2.refutation->indices.size() == 9);
  }
}

TEST_CASE("greedy split keeps translate intersections small") {
  auto S = make_round(Z4w(), 4);
  auto res = split_trim(S, 300);
  CHECK(res.consumed == 300);
  CHECK(res.skipped == 0);  // independent basis never needs a skip
  auto a = res.first.prefix(1000);
  auto b = res.second.prefix(1000);
  CHECK(a.size() + b.size() == 300);
  CHECK(a.size() >= 149);  // interleaving keeps the sides balanced
  std::set<Element> sa(a.begin(), a.end());
  for (const auto& x : b) CHECK(sa.count(x) == 0);
  // Every difference b - a occurs at most once.
  std::map<Element, std::size_t> diff_count;
  std::size_t worst = 0;
  for (const auto& x : a)
    for (const auto& y : b) worst = std::max(worst, ++diff_count[y.sub(x)]);
  CHECK(worst == 1);
  CHECK(res.max_cross_count == 1);
  // Both halves remain certified 4-round prefixes.
  CHECK(certify_round(res.first, a.size()).certified);
  CHECK(certify_round(res.second, b.size()).certified);
}
