#include "zkt/coset.hpp"

#include <algorithm>
#include <limits>

namespace zkt {

namespace {

constexpr std::uint32_t kFullTrace = std::numeric_limits<std::uint32_t>::max();

// Exponent of the trace of G[n] on one coordinate summand, as the power of the
// relevant prime (kFullTrace means the whole summand, including Z and Q).
std::uint32_t trace_level(const Coord& c, Order n) {
    switch (c.kind) {
        case SummandKind::Free:
        case SummandKind::Rational:
            return n == 0 ? kFullTrace : 0;
        case SummandKind::Cyclic:
            return n == 0 ? c.s : std::min(c.s, valuation(c.p, n));
        case SummandKind::Quasicyclic:
            return n == 0 ? kFullTrace : valuation(c.p, n);
    }
    return 0;
}

std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t m) {
    // extended Euclid; m >= 1, gcd(a, m) == 1
    std::int64_t t = 0, nt = 1;
    std::int64_t r = static_cast<std::int64_t>(m), nr = static_cast<std::int64_t>(a % m);
    while (nr != 0) {
        std::int64_t q = r / nr;
        std::swap(t, nt); nt -= q * t;
        std::swap(r, nr); nr -= q * r;
    }
    if (t < 0) t += static_cast<std::int64_t>(m);
    return static_cast<std::uint64_t>(t);
}

}  // namespace

bool torsion_subgroup_contained(const Group& g, Order n, Order m) {
    // G[n] <= G[m] iff G[gcd(n,m)] = G[n]; torsion subgroups coincide exactly
    // when their canonical orders do.
    return g->canonical_torsion_order(order_gcd(n, m)) == g->canonical_torsion_order(n);
}

TorsionCoset TorsionCoset::empty(Group g) {
    return TorsionCoset(std::move(g), Element::zero(nullptr), 1, true);
}

TorsionCoset TorsionCoset::of(Element anchor, Order order) {
    Group g = anchor.group();
    Order canon = g->canonical_torsion_order(order);
    Element reduced = anchor.reduce_mod_torsion(canon);
    return TorsionCoset(std::move(g), std::move(reduced), canon, false);
}

TorsionCoset TorsionCoset::subgroup(Group g, Order order) {
    return of(Element::zero(std::move(g)), order);
}

TorsionCoset TorsionCoset::whole_group(Group g) {
    return subgroup(std::move(g), kUnbounded);
}

TorsionCoset TorsionCoset::singleton(Element x) {
    return of(std::move(x), 1);
}

const Element& TorsionCoset::anchor() const {
    if (empty_) throw std::logic_error("anchor() of the empty set");
    return anchor_;
}

Order TorsionCoset::order() const {
    if (empty_) throw std::logic_error("order() of the empty set");
    return order_;
}

bool TorsionCoset::is_whole_group() const {
    return !empty_ && anchor_.is_zero() && order_ == group_->canonical_torsion_order(kUnbounded);
}

Cardinal TorsionCoset::size() const {
    if (empty_) return Cardinal::fin(0);
    GroupDescriptor t = group_->torsion_subgroup(order_);
    if (!t.is_finite()) return Cardinal::omega();
    return Cardinal::fin(t.finite_order());
}

GroupDescriptor TorsionCoset::subgroup_descriptor() const {
    if (empty_) throw std::logic_error("subgroup_descriptor() of the empty set");
    return group_->torsion_subgroup(order_);
}

bool TorsionCoset::contains(const Element& x) const {
    if (empty_) return false;
    return x.sub(anchor_).in_torsion(order_);
}

bool TorsionCoset::subset_of(const TorsionCoset& o) const {
    if (empty_) return true;
    if (o.empty_) return false;
    return torsion_subgroup_contained(group_, order_, o.order_) &&
           anchor_.sub(o.anchor_).in_torsion(o.order_);
}

TorsionCoset TorsionCoset::intersect(const TorsionCoset& o) const {
    if (empty_ || o.empty_) return empty(group_ ? group_ : o.group_);
    if (!same_group(group_, o.group_))
        throw std::invalid_argument("intersect across different groups");
    // Coordinate-wise: the two trace subgroups on a coordinate are nested, so
    // a solution exists iff the anchor from the tighter side fits the looser
    // constraint; ties prefer this set's side.
    Element z(group_);
    auto pick = [&](const Coord& c) {
        std::uint32_t ln = trace_level(c, order_);
        std::uint32_t lm = trace_level(c, o.order_);
        z.set(c, ln <= lm ? anchor_.at(c) : o.anchor_.at(c));
    };
    for (auto& [c, v] : anchor_.coords()) { (void)v; pick(c); }
    for (auto& [c, v] : o.anchor_.coords()) { (void)v; if (z.at(c).is_zero()) pick(c); }
    if (!z.sub(anchor_).in_torsion(order_) || !z.sub(o.anchor_).in_torsion(o.order_))
        return empty(group_);
    return of(std::move(z), order_gcd(order_, o.order_));
}

TorsionCoset TorsionCoset::minkowski_sum(const TorsionCoset& o) const {
    if (empty_ || o.empty_)
        throw std::invalid_argument("minkowski_sum: empty operand");
    if (!same_group(group_, o.group_))
        throw std::invalid_argument("minkowski_sum across different groups");
    // G[n] + G[m] = G[lcm(n,m)]
    return of(anchor_.add(o.anchor_), order_lcm(order_, o.order_));
}

TorsionCoset TorsionCoset::translate(const Element& t) const {
    if (empty_) return *this;
    return of(anchor_.add(t), order_);
}

TorsionCoset TorsionCoset::negate() const {
    if (empty_) return *this;
    return of(anchor_.negate(), order_);
}

TorsionCoset TorsionCoset::preimage_mul(std::int64_t k) const {
    if (empty_) return *this;
    if (k == 0)
        return contains(Element::zero(group_)) ? whole_group(group_) : empty(group_);
    if (k < 0) return negate().preimage_mul(-k);
    if (is_whole_group()) return whole_group(group_);

    auto ku = static_cast<std::uint64_t>(k);
    Element x0(group_);
    for (auto& [c, a] : anchor_.coords()) {
        switch (c.kind) {
            case SummandKind::Free: {
                // order_ >= 1 here (whole-group case handled above), trace {0}
                if (a.num % k != 0) return empty(group_);
                x0.set(c, Rat::of(a.num / k));
                break;
            }
            case SummandKind::Rational: {
                x0.set(c, Rat::of(a.num, checked_mul(a.den, ku)));
                break;
            }
            case SummandKind::Cyclic: {
                std::uint32_t e = std::min(c.s, valuation(c.p, order_));
                std::uint64_t M = pow_u64(c.p, c.s - e);
                // anchors are reduced, so 0 <= a < M; solve k x == a (mod M)
                std::uint64_t kr = ku % M;
                std::uint64_t g0 = kr == 0 ? M : std::gcd(kr, M);
                auto av = static_cast<std::uint64_t>(a.num);
                if (av % g0 != 0) return empty(group_);
                std::uint64_t M2 = M / g0;
                std::uint64_t sol = M2 == 1 ? 0 : (av / g0) % M2 * mod_inverse(kr / g0, M2) % M2;
                x0.set(c, Rat::of(static_cast<std::int64_t>(sol)));
                break;
            }
            case SummandKind::Quasicyclic: {
                // division is exact in the divisible summand: solve k x = a
                std::uint32_t j = valuation(c.p, ku);
                std::uint64_t u = ku / pow_u64(c.p, j);
                std::uint64_t pt = a.den;  // p^t
                std::uint64_t uinv = mod_inverse(u % pt, pt);
                std::uint64_t beta =
                    static_cast<std::uint64_t>((__int128(uinv) * __int128(a.num)) % __int128(pt));
                x0.set(c, Rat::of(static_cast<std::int64_t>(beta),
                                  checked_mul(pt, pow_u64(c.p, j))));
                break;
            }
        }
    }
    TorsionCoset result = of(std::move(x0), checked_mul(ku, order_));
    if (!contains(result.anchor().scalar_mul(k)))
        throw std::logic_error("preimage_mul: solver produced a non-solution");
    return result;
}

std::vector<Element> TorsionCoset::enumerate(std::uint64_t cap) const {
    if (empty_) return {};
    Cardinal n = size();
    if (!n.is_finite())
        throw std::out_of_range("enumerate: coset is infinite");
    if (n.finite_value() > cap)
        throw std::out_of_range("enumerate: coset size " + std::to_string(n.finite_value()) +
                                " exceeds cap " + std::to_string(cap));
    // Collect the coordinate positions where G[order_] has a nonzero trace.
    struct Pos { Coord c; std::uint64_t step; std::uint64_t count; };
    std::vector<Pos> positions;
    const GroupDescriptor& d = *group_;
    for (auto& [ps, m] : d.cyclic_entries()) {
        std::uint32_t e = order_ == 0 ? ps.s : std::min(ps.s, valuation(ps.p, order_));
        if (e == 0) continue;
        for (std::uint64_t i = 0; i < m.finite_value(); ++i)
            positions.push_back({Coord::cyclic(ps.p, ps.s, i), pow_u64(ps.p, ps.s - e), pow_u64(ps.p, e)});
    }
    for (auto& [p, m] : d.quasicyclic_entries()) {
        std::uint32_t v = order_ == 0 ? 0 : valuation(p, order_);
        if (v == 0) continue;  // order_ == 0 would make the set infinite; size() caught that
        for (std::uint64_t i = 0; i < m.finite_value(); ++i)
            positions.push_back({Coord::quasicyclic(p, i), 0, pow_u64(p, v)});
    }
    std::vector<Element> out;
    out.push_back(anchor_);
    for (auto& pos : positions) {
        std::vector<Element> next;
        next.reserve(out.size() * pos.count);
        for (std::uint64_t t = 0; t < pos.count; ++t) {
            Element delta(group_);
            if (pos.c.kind == SummandKind::Cyclic)
                delta.set(pos.c, Rat::of(static_cast<std::int64_t>(t * pos.step)));
            else
                delta.set(pos.c, Rat::of(static_cast<std::int64_t>(t), pos.count));
            for (auto& e : out) next.push_back(e.add(delta));
        }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string TorsionCoset::str() const {
    if (empty_) return "Empty";
    std::string a = anchor_.is_zero() ? "" : anchor_.str() + " + ";
    return a + "G[" + std::to_string(order_) + "]";
}

}  // namespace zkt
