#include "zkt/element.hpp"

#include <numeric>
#include <sstream>

namespace zkt {

namespace {

using i128 = __int128;

std::int64_t narrow_i64(i128 v) {
    if (v > i128(INT64_MAX) || v < i128(INT64_MIN))
        throw std::overflow_error("rational arithmetic overflow");
    return static_cast<std::int64_t>(v);
}

Rat make_reduced(i128 num, i128 den) {
    if (den == 0) throw std::invalid_argument("zero denominator");
    if (den < 0) { den = -den; num = -num; }
    i128 a = num < 0 ? -num : num;
    if (a > i128(UINT64_MAX) || den > i128(UINT64_MAX))
        throw std::overflow_error("rational arithmetic overflow");
    auto ua = static_cast<unsigned long long>(a);
    auto ud = static_cast<unsigned long long>(den);
    unsigned long long g = ua == 0 ? ud : std::gcd(ua, ud);
    num /= i128(g);
    den /= i128(g);
    Rat r;
    r.num = narrow_i64(num);
    r.den = static_cast<std::uint64_t>(den);
    if (r.num == 0) r.den = 1;
    return r;
}

}  // namespace

Rat Rat::of(std::int64_t n, std::uint64_t d) {
    return make_reduced(i128(n), i128(d));
}

Rat Rat::add(const Rat& o) const {
    return make_reduced(i128(num) * i128(o.den) + i128(o.num) * i128(den),
                        i128(den) * i128(o.den));
}

Rat Rat::mul_int(std::int64_t k) const {
    return make_reduced(i128(num) * i128(k), i128(den));
}

Rat Rat::mod1() const {
    i128 n = i128(num) % i128(den);
    if (n < 0) n += i128(den);
    return make_reduced(n, i128(den));
}

std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    i128 lhs = i128(a.num) * i128(b.den);
    i128 rhs = i128(b.num) * i128(a.den);
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string Rat::str() const {
    if (den == 1) return std::to_string(num);
    return std::to_string(num) + "/" + std::to_string(den);
}

std::string Coord::str() const {
    switch (kind) {
        case SummandKind::Free: return "Z:" + std::to_string(index);
        case SummandKind::Rational: return "Q:" + std::to_string(index);
        case SummandKind::Quasicyclic:
            return "Zp(" + std::to_string(p) + ",inf):" + std::to_string(index);
        case SummandKind::Cyclic:
            return "Z(" + std::to_string(pow_u64(p, s)) + "):" + std::to_string(index);
    }
    return "?";
}

Element Element::unit(Group g, const Coord& c) {
    Element e(std::move(g));
    if (c.kind == SummandKind::Quasicyclic)
        e.set(c, Rat::of(1, c.p));
    else
        e.set(c, Rat::of(1));
    return e;
}

Rat Element::at(const Coord& c) const {
    auto it = coords_.find(c);
    return it == coords_.end() ? Rat::zero() : it->second;
}

void Element::validate_coord(const Coord& c, const Rat& v) const {
    const GroupDescriptor& d = *group_;
    auto check_index = [&](Cardinal mult) {
        if (mult.is_finite() && c.index >= mult.finite_value())
            throw std::invalid_argument("coordinate " + c.str() + " outside descriptor multiplicity");
    };
    switch (c.kind) {
        case SummandKind::Free:
            check_index(d.free_rank());
            if (v.den != 1) throw std::invalid_argument("free coordinate must be an integer");
            break;
        case SummandKind::Rational:
            check_index(d.rational_rank());
            break;
        case SummandKind::Quasicyclic: {
            Cardinal m = d.quasicyclic_multiplicity(c.p);
            if (m.is_zero())
                throw std::invalid_argument("no quasicyclic summand at prime " + std::to_string(c.p));
            check_index(m);
            // value must be a/p^k
            std::uint64_t den = v.den;
            while (den % c.p == 0) den /= c.p;
            if (den != 1)
                throw std::invalid_argument("quasicyclic value must have p-power denominator");
            break;
        }
        case SummandKind::Cyclic: {
            Cardinal m = d.cyclic_multiplicity(c.p, c.s);
            if (m.is_zero())
                throw std::invalid_argument("no cyclic summand " + c.str() + " in descriptor");
            check_index(m);
            if (v.den != 1 || v.num < 0 ||
                static_cast<std::uint64_t>(v.num) >= pow_u64(c.p, c.s))
                throw std::invalid_argument("cyclic residue out of range at " + c.str());
            break;
        }
    }
}

Rat Element::canonical_value(const Coord& c, Rat v) {
    switch (c.kind) {
        case SummandKind::Free:
        case SummandKind::Rational:
            return v;
        case SummandKind::Cyclic: {
            std::uint64_t m = pow_u64(c.p, c.s);
            i128 r = i128(v.num) % i128(m);
            if (r < 0) r += i128(m);
            return Rat::of(static_cast<std::int64_t>(r));
        }
        case SummandKind::Quasicyclic:
            return v.mod1();
    }
    return v;
}

void Element::set(const Coord& c, Rat value) {
    value = canonical_value(c, value);
    if (value.is_zero()) {
        coords_.erase(c);
        return;
    }
    validate_coord(c, value);
    coords_[c] = value;
}

Element Element::add(const Element& o) const {
    if (!same_group(group_, o.group_))
        throw std::invalid_argument("element arithmetic across different descriptors");
    Element r = *this;
    for (auto& [c, v] : o.coords_) r.set(c, r.at(c).add(v));
    return r;
}

Element Element::negate() const {
    Element r(group_);
    for (auto& [c, v] : coords_) r.set(c, v.neg());
    return r;
}

Element Element::scalar_mul(std::int64_t k) const {
    Element r(group_);
    if (k == 0) return r;
    for (auto& [c, v] : coords_) r.set(c, v.mul_int(k));
    return r;
}

Order Element::order_of() const {
    Order ord = 1;
    for (auto& [c, v] : coords_) {
        Order co = 0;
        switch (c.kind) {
            case SummandKind::Free:
            case SummandKind::Rational:
                return kUnbounded;  // nonzero coordinate of infinite order
            case SummandKind::Cyclic: {
                std::uint64_t m = pow_u64(c.p, c.s);
                co = m / std::gcd(static_cast<std::uint64_t>(v.num), m);
                break;
            }
            case SummandKind::Quasicyclic:
                co = v.den;  // canonical a/p^k has order p^k
                break;
        }
        ord = order_lcm(ord, co);
    }
    return ord;
}

Element Element::reduce_mod_torsion(Order n) const {
    if (n == 0) return Element::zero(group_);  // G[0] = G
    Element r(group_);
    for (auto& [c, v] : coords_) {
        switch (c.kind) {
            case SummandKind::Free:
            case SummandKind::Rational:
                r.set(c, v);  // torsion trace is trivial here
                break;
            case SummandKind::Cyclic: {
                std::uint32_t e = std::min(c.s, valuation(c.p, n));
                std::uint64_t mod = pow_u64(c.p, c.s - e);
                if (mod > 1) r.set(c, Rat::of(v.num % static_cast<std::int64_t>(mod)));
                break;
            }
            case SummandKind::Quasicyclic: {
                std::uint32_t v_n = valuation(c.p, n);
                std::uint32_t k = valuation(c.p, v.den);  // den = p^k
                if (k <= v_n) break;                      // whole value lies in G[n]
                std::uint64_t mod = pow_u64(c.p, k - v_n);
                std::int64_t a = v.num % static_cast<std::int64_t>(mod);
                r.set(c, Rat::of(a, v.den));
                break;
            }
        }
    }
    return r;
}

std::string Element::str() const {
    if (coords_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [c, v] : coords_) {
        if (!first) os << ", ";
        first = false;
        os << c.str() << "=" << v.str();
    }
    return "[" + os.str() + "]";
}

}  // namespace zkt
