#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>

#include "zkt/descriptor.hpp"
#include "zkt/order.hpp"

namespace zkt {

// Reduced rational. den >= 1, gcd(|num|, den) = 1.
struct Rat {
    std::int64_t num = 0;
    std::uint64_t den = 1;

    static Rat of(std::int64_t n, std::uint64_t d = 1);
    static Rat zero() { return {}; }

    bool is_zero() const { return num == 0; }
    Rat neg() const { return {num == 0 ? 0 : -num, den}; }
    Rat add(const Rat& o) const;
    Rat mul_int(std::int64_t k) const;
    // Representative in [0,1): used for circle-valued coordinates.
    Rat mod1() const;

    friend bool operator==(const Rat&, const Rat&) = default;
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b);
    std::string str() const;
};

enum class SummandKind : std::uint8_t { Free = 0, Rational = 1, Quasicyclic = 2, Cyclic = 3 };

struct Coord {
    SummandKind kind = SummandKind::Free;
    std::uint64_t p = 0;   // prime for Quasicyclic/Cyclic, 0 otherwise
    std::uint32_t s = 0;   // power for Cyclic, 0 otherwise
    std::uint64_t index = 0;

    static Coord free(std::uint64_t i) { return {SummandKind::Free, 0, 0, i}; }
    static Coord rational(std::uint64_t i) { return {SummandKind::Rational, 0, 0, i}; }
    static Coord quasicyclic(std::uint64_t p, std::uint64_t i) {
        return {SummandKind::Quasicyclic, p, 0, i};
    }
    static Coord cyclic(std::uint64_t p, std::uint32_t s, std::uint64_t i) {
        return {SummandKind::Cyclic, p, s, i};
    }

    friend auto operator<=>(const Coord&, const Coord&) = default;
    std::string str() const;
};

// Finite-support element of a described group. Coordinate values are kept
// canonical: cyclic residues in [0, p^s), quasicyclic values a/p^k in [0,1)
// with gcd(a,p) = 1, zero coordinates dropped.
class Element {
public:
    explicit Element(Group g) : group_(std::move(g)) {}

    static Element zero(Group g) { return Element(std::move(g)); }
    // Unit value at a coordinate: 1 for free/rational/cyclic, 1/p for quasicyclic.
    static Element unit(Group g, const Coord& c);

    const Group& group() const { return group_; }
    const std::map<Coord, Rat>& coords() const { return coords_; }

    bool is_zero() const { return coords_.empty(); }
    Rat at(const Coord& c) const;
    void set(const Coord& c, Rat value);  // validates against the descriptor
    Element with(const Coord& c, Rat value) const {
        Element out = *this;
        out.set(c, value);
        return out;
    }

    Element add(const Element& o) const;
    Element negate() const;
    Element sub(const Element& o) const { return add(o.negate()); }
    Element scalar_mul(std::int64_t k) const;

    // Order of the element; 0 when infinite.
    Order order_of() const;
    bool in_torsion(Order n) const { return scalar_mul(static_cast<std::int64_t>(n)).is_zero(); }

    // Canonical representative of x + G[n]: each coordinate reduced modulo the
    // coordinate-wise trace of G[n].
    Element reduce_mod_torsion(Order n) const;

    friend bool operator==(const Element& a, const Element& b) {
        return a.coords_ == b.coords_;
    }
    friend bool operator<(const Element& a, const Element& b) {
        return a.coords_ < b.coords_;
    }

    std::string str() const;

private:
    void validate_coord(const Coord& c, const Rat& v) const;
    static Rat canonical_value(const Coord& c, Rat v);

    Group group_;
    std::map<Coord, Rat> coords_;
};

}  // namespace zkt
