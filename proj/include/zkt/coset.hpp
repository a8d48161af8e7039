#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zkt/element.hpp"

namespace zkt {

// G[n] <= G[m] as subgroups of the ambient group (orders need not be canonical).
bool torsion_subgroup_contained(const Group& g, Order n, Order m);

// Elementary algebraic set: Empty or a coset a + G[n] of a torsion subgroup.
// Stored canonically: the order is the exponent of G[n] and the anchor is the
// reduced representative of a + G[n], so equality is syntactic.
class TorsionCoset {
public:
    static TorsionCoset empty(Group g);
    static TorsionCoset of(Element anchor, Order order);
    static TorsionCoset subgroup(Group g, Order order);  // 0 + G[order]
    static TorsionCoset whole_group(Group g);            // 0 + G[0]
    static TorsionCoset singleton(Element x);            // x + G[1]

    const Group& group() const { return group_; }
    bool is_empty() const { return empty_; }
    const Element& anchor() const;
    Order order() const;

    bool is_whole_group() const;
    bool is_singleton() const { return !empty_ && order_ == 1; }
    Cardinal size() const;  // element count
    GroupDescriptor subgroup_descriptor() const;

    bool contains(const Element& x) const;
    bool subset_of(const TorsionCoset& other) const;

    TorsionCoset intersect(const TorsionCoset& other) const;
    // Setwise sum; rejects empty operands.
    TorsionCoset minkowski_sum(const TorsionCoset& other) const;
    TorsionCoset translate(const Element& t) const;
    TorsionCoset negate() const;
    // {x : kx lies in this set}, any integer k.
    TorsionCoset preimage_mul(std::int64_t k) const;

    // All elements of a finite coset; throws when infinite or larger than cap.
    std::vector<Element> enumerate(std::uint64_t cap) const;

    friend bool operator==(const TorsionCoset& a, const TorsionCoset& b) {
        return a.empty_ == b.empty_ && (a.empty_ || (a.order_ == b.order_ && a.anchor_ == b.anchor_));
    }
    // Deterministic part ordering: by order value, then anchor form.
    friend bool operator<(const TorsionCoset& a, const TorsionCoset& b) {
        if (a.empty_ != b.empty_) return a.empty_;
        if (a.empty_) return false;
        if (a.order_ != b.order_) return a.order_ < b.order_;
        return a.anchor_ < b.anchor_;
    }

    std::string str() const;

private:
    TorsionCoset(Group g, Element anchor, Order order, bool empty)
        : group_(std::move(g)), anchor_(std::move(anchor)), order_(order), empty_(empty) {}

    Group group_;
    Element anchor_;
    Order order_ = 1;
    bool empty_ = true;
};

}  // namespace zkt
