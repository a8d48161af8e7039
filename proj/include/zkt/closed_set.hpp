#pragma once

#include <string>
#include <vector>

#include "zkt/config.hpp"
#include "zkt/coset.hpp"

namespace zkt {

struct DimValue {
    bool infinite = false;
    std::uint64_t value = 0;

    static DimValue fin(std::uint64_t k) { return {false, k}; }
    static DimValue inf() { return {true, 0}; }
    friend bool operator==(const DimValue&, const DimValue&) = default;
    std::string str() const { return infinite ? "inf" : std::to_string(value); }
};

// Algebraic set: a finite union of elementary algebraic sets kept as an
// irredundant antichain in deterministic order. Two values with the same
// canonical form are the same set; same_set() decides set equality in general
// (distinct antichains can still denote one set when finite cosets split).
class AlgebraicSet {
public:
    explicit AlgebraicSet(Group g) : group_(std::move(g)) {}
    AlgebraicSet(Group g, std::vector<TorsionCoset> parts);

    static AlgebraicSet empty(Group g) { return AlgebraicSet(std::move(g)); }
    static AlgebraicSet whole_group(Group g);

    const Group& group() const { return group_; }
    const std::vector<TorsionCoset>& parts() const { return parts_; }
    bool is_empty() const { return parts_.empty(); }

    bool contains(const Element& x) const;
    bool part_of(const AlgebraicSet& other) const;  // every part inside one of other's

    AlgebraicSet union_with(const AlgebraicSet& other) const;
    AlgebraicSet intersect(const AlgebraicSet& other) const;
    AlgebraicSet minkowski_sum(const AlgebraicSet& other) const;  // rejects empties
    AlgebraicSet translate(const Element& t) const;
    AlgebraicSet negate() const;
    AlgebraicSet preimage_mul(std::int64_t k) const;

    friend bool operator==(const AlgebraicSet& a, const AlgebraicSet& b) {
        return a.parts_ == b.parts_;
    }

    std::string str() const;

private:
    Group group_;
    std::vector<TorsionCoset> parts_;
};

// Antichain normalization: drops empty parts and parts contained in others,
// sorts by (order, anchor).
std::vector<TorsionCoset> canonicalize_parts(std::vector<TorsionCoset> parts);

// Coset representatives of G[sub] inside G[super]; requires finite index.
std::vector<Element> torsion_transversal(const Group& g, Order sub, Order super,
                                         std::uint64_t cap);

// Decomposition of one coset into irreducible cosets (of G[eo]).
std::vector<TorsionCoset> irreducible_components_of_coset(const TorsionCoset& part,
                                                          const Config& cfg);

// Irreducible components of the whole set: unique, canonically ordered.
std::vector<TorsionCoset> irreducible_components(const AlgebraicSet& a, const Config& cfg);

// Components grouped by overlap chaining.
std::vector<AlgebraicSet> connected_components(const AlgebraicSet& a, const Config& cfg);

bool is_connected(const AlgebraicSet& a, const Config& cfg);
bool is_irreducible(const AlgebraicSet& a, const Config& cfg);

// Set equality through the unique irreducible decomposition.
bool same_set(const AlgebraicSet& a, const AlgebraicSet& b, const Config& cfg);

// Combinatorial dimension: longest chain of irreducible closed subsets.
DimValue dim_of_irreducible_order(const Group& g, Order n);
DimValue dim(const AlgebraicSet& a);

}  // namespace zkt
