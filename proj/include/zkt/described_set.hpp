#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zkt/closed_set.hpp"
#include "zkt/config.hpp"
#include "zkt/coset.hpp"
#include "zkt/descriptor.hpp"
#include "zkt/element.hpp"
#include "zkt/generators.hpp"

namespace zkt {

// A described subset of a countable group: a finite union of atoms.  Atoms
// are exact finite lists, torsion cosets, certified round sequences (shifted
// by a base point), and cosets of finitely generated subgroups.  Everything
// downstream - closures, density, the curve test, dimension - is computed
// from this description.

struct FiniteAtom {
    std::vector<Element> points;  // sorted, no duplicates
    friend bool operator==(const FiniteAtom&, const FiniteAtom&) = default;
};

struct CosetAtom {
    TorsionCoset coset;
    friend bool operator==(const CosetAtom&, const CosetAtom&) = default;
};

// { base + gen.at(i) : i < gen.limit() }
struct RoundAtom {
    Element base;
    RoundGenerator gen;
    friend bool operator==(const RoundAtom&, const RoundAtom&) = default;
};

// offset + <generators>; the subgroup itself when offset is zero
struct FgSubgroupAtom {
    Element offset;
    std::vector<Element> generators;
    friend bool operator==(const FgSubgroupAtom&, const FgSubgroupAtom&) = default;
};

using SetAtom = std::variant<FiniteAtom, CosetAtom, RoundAtom, FgSubgroupAtom>;

class DescribedSet {
public:
    explicit DescribedSet(Group g) : group_(std::move(g)) {}
    DescribedSet(Group g, std::vector<SetAtom> atoms);

    static DescribedSet finite(Group g, std::vector<Element> pts);
    static DescribedSet coset(TorsionCoset c);
    // User-supplied generators are certified over cfg.prefix_length before
    // acceptance; a refutation throws std::invalid_argument.
    static DescribedSet round(Element base, RoundGenerator gen, const Config& cfg = {});
    static DescribedSet round(RoundGenerator gen, const Config& cfg = {});
    static DescribedSet span(Group g, std::vector<Element> gens, Element offset);
    static DescribedSet span(Group g, std::vector<Element> gens);

    const Group& group() const { return group_; }
    const std::vector<SetAtom>& atoms() const { return atoms_; }

    bool is_empty_description() const;
    bool is_infinite() const;

    DescribedSet union_with(const DescribedSet& other) const;
    DescribedSet translate(const Element& t) const;

    // { k*x : x in this }.  Exact when every atom scales exactly; finite
    // cosets are enumerated, infinite cosets whose image is not a coset
    // raise std::domain_error.
    DescribedSet scaled(std::int64_t k, const Config& cfg = {}) const;

    // Membership, exact for finite lists and cosets, prefix-bounded for
    // round sequences and breadth-bounded for spans.
    bool contains(const Element& x, const Config& cfg = {}) const;

    // Deterministic finite sample, at least min(budget, |X|) elements drawn
    // across all atoms.  Used by law checks and oracles.
    std::vector<Element> sample(std::size_t budget, const Config& cfg = {}) const;

    // Syntactic equality of descriptions (same atoms in order).
    friend bool operator==(const DescribedSet& a, const DescribedSet& b) {
        return same_group(a.group_, b.group_) && a.atoms_ == b.atoms_;
    }

    std::string str() const;

private:
    Group group_;
    std::vector<SetAtom> atoms_;
};

// Orders n such that X meets some coset of G[n] in an infinite set, reported
// as the minimal elements under divisibility (each entry divides every other
// order with the same property that it relates to).  Sorted ascending.
std::vector<Order> infinite_trace_classes(const DescribedSet& x);

// The least such order as an integer; 0 when every trace is finite.
Order least_infinite_trace(const DescribedSet& x);

struct ClosurePiece {
    TorsionCoset coset;        // an infinite part of the closure
    std::size_t witness_atom;  // index of an atom with this part in its closure
};

// closure(X) together with the data that proves it: the points isolated in
// the closure, the infinite parts each backed by a witness atom, and the raw
// (order, anchor) pairs the parts were canonicalized from.
struct ClosureCertificate {
    AlgebraicSet closure;
    std::vector<Element> isolated;
    std::vector<ClosurePiece> pieces;
    std::vector<std::pair<Order, Element>> index_set;
    std::string str() const;
};

ClosureCertificate closure_with_certificate(const DescribedSet& x, const Config& cfg = {});
AlgebraicSet closure(const DescribedSet& x, const Config& cfg = {});

// closure(X) == G, decided on canonical components.
bool is_dense(const DescribedSet& x, const Config& cfg = {});

// Independent density route for unbounded groups: X is dense iff kX is
// infinite for every k >= 1.  Throws std::domain_error on bounded groups,
// where the multiplication criterion does not apply.
bool dense_by_multiples(const DescribedSet& x);

struct PotentialDensityVerdict {
    bool zariski_dense = false;
    bool potentially_dense = false;
    std::string note;
    std::string str() const;
};

// For countable groups potential density under some Hausdorff group topology
// coincides with Zariski density; the note records the cardinality hypothesis
// and points at the character-realization builder.
PotentialDensityVerdict is_potentially_dense(const DescribedSet& x, const Config& cfg = {});

struct CurveVerdict {
    bool curve = false;
    Order round_order = 0;          // least infinite trace class of X
    std::optional<Element> base;    // x0 with X inside x0 + G[round_order]
    std::string reason;             // explanation when the verdict is negative
    std::string str() const;
};

// X is a translated round set of order m(X): infinite, contained in one
// coset of G[m(X)], with finite trace on every proper divisor level.
// Throws std::domain_error when X is finite.
CurveVerdict is_curve(const DescribedSet& x, const Config& cfg = {});

// b is a valid translation base: b in X + G[m(X)].  Prefix-bounded on round
// and span atoms.
bool valid_round_base(const DescribedSet& x, const Element& b, const Config& cfg = {});

struct SetComponent {
    TorsionCoset closure_part;  // an irreducible component of closure(X)
    DescribedSet trace;         // the atoms of X meeting it
};

// Traces of X on the irreducible components of its closure.  Round atoms
// whose closure piece straddles several components contribute the prefix
// elements that land in each.
std::vector<SetComponent> components_of_set(const DescribedSet& x, const Config& cfg = {});

bool is_irreducible_set(const DescribedSet& x, const Config& cfg = {});

// Points x of X open in closure(X); exactly the singleton components.
std::vector<Element> isolated_points(const DescribedSet& x, const Config& cfg = {});

// Length of the longest chain of irreducible closed subsets of X (in the
// subspace topology), counted by strict inclusions.
DimValue dim_of_set(const DescribedSet& x, const Config& cfg = {});

}  // namespace zkt
