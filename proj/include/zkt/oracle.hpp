#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zkt/config.hpp"
#include "zkt/coset.hpp"
#include "zkt/descriptor.hpp"
#include "zkt/element.hpp"

namespace zkt {

// Cross-checks of the symbolic engine against literal enumeration.  The raw
// side works on concrete element tuples and never calls into the code paths
// it is checking.

struct OracleReport {
    std::string suite;
    std::uint64_t cases = 0;       // groups / sets / sequences examined
    std::uint64_t checks = 0;      // individual comparisons made
    std::uint64_t mismatches = 0;
    std::vector<std::string> failures;  // first few, human readable
    double seconds = 0.0;

    bool ok() const { return mismatches == 0; }
    std::string str() const;
};

// A concrete finite abelian group: tuples modulo the given moduli.  A marked
// component stands for a summand class of infinite multiplicity in the group
// it was truncated from; marks drive the irreducibility side of the
// decomposition oracle.
class FiniteGroupInstance {
public:
    using Tuple = std::vector<std::uint64_t>;

    FiniteGroupInstance(std::vector<std::uint64_t> moduli, std::vector<bool> marked);

    // One instance component per summand copy of g, infinite classes cut to
    // `copies` marked components each.  g must be a bounded torsion group.
    static FiniteGroupInstance truncation(const Group& g, std::size_t copies);

    const std::vector<std::uint64_t>& moduli() const { return moduli_; }
    const std::vector<bool>& marked() const { return marked_; }
    std::uint64_t size() const;
    std::uint64_t exponent() const;

    Tuple zero() const { return Tuple(moduli_.size(), 0); }
    Tuple add(const Tuple& a, const Tuple& b) const;
    Tuple neg(const Tuple& a) const;
    Tuple mul(std::uint64_t k, const Tuple& a) const;
    std::uint64_t order_of(const Tuple& a) const;

    std::vector<Tuple> elements() const;               // all, row-major
    std::vector<Tuple> torsion_level(Order n) const;   // { x : n*x = 0 }

    // Smallest t >= 1 killing every marked coordinate of every element of the
    // subset, by literal search.
    std::uint64_t definitional_essential_order(const std::vector<Tuple>& subset) const;

    // The symbolic group matching this instance (finite multiplicities).
    Group descriptor() const;

    // Bridge a tuple into the coordinates of g.  g must carry at least as
    // many copies of each prime-power class as this instance uses.
    Element to_element(const Group& g, const Tuple& t) const;

private:
    struct Slot {  // one prime-power factor of one component
        std::uint64_t p;
        std::uint32_t s;
        std::uint64_t index;  // copy index within the (p, s) class
    };
    std::vector<std::uint64_t> moduli_;
    std::vector<bool> marked_;
    std::vector<std::vector<Slot>> slots_;  // per component
};

// Coset algebra versus enumeration on every (multiset) direct sum of cyclic
// prime-power groups of order <= max_order: subset, equality, intersection,
// Minkowski sum, negation, translation, multiplication preimages.
OracleReport check_coset_lemmas(std::uint64_t max_order, const Config& cfg = {});

// Symbolic irreducible components versus brute-force maximal definitionally
// irreducible instance cosets, on seeded random algebraic sets in truncations
// of Z(6)^w, Z(4)^w and Z(2)^w + Z(4).
OracleReport check_decomposition(std::uint64_t cases_per_group, std::size_t copies,
                                 const Config& cfg = {});

// Independent per-divisor collision counting over generated round prefixes,
// plus the exact error behaviour of make_round on mismatched orders.
OracleReport check_round_prefixes(const Config& cfg = {});

// Longest chains of irreducible torsion levels found by search versus the
// computed dimension, over a catalog of groups; includes the divisor-chain
// bound for the coset lattice of Z(12).
OracleReport check_dim_chains(const Config& cfg = {});

// Translation equivariance of closures on seeded described sets, and the
// Minkowski sum law on seeded algebraic sets projected into finite instances.
OracleReport check_closure_laws(std::uint64_t cases, const Config& cfg = {});

std::vector<OracleReport> run_all_oracles(const Config& cfg = {});

}  // namespace zkt
