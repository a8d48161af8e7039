#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zkt/cardinal.hpp"
#include "zkt/order.hpp"

namespace zkt {

struct PrimePower {
    std::uint64_t p = 0;
    std::uint32_t s = 0;  // s >= 1 for cyclic entries
    friend auto operator<=>(const PrimePower&, const PrimePower&) = default;
};

// Structured description of a countable abelian group: a direct sum of
//   Z^free  +  Q^rational  +  Z(p^inf)^kappa_p  +  Z(p^s)^kappa_{p,s}
// with finitely many summand kinds (multiplicities may be omega).
class GroupDescriptor {
public:
    GroupDescriptor() = default;

    static GroupDescriptor trivial() { return {}; }
    static GroupDescriptor integers(Cardinal rank = Cardinal::fin(1));
    static GroupDescriptor rationals(Cardinal rank = Cardinal::fin(1));
    static GroupDescriptor quasicyclic(std::uint64_t p, Cardinal mult = Cardinal::fin(1));
    // Z(n) split into prime-power cyclic summands; n >= 1 (Z(1) is trivial).
    static GroupDescriptor cyclic(std::uint64_t n, Cardinal mult = Cardinal::fin(1));
    static GroupDescriptor cyclic_prime_power(std::uint64_t p, std::uint32_t s, Cardinal mult);

    GroupDescriptor direct_sum(const GroupDescriptor& other) const;

    Cardinal free_rank() const { return free_rank_; }
    Cardinal rational_rank() const { return rational_rank_; }
    const std::map<std::uint64_t, Cardinal>& quasicyclic_entries() const { return quasicyclic_; }
    const std::map<PrimePower, Cardinal>& cyclic_entries() const { return cyclic_; }

    Cardinal quasicyclic_multiplicity(std::uint64_t p) const;
    Cardinal cyclic_multiplicity(std::uint64_t p, std::uint32_t s) const;

    bool is_trivial() const;
    bool is_finite() const;
    // Bounded means nx = 0 for a single positive n (equivalently exponent() > 0).
    bool is_bounded() const;
    bool is_infinite() const { return !is_finite(); }

    // Element count for finite descriptors; throws when infinite or above 2^63.
    std::uint64_t finite_order() const;

    // Exponent with 0 meaning unbounded; 1 for the trivial group.
    Order exponent() const;

    // Smallest positive n with nG finite, 0 when no such n exists.
    Order essential_order() const;

    // Descriptor of G[n] = {x : nx = 0}; G[0] = G.
    GroupDescriptor torsion_subgroup(Order n) const;

    // Descriptor of nG for n >= 1; rejects n = 0.
    GroupDescriptor multiplied_by(Order n) const;

    // exponent(G[m]): the canonical representative of the torsion order m.
    Order canonical_torsion_order(Order m) const;

    // Ulm-Kaplansky invariant at the top power for prime p: the pair
    // (s, kappa_{p,s}) with s maximal among entries with positive multiplicity.
    std::optional<std::pair<std::uint32_t, Cardinal>> leading_invariant(std::uint64_t p) const;

    struct LeadingInvariantReport {
        std::uint64_t p = 0;
        std::uint32_t s = 0;       // the power that must carry an infinite multiplicity
        Cardinal multiplicity;     // what it actually carries
        bool infinite_ok = false;
    };
    struct IrreducibilityCertificate {
        bool irreducible = false;
        Order order = 0;
        // For n >= 1: one report per prime dividing n (the leading invariants of G[n]).
        std::vector<LeadingInvariantReport> leading;
        // For n = 0: a textual witness of unboundedness.
        std::string unbounded_witness;
    };
    // Pre: n is canonical for this descriptor (n == canonical_torsion_order(n)).
    IrreducibilityCertificate torsion_irreducibility(Order n) const;

    // G[p] finite for every prime p.
    bool almost_torsion_free() const;
    // Every infinite elementary algebraic set is cofinite: almost torsion free
    // or exponent is prime.
    bool cofinite_zariski() const;

    friend bool operator==(const GroupDescriptor&, const GroupDescriptor&) = default;

    // Canonical text form, e.g. "Z^2 + Q + Zp(2,inf)^w + Z(4)^w + Z(3)^5".
    std::string str() const;

private:
    void prune();

    Cardinal free_rank_ = Cardinal::fin(0);
    Cardinal rational_rank_ = Cardinal::fin(0);
    std::map<std::uint64_t, Cardinal> quasicyclic_;
    std::map<PrimePower, Cardinal> cyclic_;
};

using Group = std::shared_ptr<const GroupDescriptor>;

inline Group make_group(GroupDescriptor d) {
    return std::make_shared<const GroupDescriptor>(std::move(d));
}

// Shared-handle equality is by descriptor value.
inline bool same_group(const Group& a, const Group& b) {
    return a == b || (a && b && *a == *b);
}

}  // namespace zkt
