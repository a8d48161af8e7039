#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zkt/config.hpp"
#include "zkt/descriptor.hpp"
#include "zkt/element.hpp"
#include "zkt/order.hpp"

namespace zkt {

enum class RoundKind {
    CanonicalBasis,  // independent units, one fresh coordinate per index
    GreedyEscape,    // Prüfer tower of strictly increasing depth
    UserSequence,    // explicit prefix supplied by the caller
};

// An injectively indexed sequence s_0, s_1, ... inside G[order_tag].  The
// intended property ("n-round"): every coset of G[d], d a proper divisor of
// order_tag, meets the sequence in a finite set.  CanonicalBasis and
// GreedyEscape guarantee this by construction; UserSequence carries only
// whatever prefix the caller provides and must be certified by sampling.
class RoundGenerator {
public:
    static RoundGenerator user(Group g, Order order_tag, std::vector<Element> elems);

    const Group& group() const { return group_; }
    Order order_tag() const { return order_tag_; }
    RoundKind kind() const { return kind_; }
    std::int64_t scale() const { return scale_; }
    // Order tag of the unscaled source sequence.
    Order base_tag() const { return base_tag_; }
    // True when roundness holds by construction (no sampling needed).
    bool structural() const { return kind_ != RoundKind::UserSequence; }

    // How many elements can be emitted; unbounded kinds report SIZE_MAX.
    std::size_t limit() const;
    Element at(std::size_t i) const;
    std::vector<Element> prefix(std::size_t L) const;

    // The sequence k*s_0, k*s_1, ...; adjusts order_tag. Rejects k that
    // collapses the sequence to {0}.
    RoundGenerator scaled(std::int64_t k) const;

    // Collision allowance at divisor d for structural kinds (1 except for the
    // tower, where d may kill several shallow levels at once).
    std::size_t structural_bound(Order d) const;

    friend bool operator==(const RoundGenerator& a, const RoundGenerator& b);

    std::string str() const;

private:
    RoundGenerator() = default;
    friend RoundGenerator make_round(const Group& g, Order n);

    Element unscaled_at(std::size_t i) const;

    Group group_;
    Order order_tag_ = 0;
    RoundKind kind_ = RoundKind::UserSequence;
    std::int64_t scale_ = 1;

    // CanonicalBasis, order_tag >= 2: one source summand per prime of the tag.
    struct PrimeSource {
        std::uint64_t p;
        std::uint32_t target;        // v_p(unscaled tag)
        bool from_quasicyclic;
        std::uint32_t s;             // cyclic source level (s >= target)
        friend bool operator==(const PrimeSource&, const PrimeSource&) = default;
    };
    std::vector<PrimeSource> sources_;
    Order base_tag_ = 0;  // order of the unscaled elements

    // order_tag == 0 paths.
    enum class ZeroPath { None, FreeLadder, RationalLadder, PruferTower };
    ZeroPath zero_path_ = ZeroPath::None;
    std::uint64_t tower_p_ = 0;
    std::size_t tower_offset_ = 0;  // indices consumed by the scale's p-part

    std::vector<Element> user_elems_;
};

// Builds the standard round sequence of G[n].  Requires eo(G[n]) = n:
// for n >= 2 every prime power p^a dividing n needs an infinite supply of
// independent order-p^a elements inside G[n]; for n = 0 the group must be
// unbounded.  n = 1 is rejected outright (G[1] = {0} has no infinite subset).
RoundGenerator make_round(const Group& g, Order n);

struct RoundRefutation {
    std::string reason;
    Order divisor = 0;
    std::optional<Element> value;        // the collided d*x value
    std::vector<std::size_t> indices;    // offending prefix indices
};

struct RoundCertificate {
    bool certified = false;
    bool structural = false;  // kind carries a by-construction proof
    Order order_tag = 0;
    std::size_t prefix_checked = 0;
    std::size_t count_bound = 0;  // bound applied to user sequences
    std::size_t max_count = 0;    // worst observed collision count
    std::vector<Order> divisors_checked;
    std::optional<RoundRefutation> refutation;

    std::string str() const;
};

// Verifies injectivity and per-divisor collision counts over the L-prefix.
// Divisors checked: the proper divisors of order_tag, or 1..zero_divisor_window
// when order_tag = 0 (every positive integer is a proper divisor of 0; the
// window is the honest finite truncation and is recorded in the certificate).
// Throws std::invalid_argument if the generator emits an element outside
// G[order_tag]; unroundness is reported as a refutation, not an exception.
RoundCertificate certify_round(const RoundGenerator& gen, std::size_t L,
                               const Config& cfg = {});

struct SplitResult {
    RoundGenerator first;
    RoundGenerator second;
    std::size_t consumed = 0;       // source prefix length used
    std::size_t skipped = 0;        // elements dropped by the greedy filter
    std::size_t max_cross_count = 0;  // pairs (a,b) sharing b-a; 1 by greed
};

// Greedy interleaved split of the L-prefix into two disjoint subsequences
// such that no difference b - a (a from the first, b from the second) repeats.
// Consequently every pair of translates x+first, y+second intersects in at
// most one recorded point.
SplitResult split_trim(const RoundGenerator& gen, std::size_t L,
                       const Config& cfg = {});

}  // namespace zkt
