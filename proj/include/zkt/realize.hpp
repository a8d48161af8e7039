#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zkt/config.hpp"
#include "zkt/described_set.hpp"
#include "zkt/element.hpp"

namespace zkt {

// Numeric realization of closures inside the torus T^K: finite character
// families G -> T^K whose images make described sets visibly dense at the
// configured truncation scale.

// A point of T = R/Z: an exact rational part plus an irrational remainder in
// 128 fixed-point bits.  Torsion characters stay purely rational, so grid
// membership in T[n] is decided exactly; free and rational coordinates
// contribute multiples of sqrt(2) carried in the fixed-point part.
struct TorusValue {
    Rat rat;                     // in [0, 1), exact
    unsigned __int128 fix = 0;   // + fix / 2^128

    static TorusValue zero() { return {}; }
    static TorusValue rational(Rat q) { return {q.mod1(), 0}; }
    static TorusValue irrational(unsigned __int128 f) { return {Rat::zero(), f}; }

    bool exact() const { return fix == 0; }
    TorusValue add(const TorusValue& o) const;
    TorusValue sub(const TorusValue& o) const;
    TorusValue scalar_mul(std::int64_t k) const;

    // Position in the n-point grid T[n], when the value sits on it exactly.
    std::optional<std::uint64_t> grid_index(std::uint64_t n) const;
    // Cell of the uniform partition of [0,1) into `cells` intervals.
    std::uint64_t cell(std::uint64_t cells) const;
    double circle_distance(const TorusValue& o) const;

    friend bool operator==(const TorusValue&, const TorusValue&) = default;
    friend std::strong_ordering operator<=>(const TorusValue&, const TorusValue&) = default;
    std::string str() const;
};

// frac(sqrt(2)) to 128 bits, by integer square root.
unsigned __int128 sqrt2_fraction_bits();

// K characters on g, fully determined by (seed, config).  Values are lazily
// derived per coordinate, so every index of an infinite summand class gets a
// value; a finite family can never separate all points of the group, and
// verdicts built on it are honest only about the sampled points.
class CharacterFamily {
public:
    CharacterFamily(Group g, std::uint32_t rows, std::uint64_t seed, const Config& cfg = {});

    const Group& group() const { return group_; }
    std::uint32_t rows() const { return rows_; }
    std::uint64_t seed() const { return seed_; }

    TorusValue generator_value(std::uint32_t row, const Coord& c) const;
    TorusValue apply(std::uint32_t row, const Element& x) const;
    std::vector<TorusValue> image(const Element& x) const;

    bool additive_on(const Element& a, const Element& b) const;
    // All listed points receive pairwise distinct image tuples.
    bool separates(const std::vector<Element>& pts) const;

private:
    std::uint64_t mix(std::uint32_t row, const Coord& c, std::uint64_t salt) const;

    Group group_;
    std::uint32_t rows_;
    std::uint64_t seed_;
    Config cfg_;
};

struct DensityReport {
    bool pass = false;
    Order grid_order = 0;          // n of the target round set; 0 = eps-grid
    std::uint64_t cells = 0;
    std::uint64_t hit = 0;
    double covering = 0.0;
    std::uint64_t prefix_used = 0;
    std::string worst_empty;       // first missed cell, empty when covered
    std::string note;
    std::string str() const;
};

// Does the L-prefix image of the round atom cover its grid?  Order n >= 1
// uses the exact T[n]^K grid; order 0 uses the eps-grid on [0,1)^K.
DensityReport verify_density(const CharacterFamily& chi, const RoundAtom& target,
                             std::uint64_t L, double eps);

struct CharacterBuild {
    CharacterFamily chi;
    std::uint32_t retries = 0;             // reseeds burned before success
    std::vector<DensityReport> reports;    // one per target, for the final seed
};

// Random characters, re-seeded until every target round set is visibly dense
// and the canonical probe points are separated.  Throws when the retry budget
// runs out, reporting the worst covering fraction achieved.
CharacterBuild build_characters(const Group& g, const std::vector<RoundAtom>& targets,
                                std::uint32_t rows, const Config& cfg = {});

struct RealizeVerdict {
    bool pass = false;
    bool sound = false;   // sampled closure points are eps-approximated by the image of x
    bool tight = false;   // sampled points outside the closure stay eps-separated from it
    std::uint32_t retries = 0;
    std::vector<DensityReport> targets;
    std::string note;
    std::string str() const;
};

// Builds characters for the round atoms of x and checks, at truncation scale,
// that the numeric T^K-closure of the image matches the computed closure.
RealizeVerdict realize_closure(const DescribedSet& x, const Config& cfg = {});

// One line per point: the element, then its K image coordinates as decimals.
std::string image_csv(const CharacterFamily& chi, const std::vector<Element>& pts);

}  // namespace zkt
