#include "zkt/described_set.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace zkt {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

DimValue dv_max(DimValue a, DimValue b) {
    if (a.infinite || b.infinite) return DimValue::inf();
    return DimValue::fin(std::max(a.value, b.value));
}

DimValue dv_succ(DimValue a) {
    if (a.infinite) return a;
    return DimValue::fin(a.value + 1);
}

std::vector<Element> sorted_unique(std::vector<Element> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

bool fg_has_infinite_generator(const FgSubgroupAtom& a) {
    for (const Element& g : a.generators)
        if (g.order_of() == 0) return true;
    return false;
}

// Breadth-first enumeration of offset + <generators>.  With require_closed the
// subgroup must be exhausted within cap (callers ensure the generators are
// torsion first); otherwise the first cap elements found are returned.
std::vector<Element> span_walk(const Group& g, const FgSubgroupAtom& a, std::size_t cap,
                               bool require_closed) {
    std::set<Element> seen;
    std::vector<Element> queue;
    seen.insert(Element::zero(g));
    queue.push_back(Element::zero(g));
    bool full = true;
    for (std::size_t i = 0; i < queue.size() && full; ++i) {
        for (const Element& gen : a.generators) {
            for (int sgn : {+1, -1}) {
                Element y = queue[i].add(sgn > 0 ? gen : gen.negate());
                if (!seen.insert(y).second) continue;
                if (seen.size() > cap) {
                    if (require_closed)
                        throw std::out_of_range(
                            "span enumeration exceeded max_enumeration; raise it in Config");
                    seen.erase(y);
                    full = false;
                    break;
                }
                queue.push_back(y);
            }
            if (!full) break;
        }
    }
    std::set<Element> out;
    for (const Element& e : seen) out.insert(e.add(a.offset));
    return {out.begin(), out.end()};
}

// Deterministic bounded sample of a coset: the anchor plus coordinate
// perturbations along the subgroup trace, a few indices per infinite
// multiplicity.
std::vector<Element> sample_coset(const TorsionCoset& c, std::size_t budget) {
    if (c.is_empty()) return {};
    const Group& g = c.group();
    const Order n = c.order();

    struct Position {
        std::vector<Element> deltas;  // nonzero subgroup elements along one coordinate
    };
    std::vector<Position> positions;
    auto rat = [](std::int64_t num, std::uint64_t den) { return Rat{num, den}; };

    for (const auto& ent : g->cyclic_entries()) {
        const PrimePower pp = ent.first;
        const Cardinal mult = ent.second;
        std::uint32_t e = (n == 0) ? pp.s
                                   : std::min<std::uint32_t>(
                                         pp.s, static_cast<std::uint32_t>(valuation(pp.p, n)));
        if (e == 0) continue;
        std::uint64_t step = pow_u64(pp.p, pp.s - e);
        std::uint64_t count = pow_u64(pp.p, e);
        std::size_t idxcap = mult.is_finite() ? std::min<std::uint64_t>(mult.finite_value(), 2) : 3;
        for (std::size_t idx = 0; idx < idxcap; ++idx) {
            Position pos;
            for (std::uint64_t t = 1; t < count && pos.deltas.size() < 8; ++t)
                pos.deltas.push_back(Element::zero(g).with(
                    Coord::cyclic(pp.p, pp.s, idx), rat(static_cast<std::int64_t>(t * step), 1)));
            positions.push_back(std::move(pos));
        }
    }
    for (const auto& ent : g->quasicyclic_entries()) {
        const std::uint64_t p = ent.first;
        const Cardinal mult = ent.second;
        std::uint32_t v = (n == 0) ? 2 : static_cast<std::uint32_t>(valuation(p, n));
        if (v == 0) continue;
        std::uint64_t den = pow_u64(p, v);
        std::size_t idxcap = mult.is_finite() ? std::min<std::uint64_t>(mult.finite_value(), 2) : 3;
        for (std::size_t idx = 0; idx < idxcap; ++idx) {
            Position pos;
            for (std::uint64_t t = 1; t < den && pos.deltas.size() < 8; ++t)
                pos.deltas.push_back(Element::zero(g).with(Coord::quasicyclic(p, idx),
                                                           rat(static_cast<std::int64_t>(t), den)));
            positions.push_back(std::move(pos));
        }
    }
    if (n == 0) {
        auto ladder = [&](auto coord_of, Cardinal rank) {
            std::size_t idxcap = rank.is_finite() ? std::min<std::uint64_t>(rank.finite_value(), 2) : 2;
            for (std::size_t idx = 0; idx < idxcap; ++idx) {
                Position pos;
                for (std::int64_t t : {1, -1, 2})
                    pos.deltas.push_back(Element::zero(g).with(coord_of(idx), rat(t, 1)));
                positions.push_back(std::move(pos));
            }
        };
        ladder([](std::size_t i) { return Coord::free(i); }, g->free_rank());
        ladder([](std::size_t i) { return Coord::rational(i); }, g->rational_rank());
    }

    std::set<Element> acc;
    acc.insert(c.anchor());
    for (const Position& pos : positions) {
        if (acc.size() >= budget) break;
        std::vector<Element> base(acc.begin(), acc.end());
        for (const Element& x : base) {
            for (const Element& d : pos.deltas) {
                if (acc.size() >= budget) break;
                acc.insert(x.add(d));
            }
        }
    }
    return {acc.begin(), acc.end()};
}

// Exact enumeration of k*(a + G[n]) for the case where the image subgroup
// k*G[n] is finite: odometer over the surviving coordinate levels.  The
// caller has already checked finiteness through the image descriptor.
std::vector<Element> enumerate_scaled_coset(const TorsionCoset& c, std::int64_t k) {
    const Group& g = c.group();
    const Order n = c.order();
    const std::uint64_t a = static_cast<std::uint64_t>(k < 0 ? -static_cast<std::uint64_t>(k)
                                                             : static_cast<std::uint64_t>(k));
    struct Pos {
        Coord coord;
        std::vector<Rat> deltas;
    };
    std::vector<Pos> positions;
    for (const auto& ent : g->cyclic_entries()) {
        const PrimePower pp = ent.first;
        std::uint32_t e = (n == 0) ? pp.s
                                   : std::min<std::uint32_t>(pp.s, valuation(pp.p, n));
        if (e == 0) continue;
        std::uint32_t e2 = e - std::min<std::uint32_t>(e, valuation(pp.p, a));
        if (e2 == 0) continue;
        std::uint64_t step = pow_u64(pp.p, pp.s - e2);
        std::uint64_t count = pow_u64(pp.p, e2);
        for (std::uint64_t idx = 0; idx < ent.second.finite_value(); ++idx) {
            Pos pos{Coord::cyclic(pp.p, pp.s, idx), {}};
            for (std::uint64_t t = 1; t < count; ++t)
                pos.deltas.push_back(Rat{static_cast<std::int64_t>(t * step), 1});
            positions.push_back(std::move(pos));
        }
    }
    for (const auto& ent : g->quasicyclic_entries()) {
        std::uint32_t v = (n == 0) ? 0 : valuation(ent.first, n);  // n == 0 never reaches here
        if (v == 0) continue;
        std::uint32_t v2 = v - std::min<std::uint32_t>(v, valuation(ent.first, a));
        if (v2 == 0) continue;
        std::uint64_t den = pow_u64(ent.first, v2);
        for (std::uint64_t idx = 0; idx < ent.second.finite_value(); ++idx) {
            Pos pos{Coord::quasicyclic(ent.first, idx), {}};
            for (std::uint64_t t = 1; t < den; ++t)
                pos.deltas.push_back(Rat{static_cast<std::int64_t>(t), den});
            positions.push_back(std::move(pos));
        }
    }
    std::vector<Element> acc{c.anchor().scalar_mul(k)};
    for (const Pos& pos : positions) {
        std::size_t base = acc.size();
        for (std::size_t i = 0; i < base; ++i)
            for (const Rat& d : pos.deltas)
                acc.push_back(acc[i].add(Element::zero(g).with(pos.coord, d)));
    }
    return sorted_unique(std::move(acc));
}

Element atom_representative(const SetAtom& a) {
    return std::visit(
        overloaded{
            [](const FiniteAtom& f) { return f.points.front(); },
            [](const CosetAtom& c) { return c.coset.anchor(); },
            [](const RoundAtom& r) {
                return r.gen.limit() > 0 ? r.base.add(r.gen.at(0)) : r.base;
            },
            [](const FgSubgroupAtom& s) { return s.offset; },
        },
        a);
}

bool atom_has_point(const SetAtom& a) {
    return std::visit(overloaded{
                          [](const FiniteAtom& f) { return !f.points.empty(); },
                          [](const CosetAtom& c) { return !c.coset.is_empty(); },
                          [](const RoundAtom&) { return true; },
                          [](const FgSubgroupAtom&) { return true; },
                      },
                      a);
}

// Parts of the closure contributed by one atom, tagged with the atom index.
struct RawPart {
    TorsionCoset coset;
    std::size_t atom;
};

void atom_closure_parts(const Group& g, const SetAtom& a, std::size_t idx, const Config& cfg,
                        std::vector<RawPart>& out) {
    std::visit(overloaded{
                   [&](const FiniteAtom& f) {
                       for (const Element& p : f.points)
                           out.push_back({TorsionCoset::singleton(p), idx});
                   },
                   [&](const CosetAtom& c) {
                       if (!c.coset.is_empty()) out.push_back({c.coset, idx});
                   },
                   [&](const RoundAtom& r) {
                       out.push_back({TorsionCoset::of(r.base, r.gen.order_tag()), idx});
                   },
                   [&](const FgSubgroupAtom& s) {
                       if (fg_has_infinite_generator(s)) {
                           out.push_back({TorsionCoset::whole_group(g), idx});
                           return;
                       }
                       for (const Element& p : span_walk(g, s, cfg.max_enumeration, true))
                           out.push_back({TorsionCoset::singleton(p), idx});
                   },
               },
               a);
}

// The image k*(a + G[n]) when it is again a coset a*k + G[t]; nullopt when
// multiplication by k does not carry the subgroup onto a torsion subgroup.
std::optional<TorsionCoset> scale_coset_exact(const TorsionCoset& c, std::int64_t k) {
    const Group& g = c.group();
    const Order n = c.order();
    const std::uint64_t a = static_cast<std::uint64_t>(k < 0 ? -static_cast<std::uint64_t>(k)
                                                             : static_cast<std::uint64_t>(k));
    if (n == 0) {
        // k*G = G exactly when G is divisible-or-unit at every coordinate kind
        if (g->free_rank().is_positive() && a != 1) return std::nullopt;
        for (const auto& ent : g->cyclic_entries())
            if (a % ent.first.p == 0) return std::nullopt;
        return TorsionCoset::of(c.anchor().scalar_mul(k), 0);
    }
    std::map<std::uint64_t, std::uint32_t> level;
    auto image_level = [&](std::uint64_t p, std::uint32_t e) {
        std::uint32_t drop = std::min<std::uint32_t>(e, static_cast<std::uint32_t>(valuation(p, a)));
        return e - drop;
    };
    for (const auto& ent : g->cyclic_entries()) {
        const PrimePower pp = ent.first;
        std::uint32_t e =
            std::min<std::uint32_t>(pp.s, static_cast<std::uint32_t>(valuation(pp.p, n)));
        if (e == 0) continue;
        std::uint32_t e2 = image_level(pp.p, e);
        level[pp.p] = std::max(level[pp.p], e2);
    }
    for (const auto& ent : g->quasicyclic_entries()) {
        std::uint32_t v = static_cast<std::uint32_t>(valuation(ent.first, n));
        if (v == 0) continue;
        level[ent.first] = std::max(level[ent.first], image_level(ent.first, v));
    }
    Order t = 1;
    for (const auto& pe : level) t = checked_mul(t, pow_u64(pe.first, pe.second));
    for (const auto& ent : g->cyclic_entries()) {
        const PrimePower pp = ent.first;
        std::uint32_t e =
            std::min<std::uint32_t>(pp.s, static_cast<std::uint32_t>(valuation(pp.p, n)));
        std::uint32_t want =
            std::min<std::uint32_t>(pp.s, static_cast<std::uint32_t>(valuation(pp.p, t)));
        if (image_level(pp.p, e) != want) return std::nullopt;
    }
    for (const auto& ent : g->quasicyclic_entries()) {
        std::uint32_t v = static_cast<std::uint32_t>(valuation(ent.first, n));
        if (image_level(ent.first, v) != static_cast<std::uint32_t>(valuation(ent.first, t)))
            return std::nullopt;
    }
    return TorsionCoset::of(c.anchor().scalar_mul(k), t);
}

// The trace of one atom on a coset, as an atom again.  Round atoms that only
// straddle the coset are cut down to the prefix elements landing inside it.
std::optional<SetAtom> restrict_atom(const Group& g, const SetAtom& a, const TorsionCoset& part,
                                     const Config& cfg) {
    return std::visit(
        overloaded{
            [&](const FiniteAtom& f) -> std::optional<SetAtom> {
                std::vector<Element> pts;
                for (const Element& p : f.points)
                    if (part.contains(p)) pts.push_back(p);
                if (pts.empty()) return std::nullopt;
                return SetAtom{FiniteAtom{std::move(pts)}};
            },
            [&](const CosetAtom& c) -> std::optional<SetAtom> {
                TorsionCoset inter = c.coset.intersect(part);
                if (inter.is_empty()) return std::nullopt;
                return SetAtom{CosetAtom{inter}};
            },
            [&](const RoundAtom& r) -> std::optional<SetAtom> {
                TorsionCoset piece = TorsionCoset::of(r.base, r.gen.order_tag());
                if (piece.subset_of(part)) return SetAtom{r};
                std::vector<Element> pts;
                std::size_t cap = std::min<std::size_t>(r.gen.limit(), cfg.prefix_length);
                for (std::size_t i = 0; i < cap; ++i) {
                    Element x = r.base.add(r.gen.at(i));
                    if (part.contains(x)) pts.push_back(x);
                }
                if (pts.empty()) return std::nullopt;
                return SetAtom{FiniteAtom{sorted_unique(std::move(pts))}};
            },
            [&](const FgSubgroupAtom& s) -> std::optional<SetAtom> {
                if (fg_has_infinite_generator(s) && part.is_whole_group()) return SetAtom{s};
                std::vector<Element> pts;
                for (const Element& x :
                     span_walk(g, s, cfg.max_enumeration, !fg_has_infinite_generator(s)))
                    if (part.contains(x)) pts.push_back(x);
                if (pts.empty()) return std::nullopt;
                return SetAtom{FiniteAtom{std::move(pts)}};
            },
        },
        a);
}

DescribedSet restrict_to(const DescribedSet& x, const TorsionCoset& part, const Config& cfg) {
    std::vector<SetAtom> atoms;
    for (const SetAtom& a : x.atoms())
        if (auto r = restrict_atom(x.group(), a, part, cfg)) atoms.push_back(std::move(*r));
    return DescribedSet(x.group(), std::move(atoms));
}

// Longest chain of irreducible relatively closed subsets of t, where t sits
// inside the irreducible coset `top` with closure(t) = top.  Chains inside a
// coset atom are counted by the closed-set dimension; a round atom whose
// closure piece sits strictly below top contributes its own trace chain plus
// the step up to t itself.
DimValue dim_of_trace(const DescribedSet& t, const TorsionCoset& top, const Config& cfg) {
    if (!t.is_infinite()) return DimValue::fin(0);
    DimValue best = DimValue::fin(1);
    for (const SetAtom& a : t.atoms()) {
        if (const auto* c = std::get_if<CosetAtom>(&a)) {
            if (c->coset.size().is_finite()) continue;
            DimValue d = dim(AlgebraicSet(t.group(), {c->coset}));
            if (!(c->coset == top)) d = dv_succ(d);
            best = dv_max(best, d);
        } else if (const auto* r = std::get_if<RoundAtom>(&a)) {
            TorsionCoset piece = TorsionCoset::of(r->base, r->gen.order_tag());
            if (piece == top) continue;
            DescribedSet sub = restrict_to(t, piece, cfg);
            if (sub.atoms().empty()) continue;
            best = dv_max(best, dv_succ(dim_of_trace(sub, piece, cfg)));
        }
    }
    return best;
}

}  // namespace

DescribedSet::DescribedSet(Group g, std::vector<SetAtom> atoms)
    : group_(std::move(g)), atoms_(std::move(atoms)) {
    for (SetAtom& a : atoms_) {
        std::visit(overloaded{
                       [&](FiniteAtom& f) {
                           for (const Element& p : f.points)
                               if (!same_group(p.group(), group_))
                                   throw std::invalid_argument("finite atom group mismatch");
                           f.points = sorted_unique(std::move(f.points));
                       },
                       [&](const CosetAtom& c) {
                           if (!same_group(c.coset.group(), group_))
                               throw std::invalid_argument("coset atom group mismatch");
                       },
                       [&](const RoundAtom& r) {
                           if (!same_group(r.gen.group(), group_) ||
                               !same_group(r.base.group(), group_))
                               throw std::invalid_argument("round atom group mismatch");
                       },
                       [&](const FgSubgroupAtom& s) {
                           if (!same_group(s.offset.group(), group_))
                               throw std::invalid_argument("span atom group mismatch");
                           for (const Element& e : s.generators)
                               if (!same_group(e.group(), group_))
                                   throw std::invalid_argument("span atom group mismatch");
                       },
                   },
                   a);
    }
}

DescribedSet DescribedSet::finite(Group g, std::vector<Element> pts) {
    std::vector<SetAtom> atoms;
    if (!pts.empty()) atoms.push_back(FiniteAtom{std::move(pts)});
    return DescribedSet(std::move(g), std::move(atoms));
}

DescribedSet DescribedSet::coset(TorsionCoset c) {
    Group g = c.group();
    std::vector<SetAtom> atoms;
    if (!c.is_empty()) atoms.push_back(CosetAtom{std::move(c)});
    return DescribedSet(std::move(g), std::move(atoms));
}

DescribedSet DescribedSet::round(Element base, RoundGenerator gen, const Config& cfg) {
    if (!gen.structural()) {
        RoundCertificate cert = certify_round(gen, cfg.prefix_length, cfg);
        if (!cert.certified)
            throw std::invalid_argument("round atom rejected: " + cert.str());
    }
    Group g = gen.group();
    std::vector<SetAtom> atoms;
    atoms.push_back(RoundAtom{std::move(base), std::move(gen)});
    return DescribedSet(std::move(g), std::move(atoms));
}

DescribedSet DescribedSet::round(RoundGenerator gen, const Config& cfg) {
    Element z = Element::zero(gen.group());
    return round(std::move(z), std::move(gen), cfg);
}

DescribedSet DescribedSet::span(Group g, std::vector<Element> gens, Element offset) {
    std::vector<SetAtom> atoms;
    atoms.push_back(FgSubgroupAtom{std::move(offset), std::move(gens)});
    return DescribedSet(std::move(g), std::move(atoms));
}

DescribedSet DescribedSet::span(Group g, std::vector<Element> gens) {
    Element z = Element::zero(g);
    return span(std::move(g), std::move(gens), std::move(z));
}

bool DescribedSet::is_empty_description() const {
    for (const SetAtom& a : atoms_)
        if (atom_has_point(a)) return false;
    return true;
}

bool DescribedSet::is_infinite() const {
    for (const SetAtom& a : atoms_) {
        bool inf = std::visit(overloaded{
                                  [](const FiniteAtom&) { return false; },
                                  [](const CosetAtom& c) { return !c.coset.size().is_finite(); },
                                  [](const RoundAtom&) { return true; },
                                  [](const FgSubgroupAtom& s) {
                                      return fg_has_infinite_generator(s);
                                  },
                              },
                              a);
        if (inf) return true;
    }
    return false;
}

DescribedSet DescribedSet::union_with(const DescribedSet& other) const {
    if (!same_group(group_, other.group_))
        throw std::invalid_argument("union of sets in different groups");
    std::vector<SetAtom> atoms = atoms_;
    atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
    return DescribedSet(group_, std::move(atoms));
}

DescribedSet DescribedSet::translate(const Element& t) const {
    if (!same_group(t.group(), group_))
        throw std::invalid_argument("translation by an element of a different group");
    std::vector<SetAtom> atoms;
    for (const SetAtom& a : atoms_) {
        atoms.push_back(std::visit(
            overloaded{
                [&](const FiniteAtom& f) {
                    std::vector<Element> pts;
                    for (const Element& p : f.points) pts.push_back(p.add(t));
                    return SetAtom{FiniteAtom{sorted_unique(std::move(pts))}};
                },
                [&](const CosetAtom& c) { return SetAtom{CosetAtom{c.coset.translate(t)}}; },
                [&](const RoundAtom& r) { return SetAtom{RoundAtom{r.base.add(t), r.gen}}; },
                [&](const FgSubgroupAtom& s) {
                    return SetAtom{FgSubgroupAtom{s.offset.add(t), s.generators}};
                },
            },
            a));
    }
    return DescribedSet(group_, std::move(atoms));
}

DescribedSet DescribedSet::scaled(std::int64_t k, const Config& cfg) const {
    if (k == 0) {
        if (is_empty_description()) return DescribedSet(group_);
        return finite(group_, {Element::zero(group_)});
    }
    const std::uint64_t a = static_cast<std::uint64_t>(
        k < 0 ? -static_cast<std::uint64_t>(k) : static_cast<std::uint64_t>(k));
    std::vector<SetAtom> atoms;
    for (const SetAtom& at : atoms_) {
        std::visit(
            overloaded{
                [&](const FiniteAtom& f) {
                    std::vector<Element> pts;
                    for (const Element& p : f.points) pts.push_back(p.scalar_mul(k));
                    if (!pts.empty()) atoms.push_back(FiniteAtom{sorted_unique(std::move(pts))});
                },
                [&](const CosetAtom& c) {
                    if (c.coset.is_empty()) return;
                    if (auto img = scale_coset_exact(c.coset, k)) {
                        atoms.push_back(CosetAtom{*img});
                        return;
                    }
                    GroupDescriptor image = group_->torsion_subgroup(c.coset.order()).multiplied_by(a);
                    if (image.is_finite() && image.finite_order() <= cfg.max_enumeration) {
                        atoms.push_back(FiniteAtom{enumerate_scaled_coset(c.coset, k)});
                        return;
                    }
                    throw std::domain_error("scaled image of the coset " + c.coset.str() +
                                            " is neither a coset nor a small finite set");
                },
                [&](const RoundAtom& r) {
                    Order tag = r.gen.order_tag();
                    if (tag >= 2 && a % tag == 0) {
                        atoms.push_back(FiniteAtom{{r.base.scalar_mul(k)}});
                        return;
                    }
                    atoms.push_back(RoundAtom{r.base.scalar_mul(k), r.gen.scaled(k)});
                },
                [&](const FgSubgroupAtom& s) {
                    std::vector<Element> gens;
                    for (const Element& e : s.generators) gens.push_back(e.scalar_mul(k));
                    atoms.push_back(FgSubgroupAtom{s.offset.scalar_mul(k), std::move(gens)});
                },
            },
            at);
    }
    return DescribedSet(group_, std::move(atoms));
}

bool DescribedSet::contains(const Element& x, const Config& cfg) const {
    if (!same_group(x.group(), group_))
        throw std::invalid_argument("membership query from a different group");
    for (const SetAtom& a : atoms_) {
        bool hit = std::visit(
            overloaded{
                [&](const FiniteAtom& f) {
                    return std::binary_search(f.points.begin(), f.points.end(), x);
                },
                [&](const CosetAtom& c) { return c.coset.contains(x); },
                [&](const RoundAtom& r) {
                    std::size_t cap = std::min<std::size_t>(r.gen.limit(), cfg.prefix_length);
                    for (std::size_t i = 0; i < cap; ++i)
                        if (r.base.add(r.gen.at(i)) == x) return true;
                    return false;
                },
                [&](const FgSubgroupAtom& s) {
                    for (const Element& e : span_walk(group_, s, cfg.max_enumeration, false))
                        if (e == x) return true;
                    return false;
                },
            },
            a);
        if (hit) return true;
    }
    return false;
}

std::vector<Element> DescribedSet::sample(std::size_t budget, const Config& cfg) const {
    std::set<Element> out;
    std::size_t per_atom = std::max<std::size_t>(1, budget / std::max<std::size_t>(1, atoms_.size()));
    for (const SetAtom& a : atoms_) {
        std::visit(overloaded{
                       [&](const FiniteAtom& f) { out.insert(f.points.begin(), f.points.end()); },
                       [&](const CosetAtom& c) {
                           if (c.coset.is_empty()) return;
                           if (c.coset.size().is_finite() &&
                               c.coset.size().finite_value() <= per_atom) {
                               for (const Element& e : c.coset.enumerate(per_atom)) out.insert(e);
                               return;
                           }
                           for (const Element& e : sample_coset(c.coset, per_atom)) out.insert(e);
                       },
                       [&](const RoundAtom& r) {
                           std::size_t cap = std::min<std::size_t>(r.gen.limit(), per_atom);
                           for (const Element& s : r.gen.prefix(cap)) out.insert(r.base.add(s));
                       },
                       [&](const FgSubgroupAtom& s) {
                           for (const Element& e : span_walk(group_, s, per_atom, false))
                               out.insert(e);
                       },
                   },
                   a);
    }
    (void)cfg;
    return {out.begin(), out.end()};
}

std::string DescribedSet::str() const {
    if (atoms_.empty()) return "{}";
    std::ostringstream os;
    bool first = true;
    for (const SetAtom& a : atoms_) {
        if (!first) os << " | ";
        first = false;
        std::visit(overloaded{
                       [&](const FiniteAtom& f) {
                           os << "{";
                           for (std::size_t i = 0; i < f.points.size() && i < 6; ++i) {
                               if (i) os << ", ";
                               os << f.points[i].str();
                           }
                           if (f.points.size() > 6) os << ", ...";
                           os << "}";
                       },
                       [&](const CosetAtom& c) { os << c.coset.str(); },
                       [&](const RoundAtom& r) {
                           if (!r.base.is_zero()) os << r.base.str() << " + ";
                           os << r.gen.str();
                       },
                       [&](const FgSubgroupAtom& s) {
                           if (!s.offset.is_zero()) os << s.offset.str() << " + ";
                           os << "span(";
                           for (std::size_t i = 0; i < s.generators.size(); ++i) {
                               if (i) os << ", ";
                               os << s.generators[i].str();
                           }
                           os << ")";
                       },
                   },
                   a);
    }
    return os.str();
}

std::vector<Order> infinite_trace_classes(const DescribedSet& x) {
    const Group& g = x.group();
    std::set<std::uint64_t> heavy;  // primes p with G[p] infinite
    for (const auto& ent : g->cyclic_entries())
        if (!ent.second.is_finite()) heavy.insert(ent.first.p);
    for (const auto& ent : g->quasicyclic_entries())
        if (!ent.second.is_finite()) heavy.insert(ent.first);

    std::set<Order> cands;
    for (const SetAtom& a : x.atoms()) {
        if (const auto* c = std::get_if<CosetAtom>(&a)) {
            if (c->coset.is_empty()) continue;
            Order m = c->coset.order();
            for (std::uint64_t p : heavy)
                if (m == 0 || m % p == 0) cands.insert(p);
        } else if (const auto* r = std::get_if<RoundAtom>(&a)) {
            if (r->gen.order_tag() >= 2) cands.insert(r->gen.order_tag());
        }
    }
    std::vector<Order> out;
    for (Order c : cands) {
        bool minimal = true;
        for (Order d : cands)
            if (d != c && order_divides(d, c)) minimal = false;
        if (minimal) out.push_back(c);
    }
    return out;
}

Order least_infinite_trace(const DescribedSet& x) {
    std::vector<Order> classes = infinite_trace_classes(x);
    return classes.empty() ? 0 : classes.front();
}

std::string ClosureCertificate::str() const {
    std::ostringstream os;
    os << "closure " << closure.str() << "; " << pieces.size() << " infinite piece(s), "
       << isolated.size() << " isolated point(s), index set of " << index_set.size();
    return os.str();
}

ClosureCertificate closure_with_certificate(const DescribedSet& x, const Config& cfg) {
    const Group& g = x.group();
    std::vector<RawPart> raw;
    for (std::size_t i = 0; i < x.atoms().size(); ++i)
        atom_closure_parts(g, x.atoms()[i], i, cfg, raw);

    std::vector<TorsionCoset> parts;
    parts.reserve(raw.size());
    for (const RawPart& r : raw) parts.push_back(r.coset);

    ClosureCertificate cert{AlgebraicSet(g, std::move(parts)), {}, {}, {}};
    for (const RawPart& r : raw) cert.index_set.emplace_back(r.coset.order(), r.coset.anchor());

    std::vector<const TorsionCoset*> infinite_parts;
    for (const TorsionCoset& part : cert.closure.parts())
        if (!part.size().is_finite()) infinite_parts.push_back(&part);

    for (const TorsionCoset& part : cert.closure.parts()) {
        if (part.size().is_finite()) continue;
        for (const RawPart& r : raw) {
            if (r.coset == part) {
                cert.pieces.push_back({part, r.atom});
                break;
            }
        }
    }

    std::set<Element> isolated;
    for (const TorsionCoset& part : cert.closure.parts()) {
        if (!part.size().is_finite()) continue;
        for (const Element& pt : part.enumerate(cfg.max_enumeration)) {
            bool buried = false;
            for (const TorsionCoset* big : infinite_parts)
                if (big->contains(pt)) {
                    buried = true;
                    break;
                }
            if (!buried) isolated.insert(pt);
        }
    }
    cert.isolated.assign(isolated.begin(), isolated.end());
    return cert;
}

AlgebraicSet closure(const DescribedSet& x, const Config& cfg) {
    return closure_with_certificate(x, cfg).closure;
}

bool is_dense(const DescribedSet& x, const Config& cfg) {
    return same_set(closure(x, cfg), AlgebraicSet::whole_group(x.group()), cfg);
}

bool dense_by_multiples(const DescribedSet& x) {
    const Group& g = x.group();
    if (g->exponent() != 0)
        throw std::domain_error("the multiplication criterion applies to unbounded groups only");
    for (const SetAtom& a : x.atoms()) {
        bool survives = std::visit(
            overloaded{
                [](const FiniteAtom&) { return false; },
                [](const CosetAtom& c) { return !c.coset.is_empty() && c.coset.order() == 0; },
                [](const RoundAtom& r) { return r.gen.order_tag() == 0; },
                [](const FgSubgroupAtom& s) { return fg_has_infinite_generator(s); },
            },
            a);
        if (survives) return true;
    }
    return false;
}

std::string PotentialDensityVerdict::str() const {
    std::ostringstream os;
    os << (potentially_dense ? "potentially dense" : "not potentially dense") << ": " << note;
    return os.str();
}

PotentialDensityVerdict is_potentially_dense(const DescribedSet& x, const Config& cfg) {
    PotentialDensityVerdict v;
    v.zariski_dense = is_dense(x, cfg);
    v.potentially_dense = v.zariski_dense;
    if (v.zariski_dense)
        v.note =
            "dense for the Zariski topology; the group is countable, so a metrizable group "
            "topology realizing the density exists (build one with build_characters)";
    else
        v.note =
            "the Zariski closure is a proper closed subset and stays closed in every Hausdorff "
            "group topology, so no choice of topology makes the set dense";
    return v;
}

std::string CurveVerdict::str() const {
    std::ostringstream os;
    if (curve) {
        os << "curve of order " << round_order;
        if (base) os << " based at " << base->str();
    } else {
        os << "not a curve (order " << round_order << "): " << reason;
    }
    return os.str();
}

CurveVerdict is_curve(const DescribedSet& x, const Config& cfg) {
    if (!x.is_infinite()) throw std::domain_error("the curve test needs an infinite set");
    const Group& g = x.group();
    CurveVerdict v;
    v.round_order = least_infinite_trace(x);

    Element x0 = Element::zero(g);
    for (const SetAtom& a : x.atoms())
        if (atom_has_point(a)) {
            x0 = atom_representative(a);
            break;
        }

    if (v.round_order == 0) {
        v.curve = true;
        v.base = x0;
        v.reason = "every torsion trace is finite";
        return v;
    }

    TorsionCoset target = TorsionCoset::of(x0, v.round_order);
    AlgebraicSet cl = closure(x, cfg);
    for (const TorsionCoset& part : cl.parts()) {
        if (!part.subset_of(target)) {
            v.curve = false;
            v.reason = "not contained in a single coset of G[" + std::to_string(v.round_order) +
                       "]: closure part " + part.str() + " escapes";
            return v;
        }
    }

    for (Order d : proper_divisors(v.round_order)) {
        for (const SetAtom& a : x.atoms()) {
            if (const auto* c = std::get_if<CosetAtom>(&a)) {
                if (c->coset.is_empty()) continue;
                Order m = c->coset.order();
                Order gd = (m == 0) ? d : order_gcd(m, d);
                if (!g->torsion_subgroup(gd).is_finite()) {
                    v.curve = false;
                    v.reason = "infinite trace on the divisor level " + std::to_string(d) +
                               " through " + c->coset.str();
                    return v;
                }
            } else if (const auto* r = std::get_if<RoundAtom>(&a)) {
                Order tag = r->gen.order_tag();
                if (tag >= 1 && torsion_subgroup_contained(g, tag, d)) {
                    v.curve = false;
                    v.reason = "infinite trace on the divisor level " + std::to_string(d) +
                               " through a round part of order " + std::to_string(tag);
                    return v;
                }
            }
        }
    }

    v.curve = true;
    v.base = x0;
    return v;
}

bool valid_round_base(const DescribedSet& x, const Element& b, const Config& cfg) {
    if (!same_group(b.group(), x.group()))
        throw std::invalid_argument("base from a different group");
    const Order n = least_infinite_trace(x);
    for (const SetAtom& a : x.atoms()) {
        bool hit = std::visit(
            overloaded{
                [&](const FiniteAtom& f) {
                    for (const Element& p : f.points)
                        if (b.sub(p).in_torsion(n)) return true;
                    return false;
                },
                [&](const CosetAtom& c) {
                    if (c.coset.is_empty()) return false;
                    return c.coset.minkowski_sum(TorsionCoset::subgroup(x.group(), n)).contains(b);
                },
                [&](const RoundAtom& r) {
                    std::size_t cap = std::min<std::size_t>(r.gen.limit(), cfg.prefix_length);
                    for (std::size_t i = 0; i < cap; ++i)
                        if (b.sub(r.base.add(r.gen.at(i))).in_torsion(n)) return true;
                    return false;
                },
                [&](const FgSubgroupAtom& s) {
                    for (const Element& e : span_walk(x.group(), s, cfg.max_enumeration, false))
                        if (b.sub(e).in_torsion(n)) return true;
                    return false;
                },
            },
            a);
        if (hit) return true;
    }
    return false;
}

std::vector<SetComponent> components_of_set(const DescribedSet& x, const Config& cfg) {
    std::vector<SetComponent> out;
    for (const TorsionCoset& comp : irreducible_components(closure(x, cfg), cfg)) {
        DescribedSet trace = restrict_to(x, comp, cfg);
        if (trace.atoms().empty()) continue;  // prefix-bounded stray scan found nothing
        out.push_back({comp, std::move(trace)});
    }
    return out;
}

bool is_irreducible_set(const DescribedSet& x, const Config& cfg) {
    if (x.is_empty_description()) return false;
    return irreducible_components(closure(x, cfg), cfg).size() == 1;
}

std::vector<Element> isolated_points(const DescribedSet& x, const Config& cfg) {
    return closure_with_certificate(x, cfg).isolated;
}

DimValue dim_of_set(const DescribedSet& x, const Config& cfg) {
    AlgebraicSet cl = closure(x, cfg);
    if (cl.is_empty()) return DimValue::fin(0);
    DimValue best = DimValue::fin(0);
    for (const TorsionCoset& comp : irreducible_components(cl, cfg)) {
        DescribedSet sub = restrict_to(x, comp, cfg);
        if (sub.atoms().empty()) continue;
        best = dv_max(best, dim_of_trace(sub, comp, cfg));
    }
    return best;
}

}  // namespace zkt
