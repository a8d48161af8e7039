#include "zkt/closed_set.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace zkt {

std::vector<TorsionCoset> canonicalize_parts(std::vector<TorsionCoset> parts) {
    std::erase_if(parts, [](const TorsionCoset& c) { return c.is_empty(); });
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    std::vector<TorsionCoset> out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        bool absorbed = false;
        for (std::size_t j = 0; j < parts.size() && !absorbed; ++j)
            if (i != j && parts[i].subset_of(parts[j]) && !(parts[j] == parts[i]))
                absorbed = true;
        if (!absorbed) out.push_back(parts[i]);
    }
    return out;
}

AlgebraicSet::AlgebraicSet(Group g, std::vector<TorsionCoset> parts)
    : group_(std::move(g)), parts_(canonicalize_parts(std::move(parts))) {}

AlgebraicSet AlgebraicSet::whole_group(Group g) {
    std::vector<TorsionCoset> p{TorsionCoset::whole_group(g)};
    return AlgebraicSet(std::move(g), std::move(p));
}

bool AlgebraicSet::contains(const Element& x) const {
    for (auto& p : parts_)
        if (p.contains(x)) return true;
    return false;
}

bool AlgebraicSet::part_of(const AlgebraicSet& other) const {
    for (auto& p : parts_) {
        bool inside = false;
        for (auto& q : other.parts_)
            if (p.subset_of(q)) { inside = true; break; }
        if (!inside) return false;
    }
    return true;
}

AlgebraicSet AlgebraicSet::union_with(const AlgebraicSet& other) const {
    std::vector<TorsionCoset> all = parts_;
    all.insert(all.end(), other.parts_.begin(), other.parts_.end());
    return AlgebraicSet(group_, std::move(all));
}

AlgebraicSet AlgebraicSet::intersect(const AlgebraicSet& other) const {
    std::vector<TorsionCoset> out;
    for (auto& p : parts_)
        for (auto& q : other.parts_) out.push_back(p.intersect(q));
    return AlgebraicSet(group_, std::move(out));
}

AlgebraicSet AlgebraicSet::minkowski_sum(const AlgebraicSet& other) const {
    if (is_empty() || other.is_empty())
        throw std::invalid_argument("minkowski_sum: empty operand");
    std::vector<TorsionCoset> out;
    for (auto& p : parts_)
        for (auto& q : other.parts_) out.push_back(p.minkowski_sum(q));
    return AlgebraicSet(group_, std::move(out));
}

AlgebraicSet AlgebraicSet::translate(const Element& t) const {
    std::vector<TorsionCoset> out;
    for (auto& p : parts_) out.push_back(p.translate(t));
    return AlgebraicSet(group_, std::move(out));
}

AlgebraicSet AlgebraicSet::negate() const {
    std::vector<TorsionCoset> out;
    for (auto& p : parts_) out.push_back(p.negate());
    return AlgebraicSet(group_, std::move(out));
}

AlgebraicSet AlgebraicSet::preimage_mul(std::int64_t k) const {
    std::vector<TorsionCoset> out;
    for (auto& p : parts_) out.push_back(p.preimage_mul(k));
    return AlgebraicSet(group_, std::move(out));
}

std::string AlgebraicSet::str() const {
    if (parts_.empty()) return "Empty";
    std::ostringstream os;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (i) os << " | ";
        os << parts_[i].str();
    }
    return os.str();
}

std::vector<Element> torsion_transversal(const Group& g, Order sub, Order super,
                                         std::uint64_t cap) {
    Order n = g->canonical_torsion_order(sub);
    Order m = g->canonical_torsion_order(super);
    if (!torsion_subgroup_contained(g, n, m))
        throw std::invalid_argument("torsion_transversal: G[sub] not inside G[super]");
    std::vector<Element> reps{Element::zero(g)};
    if (n == m) return reps;
    // m == 0 would force n == 0 above, so here 1 <= m and n | m.
    struct Pos { Coord c; std::uint64_t step_num; std::uint64_t step_den; std::uint64_t count; };
    std::vector<Pos> positions;
    std::uint64_t total = 1;
    for (auto& [ps, mult] : g->cyclic_entries()) {
        std::uint32_t em = std::min(ps.s, valuation(ps.p, m));
        std::uint32_t en = std::min(ps.s, valuation(ps.p, n));
        if (em <= en) continue;
        std::uint64_t q = pow_u64(ps.p, em - en);
        if (!mult.is_finite())
            throw std::out_of_range("torsion_transversal: infinite index at Z(" +
                                    std::to_string(pow_u64(ps.p, ps.s)) + ") summands");
        for (std::uint64_t i = 0; i < mult.finite_value(); ++i) {
            positions.push_back({Coord::cyclic(ps.p, ps.s, i), pow_u64(ps.p, ps.s - em), 1, q});
            total = checked_mul(total, q);
        }
    }
    for (auto& [p, mult] : g->quasicyclic_entries()) {
        std::uint32_t vm = valuation(p, m);
        std::uint32_t vn = valuation(p, n);
        if (vm <= vn) continue;
        std::uint64_t q = pow_u64(p, vm - vn);
        if (!mult.is_finite())
            throw std::out_of_range("torsion_transversal: infinite index at Zp(" +
                                    std::to_string(p) + ",inf) summands");
        for (std::uint64_t i = 0; i < mult.finite_value(); ++i) {
            positions.push_back({Coord::quasicyclic(p, i), 1, pow_u64(p, vm), q});
            total = checked_mul(total, q);
        }
    }
    if (total > cap)
        throw std::out_of_range("torsion_transversal: index " + std::to_string(total) +
                                " exceeds cap " + std::to_string(cap) +
                                " (raise max_transversal to proceed)");
    for (auto& pos : positions) {
        std::vector<Element> next;
        next.reserve(reps.size() * pos.count);
        for (std::uint64_t t = 0; t < pos.count; ++t) {
            Element delta(g);
            if (pos.c.kind == SummandKind::Cyclic)
                delta.set(pos.c, Rat::of(static_cast<std::int64_t>(t * pos.step_num)));
            else
                delta.set(pos.c, Rat::of(static_cast<std::int64_t>(t), pos.step_den));
            for (auto& e : reps) next.push_back(e.add(delta));
        }
        reps = std::move(next);
    }
    return reps;
}

std::vector<TorsionCoset> irreducible_components_of_coset(const TorsionCoset& part,
                                                          const Config& cfg) {
    if (part.is_empty()) return {};
    const Group& g = part.group();
    Order m = part.order();
    Order eo = g->torsion_subgroup(m).essential_order();
    if (eo == m) return {part};
    std::vector<TorsionCoset> out;
    for (auto& t : torsion_transversal(g, eo, m, cfg.max_transversal))
        out.push_back(TorsionCoset::of(part.anchor().add(t), eo));
    return out;
}

std::vector<TorsionCoset> irreducible_components(const AlgebraicSet& a, const Config& cfg) {
    std::vector<TorsionCoset> all;
    for (auto& p : a.parts()) {
        auto comps = irreducible_components_of_coset(p, cfg);
        all.insert(all.end(), comps.begin(), comps.end());
    }
    return canonicalize_parts(std::move(all));
}

std::vector<AlgebraicSet> connected_components(const AlgebraicSet& a, const Config& cfg) {
    auto comps = irreducible_components(a, cfg);
    std::vector<std::size_t> parent(comps.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < comps.size(); ++i)
        for (std::size_t j = i + 1; j < comps.size(); ++j)
            if (!comps[i].intersect(comps[j]).is_empty()) parent[find(i)] = find(j);
    std::map<std::size_t, std::vector<TorsionCoset>> buckets;
    for (std::size_t i = 0; i < comps.size(); ++i) buckets[find(i)].push_back(comps[i]);
    std::vector<AlgebraicSet> out;
    for (auto& [root, members] : buckets) {
        (void)root;
        out.emplace_back(a.group(), std::move(members));
    }
    std::sort(out.begin(), out.end(), [](const AlgebraicSet& x, const AlgebraicSet& y) {
        return x.parts() < y.parts();
    });
    return out;
}

bool is_connected(const AlgebraicSet& a, const Config& cfg) {
    return connected_components(a, cfg).size() <= 1;
}

bool is_irreducible(const AlgebraicSet& a, const Config& cfg) {
    return irreducible_components(a, cfg).size() == 1;
}

bool same_set(const AlgebraicSet& a, const AlgebraicSet& b, const Config& cfg) {
    if (a == b) return true;
    return irreducible_components(a, cfg) == irreducible_components(b, cfg);
}

DimValue dim_of_irreducible_order(const Group& g, Order n) {
    if (n != 0) return DimValue::fin(prime_factor_count(n));
    // Chains below the whole unbounded group: an infinite ladder exists exactly
    // when some quasicyclic multiplicity is infinite; otherwise the longest
    // torsion chain climbs one prime power at a time through the infinite
    // cyclic multiplicities, plus the final step to G itself.
    for (auto& [p, m] : g->quasicyclic_entries()) {
        (void)p;
        if (!m.is_finite()) return DimValue::inf();
    }
    std::map<std::uint64_t, std::uint32_t> top;
    for (auto& [ps, m] : g->cyclic_entries())
        if (!m.is_finite()) top[ps.p] = std::max(top[ps.p], ps.s);
    std::uint64_t steps = 0;
    for (auto& [p, s] : top) { (void)p; steps += s; }
    return DimValue::fin(steps + 1);
}

DimValue dim(const AlgebraicSet& a) {
    // Every irreducible component of a part a+G[m] is a coset of G[eo(G[m])],
    // so the maximum is over part essential orders; no transversal is needed.
    DimValue best = DimValue::fin(0);
    for (auto& p : a.parts()) {
        Order eo = a.group()->torsion_subgroup(p.order()).essential_order();
        DimValue d = dim_of_irreducible_order(a.group(), eo);
        if (d.infinite) return d;
        if (!best.infinite && d.value > best.value) best = d;
    }
    return best;
}

}  // namespace zkt
