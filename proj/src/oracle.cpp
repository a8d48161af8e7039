#include "zkt/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "zkt/closed_set.hpp"
#include "zkt/described_set.hpp"
#include "zkt/generators.hpp"
#include "zkt/order.hpp"

namespace zkt {

namespace {

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void fail(OracleReport& rep, std::string msg) {
    ++rep.mismatches;
    if (rep.failures.size() < 8) rep.failures.push_back(std::move(msg));
}

void check(OracleReport& rep, bool ok, const std::function<std::string()>& msg) {
    ++rep.checks;
    if (!ok) fail(rep, msg());
}

std::string tuple_str(const FiniteGroupInstance::Tuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(t[i]);
    }
    return out + ")";
}

}  // namespace

std::string OracleReport::str() const {
    std::ostringstream out;
    out << suite << ": " << (ok() ? "ok" : "FAILED") << " (" << cases << " cases, " << checks
        << " checks, " << mismatches << " mismatches, " << seconds << "s)";
    for (const std::string& f : failures) out << "\n  " << f;
    return out.str();
}

// ---------------------------------------------------------------------------
// FiniteGroupInstance

FiniteGroupInstance::FiniteGroupInstance(std::vector<std::uint64_t> moduli,
                                         std::vector<bool> marked)
    : moduli_(std::move(moduli)), marked_(std::move(marked)) {
    if (marked_.size() != moduli_.size())
        throw std::invalid_argument("instance: one mark per component");
    std::map<std::pair<std::uint64_t, std::uint32_t>, std::uint64_t> next_index;
    slots_.reserve(moduli_.size());
    for (std::uint64_t m : moduli_) {
        if (m < 2) throw std::invalid_argument("instance moduli must be >= 2");
        std::vector<Slot> comp;
        for (auto [p, s] : factorize(m)) comp.push_back({p, s, next_index[{p, s}]++});
        slots_.push_back(std::move(comp));
    }
}

FiniteGroupInstance FiniteGroupInstance::truncation(const Group& g, std::size_t copies) {
    if (!g->is_bounded() || g->free_rank().is_positive() || g->rational_rank().is_positive())
        throw std::invalid_argument("finite instances need bounded torsion descriptors");
    std::vector<std::uint64_t> moduli;
    std::vector<bool> marked;
    for (const auto& [pp, mult] : g->cyclic_entries()) {
        std::uint64_t count = mult.is_finite() ? mult.finite_value() : copies;
        for (std::uint64_t i = 0; i < count; ++i) {
            moduli.push_back(pow_u64(pp.p, pp.s));
            marked.push_back(!mult.is_finite());
        }
    }
    return FiniteGroupInstance(std::move(moduli), std::move(marked));
}

std::uint64_t FiniteGroupInstance::size() const {
    std::uint64_t n = 1;
    for (std::uint64_t m : moduli_) n = checked_mul(n, m);
    return n;
}

std::uint64_t FiniteGroupInstance::exponent() const {
    std::uint64_t e = 1;
    for (std::uint64_t m : moduli_) e = order_lcm(e, m);
    return e;
}

FiniteGroupInstance::Tuple FiniteGroupInstance::add(const Tuple& a, const Tuple& b) const {
    Tuple out(moduli_.size());
    for (std::size_t i = 0; i < moduli_.size(); ++i) out[i] = (a[i] + b[i]) % moduli_[i];
    return out;
}

FiniteGroupInstance::Tuple FiniteGroupInstance::neg(const Tuple& a) const {
    Tuple out(moduli_.size());
    for (std::size_t i = 0; i < moduli_.size(); ++i) out[i] = (moduli_[i] - a[i]) % moduli_[i];
    return out;
}

FiniteGroupInstance::Tuple FiniteGroupInstance::mul(std::uint64_t k, const Tuple& a) const {
    Tuple out(moduli_.size());
    for (std::size_t i = 0; i < moduli_.size(); ++i) out[i] = (k % moduli_[i]) * a[i] % moduli_[i];
    return out;
}

std::uint64_t FiniteGroupInstance::order_of(const Tuple& a) const {
    std::uint64_t o = 1;
    for (std::size_t i = 0; i < moduli_.size(); ++i)
        o = order_lcm(o, moduli_[i] / std::gcd(moduli_[i], a[i]));
    return o;
}

std::vector<FiniteGroupInstance::Tuple> FiniteGroupInstance::elements() const {
    if (size() > (1u << 20)) throw std::length_error("instance too large to enumerate");
    std::vector<Tuple> out;
    out.reserve(size());
    Tuple cur = zero();
    for (;;) {
        out.push_back(cur);
        std::size_t i = 0;
        while (i < moduli_.size() && ++cur[i] == moduli_[i]) cur[i++] = 0;
        if (i == moduli_.size()) break;
    }
    return out;
}

std::vector<FiniteGroupInstance::Tuple> FiniteGroupInstance::torsion_level(Order n) const {
    std::vector<Tuple> out;
    for (Tuple& x : elements()) {
        bool zero_mul = n == 0 ? true : std::ranges::all_of(mul(n, x), [](std::uint64_t v) {
            return v == 0;
        });
        if (zero_mul) out.push_back(std::move(x));
    }
    return out;
}

std::uint64_t FiniteGroupInstance::definitional_essential_order(
    const std::vector<Tuple>& subset) const {
    std::uint64_t stop = 1;
    for (std::size_t i = 0; i < moduli_.size(); ++i)
        if (marked_[i]) stop = order_lcm(stop, moduli_[i]);
    for (std::uint64_t t = 1; t <= stop; ++t) {
        bool kills = true;
        for (const Tuple& x : subset) {
            for (std::size_t i = 0; kills && i < moduli_.size(); ++i)
                if (marked_[i] && t * x[i] % moduli_[i] != 0) kills = false;
            if (!kills) break;
        }
        if (kills) return t;
    }
    throw std::logic_error("definitional essential order search failed");
}

Group FiniteGroupInstance::descriptor() const {
    GroupDescriptor d = GroupDescriptor::trivial();
    for (std::uint64_t m : moduli_) d = d.direct_sum(GroupDescriptor::cyclic(m));
    return make_group(std::move(d));
}

Element FiniteGroupInstance::to_element(const Group& g, const Tuple& t) const {
    Element e = Element::zero(g);
    for (std::size_t i = 0; i < moduli_.size(); ++i)
        for (const Slot& slot : slots_[i]) {
            std::uint64_t r = t[i] % pow_u64(slot.p, slot.s);
            if (r) e.set(Coord::cyclic(slot.p, slot.s, slot.index), Rat::of(static_cast<std::int64_t>(r)));
        }
    return e;
}

// ---------------------------------------------------------------------------
// Coset algebra versus enumeration

namespace {

using Tuple = FiniteGroupInstance::Tuple;
using TupleSet = std::set<Tuple>;

// All multisets of prime powers with product <= cap, as non-decreasing lists.
void enumerate_moduli(std::uint64_t cap, const std::vector<std::uint64_t>& pps, std::size_t from,
                      std::vector<std::uint64_t>& cur, std::vector<std::vector<std::uint64_t>>& out) {
    out.push_back(cur);
    for (std::size_t i = from; i < pps.size(); ++i) {
        if (pps[i] > cap) break;
        cur.push_back(pps[i]);
        enumerate_moduli(cap / pps[i], pps, i, cur, out);
        cur.pop_back();
    }
}

std::vector<std::vector<std::uint64_t>> all_finite_groups(std::uint64_t max_order) {
    std::vector<std::uint64_t> pps;
    for (std::uint64_t q = 2; q <= max_order; ++q) {
        auto f = factorize(q);
        if (f.size() == 1) pps.push_back(q);
    }
    std::vector<std::vector<std::uint64_t>> out;
    std::vector<std::uint64_t> cur;
    enumerate_moduli(max_order, pps, 0, cur, out);
    return out;
}

struct CosetCase {
    TorsionCoset sym;
    TupleSet raw;
};

}  // namespace

OracleReport check_coset_lemmas(std::uint64_t max_order, const Config& cfg) {
    Stopwatch clock;
    OracleReport rep;
    rep.suite = "coset-lemmas";

    for (const auto& moduli : all_finite_groups(max_order)) {
        ++rep.cases;
        FiniteGroupInstance inst(moduli, std::vector<bool>(moduli.size(), false));
        Group g = inst.descriptor();
        std::vector<Tuple> all = inst.elements();
        std::map<Tuple, Element> elem_of;
        for (const Tuple& x : all) elem_of.emplace(x, inst.to_element(g, x));
        std::string gname = g->str();

        auto project = [&](const TorsionCoset& c) {
            TupleSet out;
            for (const Tuple& x : all)
                if (c.contains(elem_of.at(x))) out.insert(x);
            return out;
        };

        // one symbolic + raw coset per class, per torsion level
        std::vector<CosetCase> cosets;
        for (Order n : divisors(inst.exponent())) {
            std::vector<Tuple> level = inst.torsion_level(n);
            TupleSet covered;
            for (const Tuple& a : all) {
                if (covered.contains(a)) continue;
                TupleSet raw;
                for (const Tuple& h : level) raw.insert(inst.add(a, h));
                covered.insert(raw.begin(), raw.end());
                cosets.push_back({TorsionCoset::of(elem_of.at(a), n), std::move(raw)});
            }
        }
        for (const CosetCase& c : cosets) {
            // negation
            TupleSet raw_neg;
            for (const Tuple& x : c.raw) raw_neg.insert(inst.neg(x));
            check(rep, project(c.sym.negate()) == raw_neg,
                  [&] { return gname + ": negate mismatch on " + c.sym.str(); });

            // translation
            std::size_t stride = all.size() <= 16 ? 1 : all.size() / 8;
            for (std::size_t ti = 0; ti < all.size(); ti += stride) {
                const Tuple& t = all[ti];
                TupleSet raw_tr;
                for (const Tuple& x : c.raw) raw_tr.insert(inst.add(x, t));
                check(rep, project(c.sym.translate(elem_of.at(t))) == raw_tr, [&] {
                    return gname + ": translate by " + tuple_str(t) + " mismatch on " + c.sym.str();
                });
            }

            // multiplication preimages
            for (std::int64_t k = -2; k <= static_cast<std::int64_t>(inst.exponent()) + 1; ++k) {
                TupleSet raw_pre;
                for (const Tuple& x : all) {
                    Tuple kx = k < 0 ? inst.neg(inst.mul(static_cast<std::uint64_t>(-k), x))
                                     : inst.mul(static_cast<std::uint64_t>(k), x);
                    if (c.raw.contains(kx)) raw_pre.insert(x);
                }
                check(rep, project(c.sym.preimage_mul(k)) == raw_pre, [&] {
                    return gname + ": preimage_mul(" + std::to_string(k) + ") mismatch on " +
                           c.sym.str();
                });
            }
        }

        for (const CosetCase& a : cosets)
            for (const CosetCase& b : cosets) {
                check(rep, a.sym.subset_of(b.sym) == std::ranges::includes(b.raw, a.raw), [&] {
                    return gname + ": subset mismatch " + a.sym.str() + " vs " + b.sym.str();
                });
                check(rep, (a.sym == b.sym) == (a.raw == b.raw), [&] {
                    return gname + ": equality mismatch " + a.sym.str() + " vs " + b.sym.str();
                });

                TupleSet raw_meet;
                std::ranges::set_intersection(a.raw, b.raw,
                                              std::inserter(raw_meet, raw_meet.end()));
                check(rep, project(a.sym.intersect(b.sym)) == raw_meet, [&] {
                    return gname + ": intersection mismatch " + a.sym.str() + " vs " + b.sym.str();
                });

                TupleSet raw_sum;
                for (const Tuple& x : a.raw)
                    for (const Tuple& y : b.raw) raw_sum.insert(inst.add(x, y));
                check(rep, project(a.sym.minkowski_sum(b.sym)) == raw_sum, [&] {
                    return gname + ": Minkowski mismatch " + a.sym.str() + " vs " + b.sym.str();
                });
            }
    }

    (void)cfg;
    rep.seconds = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// Decomposition versus brute force

namespace {

// Raw trace of a + G[n] on the instance, by instance arithmetic only.
TupleSet raw_coset_trace(const FiniteGroupInstance& inst, const std::vector<Tuple>& all,
                         const Tuple& anchor, Order n) {
    TupleSet out;
    for (const Tuple& x : all) {
        Tuple diff = inst.add(x, inst.neg(anchor));
        bool inside = n == 0 || std::ranges::all_of(inst.mul(n, diff),
                                                    [](std::uint64_t v) { return v == 0; });
        if (inside) out.insert(x);
    }
    return out;
}

// Maximal definitionally irreducible instance cosets inside F.
std::set<TupleSet> brute_components(const FiniteGroupInstance& inst, const TupleSet& F) {
    std::set<TupleSet> candidates;
    for (Order n : divisors(inst.exponent())) {
        std::vector<Tuple> level = inst.torsion_level(n);
        std::uint64_t level_exp = 1;
        for (const Tuple& h : level) level_exp = order_lcm(level_exp, inst.order_of(h));
        if (level_exp != inst.definitional_essential_order(level)) continue;
        TupleSet covered;
        for (const Tuple& a : F) {
            if (covered.contains(a)) continue;
            TupleSet coset;
            for (const Tuple& h : level) coset.insert(inst.add(a, h));
            covered.insert(coset.begin(), coset.end());
            if (std::ranges::includes(F, coset)) candidates.insert(std::move(coset));
        }
    }
    std::set<TupleSet> maximal;
    for (const TupleSet& c : candidates) {
        bool dominated = std::ranges::any_of(candidates, [&](const TupleSet& d) {
            return d.size() > c.size() && std::ranges::includes(d, c);
        });
        if (!dominated) maximal.insert(c);
    }
    return maximal;
}

}  // namespace

OracleReport check_decomposition(std::uint64_t cases_per_group, std::size_t copies,
                                 const Config& cfg) {
    Stopwatch clock;
    OracleReport rep;
    rep.suite = "decomposition";

    std::vector<Group> groups = {
        make_group(GroupDescriptor::cyclic(6, Cardinal::omega())),
        make_group(GroupDescriptor::cyclic(4, Cardinal::omega())),
        make_group(GroupDescriptor::cyclic(2, Cardinal::omega())
                       .direct_sum(GroupDescriptor::cyclic(4))),
    };

    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const Group& g = groups[gi];
        FiniteGroupInstance inst = FiniteGroupInstance::truncation(g, copies);
        std::vector<Tuple> all = inst.elements();
        std::vector<Order> orders = divisors(inst.exponent());
        std::mt19937_64 rng(cfg.seed * 1000003 + gi);

        for (std::uint64_t cs = 0; cs < cases_per_group; ++cs) {
            ++rep.cases;
            std::size_t nparts = 1 + rng() % 3;
            std::vector<TorsionCoset> parts;
            TupleSet F;
            for (std::size_t i = 0; i < nparts; ++i) {
                Order n = rng() % 8 == 0 ? 0 : orders[rng() % orders.size()];
                const Tuple& a = all[rng() % all.size()];
                parts.push_back(TorsionCoset::of(inst.to_element(g, a), n));
                TupleSet trace = raw_coset_trace(inst, all, a, n);
                F.insert(trace.begin(), trace.end());
            }

            AlgebraicSet alg(g, parts);
            std::set<TupleSet> symbolic;
            for (const TorsionCoset& comp : irreducible_components(alg, cfg)) {
                TupleSet proj;
                for (const Tuple& x : all)
                    if (comp.contains(inst.to_element(g, x))) proj.insert(x);
                symbolic.insert(std::move(proj));
            }

            check(rep, symbolic == brute_components(inst, F), [&] {
                return g->str() + " case " + std::to_string(cs) + ": components differ on " +
                       alg.str();
            });
        }
    }

    rep.seconds = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// Round prefixes by independent counting

OracleReport check_round_prefixes(const Config& cfg) {
    Stopwatch clock;
    OracleReport rep;
    rep.suite = "round-prefixes";

    struct Case {
        Group g;
        Order n;
    };
    std::vector<Case> good = {
        {make_group(GroupDescriptor::integers()), 0},
        {make_group(GroupDescriptor::cyclic(2, Cardinal::omega())), 2},
        {make_group(GroupDescriptor::cyclic(3, Cardinal::omega())), 3},
        {make_group(GroupDescriptor::cyclic(4, Cardinal::omega())), 4},
        {make_group(GroupDescriptor::cyclic(6, Cardinal::omega())), 6},
    };

    for (const Case& c : good) {
        ++rep.cases;
        RoundGenerator gen = make_round(c.g, c.n);
        std::vector<Element> pre = gen.prefix(cfg.prefix_length);

        std::vector<Order> probes;
        if (c.n == 0)
            for (Order d = 1; d <= cfg.zero_divisor_window; ++d) probes.push_back(d);
        else
            probes = proper_divisors(c.n);

        for (Order d : probes) {
            std::map<Element, std::uint64_t> seen;
            std::uint64_t worst = 0;
            for (const Element& x : pre)
                worst = std::max(worst, ++seen[x.scalar_mul(static_cast<std::int64_t>(d))]);
            check(rep, worst <= 1, [&] {
                return c.g->str() + " round(" + std::to_string(c.n) + "): " +
                       std::to_string(worst) + " prefix elements collide at level " +
                       std::to_string(d);
            });
        }
    }

    // make_round must reject exactly the orders the torsion levels cannot carry
    std::vector<Case> bad = {
        {make_group(GroupDescriptor::cyclic(2, Cardinal::omega())), 4},
        {make_group(GroupDescriptor::cyclic(2, Cardinal::omega())
                        .direct_sum(GroupDescriptor::cyclic(4))),
         4},
        {make_group(GroupDescriptor::cyclic(4, Cardinal::omega())), 8},
        {make_group(GroupDescriptor::cyclic(3, Cardinal::omega())), 2},
        {make_group(GroupDescriptor::cyclic(4, Cardinal::omega())), 0},
        {make_group(GroupDescriptor::cyclic(12)), 12},
        {make_group(GroupDescriptor::integers()), 2},
    };
    for (const Case& c : bad) {
        ++rep.cases;
        bool threw = false;
        try {
            make_round(c.g, c.n);
        } catch (const std::domain_error&) {
            threw = true;
        }
        check(rep, threw, [&] {
            return c.g->str() + " round(" + std::to_string(c.n) +
                   ") was accepted despite the level having smaller essential order";
        });
    }
    std::vector<Case> accepted = {
        {make_group(GroupDescriptor::cyclic(4, Cardinal::omega())), 2},
        {make_group(GroupDescriptor::integers()
                        .direct_sum(GroupDescriptor::cyclic(4, Cardinal::omega()))),
         0},
    };
    for (const Case& c : accepted) {
        ++rep.cases;
        bool threw = false;
        try {
            make_round(c.g, c.n);
        } catch (const std::domain_error&) {
            threw = true;
        }
        check(rep, !threw, [&] {
            return c.g->str() + " round(" + std::to_string(c.n) + ") was rejected";
        });
    }

    rep.seconds = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// Dimension versus chain search

namespace {

// Longest strictly-dividing chain inside divisors(n), counted in edges.
std::uint64_t longest_divisor_chain(Order n) {
    std::vector<Order> ds = divisors(n);
    std::map<Order, std::uint64_t> best;
    for (Order d : ds) {  // divisors() is sorted, so smaller entries are done first
        std::uint64_t b = 0;
        for (Order e : ds)
            if (e < d && d % e == 0) b = std::max(b, best[e] + 1);
        best[d] = b;
    }
    return best[n];
}

}  // namespace

OracleReport check_dim_chains(const Config& cfg) {
    Stopwatch clock;
    OracleReport rep;
    rep.suite = "dimension-chains";
    (void)cfg;

    // Ω(n) versus literal chain search in the divisor lattice
    for (Order n : {1ull, 2ull, 4ull, 6ull, 12ull, 8ull, 36ull, 60ull}) {
        check(rep, longest_divisor_chain(n) == prime_factor_count(n), [&] {
            return "divisor chain length disagrees with prime factor count at " +
                   std::to_string(n);
        });
    }
    // coset-lattice bound: a strict chain never exceeds the divisor count
    check(rep, longest_divisor_chain(12) + 1 == 4 && divisors(12).size() == 6,
          [&] { return std::string("frozen chain facts for 12 changed"); });

    std::vector<Group> catalog = {
        make_group(GroupDescriptor::integers()),
        make_group(GroupDescriptor::cyclic(12)),
        make_group(GroupDescriptor::cyclic(4, Cardinal::omega())),
        make_group(GroupDescriptor::cyclic(3, Cardinal::omega())),
        make_group(GroupDescriptor::cyclic(6, Cardinal::omega())),
        make_group(GroupDescriptor::cyclic(2, Cardinal::omega())
                       .direct_sum(GroupDescriptor::cyclic(4))),
        make_group(GroupDescriptor::integers()
                       .direct_sum(GroupDescriptor::cyclic(4, Cardinal::omega()))),
        make_group(GroupDescriptor::quasicyclic(2)),
        make_group(GroupDescriptor::quasicyclic(2, Cardinal::omega())),
    };

    for (const Group& g : catalog) {
        ++rep.cases;
        DimValue computed = dim(AlgebraicSet::whole_group(g));

        // candidate orders: prime powers present, probed a little past any
        // quasicyclic level, plus 0 when the group is unbounded
        Order probe = 1;
        for (const auto& [pp, mult] : g->cyclic_entries()) {
            (void)mult;
            probe = order_lcm(probe, pow_u64(pp.p, pp.s));
        }
        for (const auto& [p, mult] : g->quasicyclic_entries()) {
            (void)mult;
            probe = order_lcm(probe, pow_u64(p, 3));
        }
        std::vector<Order> nodes;
        for (Order d : divisors(probe))
            if (g->canonical_torsion_order(d) == d && g->torsion_irreducibility(d).irreducible)
                nodes.push_back(d);
        if (!g->is_bounded() && g->torsion_irreducibility(0).irreducible) nodes.push_back(0);

        // longest chain of strict containments G[n_0] < G[n_1] < ...
        auto properly_inside = [&](Order a, Order b) {
            return torsion_subgroup_contained(g, a, b) && !torsion_subgroup_contained(g, b, a);
        };
        std::map<Order, std::uint64_t> best;
        std::function<std::uint64_t(Order)> longest = [&](Order top) {
            if (auto it = best.find(top); it != best.end()) return it->second;
            std::uint64_t b = 0;
            for (Order below : nodes)
                if (properly_inside(below, top)) b = std::max(b, longest(below) + 1);
            return best[top] = b;
        };
        std::uint64_t found = 0;
        for (Order top : nodes) found = std::max(found, longest(top));

        if (computed.infinite) {
            check(rep, found >= 4, [&] {
                return g->str() + ": dimension reported infinite but the chain search only found " +
                       std::to_string(found) + " strict steps";
            });
        } else {
            check(rep, found == computed.value, [&] {
                return g->str() + ": dimension " + computed.str() + " but chain search found " +
                       std::to_string(found);
            });
        }
    }

    rep.seconds = clock.seconds();
    return rep;
}

// ---------------------------------------------------------------------------
// Closure laws

namespace {

Element random_element(const Group& g, std::mt19937_64& rng) {
    std::vector<Coord> menu;
    if (g->free_rank().is_positive()) {
        std::uint64_t r = g->free_rank().is_finite() ? g->free_rank().finite_value() : 2;
        for (std::uint64_t i = 0; i < std::min<std::uint64_t>(r, 2); ++i)
            menu.push_back(Coord::free(i));
    }
    for (const auto& [pp, mult] : g->cyclic_entries()) {
        std::uint64_t m = mult.is_finite() ? mult.finite_value() : 3;
        for (std::uint64_t i = 0; i < std::min<std::uint64_t>(m, 3); ++i)
            menu.push_back(Coord::cyclic(pp.p, pp.s, i));
    }
    for (const auto& [p, mult] : g->quasicyclic_entries()) {
        std::uint64_t m = mult.is_finite() ? mult.finite_value() : 2;
        for (std::uint64_t i = 0; i < std::min<std::uint64_t>(m, 2); ++i)
            menu.push_back(Coord::quasicyclic(p, i));
    }
    Element e = Element::zero(g);
    if (menu.empty()) return e;
    std::size_t picks = rng() % 4;
    for (std::size_t i = 0; i < picks; ++i) {
        const Coord& c = menu[rng() % menu.size()];
        switch (c.kind) {
            case SummandKind::Free:
                e.set(c, Rat::of(static_cast<std::int64_t>(rng() % 7) - 3));
                break;
            case SummandKind::Cyclic: {
                std::uint64_t m = pow_u64(c.p, c.s);
                e.set(c, Rat::of(static_cast<std::int64_t>(rng() % m)));
                break;
            }
            case SummandKind::Quasicyclic: {
                std::uint64_t den = pow_u64(c.p, 1 + rng() % 2);
                e.set(c, Rat::of(static_cast<std::int64_t>(1 + rng() % (den - 1)), den));
                break;
            }
            case SummandKind::Rational:
                e.set(c, Rat::of(static_cast<std::int64_t>(rng() % 5) - 2, 1 + rng() % 3));
                break;
        }
    }
    return e;
}

DescribedSet random_described_set(const Group& g, const std::vector<Order>& coset_orders,
                                  Order round_tag, std::mt19937_64& rng, const Config& cfg) {
    std::vector<SetAtom> atoms;
    std::size_t natoms = 1 + rng() % 3;
    for (std::size_t i = 0; i < natoms; ++i) {
        switch (rng() % 4) {
            case 0: {
                std::vector<Element> pts;
                std::size_t np = 1 + rng() % 3;
                for (std::size_t j = 0; j < np; ++j) pts.push_back(random_element(g, rng));
                atoms.push_back(FiniteAtom{std::move(pts)});
                break;
            }
            case 1: {
                Order n = coset_orders[rng() % coset_orders.size()];
                atoms.push_back(CosetAtom{TorsionCoset::of(random_element(g, rng), n)});
                break;
            }
            case 2:
                atoms.push_back(RoundAtom{random_element(g, rng), make_round(g, round_tag)});
                break;
            default: {
                std::vector<Element> gens;
                std::size_t ng = 1 + rng() % 2;
                for (std::size_t j = 0; j < ng; ++j) gens.push_back(random_element(g, rng));
                atoms.push_back(FgSubgroupAtom{random_element(g, rng), std::move(gens)});
                break;
            }
        }
    }
    (void)cfg;
    return DescribedSet(g, std::move(atoms));
}

}  // namespace

OracleReport check_closure_laws(std::uint64_t cases, const Config& cfg) {
    Stopwatch clock;
    OracleReport rep;
    rep.suite = "closure-laws";

    struct Scene {
        Group g;
        std::vector<Order> coset_orders;
        Order round_tag;
    };
    std::vector<Scene> scenes = {
        {make_group(GroupDescriptor::cyclic(4, Cardinal::omega())), {1, 2, 4}, 4},
        {make_group(GroupDescriptor::cyclic(6, Cardinal::omega())), {1, 2, 3, 6}, 6},
        {make_group(GroupDescriptor::integers()
                        .direct_sum(GroupDescriptor::cyclic(4, Cardinal::omega()))),
         {1, 2, 4, 0},
         0},
        {make_group(GroupDescriptor::integers()), {1, 0}, 0},
    };

    std::mt19937_64 rng(cfg.seed + 1);
    for (std::uint64_t cs = 0; cs < cases; ++cs) {
        ++rep.cases;
        const Scene& sc = scenes[cs % scenes.size()];
        DescribedSet x = random_described_set(sc.g, sc.coset_orders, sc.round_tag, rng, cfg);
        Element t = random_element(sc.g, rng);
        AlgebraicSet moved = closure(x.translate(t), cfg);
        AlgebraicSet shifted = closure(x, cfg).translate(t);
        check(rep, moved == shifted, [&] {
            return sc.g->str() + ": closure does not commute with translation by " + t.str() +
                   " on " + x.str();
        });
    }

    // Minkowski sums of algebraic sets against instance arithmetic
    std::vector<Group> sum_groups = {
        make_group(GroupDescriptor::cyclic(6, Cardinal::omega())),
        make_group(GroupDescriptor::cyclic(4, Cardinal::omega())),
        make_group(GroupDescriptor::cyclic(2, Cardinal::omega())
                       .direct_sum(GroupDescriptor::cyclic(4))),
    };
    for (std::uint64_t cs = 0; cs < cases; ++cs) {
        ++rep.cases;
        const Group& g = sum_groups[cs % sum_groups.size()];
        FiniteGroupInstance inst = FiniteGroupInstance::truncation(g, 2);
        std::vector<Tuple> all = inst.elements();
        std::vector<Order> orders = divisors(inst.exponent());

        auto random_alg = [&] {
            std::vector<TorsionCoset> parts;
            std::vector<TupleSet> raws;
            std::size_t np = 1 + rng() % 2;
            for (std::size_t i = 0; i < np; ++i) {
                Order n = orders[rng() % orders.size()];
                const Tuple& a = all[rng() % all.size()];
                parts.push_back(TorsionCoset::of(inst.to_element(g, a), n));
                raws.push_back(raw_coset_trace(inst, all, a, n));
            }
            TupleSet raw;
            for (TupleSet& r : raws) raw.insert(r.begin(), r.end());
            return std::pair{AlgebraicSet(g, std::move(parts)), std::move(raw)};
        };
        auto [A, rawA] = random_alg();
        auto [B, rawB] = random_alg();
        AlgebraicSet C = A.minkowski_sum(B);

        TupleSet raw_sum;
        for (const Tuple& x : rawA)
            for (const Tuple& y : rawB) raw_sum.insert(inst.add(x, y));
        TupleSet proj;
        for (const Tuple& x : all)
            if (C.contains(inst.to_element(g, x))) proj.insert(x);
        check(rep, raw_sum == proj, [&] {
            return g->str() + ": Minkowski sum of algebraic sets disagrees with enumeration on " +
                   A.str() + " plus " + B.str();
        });
    }

    rep.seconds = clock.seconds();
    return rep;
}

std::vector<OracleReport> run_all_oracles(const Config& cfg) {
    return {
        check_coset_lemmas(64, cfg),
        check_decomposition(80, 2, cfg),
        check_round_prefixes(cfg),
        check_dim_chains(cfg),
        check_closure_laws(100, cfg),
    };
}

}  // namespace zkt
