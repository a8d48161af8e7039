#include "zkt/descriptor.hpp"

#include <algorithm>
#include <sstream>

namespace zkt {

GroupDescriptor GroupDescriptor::integers(Cardinal rank) {
    GroupDescriptor d;
    d.free_rank_ = rank;
    return d;
}

GroupDescriptor GroupDescriptor::rationals(Cardinal rank) {
    GroupDescriptor d;
    d.rational_rank_ = rank;
    return d;
}

GroupDescriptor GroupDescriptor::quasicyclic(std::uint64_t p, Cardinal mult) {
    if (!is_prime_u64(p)) throw std::invalid_argument("quasicyclic summand needs a prime");
    GroupDescriptor d;
    if (mult.is_positive()) d.quasicyclic_[p] = mult;
    return d;
}

GroupDescriptor GroupDescriptor::cyclic(std::uint64_t n, Cardinal mult) {
    if (n == 0) throw std::invalid_argument("Z(0) is not a cyclic torsion summand");
    GroupDescriptor d;
    if (n == 1 || !mult.is_positive()) return d;
    for (auto& [p, s] : factorize(n)) d.cyclic_[{p, s}] = mult;
    return d;
}

GroupDescriptor GroupDescriptor::cyclic_prime_power(std::uint64_t p, std::uint32_t s, Cardinal mult) {
    if (!is_prime_u64(p) || s == 0) throw std::invalid_argument("bad prime power summand");
    GroupDescriptor d;
    if (mult.is_positive()) d.cyclic_[{p, s}] = mult;
    return d;
}

GroupDescriptor GroupDescriptor::direct_sum(const GroupDescriptor& o) const {
    GroupDescriptor d = *this;
    d.free_rank_ += o.free_rank_;
    d.rational_rank_ += o.rational_rank_;
    for (auto& [p, m] : o.quasicyclic_) d.quasicyclic_[p] += m;
    for (auto& [ps, m] : o.cyclic_) d.cyclic_[ps] += m;
    d.prune();
    return d;
}

void GroupDescriptor::prune() {
    std::erase_if(quasicyclic_, [](auto& kv) { return kv.second.is_zero(); });
    std::erase_if(cyclic_, [](auto& kv) { return kv.second.is_zero(); });
}

Cardinal GroupDescriptor::quasicyclic_multiplicity(std::uint64_t p) const {
    auto it = quasicyclic_.find(p);
    return it == quasicyclic_.end() ? Cardinal::fin(0) : it->second;
}

Cardinal GroupDescriptor::cyclic_multiplicity(std::uint64_t p, std::uint32_t s) const {
    auto it = cyclic_.find({p, s});
    return it == cyclic_.end() ? Cardinal::fin(0) : it->second;
}

bool GroupDescriptor::is_trivial() const {
    return free_rank_.is_zero() && rational_rank_.is_zero() && quasicyclic_.empty() &&
           cyclic_.empty();
}

bool GroupDescriptor::is_finite() const {
    if (free_rank_.is_positive() || rational_rank_.is_positive()) return false;
    if (!quasicyclic_.empty()) return false;  // Z(p^inf) is infinite
    for (auto& [ps, m] : cyclic_)
        if (!m.is_finite()) return false;
    return true;
}

bool GroupDescriptor::is_bounded() const {
    if (free_rank_.is_positive() || rational_rank_.is_positive()) return false;
    return quasicyclic_.empty();
}

std::uint64_t GroupDescriptor::finite_order() const {
    if (!is_finite()) throw std::logic_error("finite_order() on an infinite descriptor");
    std::uint64_t n = 1;
    for (auto& [ps, m] : cyclic_) {
        std::uint64_t q = pow_u64(ps.p, ps.s);
        for (std::uint64_t i = 0; i < m.finite_value(); ++i) n = checked_mul(n, q);
        if (n > (1ull << 62)) throw std::overflow_error("finite_order too large");
    }
    return n;
}

Order GroupDescriptor::exponent() const {
    if (!is_bounded()) return kUnbounded;
    Order e = 1;
    for (auto& [ps, m] : cyclic_) {
        (void)m;
        e = order_lcm(e, pow_u64(ps.p, ps.s));
    }
    return e;
}

Order GroupDescriptor::essential_order() const {
    if (!is_bounded()) return kUnbounded;
    // Product over primes of p^{s_p}, s_p the largest power with infinite
    // multiplicity (contributing nothing when all multiplicities at p are finite).
    std::map<std::uint64_t, std::uint32_t> top;
    for (auto& [ps, m] : cyclic_)
        if (!m.is_finite()) top[ps.p] = std::max(top[ps.p], ps.s);
    Order eo = 1;
    for (auto& [p, s] : top) eo = checked_mul(eo, pow_u64(p, s));
    return eo;
}

GroupDescriptor GroupDescriptor::torsion_subgroup(Order n) const {
    if (n == 0) return *this;
    GroupDescriptor t;
    for (auto& [p, m] : quasicyclic_) {
        std::uint32_t v = valuation(p, n);
        if (v > 0) t.cyclic_[{p, v}] += m;
    }
    for (auto& [ps, m] : cyclic_) {
        std::uint32_t v = valuation(ps.p, n);
        std::uint32_t e = std::min(ps.s, v);
        if (e > 0) t.cyclic_[{ps.p, e}] += m;
    }
    t.prune();
    return t;
}

GroupDescriptor GroupDescriptor::multiplied_by(Order n) const {
    if (n == 0) throw std::invalid_argument("multiplied_by: n must be >= 1");
    GroupDescriptor r;
    r.free_rank_ = free_rank_;          // nZ is again Z
    r.rational_rank_ = rational_rank_;  // nQ = Q
    r.quasicyclic_ = quasicyclic_;      // nZ(p^inf) = Z(p^inf)
    for (auto& [ps, m] : cyclic_) {
        std::uint32_t v = valuation(ps.p, n);
        if (v >= ps.s) continue;  // summand killed
        r.cyclic_[{ps.p, ps.s - v}] += m;
    }
    r.prune();
    return r;
}

Order GroupDescriptor::canonical_torsion_order(Order m) const {
    return torsion_subgroup(m).exponent();
}

std::optional<std::pair<std::uint32_t, Cardinal>> GroupDescriptor::leading_invariant(
    std::uint64_t p) const {
    std::optional<std::pair<std::uint32_t, Cardinal>> best;
    for (auto& [ps, m] : cyclic_)
        if (ps.p == p && (!best || ps.s > best->first)) best = {ps.s, m};
    return best;
}

GroupDescriptor::IrreducibilityCertificate GroupDescriptor::torsion_irreducibility(Order n) const {
    if (canonical_torsion_order(n) != n)
        throw std::invalid_argument("torsion_irreducibility: order " + std::to_string(n) +
                                    " is not canonical (exponent of G[n] is " +
                                    std::to_string(canonical_torsion_order(n)) + ")");
    IrreducibilityCertificate cert;
    cert.order = n;
    if (n == 0) {
        // Canonical 0 means the group is unbounded; the whole group is the
        // irreducible component of 0.
        cert.irreducible = true;
        if (free_rank_.is_positive()) cert.unbounded_witness = "free summand Z";
        else if (rational_rank_.is_positive()) cert.unbounded_witness = "divisible summand Q";
        else cert.unbounded_witness = "quasicyclic summand Zp(" +
                                      std::to_string(quasicyclic_.begin()->first) + ",inf)";
        return cert;
    }
    if (n == 1) {  // the singleton {0}
        cert.irreducible = true;
        return cert;
    }
    GroupDescriptor t = torsion_subgroup(n);
    cert.irreducible = true;
    for (auto& [p, v] : factorize(n)) {
        (void)v;
        auto lead = t.leading_invariant(p);
        LeadingInvariantReport rep;
        rep.p = p;
        if (lead) {
            rep.s = lead->first;
            rep.multiplicity = lead->second;
            rep.infinite_ok = !lead->second.is_finite();
        }
        if (!rep.infinite_ok) cert.irreducible = false;
        cert.leading.push_back(rep);
    }
    // Equivalent formulation: eo(G[n]) == n.
    if (t.essential_order() != n) cert.irreducible = false;
    return cert;
}

bool GroupDescriptor::almost_torsion_free() const {
    // G[p] infinite iff some cyclic entry at p has infinite multiplicity or a
    // quasicyclic summand at p has infinite multiplicity.
    for (auto& [ps, m] : cyclic_)
        if (!m.is_finite()) return false;
    for (auto& [p, m] : quasicyclic_)
        if (!m.is_finite()) return false;
    return true;
}

bool GroupDescriptor::cofinite_zariski() const {
    if (almost_torsion_free()) return true;
    Order e = exponent();
    return e != 0 && is_prime_u64(e);
}

std::string GroupDescriptor::str() const {
    std::ostringstream os;
    bool first = true;
    auto sep = [&] {
        if (!first) os << " + ";
        first = false;
    };
    auto mult = [&](Cardinal m) {
        if (m == Cardinal::fin(1)) return std::string();
        return "^" + m.str();
    };
    if (free_rank_.is_positive()) { sep(); os << "Z" << mult(free_rank_); }
    if (rational_rank_.is_positive()) { sep(); os << "Q" << mult(rational_rank_); }
    for (auto& [p, m] : quasicyclic_) { sep(); os << "Zp(" << p << ",inf)" << mult(m); }
    for (auto& [ps, m] : cyclic_) {
        sep();
        os << "Z(" << pow_u64(ps.p, ps.s) << ")" << mult(m);
    }
    if (first) os << "Z(1)";
    return os.str();
}

}  // namespace zkt
