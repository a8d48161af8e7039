#include "zkt/generators.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace zkt {

namespace {

std::int64_t checked_i64(std::uint64_t v, const char* what) {
    if (v > static_cast<std::uint64_t>(INT64_MAX))
        throw std::overflow_error(std::string(what) + ": value exceeds int64");
    return static_cast<std::int64_t>(v);
}

}  // namespace

RoundGenerator RoundGenerator::user(Group g, Order order_tag,
                                    std::vector<Element> elems) {
    if (order_tag == 1)
        throw std::domain_error("round(1) is empty: G[1] = {0} has no infinite subset");
    RoundGenerator out;
    out.group_ = std::move(g);
    out.order_tag_ = out.group_->canonical_torsion_order(order_tag);
    out.base_tag_ = out.order_tag_;
    out.kind_ = RoundKind::UserSequence;
    out.user_elems_ = std::move(elems);
    return out;
}

std::size_t RoundGenerator::limit() const {
    if (kind_ == RoundKind::UserSequence) return user_elems_.size();
    if (kind_ == RoundKind::GreedyEscape) {
        // Depth i+1 requires the exact denominator p^(i+1) in 64-bit range.
        std::size_t depth = 0;
        for (std::uint64_t v = tower_p_; v <= (UINT64_MAX >> 2) / tower_p_; v *= tower_p_)
            ++depth;
        return depth > tower_offset_ ? depth - tower_offset_ : 0;
    }
    return SIZE_MAX;
}

Element RoundGenerator::unscaled_at(std::size_t i) const {
    switch (kind_) {
        case RoundKind::UserSequence:
            return user_elems_.at(i);
        case RoundKind::GreedyEscape: {
            // 1/p, 1/p^2, ... — depth grows, so d kills only finitely many.
            const std::uint64_t den = pow_u64(tower_p_, static_cast<std::uint32_t>(i + 1));
            return Element::zero(group_).with(Coord::quasicyclic(tower_p_, 0),
                                              Rat::of(1, den));
        }
        case RoundKind::CanonicalBasis: {
            if (zero_path_ == ZeroPath::FreeLadder)
                return Element::zero(group_).with(Coord::free(0),
                                                  Rat::of(checked_i64(i + 1, "ladder")));
            if (zero_path_ == ZeroPath::RationalLadder)
                return Element::zero(group_).with(Coord::rational(0),
                                                  Rat::of(checked_i64(i + 1, "ladder")));
            Element e = Element::zero(group_);
            for (const auto& src : sources_) {
                if (src.from_quasicyclic) {
                    e.set(Coord::quasicyclic(src.p, i),
                          Rat::of(1, pow_u64(src.p, src.target)));
                } else {
                    const auto step = pow_u64(src.p, src.s - src.target);
                    e.set(Coord::cyclic(src.p, src.s, i),
                          Rat::of(checked_i64(step, "basis step")));
                }
            }
            return e;
        }
    }
    throw std::logic_error("unreachable generator kind");
}

Element RoundGenerator::at(std::size_t i) const {
    Element e = unscaled_at(i + tower_offset_);
    return scale_ == 1 ? e : e.scalar_mul(scale_);
}

std::vector<Element> RoundGenerator::prefix(std::size_t L) const {
    L = std::min(L, limit());
    std::vector<Element> out;
    out.reserve(L);
    for (std::size_t i = 0; i < L; ++i) out.push_back(at(i));
    return out;
}

RoundGenerator RoundGenerator::scaled(std::int64_t k) const {
    if (k == 0)
        throw std::domain_error("scaling a round sequence by 0 collapses it to {0}");
    RoundGenerator out = *this;
    out.scale_ = scale_ * k;  // |scale| stays small in practice
    const std::uint64_t mag =
        out.scale_ < 0 ? static_cast<std::uint64_t>(-(out.scale_ + 1)) + 1
                       : static_cast<std::uint64_t>(out.scale_);
    if (base_tag_ >= 2) {
        const Order g = order_gcd(base_tag_, mag);
        out.order_tag_ = base_tag_ / g;
        if (out.order_tag_ == 1)
            throw std::domain_error(
                "scaling by a multiple of the order tag collapses the sequence to {0}");
    } else if (base_tag_ == 0) {
        out.order_tag_ = 0;
        if (kind_ == RoundKind::GreedyEscape)
            out.tower_offset_ = static_cast<std::size_t>(valuation(tower_p_, mag));
    } else {
        // User sequence with torsion tag handled above via base_tag_ >= 2;
        // base_tag_ == 1 never constructed.
        out.order_tag_ = base_tag_;
    }
    if (kind_ == RoundKind::UserSequence) {
        // Materialize so emitted elements match the new tag immediately.
        for (auto& e : out.user_elems_) e = e.scalar_mul(k);
        out.scale_ = 1;
        out.base_tag_ = out.order_tag_;
    }
    return out;
}

std::size_t RoundGenerator::structural_bound(Order d) const {
    if (kind_ == RoundKind::GreedyEscape && d != 0)
        return std::max<std::size_t>(1, valuation(tower_p_, d));
    return 1;
}

bool operator==(const RoundGenerator& a, const RoundGenerator& b) {
    return same_group(a.group_, b.group_) && a.order_tag_ == b.order_tag_ &&
           a.kind_ == b.kind_ && a.scale_ == b.scale_ &&
           a.sources_ == b.sources_ && a.base_tag_ == b.base_tag_ &&
           a.zero_path_ == b.zero_path_ && a.tower_p_ == b.tower_p_ &&
           a.tower_offset_ == b.tower_offset_ && a.user_elems_ == b.user_elems_;
}

std::string RoundGenerator::str() const {
    std::string s;
    switch (kind_) {
        case RoundKind::CanonicalBasis: s = "basis"; break;
        case RoundKind::GreedyEscape: s = "tower"; break;
        case RoundKind::UserSequence: s = "seq[" + std::to_string(user_elems_.size()) + "]"; break;
    }
    s += "(" + std::to_string(order_tag_) + ")";
    if (scale_ != 1) s = std::to_string(scale_) + "*" + s;
    return s;
}

RoundGenerator make_round(const Group& g, Order n) {
    if (n == 1)
        throw std::domain_error("round(1) is empty: G[1] = {0} has no infinite subset");

    RoundGenerator out;
    out.group_ = g;
    out.scale_ = 1;

    if (n == 0) {
        if (g->exponent() != 0) {
            const auto eo = g->essential_order();
            throw std::domain_error("no 0-round subset: group is bounded (eo(G[0]) = " +
                                    std::to_string(eo) + ", need 0)");
        }
        out.order_tag_ = 0;
        out.base_tag_ = 0;
        if (g->free_rank().is_positive()) {
            out.kind_ = RoundKind::CanonicalBasis;
            out.zero_path_ = RoundGenerator::ZeroPath::FreeLadder;
        } else if (g->rational_rank().is_positive()) {
            out.kind_ = RoundKind::CanonicalBasis;
            out.zero_path_ = RoundGenerator::ZeroPath::RationalLadder;
        } else {
            // Unbounded with no free/rational part means a Prüfer summand.
            out.kind_ = RoundKind::GreedyEscape;
            out.tower_p_ = g->quasicyclic_entries().begin()->first;
        }
        return out;
    }

    // n >= 2: assemble one independent-supply source per prime of n.
    const Order canon = g->canonical_torsion_order(n);
    const auto h = g->torsion_subgroup(n);
    const Order eo = h.essential_order();
    if (canon != n || eo != n) {
        std::string msg = "no " + std::to_string(n) + "-round subset: eo(G[" +
                          std::to_string(n) + "]) = " + std::to_string(eo) +
                          ", need " + std::to_string(n);
        for (const auto& [p, a] : factorize(n)) {
            // Report the best available supply at this prime.
            std::uint32_t best_s = 0;
            Cardinal best = Cardinal::fin(0);
            for (const auto& [ps, m] : g->cyclic_entries())
                if (ps.p == p && ps.s >= a && m >= best) { best = m; best_s = ps.s; }
            const Cardinal quasi = g->quasicyclic_multiplicity(p);
            if (!quasi.is_finite()) continue;
            if (best_s == 0 || best.is_finite())
                msg += "; at p=" + std::to_string(p) + " the level-" + std::to_string(a) +
                       " supply has multiplicity " +
                       (best_s == 0 ? std::string("0") : best.str());
        }
        throw std::domain_error(msg);
    }
    out.kind_ = RoundKind::CanonicalBasis;
    out.order_tag_ = n;
    out.base_tag_ = n;
    for (const auto& [p, a] : factorize(n)) {
        RoundGenerator::PrimeSource src{p, a, false, 0};
        bool found = false;
        for (const auto& [ps, m] : g->cyclic_entries()) {
            if (ps.p == p && ps.s >= a && !m.is_finite()) {
                src.s = ps.s;
                found = true;
                break;  // entries are ordered, so this is the smallest level
            }
        }
        if (!found && !g->quasicyclic_multiplicity(p).is_finite()) {
            src.from_quasicyclic = true;
            found = true;
        }
        if (!found)
            throw std::logic_error("essential order check let a bad prime through");
        out.sources_.push_back(src);
    }
    return out;
}

std::string RoundCertificate::str() const {
    std::string s = certified ? "certified" : "refuted";
    s += " order_tag=" + std::to_string(order_tag);
    s += " prefix=" + std::to_string(prefix_checked);
    s += " max_count=" + std::to_string(max_count);
    if (structural) s += " (structural)";
    if (refutation) {
        s += ": " + refutation->reason;
        if (refutation->divisor) s += " at d=" + std::to_string(refutation->divisor);
    }
    return s;
}

RoundCertificate certify_round(const RoundGenerator& gen, std::size_t L,
                               const Config& cfg) {
    RoundCertificate cert;
    cert.order_tag = gen.order_tag();
    cert.structural = gen.structural();
    cert.count_bound = cfg.count_bound;

    L = std::min(L, gen.limit());
    cert.prefix_checked = L;
    if (L == 0) {
        cert.refutation = RoundRefutation{"empty prefix: a round set is infinite", 0, {}, {}};
        return cert;
    }
    const auto pre = gen.prefix(L);
    for (std::size_t i = 0; i < pre.size(); ++i)
        if (!pre[i].in_torsion(gen.order_tag()))
            throw std::invalid_argument("generator emits element outside G[" +
                                        std::to_string(gen.order_tag()) + "] at index " +
                                        std::to_string(i) + ": " + pre[i].str());

    std::vector<Order> divisors;
    if (gen.order_tag() == 0) {
        for (Order d = 1; d <= cfg.zero_divisor_window; ++d) divisors.push_back(d);
    } else {
        divisors = proper_divisors(gen.order_tag());
    }
    cert.divisors_checked = divisors;

    for (Order d : divisors) {
        const std::size_t bound =
            d == 1 ? 1
                   : (gen.structural() ? gen.structural_bound(d) : cfg.count_bound);
        std::map<Element, std::vector<std::size_t>> hits;
        for (std::size_t i = 0; i < pre.size(); ++i)
            hits[pre[i].scalar_mul(static_cast<std::int64_t>(d))].push_back(i);
        for (auto& [value, idx] : hits) {
            cert.max_count = std::max(cert.max_count, idx.size());
            if (idx.size() > bound) {
                cert.refutation = RoundRefutation{
                    d == 1 ? "injectivity failure: repeated elements"
                           : "collision count " + std::to_string(idx.size()) +
                                 " exceeds bound " + std::to_string(bound),
                    d, value, idx};
                return cert;
            }
        }
    }
    cert.certified = true;
    return cert;
}

SplitResult split_trim(const RoundGenerator& gen, std::size_t L, const Config& cfg) {
    (void)cfg;
    L = std::min(L, gen.limit());
    std::size_t consumed = 0, skipped = 0;
    std::vector<Element> a, b;
    std::set<Element> diffs;  // values b_j - a_i already spoken for

    auto try_add = [&](const Element& s, std::vector<Element>& mine,
                       const std::vector<Element>& other, bool mine_is_first) {
        std::vector<Element> fresh;
        fresh.reserve(other.size());
        for (const auto& o : other) {
            // Keep the difference oriented second-minus-first.
            Element d = mine_is_first ? o.sub(s) : s.sub(o);
            if (diffs.count(d)) return false;
            fresh.push_back(std::move(d));
        }
        // Also guard against duplicate differences created by this insertion.
        std::set<Element> local(fresh.begin(), fresh.end());
        if (local.size() != fresh.size()) return false;
        for (auto& d : fresh) diffs.insert(std::move(d));
        mine.push_back(s);
        return true;
    };

    for (std::size_t i = 0; i < L; ++i) {
        const Element s = gen.at(i);
        ++consumed;
        const bool first_smaller = a.size() <= b.size();
        if (first_smaller ? try_add(s, a, b, true) : try_add(s, b, a, false)) continue;
        if (first_smaller ? try_add(s, b, a, false) : try_add(s, a, b, true)) continue;
        ++skipped;
    }
    const std::size_t cross = diffs.empty() ? 0 : 1;
    return SplitResult{RoundGenerator::user(gen.group(), gen.order_tag(), std::move(a)),
                       RoundGenerator::user(gen.group(), gen.order_tag(), std::move(b)),
                       consumed, skipped, cross};
}

}  // namespace zkt
