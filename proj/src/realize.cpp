#include "zkt/realize.hpp"

#include "zkt/parse.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "zkt/closed_set.hpp"
#include "zkt/generators.hpp"
#include "zkt/order.hpp"

namespace zkt {

namespace {

using u128 = unsigned __int128;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// 320-bit scratch arithmetic for the square root below.
using Limbs = std::array<std::uint64_t, 5>;

Limbs square_of(u128 f) {
    std::uint64_t lo = static_cast<std::uint64_t>(f);
    std::uint64_t hi = static_cast<std::uint64_t>(f >> 64);
    u128 ll = static_cast<u128>(lo) * lo;
    u128 lh = static_cast<u128>(lo) * hi;
    u128 hh = static_cast<u128>(hi) * hi;
    Limbs out{};
    out[0] = static_cast<std::uint64_t>(ll);
    u128 t1 = (ll >> 64) + static_cast<std::uint64_t>(lh) + static_cast<std::uint64_t>(lh);
    out[1] = static_cast<std::uint64_t>(t1);
    u128 t2 = (t1 >> 64) + (lh >> 64) + (lh >> 64) + static_cast<std::uint64_t>(hh);
    out[2] = static_cast<std::uint64_t>(t2);
    u128 t3 = (t2 >> 64) + (hh >> 64);
    out[3] = static_cast<std::uint64_t>(t3);
    out[4] = static_cast<std::uint64_t>(t3 >> 64);
    return out;
}

bool limbs_le(const Limbs& a, const Limbs& b) {
    for (int i = 4; i >= 0; --i)
        if (a[i] != b[i]) return a[i] < b[i];
    return true;
}

}  // namespace

unsigned __int128 sqrt2_fraction_bits() {
    // F = floor((sqrt(2) - 1) * 2^128), the unique F < 2^127 maximal with
    // (2^128 + F)^2 <= 2^257, i.e. F^2 <= 2^256 - F * 2^129.
    static const u128 cached = [] {
        auto feasible = [](u128 f) {
            std::uint64_t fl = static_cast<std::uint64_t>(f);
            std::uint64_t fh = static_cast<std::uint64_t>(f >> 64);
            Limbs shifted{};  // f * 2^129
            shifted[2] = fl << 1;
            shifted[3] = (fh << 1) | (fl >> 63);
            shifted[4] = fh >> 63;
            Limbs rhs{0, 0, 0, 0, 1};  // 2^256
            std::uint64_t borrow = 0;
            for (int i = 0; i < 5; ++i) {
                std::uint64_t s = shifted[i] + borrow;
                borrow = (rhs[i] < s || (borrow && shifted[i] == ~0ull)) ? 1 : 0;
                rhs[i] -= s;
            }
            if (borrow) return false;
            return limbs_le(square_of(f), rhs);
        };
        u128 lo = 0, hi = (static_cast<u128>(1) << 127) - 1;
        while (lo < hi) {
            u128 mid = lo + (hi - lo + 1) / 2;
            if (feasible(mid))
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    }();
    return cached;
}

// ---------------------------------------------------------------------------
// TorusValue

TorusValue TorusValue::add(const TorusValue& o) const {
    return {rat.add(o.rat).mod1(), fix + o.fix};
}

TorusValue TorusValue::sub(const TorusValue& o) const {
    return {rat.add(o.rat.neg()).mod1(), fix - o.fix};
}

TorusValue TorusValue::scalar_mul(std::int64_t k) const {
    return {rat.mul_int(k).mod1(), fix * static_cast<u128>(static_cast<__int128>(k))};
}

std::optional<std::uint64_t> TorusValue::grid_index(std::uint64_t n) const {
    if (!exact() || n == 0 || n % rat.den != 0) return std::nullopt;
    return static_cast<std::uint64_t>(rat.num) * (n / rat.den) % n;
}

namespace {

std::uint64_t frac64(const TorusValue& v) {
    std::uint64_t r = static_cast<std::uint64_t>(
        (static_cast<u128>(static_cast<std::uint64_t>(v.rat.num)) << 64) / v.rat.den);
    return r + static_cast<std::uint64_t>(v.fix >> 64);
}

}  // namespace

std::uint64_t TorusValue::cell(std::uint64_t cells) const {
    return static_cast<std::uint64_t>(static_cast<u128>(frac64(*this)) * cells >> 64);
}

double TorusValue::circle_distance(const TorusValue& o) const {
    std::uint64_t d = frac64(*this) - frac64(o);
    return std::ldexp(static_cast<double>(std::min(d, 0 - d)), -64);
}

std::string TorusValue::str() const {
    if (exact()) return rat.str();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8f", std::ldexp(static_cast<double>(frac64(*this)), -64));
    return buf;
}

// ---------------------------------------------------------------------------
// CharacterFamily

CharacterFamily::CharacterFamily(Group g, std::uint32_t rows, std::uint64_t seed,
                                 const Config& cfg)
    : group_(std::move(g)), rows_(rows), seed_(seed), cfg_(cfg) {
    if (rows_ == 0) throw std::invalid_argument("a character family needs at least one row");
}

std::uint64_t CharacterFamily::mix(std::uint32_t row, const Coord& c, std::uint64_t salt) const {
    std::uint64_t h = splitmix64(seed_ ^ 0x5bf03635u);
    h = splitmix64(h ^ row);
    h = splitmix64(h ^ static_cast<std::uint64_t>(c.kind));
    h = splitmix64(h ^ c.p);
    h = splitmix64(h ^ c.s);
    h = splitmix64(h ^ c.index);
    return splitmix64(h ^ salt);
}

TorusValue CharacterFamily::generator_value(std::uint32_t row, const Coord& c) const {
    switch (c.kind) {
        case SummandKind::Cyclic: {
            std::uint64_t m = pow_u64(c.p, c.s);
            return TorusValue::rational(
                Rat::of(static_cast<std::int64_t>(mix(row, c, 0) % m), m));
        }
        case SummandKind::Quasicyclic:
            return TorusValue::rational(
                Rat::of(static_cast<std::int64_t>(mix(row, c, 100) % c.p), c.p));
        case SummandKind::Free:
        case SummandKind::Rational:
            return TorusValue::irrational(sqrt2_fraction_bits() *
                                          static_cast<u128>(mix(row, c, 0) | 1));
    }
    throw std::logic_error("unreachable coordinate kind");
}

TorusValue CharacterFamily::apply(std::uint32_t row, const Element& x) const {
    TorusValue acc = TorusValue::zero();
    for (const auto& [c, v] : x.coords()) {
        switch (c.kind) {
            case SummandKind::Cyclic: {
                std::uint64_t m = pow_u64(c.p, c.s);
                std::uint64_t a = mix(row, c, 0) % m;
                std::uint64_t num =
                    static_cast<std::uint64_t>(((v.num % static_cast<std::int64_t>(m)) +
                                                static_cast<std::int64_t>(m))) % m;
                std::uint64_t val = static_cast<std::uint64_t>(static_cast<u128>(a) * num % m);
                acc = acc.add(TorusValue::rational(Rat::of(static_cast<std::int64_t>(val), m)));
                break;
            }
            case SummandKind::Quasicyclic: {
                // the p-adic digits of the character, lazily extended to the
                // depth of this coordinate value
                std::uint64_t den = v.den, digits = 0, place = 1;
                for (std::uint64_t level = 0, d = den; d > 1; d /= c.p, ++level) {
                    digits += place * (mix(row, c, 100 + level) % c.p);
                    place *= c.p;
                }
                std::uint64_t num =
                    static_cast<std::uint64_t>(((v.num % static_cast<std::int64_t>(den)) +
                                                static_cast<std::int64_t>(den))) % den;
                std::uint64_t val =
                    static_cast<std::uint64_t>(static_cast<u128>(digits) * num % den);
                acc = acc.add(TorusValue::rational(Rat::of(static_cast<std::int64_t>(val), den)));
                break;
            }
            case SummandKind::Free: {
                u128 unit = sqrt2_fraction_bits() * static_cast<u128>(mix(row, c, 0) | 1);
                acc = acc.add(TorusValue::irrational(
                    unit * static_cast<u128>(static_cast<__int128>(v.num))));
                break;
            }
            case SummandKind::Rational: {
                std::uint64_t den_cap = cfg_.rational_den;
                if (den_cap % v.den != 0)
                    throw std::domain_error("rational coordinate outside the (1/" +
                                            std::to_string(den_cap) + ")Z truncation");
                std::int64_t steps = v.num * static_cast<std::int64_t>(den_cap / v.den);
                u128 unit = sqrt2_fraction_bits() * static_cast<u128>(mix(row, c, 0) | 1);
                acc = acc.add(TorusValue::irrational(
                    unit * static_cast<u128>(static_cast<__int128>(steps))));
                break;
            }
        }
    }
    return acc;
}

std::vector<TorusValue> CharacterFamily::image(const Element& x) const {
    std::vector<TorusValue> out;
    out.reserve(rows_);
    for (std::uint32_t k = 0; k < rows_; ++k) out.push_back(apply(k, x));
    return out;
}

bool CharacterFamily::additive_on(const Element& a, const Element& b) const {
    Element sum = a.add(b);
    for (std::uint32_t k = 0; k < rows_; ++k)
        if (apply(k, a).add(apply(k, b)) != apply(k, sum)) return false;
    return true;
}

bool CharacterFamily::separates(const std::vector<Element>& pts) const {
    std::set<std::vector<TorusValue>> seen;
    for (const Element& x : pts)
        if (!seen.insert(image(x)).second) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Density verification

namespace {

std::string grid_label(std::uint64_t id, std::uint64_t per_dim, std::uint32_t k, Order n) {
    std::vector<std::uint64_t> digits(k);
    for (std::uint32_t i = 0; i < k; ++i) {
        digits[k - 1 - i] = id % per_dim;
        id /= per_dim;
    }
    std::string out = "(";
    for (std::uint32_t i = 0; i < k; ++i) {
        if (i) out += ", ";
        out += n >= 1 ? std::to_string(digits[i]) + "/" + std::to_string(n)
                      : "#" + std::to_string(digits[i]);
    }
    return out + ")";
}

}  // namespace

std::string DensityReport::str() const {
    std::ostringstream out;
    out << (pass ? "dense" : "NOT dense") << " on the "
        << (grid_order >= 1 ? "T[" + std::to_string(grid_order) + "]" : "eps") << " grid: " << hit
        << "/" << cells << " cells (covering " << covering << ", prefix " << prefix_used << ")";
    if (!worst_empty.empty()) out << ", first empty cell " << worst_empty;
    if (!note.empty()) out << "; " << note;
    return out.str();
}

DensityReport verify_density(const CharacterFamily& chi, const RoundAtom& target,
                             std::uint64_t L, double eps) {
    DensityReport rep;
    std::uint32_t k = chi.rows();
    Order n = target.gen.order_tag();
    rep.grid_order = n;

    std::uint64_t per_dim =
        n >= 1 ? n : static_cast<std::uint64_t>(std::ceil(1.0 / std::max(eps, 1e-6)));
    std::uint64_t cells = 1;
    for (std::uint32_t i = 0; i < k; ++i) cells = checked_mul(cells, per_dim);
    if (cells > 4'000'000)
        throw std::invalid_argument("density grid with " + std::to_string(cells) +
                                    " cells is beyond the configured scale");
    rep.cells = cells;

    std::vector<TorusValue> base_img = chi.image(target.base);
    std::vector<char> hit(cells, 0);
    std::uint64_t count = std::min<std::uint64_t>(L, target.gen.limit());
    rep.prefix_used = count;
    for (std::uint64_t i = 0; i < count; ++i) {
        Element x = target.base.add(target.gen.at(i));
        std::vector<TorusValue> img = chi.image(x);
        std::uint64_t id = 0;
        bool on_grid = true;
        for (std::uint32_t r = 0; r < k; ++r) {
            if (n >= 1) {
                std::optional<std::uint64_t> idx = img[r].sub(base_img[r]).grid_index(n);
                if (!idx) {
                    rep.note = "image of prefix element " + std::to_string(i) +
                               " is off the T[" + std::to_string(n) + "] grid";
                    on_grid = false;
                    break;
                }
                id = id * per_dim + *idx;
            } else {
                id = id * per_dim + img[r].cell(per_dim);
            }
        }
        if (!on_grid) return rep;  // pass stays false
        hit[id] = 1;
    }

    rep.hit = static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1));
    rep.covering = cells ? static_cast<double>(rep.hit) / static_cast<double>(cells) : 1.0;
    for (std::uint64_t id = 0; id < cells; ++id)
        if (!hit[id]) {
            rep.worst_empty = grid_label(id, per_dim, k, n);
            break;
        }
    rep.pass = rep.hit == cells;
    return rep;
}

// ---------------------------------------------------------------------------
// Character construction

namespace {

// Zero plus one unit per instantiated summand class: the points any usable
// family must at least tell apart.
std::vector<Element> probe_points(const Group& g) {
    std::vector<Element> pts = {Element::zero(g)};
    if (g->free_rank().is_positive()) pts.push_back(Element::unit(g, Coord::free(0)));
    if (g->rational_rank().is_positive()) pts.push_back(Element::unit(g, Coord::rational(0)));
    for (const auto& [p, mult] : g->quasicyclic_entries()) {
        (void)mult;
        pts.push_back(Element::unit(g, Coord::quasicyclic(p, 0)));
    }
    for (const auto& [pp, mult] : g->cyclic_entries()) {
        (void)mult;
        pts.push_back(Element::unit(g, Coord::cyclic(pp.p, pp.s, 0)));
    }
    return pts;
}

}  // namespace

CharacterBuild build_characters(const Group& g, const std::vector<RoundAtom>& targets,
                                std::uint32_t rows, const Config& cfg) {
    std::vector<Element> probe = probe_points(g);
    for (const RoundAtom& t : targets)
        if (!t.base.is_zero()) probe.push_back(t.base);

    DensityReport last_fail;
    for (std::uint32_t attempt = 0; attempt <= cfg.build_retries; ++attempt) {
        CharacterFamily chi(g, rows, cfg.seed + attempt, cfg);
        std::vector<DensityReport> reports;
        bool all = true;
        for (const RoundAtom& t : targets) {
            reports.push_back(verify_density(chi, t, cfg.realize_prefix, cfg.eps));
            if (!reports.back().pass) {
                all = false;
                last_fail = reports.back();
                break;
            }
        }
        if (!all || !chi.separates(probe)) continue;
        return CharacterBuild{std::move(chi), attempt, std::move(reports)};
    }
    throw std::runtime_error("character build exhausted " + std::to_string(cfg.build_retries) +
                             " retries; last failing target: " + last_fail.str());
}

// ---------------------------------------------------------------------------
// Closure realization

namespace {

double tuple_distance(const std::vector<TorusValue>& a, const std::vector<TorusValue>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, a[i].circle_distance(b[i]));
    return worst;
}

}  // namespace

std::string RealizeVerdict::str() const {
    std::ostringstream out;
    out << (pass ? "PASS" : "FAIL") << " (sound " << (sound ? "yes" : "no") << ", tight "
        << (tight ? "yes" : "no") << ", retries " << retries << ")";
    for (const DensityReport& r : targets) out << "\n  target: " << r.str();
    if (!note.empty()) out << "\n  " << note;
    return out.str();
}

RealizeVerdict realize_closure(const DescribedSet& x, const Config& cfg) {
    const Group& g = x.group();
    AlgebraicSet cl = closure(x, cfg);

    std::vector<RoundAtom> targets;
    for (const SetAtom& atom : x.atoms())
        if (const auto* r = std::get_if<RoundAtom>(&atom)) targets.push_back(*r);

    std::vector<Element> pool =
        x.sample(cfg.realize_prefix * std::max<std::uint64_t>(1, x.atoms().size()), cfg);

    std::vector<Element> closure_pts;
    for (const TorsionCoset& part : cl.parts())
        for (Element& y : DescribedSet::coset(part).sample(cfg.sample_points, cfg))
            closure_pts.push_back(std::move(y));

    std::vector<Element> outside;
    for (Element& z :
         DescribedSet::coset(TorsionCoset::whole_group(g)).sample(cfg.sample_points * 4, cfg)) {
        if (outside.size() >= 8) break;
        if (!cl.contains(z)) outside.push_back(std::move(z));
    }

    std::vector<Element> probe = probe_points(g);
    RealizeVerdict verdict;
    for (std::uint32_t attempt = 0; attempt <= cfg.build_retries; ++attempt) {
        CharacterFamily chi(g, cfg.chars, cfg.seed + attempt, cfg);
        verdict.sound = verdict.tight = false;
        verdict.note.clear();

        std::vector<DensityReport> reports;
        bool targets_ok = true;
        for (const RoundAtom& t : targets) {
            reports.push_back(verify_density(chi, t, cfg.realize_prefix, cfg.eps));
            targets_ok = targets_ok && reports.back().pass;
        }
        verdict.targets = std::move(reports);
        verdict.retries = attempt;
        if (!targets_ok || !chi.separates(probe)) continue;

        std::vector<std::vector<TorusValue>> imgs;
        imgs.reserve(pool.size());
        for (const Element& p : pool) imgs.push_back(chi.image(p));

        bool sound = true;
        for (const Element& y : closure_pts) {
            std::vector<TorusValue> yi = chi.image(y);
            bool near = imgs.empty();  // an empty set has an empty closure to match
            for (const auto& im : imgs)
                if (tuple_distance(yi, im) <= cfg.eps) {
                    near = true;
                    break;
                }
            if (!near) {
                sound = false;
                verdict.note = "closure sample " + print_element(y) + " has no image within eps";
                break;
            }
        }

        bool tight = true;
        for (const Element& z : outside) {
            std::vector<TorusValue> zi = chi.image(z);
            for (const auto& im : imgs)
                if (tuple_distance(zi, im) < cfg.eps) {
                    tight = false;
                    verdict.note = "outside sample " + print_element(z) + " is not separated from the image";
                    break;
                }
            if (!tight) break;
        }

        verdict.sound = sound;
        verdict.tight = tight;
        if (sound && tight) {
            verdict.pass = true;
            verdict.note = outside.empty() ? "closure covers the whole sampled group" : "";
            return verdict;
        }
    }
    if (verdict.note.empty())
        verdict.note = "retry budget exhausted before density and separation held together";
    return verdict;
}

std::string image_csv(const CharacterFamily& chi, const std::vector<Element>& pts) {
    std::ostringstream out;
    out << "element";
    for (std::uint32_t k = 0; k < chi.rows(); ++k) out << ",chi" << k + 1;
    out << "\n";
    for (const Element& x : pts) {
        out << '"' << print_element(x) << '"';
        for (const TorusValue& v : chi.image(x)) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.8f",
                          std::ldexp(static_cast<double>(frac64(v)), -64));
            out << ',' << buf;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace zkt
