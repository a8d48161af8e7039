#include "zkt/parse.hpp"

#include <cctype>
#include <cstdint>
#include <limits>
#include <sstream>
#include <utility>

#include "zkt/order.hpp"

namespace zkt {
namespace {

enum class Tok {
    Int, Name, Plus, Minus, Star, Slash, Caret,
    LParen, RParen, LBrack, RBrack, LBrace, RBrace,
    Comma, Bar, At, End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::uint64_t value = 0;
    std::size_t pos = 0;
};

std::vector<Token> lex(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        Token t;
        t.pos = i;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::uint64_t v = 0;
            while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
                const std::uint64_t d = static_cast<std::uint64_t>(text[i] - '0');
                if (v > (std::numeric_limits<std::uint64_t>::max() - d) / 10)
                    throw ParseError("integer literal too large", t.pos);
                v = v * 10 + d;
                ++i;
            }
            t.kind = Tok::Int;
            t.value = v;
            t.text = std::string(text.substr(t.pos, i - t.pos));
            out.push_back(std::move(t));
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            while (i < n && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                ++i;
            t.kind = Tok::Name;
            t.text = std::string(text.substr(t.pos, i - t.pos));
            out.push_back(std::move(t));
            continue;
        }
        switch (c) {
            case '+': t.kind = Tok::Plus; break;
            case '-': t.kind = Tok::Minus; break;
            case '*': t.kind = Tok::Star; break;
            case '/': t.kind = Tok::Slash; break;
            case '^': t.kind = Tok::Caret; break;
            case '(': t.kind = Tok::LParen; break;
            case ')': t.kind = Tok::RParen; break;
            case '[': t.kind = Tok::LBrack; break;
            case ']': t.kind = Tok::RBrack; break;
            case '{': t.kind = Tok::LBrace; break;
            case '}': t.kind = Tok::RBrace; break;
            case ',': t.kind = Tok::Comma; break;
            case '|': t.kind = Tok::Bar; break;
            case '@': t.kind = Tok::At; break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", i);
        }
        t.text = std::string(1, c);
        ++i;
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.pos = n;
    out.push_back(std::move(end));
    return out;
}

// e<int>, e<int>_<int>
bool unit_shaped(const std::string& name) {
    if (name.size() < 2 || name[0] != 'e' || !std::isdigit(static_cast<unsigned char>(name[1])))
        return false;
    std::size_t i = 1;
    while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) ++i;
    if (i == name.size()) return true;
    if (name[i] != '_') return false;
    ++i;
    if (i == name.size()) return false;
    while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) ++i;
    return i == name.size();
}

std::int64_t to_signed(std::uint64_t v, std::size_t pos) {
    if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        throw SemanticError("integer too large for a coefficient", pos);
    return static_cast<std::int64_t>(v);
}

struct Parser {
    std::vector<Token> toks;
    std::size_t i = 0;

    explicit Parser(std::string_view text) : toks(lex(text)) {}

    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t j = i + ahead;
        return j < toks.size() ? toks[j] : toks.back();
    }
    bool at(Tok k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
    Token take() { return toks[std::min(i++, toks.size() - 1)]; }
    bool accept(Tok k) {
        if (!at(k)) return false;
        ++i;
        return true;
    }
    Token expect(Tok k, const std::string& what) {
        if (!at(k)) throw ParseError("expected " + what, peek().pos);
        return take();
    }
    void expect_end() {
        if (!at(Tok::End)) throw ParseError("unexpected trailing input", peek().pos);
    }

    // ---- groups ----

    GroupDescriptor group() {
        GroupDescriptor d = group_term();
        while (accept(Tok::Plus)) d = d.direct_sum(group_term());
        return d;
    }

    GroupDescriptor group_term() {
        const Token base = expect(Tok::Name, "a group summand (Z, Q, Z(n) or Zp(p,inf))");
        if (base.text == "Q") return GroupDescriptor::rationals(multiplicity());
        if (base.text == "Z") {
            if (accept(Tok::LParen)) {
                const Token n = expect(Tok::Int, "a cyclic order");
                expect(Tok::RParen, "')'");
                if (n.value == 0) throw SemanticError("Z(0) is not a group", n.pos);
                return GroupDescriptor::cyclic(n.value, multiplicity());
            }
            return GroupDescriptor::integers(multiplicity());
        }
        if (base.text == "Zp") {
            expect(Tok::LParen, "'('");
            const Token p = expect(Tok::Int, "a prime");
            if (!is_prime_u64(p.value))
                throw SemanticError(std::to_string(p.value) + " is not prime", p.pos);
            expect(Tok::Comma, "','");
            const Token inf = expect(Tok::Name, "'inf'");
            if (inf.text != "inf") throw ParseError("expected 'inf'", inf.pos);
            expect(Tok::RParen, "')'");
            return GroupDescriptor::quasicyclic(p.value, multiplicity());
        }
        throw ParseError("unknown group summand '" + base.text + "'", base.pos);
    }

    Cardinal multiplicity() {
        if (!accept(Tok::Caret)) return Cardinal::fin(1);
        if (at(Tok::Int)) return Cardinal::fin(take().value);
        if (at(Tok::Name) && peek().text == "w") {
            take();
            return Cardinal::omega();
        }
        throw ParseError("expected a multiplicity (integer or w)", peek().pos);
    }

    // ---- elements ----

    // Next tokens begin an element term: a unit, a coefficient, or a literal 0.
    bool eterm_ahead(std::size_t ahead = 0) const {
        if (at(Tok::Name, ahead)) return unit_shaped(peek(ahead).text);
        if (!at(Tok::Int, ahead)) return false;
        if (at(Tok::Star, ahead + 1)) return at(Tok::Name, ahead + 2) && unit_shaped(peek(ahead + 2).text);
        if (at(Tok::Slash, ahead + 1)) return true;
        return peek(ahead).value == 0;  // literal zero term
    }

    Element element(const Group& g, bool embedded) {
        const std::vector<SummandClass> classes = summand_classes(*g);
        Element acc = Element::zero(g);
        bool negative = accept(Tok::Minus);
        acc = acc.add(eterm(g, classes, negative));
        while (at(Tok::Plus) || at(Tok::Minus)) {
            const bool minus = at(Tok::Minus);
            // In a set expression '+' may continue with a set atom instead.
            if (embedded && !minus && !eterm_ahead(1)) break;
            take();
            acc = acc.add(eterm(g, classes, minus));
        }
        return acc;
    }

    Element eterm(const Group& g, const std::vector<SummandClass>& classes, bool negative) {
        std::int64_t num = negative ? -1 : 1;
        std::uint64_t den = 1;
        bool have_coeff = false;
        if (at(Tok::Int)) {
            const Token c = take();
            num = negative ? -to_signed(c.value, c.pos) : to_signed(c.value, c.pos);
            have_coeff = true;
            if (accept(Tok::Slash)) {
                const Token d = expect(Tok::Int, "a denominator");
                if (d.value == 0) throw SemanticError("zero denominator", d.pos);
                den = d.value;
            }
            if (!at(Tok::Star)) {
                if (c.value == 0 && den == 1) return Element::zero(g);  // literal 0
                throw ParseError("expected '*' between coefficient and unit", peek().pos);
            }
            take();
        }
        const Token u = expect(Tok::Name, "a unit e<k>");
        if (!unit_shaped(u.text)) throw ParseError("expected a unit e<k>", u.pos);
        std::uint64_t cls = 0;
        std::uint64_t copy = 0;
        {
            std::size_t j = 1;
            while (j < u.text.size() && std::isdigit(static_cast<unsigned char>(u.text[j])))
                cls = cls * 10 + static_cast<std::uint64_t>(u.text[j++] - '0');
            if (j < u.text.size()) {  // '_' copy suffix
                ++j;
                while (j < u.text.size())
                    copy = copy * 10 + static_cast<std::uint64_t>(u.text[j++] - '0');
            }
        }
        std::optional<std::uint32_t> depth;
        if (accept(Tok::At)) {
            const Token d = expect(Tok::Int, "a depth");
            if (d.value == 0) throw SemanticError("depth must be at least 1", d.pos);
            if (d.value > 1000) throw SemanticError("depth out of range", d.pos);
            depth = static_cast<std::uint32_t>(d.value);
        }
        if (cls >= classes.size())
            throw SemanticError("group has " + std::to_string(classes.size()) +
                                    " summand classes, unit asks for class " + std::to_string(cls),
                                u.pos);
        const SummandClass& sc = classes[cls];
        if (sc.mult.is_finite() && copy >= sc.mult.finite_value())
            throw SemanticError("copy index " + std::to_string(copy) + " outside multiplicity " +
                                    sc.mult.str() + " of class " + std::to_string(cls),
                                u.pos);
        if (depth && sc.kind != SummandKind::Quasicyclic)
            throw SemanticError("@depth only applies to quasicyclic summands", u.pos);
        if (den != 1 && sc.kind != SummandKind::Rational)
            throw SemanticError("fractional coefficients only apply to Q summands", u.pos);
        (void)have_coeff;
        Rat value;
        try {
            switch (sc.kind) {
                case SummandKind::Free:
                case SummandKind::Cyclic: value = Rat::of(num); break;
                case SummandKind::Rational: value = Rat::of(num, den); break;
                case SummandKind::Quasicyclic:
                    value = Rat::of(num, pow_u64(sc.p, depth.value_or(1)));
                    break;
            }
            return Element::zero(g).with(class_coord(sc, copy), value);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw SemanticError(e.what(), u.pos);
        }
    }

    // ---- sets ----

    DescribedSet set(const Group& g, const SetEnv& env, const Config& cfg) {
        DescribedSet acc = set_term(g, env, cfg);
        while (accept(Tok::Bar)) acc = acc.union_with(set_term(g, env, cfg));
        return acc;
    }

    bool element_ahead() const {
        if (at(Tok::Minus)) return eterm_ahead(1);
        if (at(Tok::Int) && peek().value == 0 && at(Tok::Plus, 1)) return true;
        if (at(Tok::Int)) {
            if (at(Tok::Star, 1)) return at(Tok::Name, 2) && unit_shaped(peek(2).text);
            return at(Tok::Slash, 1);
        }
        return at(Tok::Name) && unit_shaped(peek().text);
    }

    DescribedSet set_term(const Group& g, const SetEnv& env, const Config& cfg) {
        if (element_ahead()) {
            const std::size_t at_pos = peek().pos;
            const Element t = element(g, /*embedded=*/true);
            expect(Tok::Plus, "'+' (a bare element is not a set; write {...} for points)");
            DescribedSet body = set_factor(g, env, cfg);
            try {
                return body.translate(t);
            } catch (const std::exception& e) {
                throw SemanticError(e.what(), at_pos);
            }
        }
        return set_factor(g, env, cfg);
    }

    DescribedSet set_factor(const Group& g, const SetEnv& env, const Config& cfg) {
        std::optional<std::int64_t> scale;
        std::size_t scale_pos = peek().pos;
        if (at(Tok::Minus) && at(Tok::Int, 1)) {
            take();
            const Token k = take();
            scale = -to_signed(k.value, k.pos);
            expect(Tok::Star, "'*' after a scalar");
        } else if (at(Tok::Int)) {
            const Token k = take();
            scale = to_signed(k.value, k.pos);
            if (!accept(Tok::Star) && !(at(Tok::Name) && !unit_shaped(peek().text)))
                throw ParseError("expected '*' after a scalar", peek().pos);
        }
        DescribedSet body = set_core(g, env, cfg);
        if (!scale) return body;
        try {
            return body.scaled(*scale, cfg);
        } catch (const std::exception& e) {
            throw SemanticError(e.what(), scale_pos);
        }
    }

    DescribedSet set_core(const Group& g, const SetEnv& env, const Config& cfg) {
        if (accept(Tok::LBrace)) {
            std::vector<Element> pts;
            if (!at(Tok::RBrace)) {
                pts.push_back(element(g, /*embedded=*/false));
                while (accept(Tok::Comma)) pts.push_back(element(g, false));
            }
            expect(Tok::RBrace, "'}'");
            return DescribedSet::finite(g, std::move(pts));
        }
        if (accept(Tok::LParen)) {
            DescribedSet inner = set(g, env, cfg);
            expect(Tok::RParen, "')'");
            return inner;
        }
        const Token name = expect(Tok::Name, "a set atom");
        if (name.text == "G") {
            Order n = 0;
            if (accept(Tok::LBrack)) {
                n = expect(Tok::Int, "a torsion order").value;
                expect(Tok::RBrack, "']'");
            }
            return DescribedSet::coset(TorsionCoset::subgroup(g, n));
        }
        if (name.text == "round") {
            expect(Tok::LParen, "'('");
            const Token n = expect(Tok::Int, "a round order");
            expect(Tok::RParen, "')'");
            try {
                return DescribedSet::round(make_round(g, n.value), cfg);
            } catch (const std::exception& e) {
                throw SemanticError(e.what(), n.pos);
            }
        }
        if (name.text == "span") {
            expect(Tok::LParen, "'('");
            std::vector<Element> gens;
            if (!at(Tok::RParen)) {
                gens.push_back(element(g, false));
                while (accept(Tok::Comma)) gens.push_back(element(g, false));
            }
            expect(Tok::RParen, "')'");
            return DescribedSet::span(g, std::move(gens));
        }
        if (env.sets) {
            auto it = env.sets->find(name.text);
            if (it != env.sets->end()) {
                if (!same_group(it->second.group(), g))
                    throw SemanticError("set '" + name.text + "' lives in " +
                                            it->second.group()->str() + ", not in " + g->str(),
                                        name.pos);
                return it->second;
            }
        }
        if (env.generators) {
            auto it = env.generators->find(name.text);
            if (it != env.generators->end()) {
                if (!same_group(it->second.group(), g))
                    throw SemanticError("sequence '" + name.text + "' lives in " +
                                            it->second.group()->str() + ", not in " + g->str(),
                                        name.pos);
                return DescribedSet::round(it->second, cfg);
            }
        }
        throw SemanticError("unknown name '" + name.text + "'", name.pos);
    }
};

std::uint32_t quasi_depth_of(const Rat& v, std::uint64_t p) {
    std::uint32_t d = 0;
    std::uint64_t den = v.den;
    while (den > 1) {
        den /= p;
        ++d;
    }
    return d;
}

}  // namespace

std::string annotate_error(std::string_view text, const std::runtime_error& e, std::size_t pos) {
    std::ostringstream os;
    os << e.what() << "\n  " << text << "\n  ";
    for (std::size_t k = 0; k < std::min(pos, text.size()); ++k) os << ' ';
    os << '^';
    return os.str();
}

std::vector<SummandClass> summand_classes(const GroupDescriptor& d) {
    std::vector<SummandClass> out;
    if (d.free_rank().is_positive())
        out.push_back({SummandKind::Free, 0, 0, d.free_rank()});
    if (d.rational_rank().is_positive())
        out.push_back({SummandKind::Rational, 0, 0, d.rational_rank()});
    for (auto& [p, m] : d.quasicyclic_entries())
        out.push_back({SummandKind::Quasicyclic, p, 0, m});
    for (auto& [ps, m] : d.cyclic_entries())
        out.push_back({SummandKind::Cyclic, ps.p, ps.s, m});
    return out;
}

Coord class_coord(const SummandClass& cls, std::uint64_t copy) {
    switch (cls.kind) {
        case SummandKind::Free: return Coord::free(copy);
        case SummandKind::Rational: return Coord::rational(copy);
        case SummandKind::Quasicyclic: return Coord::quasicyclic(cls.p, copy);
        case SummandKind::Cyclic: return Coord::cyclic(cls.p, cls.s, copy);
    }
    throw std::logic_error("unreachable summand kind");
}

GroupDescriptor parse_group(std::string_view text) {
    Parser p(text);
    GroupDescriptor d = p.group();
    p.expect_end();
    return d;
}

Element parse_element(std::string_view text, const Group& g) {
    Parser p(text);
    Element e = p.element(g, /*embedded=*/false);
    p.expect_end();
    return e;
}

DescribedSet parse_set(std::string_view text, const Group& g, const SetEnv& env,
                       const Config& cfg) {
    Parser p(text);
    DescribedSet x = p.set(g, env, cfg);
    p.expect_end();
    return x;
}

std::string print_group(const GroupDescriptor& d) { return d.str(); }

std::string print_element(const Element& e) {
    if (e.is_zero()) return "0";
    const std::vector<SummandClass> classes = summand_classes(*e.group());
    std::ostringstream os;
    bool first = true;
    for (auto& [c, v] : e.coords()) {
        std::size_t cls = classes.size();
        for (std::size_t k = 0; k < classes.size(); ++k) {
            if (classes[k].kind == c.kind && classes[k].p == c.p && classes[k].s == c.s) {
                cls = k;
                break;
            }
        }
        if (cls == classes.size()) throw std::logic_error("coordinate outside its descriptor");
        bool negative = false;
        std::uint64_t num = 0;
        std::uint64_t den = 1;
        std::string suffix;
        if (c.kind == SummandKind::Quasicyclic) {
            num = static_cast<std::uint64_t>(v.num);
            suffix = "@" + std::to_string(quasi_depth_of(v, c.p));
        } else {
            negative = v.num < 0;
            num = static_cast<std::uint64_t>(negative ? -v.num : v.num);
            den = v.den;
        }
        std::string unit = "e" + std::to_string(cls);
        if (c.index != 0) unit += "_" + std::to_string(c.index);
        unit += suffix;
        std::string coeff;
        if (den != 1)
            coeff = std::to_string(num) + "/" + std::to_string(den) + "*";
        else if (num != 1)
            coeff = std::to_string(num) + "*";
        if (first)
            os << (negative ? "-" : "");
        else
            os << (negative ? " - " : " + ");
        first = false;
        os << coeff << unit;
    }
    return os.str();
}

std::string print_coset(const TorsionCoset& c) {
    if (c.is_empty()) return "{}";
    const std::string tail =
        c.order() == 0 ? "G" : "G[" + std::to_string(c.order()) + "]";
    if (c.anchor().is_zero()) return tail;
    return print_element(c.anchor()) + " + " + tail;
}

std::string print_set(const DescribedSet& x) {
    if (x.atoms().empty()) return "{}";
    std::ostringstream os;
    bool first = true;
    for (const SetAtom& atom : x.atoms()) {
        if (!first) os << " | ";
        first = false;
        if (const auto* f = std::get_if<FiniteAtom>(&atom)) {
            os << "{";
            for (std::size_t k = 0; k < f->points.size(); ++k) {
                if (k) os << ", ";
                os << print_element(f->points[k]);
            }
            os << "}";
        } else if (const auto* c = std::get_if<CosetAtom>(&atom)) {
            os << print_coset(c->coset);
        } else if (const auto* r = std::get_if<RoundAtom>(&atom)) {
            if (!r->base.is_zero()) os << print_element(r->base) << " + ";
            if (r->gen.kind() == RoundKind::UserSequence)
                os << r->gen.str();  // display only; no expression form
            else if (r->gen.scale() == 1)
                os << "round(" << r->gen.order_tag() << ")";
            else
                os << r->gen.scale() << "*round(" << r->gen.base_tag() << ")";
        } else if (const auto* s = std::get_if<FgSubgroupAtom>(&atom)) {
            if (!s->offset.is_zero()) os << print_element(s->offset) << " + ";
            os << "span(";
            for (std::size_t k = 0; k < s->generators.size(); ++k) {
                if (k) os << ", ";
                os << print_element(s->generators[k]);
            }
            os << ")";
        }
    }
    return os.str();
}

std::string print_closed(const AlgebraicSet& a) {
    if (a.is_empty()) return "{}";
    std::ostringstream os;
    for (std::size_t k = 0; k < a.parts().size(); ++k) {
        if (k) os << " | ";
        os << print_coset(a.parts()[k]);
    }
    return os.str();
}

}  // namespace zkt
