#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zkt/config.hpp"
#include "zkt/closed_set.hpp"
#include "zkt/described_set.hpp"
#include "zkt/descriptor.hpp"
#include "zkt/element.hpp"
#include "zkt/generators.hpp"

namespace zkt {

// Surface syntax for groups, elements and described sets.
//
//   group   := gterm ('+' gterm)*
//   gterm   := base ('^' mult)?
//   base    := 'Z' | 'Q' | 'Z(' int ')' | 'Zp(' prime ',inf)'
//   mult    := int | 'w'
//
//   elem    := '0' | ['-'] eterm (('+'|'-') eterm)*
//   eterm   := '0' | (coeff '*')? unit
//   coeff   := int ('/' int)?            fractions only on Q summands
//   unit    := 'e' int ('_' int)? ('@' int)?
//
//   set     := sterm ('|' sterm)*
//   sterm   := factor | elem '+' factor
//   factor  := (['-'] int '*')? core | int name
//   core    := '{' [elem (',' elem)*] '}' | 'G' ('[' int ']')?
//            | 'round(' int ')' | 'span(' [elem (',' elem)*] ')'
//            | name | '(' set ')'
//
// Units address the summand classes of the group in its canonical printed
// order (Z, Q, Zp(p,inf) by p, Z(p^s) by (p,s)): e<class>, e<class>_<copy>,
// and for quasicyclic classes e<class>@<depth> meaning 1/p^depth.  Names
// resolve against the environment; 'round(n)' builds the standard n-round
// sequence of the current group.

// Grammar-shape violation: unexpected token, missing bracket.  Exit code 1.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t pos)
        : std::runtime_error(what), pos(pos) {}
    std::size_t pos = 0;
};

// Well-formed text denoting nothing: bad prime, index out of range,
// round(1), unknown name.  Exit code 2.
struct SemanticError : std::runtime_error {
    SemanticError(const std::string& what, std::size_t pos)
        : std::runtime_error(what), pos(pos) {}
    std::size_t pos = 0;
};

// Two-line report: the offending text with a caret under the position.
std::string annotate_error(std::string_view text, const std::runtime_error& e,
                           std::size_t pos);

// Name resolution for set expressions; either map may be absent.
struct SetEnv {
    const std::map<std::string, DescribedSet>* sets = nullptr;
    const std::map<std::string, RoundGenerator>* generators = nullptr;
};

GroupDescriptor parse_group(std::string_view text);
Element parse_element(std::string_view text, const Group& g);
DescribedSet parse_set(std::string_view text, const Group& g,
                       const SetEnv& env = {}, const Config& cfg = {});

// Summand classes in unit-address order; mult bounds the copy index.
struct SummandClass {
    SummandKind kind = SummandKind::Free;
    std::uint64_t p = 0;
    std::uint32_t s = 0;
    Cardinal mult;
};
std::vector<SummandClass> summand_classes(const GroupDescriptor& d);
Coord class_coord(const SummandClass& cls, std::uint64_t copy);

// Printers emitting the grammar above; parse(print(v)) == v.  A round atom
// backed by a caller-supplied sequence has no expression form and prints as
// 'seq[len](tag)' for display only.
std::string print_group(const GroupDescriptor& d);
std::string print_element(const Element& e);
std::string print_coset(const TorsionCoset& c);
std::string print_set(const DescribedSet& x);
std::string print_closed(const AlgebraicSet& a);

}  // namespace zkt
