#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace uspkit {

/// The model element a stereotype may be applied to.
enum class ElementKind : std::uint8_t { Class, Attribute, Operation, Association };

/// The closed profile vocabulary.
enum class Stereotype : std::uint8_t {
    // class stereotypes
    Whole,
    Part,
    Atom,
    Boundary,
    Link,
    // attribute stereotypes
    In,
    Out,
    State,
    Parts,
    Ref,
    // operation stereotypes
    Exist,
    Rule,
    Accept,
    Emit,
    // association stereotype
    Channel,
};

struct StereotypeInfo {
    Stereotype value;
    std::string_view name;
    ElementKind kind;
};

inline constexpr std::array<StereotypeInfo, 15> kStereotypes{{
    {Stereotype::Whole, "whole", ElementKind::Class},
    {Stereotype::Part, "part", ElementKind::Class},
    {Stereotype::Atom, "atom", ElementKind::Class},
    {Stereotype::Boundary, "boundary", ElementKind::Class},
    {Stereotype::Link, "link", ElementKind::Class},
    {Stereotype::In, "in", ElementKind::Attribute},
    {Stereotype::Out, "out", ElementKind::Attribute},
    {Stereotype::State, "state", ElementKind::Attribute},
    {Stereotype::Parts, "parts", ElementKind::Attribute},
    {Stereotype::Ref, "ref", ElementKind::Attribute},
    {Stereotype::Exist, "Exist", ElementKind::Operation},
    {Stereotype::Rule, "Rule", ElementKind::Operation},
    {Stereotype::Accept, "accept", ElementKind::Operation},
    {Stereotype::Emit, "emit", ElementKind::Operation},
    {Stereotype::Channel, "channel", ElementKind::Association},
}};

std::string_view name_of(Stereotype s);
ElementKind element_kind(Stereotype s);
std::string_view name_of(ElementKind k);

/// Thrown by stereotype_of for names outside the vocabulary.
class UnknownStereotype : public std::runtime_error {
public:
    UnknownStereotype(std::string name, std::string suggestion);

    const std::string& name() const { return name_; }
    /// Closest vocabulary member by edit distance.
    const std::string& suggestion() const { return suggestion_; }

private:
    std::string name_;
    std::string suggestion_;
};

/// Case-sensitive lookup. Throws UnknownStereotype.
Stereotype stereotype_of(std::string_view name);
std::optional<Stereotype> find_stereotype(std::string_view name);
std::string_view nearest_stereotype(std::string_view name);

/// whole, part, atom and boundary classes are frames; link classes are not.
constexpr bool is_frame_stereotype(Stereotype s) {
    return s == Stereotype::Whole || s == Stereotype::Part || s == Stereotype::Atom ||
           s == Stereotype::Boundary;
}

std::size_t edit_distance(std::string_view a, std::string_view b);

}  // namespace uspkit
