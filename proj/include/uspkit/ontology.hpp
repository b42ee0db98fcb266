#pragma once

// The problem-domain reading of a model: every frame class becomes a frame
// of a semantic net, its attributes the frame's slots and its operations the
// frame's procedures. «link» classes are structure only and never become
// frames; references routed through them are recorded on the relation.

#include <optional>
#include <string>
#include <vector>

#include "uspkit/validator.hpp"

namespace uspkit {

struct FrameSlot {
    std::string name;
    std::optional<std::string> concept_tag;
    std::string stereotype;
    std::string type;  // declared type as written, e.g. "list<Component>"

    bool operator==(const FrameSlot&) const = default;
};

struct Procedure {
    std::string name;
    std::optional<std::string> concept_tag;
    std::string stereotype;

    bool operator==(const Procedure&) const = default;
};

struct Frame {
    std::string name;
    std::string concept_tag;
    std::string stereotype;
    std::vector<FrameSlot> slots;
    std::vector<Procedure> procedures;

    bool operator==(const Frame&) const = default;
};

enum class RelationKind { Generalization, Composition, Reference, Channel };

std::string_view to_string(RelationKind k);
std::optional<RelationKind> relation_kind(std::string_view s);

struct Relation {
    RelationKind kind = RelationKind::Reference;
    std::string from;
    std::string to;
    std::optional<std::string> via;  // «link» class a reference passes through
    std::optional<std::string> label;  // slot or association name

    bool operator==(const Relation&) const = default;
};

struct Ontology {
    std::vector<Frame> frames;
    std::vector<Relation> relations;

    bool operator==(const Ontology&) const = default;

    const Frame* find_frame(std::string_view name) const;
};

Ontology extract_ontology(const ValidatedModel& vm);

/// Compact, key-sorted JSON.
std::string export_json(const Ontology& o);

/// Inverse of export_json. Throws std::invalid_argument on malformed input.
Ontology import_json(const std::string& text);

std::string export_dot(const Ontology& o);

/// PlantUML class diagram of every class, frames and links alike.
std::string emit_plantuml(const ValidatedModel& vm);

}  // namespace uspkit
