#include "uspkit/ontology.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace uspkit {

using nlohmann::json;

namespace {

constexpr std::string_view kKindNames[] = {"generalization", "composition", "reference", "channel"};

const ast::ClassDef* lookup(const ast::Model& m, const std::string& name) { return m.find_class(name); }

/// Attributes of `c`, ancestors first.
std::vector<const ast::AttrDef*> flattened_attrs(const ast::Model& m, const ast::ClassDef& c) {
    std::vector<const ast::ClassDef*> chain;
    std::set<std::string> seen;
    for (const ast::ClassDef* k = &c; k != nullptr && seen.insert(k->name).second;
         k = k->extends ? lookup(m, *k->extends) : nullptr) {
        chain.push_back(k);
    }
    std::vector<const ast::AttrDef*> out;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        for (const auto& a : (*it)->attrs) out.push_back(&a);
    }
    return out;
}

/// Frames reachable from link class `start` through «ref» slots of link classes.
std::vector<std::string> frames_behind_link(const ast::Model& m, const ast::ClassDef& start) {
    std::vector<std::string> frames;
    std::set<std::string> visited{start.name};
    std::vector<const ast::ClassDef*> work{&start};
    while (!work.empty()) {
        const ast::ClassDef* link = work.front();
        work.erase(work.begin());
        for (const ast::AttrDef* a : flattened_attrs(m, *link)) {
            if (a->stereotype != Stereotype::Ref || a->type.kind != ast::TypeRef::Kind::Entity) continue;
            const ast::ClassDef* t = lookup(m, a->type.class_name);
            if (t == nullptr || !visited.insert(t->name).second) continue;
            if (ast::is_frame(*t)) {
                frames.push_back(t->name);
            } else {
                work.push_back(t);
            }
        }
    }
    return frames;
}

std::string dot_quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string required_string(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
        throw std::invalid_argument(std::string("ontology JSON: missing string field '") + key + "'");
    }
    return j[key].get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_string()) throw std::invalid_argument(std::string("ontology JSON: '") + key + "' is not a string");
    return j[key].get<std::string>();
}

const json& required_array(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || !j[key].is_array()) {
        throw std::invalid_argument(std::string("ontology JSON: missing array field '") + key + "'");
    }
    return j[key];
}

}  // namespace

std::string_view to_string(RelationKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<RelationKind> relation_kind(std::string_view s) {
    for (int i = 0; i < 4; ++i) {
        if (kKindNames[i] == s) return static_cast<RelationKind>(i);
    }
    return std::nullopt;
}

const Frame* Ontology::find_frame(std::string_view name) const {
    for (const auto& f : frames) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

Ontology extract_ontology(const ValidatedModel& vm) {
    const ast::Model& m = vm.model();
    Ontology o;
    auto add = [&](Relation r) {
        if (std::find(o.relations.begin(), o.relations.end(), r) == o.relations.end()) o.relations.push_back(std::move(r));
    };
    for (const auto& c : m.classes) {
        if (!ast::is_frame(c)) continue;
        Frame f;
        f.name = c.name;
        f.concept_tag = c.concept_tag.value_or("");
        f.stereotype = std::string(name_of(c.stereotype));
        for (const auto& a : c.attrs) {
            f.slots.push_back({a.name, a.concept_tag, std::string(name_of(a.stereotype)), ast::to_string(a.type)});
        }
        for (const auto& op : c.ops) {
            f.procedures.push_back({op.name, op.concept_tag, std::string(name_of(op.stereotype))});
        }
        o.frames.push_back(std::move(f));

        if (c.extends) add({RelationKind::Generalization, c.name, *c.extends, std::nullopt, std::nullopt});
        for (const auto& a : c.attrs) {
            const ast::ClassDef* target = a.type.class_name.empty() ? nullptr : lookup(m, a.type.class_name);
            if (target == nullptr) continue;
            if (a.stereotype == Stereotype::Parts && ast::is_frame(*target)) {
                add({RelationKind::Composition, c.name, target->name, std::nullopt, a.name});
            } else if (a.stereotype == Stereotype::Ref) {
                if (ast::is_frame(*target)) {
                    add({RelationKind::Reference, c.name, target->name, std::nullopt, a.name});
                } else {
                    for (const auto& to : frames_behind_link(m, *target)) {
                        add({RelationKind::Reference, c.name, to, target->name, a.name});
                    }
                }
            }
        }
    }
    for (const auto& as : m.associations) add({RelationKind::Channel, as.from, as.to, std::nullopt, as.name});
    return o;
}

std::string export_json(const Ontology& o) {
    json frames = json::array();
    for (const auto& f : o.frames) {
        json slots = json::array();
        for (const auto& s : f.slots) {
            json js = {{"name", s.name}, {"stereotype", s.stereotype}, {"type", s.type}};
            if (s.concept_tag) js["concept"] = *s.concept_tag;
            slots.push_back(std::move(js));
        }
        json procs = json::array();
        for (const auto& p : f.procedures) {
            json jp = {{"name", p.name}, {"stereotype", p.stereotype}};
            if (p.concept_tag) jp["concept"] = *p.concept_tag;
            procs.push_back(std::move(jp));
        }
        frames.push_back({{"name", f.name},
                          {"concept", f.concept_tag},
                          {"stereotype", f.stereotype},
                          {"slots", std::move(slots)},
                          {"procedures", std::move(procs)}});
    }
    json relations = json::array();
    for (const auto& r : o.relations) {
        json jr = {{"kind", to_string(r.kind)}, {"from", r.from}, {"to", r.to}};
        if (r.via) jr["via"] = *r.via;
        if (r.label) jr["label"] = *r.label;
        relations.push_back(std::move(jr));
    }
    return json{{"frames", std::move(frames)}, {"relations", std::move(relations)}}.dump();
}

Ontology import_json(const std::string& text) {
    const json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw std::invalid_argument("ontology JSON: not valid JSON");
    Ontology o;
    for (const auto& jf : required_array(j, "frames")) {
        Frame f;
        f.name = required_string(jf, "name");
        f.concept_tag = required_string(jf, "concept");
        f.stereotype = required_string(jf, "stereotype");
        for (const auto& js : required_array(jf, "slots")) {
            f.slots.push_back({required_string(js, "name"), optional_string(js, "concept"),
                               required_string(js, "stereotype"), required_string(js, "type")});
        }
        for (const auto& jp : required_array(jf, "procedures")) {
            f.procedures.push_back(
                {required_string(jp, "name"), optional_string(jp, "concept"), required_string(jp, "stereotype")});
        }
        o.frames.push_back(std::move(f));
    }
    for (const auto& jr : required_array(j, "relations")) {
        auto kind = relation_kind(required_string(jr, "kind"));
        if (!kind) throw std::invalid_argument("ontology JSON: unknown relation kind");
        o.relations.push_back({*kind, required_string(jr, "from"), required_string(jr, "to"),
                               optional_string(jr, "via"), optional_string(jr, "label")});
    }
    return o;
}

std::string export_dot(const Ontology& o) {
    std::string out = "digraph ontology {\n";
    if (!o.frames.empty()) out += "    node [shape=box];\n";
    for (const auto& f : o.frames) {
        out += "    " + dot_quote(f.name) + " [label=" + dot_quote(f.name + "\\n" + f.concept_tag) + "];\n";
    }
    for (const auto& r : o.relations) {
        std::string label(to_string(r.kind));
        if (r.via) label += " via " + *r.via;
        out += "    " + dot_quote(r.from) + " -> " + dot_quote(r.to) + " [label=" + dot_quote(label);
        if (r.kind == RelationKind::Generalization) out += ", arrowhead=empty";
        out += "];\n";
    }
    return out + "}\n";
}

std::string emit_plantuml(const ValidatedModel& vm) {
    const ast::Model& m = vm.model();
    std::string out = "@startuml\ntitle " + m.name + "\n";
    for (const auto& c : m.classes) {
        out += "\n";
        out += c.is_abstract ? "abstract class " : "class ";
        out += c.name + " <<" + std::string(name_of(c.stereotype)) + ">> {\n";
        for (const auto& a : c.attrs) {
            out += "    " + a.name + " : " + ast::to_string(a.type) + " <<" + std::string(name_of(a.stereotype)) + ">>";
            if (a.concept_tag) out += " {" + *a.concept_tag + "}";
            out += "\n";
        }
        for (const auto& op : c.ops) {
            out += "    " + op.name + "(";
            for (std::size_t i = 0; i < op.params.size(); ++i) {
                if (i != 0) out += ", ";
                out += op.params[i].name + ": " + ast::to_string(op.params[i].type);
            }
            out += ")";
            if (op.return_type) out += " : " + ast::to_string(*op.return_type);
            out += " <<" + std::string(name_of(op.stereotype)) + ">>";
            if (op.concept_tag) out += " {" + *op.concept_tag + "}";
            out += "\n";
        }
        out += "}\n";
        if (c.concept_tag) out += "note top of " + c.name + " : " + *c.concept_tag + "\n";
    }
    out += "\n";
    for (const auto& c : m.classes) {
        if (c.extends) out += *c.extends + " <|-- " + c.name + "\n";
    }
    for (const auto& c : m.classes) {
        for (const auto& a : c.attrs) {
            if (a.type.class_name.empty() || lookup(m, a.type.class_name) == nullptr) continue;
            if (a.stereotype == Stereotype::Parts) {
                out += c.name + " o-- \"*\" " + a.type.class_name + " : " + a.name + "\n";
            } else if (a.stereotype == Stereotype::Ref) {
                out += c.name + " --> " + a.type.class_name + " : " + a.name + "\n";
            }
        }
    }
    for (const auto& as : m.associations) {
        out += as.from + " -- " + as.to + " : " + as.name + " <<channel>>\n";
    }
    return out + "@enduml\n";
}

}  // namespace uspkit
