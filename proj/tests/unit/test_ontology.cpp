#include <gtest/gtest.h>

#include <map>

#include "json.hpp"
#include "support.hpp"
#include "uspkit/ontology.hpp"

using namespace uspkit;

namespace {

std::size_t occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

bool has_relation(const Ontology& o, RelationKind k, const std::string& from, const std::string& to) {
    for (const auto& r : o.relations) {
        if (r.kind == k && r.from == from && r.to == to) return true;
    }
    return false;
}

}  // namespace

TEST(Ontology, CorpusFramesAndConcepts) {
    const auto o = extract_ontology(testsupport::load_corpus());
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& f : o.frames) pairs.emplace_back(f.name, f.concept_tag);
    const std::vector<std::pair<std::string, std::string>> want = {
        {"Component", "Business Unit"},
        {"Leaf", "Service Clerk"},
        {"Composite", "Service Queue System"},
        {"Root", "Boundary and Initial Conditions"},
        {"Node", "Office"},
    };
    EXPECT_EQ(pairs, want);
    const auto* composite = o.find_frame("Composite");
    ASSERT_NE(composite, nullptr);
    std::map<std::string, std::string> slot_concepts;
    for (const auto& s : composite->slots) slot_concepts[s.name] = s.concept_tag.value_or("");
    EXPECT_EQ(slot_concepts["list"], "Office Space");
    EXPECT_EQ(slot_concepts["head"], "Queue");
    EXPECT_EQ(slot_concepts["tail"], "Queue");
    EXPECT_EQ(o.find_frame("QueueMember"), nullptr);
    EXPECT_EQ(o.find_frame("Customer"), nullptr);
}

TEST(Ontology, CorpusRelations) {
    const auto o = extract_ontology(testsupport::load_corpus());
    EXPECT_TRUE(has_relation(o, RelationKind::Composition, "Composite", "Component"));
    EXPECT_TRUE(has_relation(o, RelationKind::Generalization, "Leaf", "Component"));
    EXPECT_TRUE(has_relation(o, RelationKind::Generalization, "Node", "Composite"));
    EXPECT_TRUE(has_relation(o, RelationKind::Reference, "Root", "Composite"));
    for (const auto& r : o.relations) {
        EXPECT_NE(o.find_frame(r.from), nullptr) << r.from;
        EXPECT_NE(o.find_frame(r.to), nullptr) << r.to;
    }
}

TEST(Ontology, OperationWithoutConceptOmitsIt) {
    const auto o = extract_ontology(testsupport::load_corpus());
    const auto* node = o.find_frame("Node");
    ASSERT_EQ(node->procedures.size(), 1u);
    EXPECT_FALSE(node->procedures[0].concept_tag.has_value());
    const auto j = export_json(o);
    EXPECT_EQ(occurrences(j, "\"concept\":\"Service Clerk\""), 1u);
}

TEST(Ontology, ReferenceThroughLinkRecordsVia) {
    const auto vm = testsupport::load_valid(testsupport::minimal_model(
        "",
        "    class Desk <<atom>> concept \"Desk\" {\n        attr ticket <<ref>> : Ticket?;\n    }\n"
        "    class Ticket <<link>> {\n        attr hop <<ref>> : Hop?;\n        attr again <<ref>> : Ticket?;\n    }\n"
        "    class Hop <<link>> {\n        attr owner <<ref>> : Sys?;\n    }\n"));
    const auto o = extract_ontology(vm);
    const Relation* via = nullptr;
    for (const auto& r : o.relations) {
        if (r.kind == RelationKind::Reference && r.from == "Desk") via = &r;
    }
    ASSERT_NE(via, nullptr);
    EXPECT_EQ(via->to, "Sys");
    EXPECT_EQ(via->via.value_or(""), "Ticket");
    std::size_t from_desk = 0;
    for (const auto& r : o.relations) from_desk += r.from == "Desk" ? 1 : 0;
    EXPECT_EQ(from_desk, 1u);
}

TEST(Ontology, ChannelsBecomeRelations) {
    const auto vm = testsupport::load_valid(testsupport::minimal_model("", "    association wire <<channel>> Sys -- Cell;\n"));
    const auto o = extract_ontology(vm);
    EXPECT_TRUE(has_relation(o, RelationKind::Channel, "Sys", "Cell"));
}

TEST(Ontology, EmptyModel) {
    // Only the boundary is a frame here; a frame-free ontology is the empty value.
    const Ontology empty;
    EXPECT_EQ(export_json(empty), "{\"frames\":[],\"relations\":[]}");
    EXPECT_EQ(import_json(export_json(empty)), empty);
    EXPECT_EQ(export_dot(empty), "digraph ontology {\n}\n");
}

TEST(Ontology, JsonRoundTrip) {
    const auto o = extract_ontology(testsupport::load_corpus());
    const auto text = export_json(o);
    EXPECT_EQ(import_json(text), o);
    EXPECT_EQ(export_json(import_json(text)), text);
    // key-sorted
    const auto j = nlohmann::json::parse(text);
    EXPECT_EQ(j.dump(), text);
}

TEST(Ontology, ImportRejectsMalformed) {
    EXPECT_THROW(import_json("not json"), std::invalid_argument);
    EXPECT_THROW(import_json("{\"frames\":[]}"), std::invalid_argument);
    EXPECT_THROW(import_json("{\"frames\":[],\"relations\":[{\"kind\":\"x\",\"from\":\"a\",\"to\":\"b\"}]}"),
                 std::invalid_argument);
}

TEST(Ontology, DotHasCompositionEdge) {
    const auto dot = export_dot(extract_ontology(testsupport::load_corpus()));
    EXPECT_EQ(dot.rfind("digraph ontology {\n", 0), 0u);
    EXPECT_NE(dot.find("\"Composite\" -> \"Component\" [label=\"composition\"]"), std::string::npos) << dot;
    EXPECT_EQ(dot.substr(dot.size() - 2), "}\n");
}

TEST(Ontology, PlantUml) {
    const auto vm = testsupport::load_corpus();
    const auto uml = emit_plantuml(vm);
    EXPECT_EQ(uml.rfind("@startuml\n", 0), 0u);
    EXPECT_NE(uml.find("abstract class Composite <<whole>>"), std::string::npos);
    for (const char* c : {"Component", "Leaf", "Composite", "Root", "Node", "QueueMember", "Customer"}) {
        EXPECT_NE(uml.find("class " + std::string(c) + " <<"), std::string::npos) << c;
    }
    EXPECT_NE(uml.find("note top of Leaf : Service Clerk"), std::string::npos);
    EXPECT_EQ(uml, emit_plantuml(vm));
}

TEST(Ontology, ExportsAreDeterministic) {
    const auto a = extract_ontology(testsupport::load_corpus());
    const auto b = extract_ontology(testsupport::load_corpus());
    EXPECT_EQ(export_json(a), export_json(b));
    EXPECT_EQ(export_dot(a), export_dot(b));
}
