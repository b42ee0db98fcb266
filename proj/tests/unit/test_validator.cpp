#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "support.hpp"
#include "uspkit/printer.hpp"

using namespace uspkit;
using testsupport::check;
using testsupport::minimal_model;
using testsupport::read_file;
using testsupport::rules_of;

namespace {

std::set<std::string> rule_set(const std::vector<Diagnostic>& d) {
    std::set<std::string> s;
    for (const auto& x : d) s.insert(x.rule_id);
    return s;
}

std::vector<std::string> rendered(const std::vector<Diagnostic>& d) {
    std::vector<std::string> out;
    for (const auto& x : d) out.push_back(x.render());
    return out;
}

std::string with_op(const std::string& op) {
    return minimal_model("", "    class X <<part>> concept \"X\" {\n        attr i <<in>> : Cell?;\n        attr o <<out>> : Cell?;\n"
                             "        attr k <<state>> : Int;\n        attr r <<state>> : Real;\n" + op + "    }\n");
}

}  // namespace

TEST(Validator, CorpusIsClean) {
    const auto parsed = parse_file(testsupport::corpus_path());
    ASSERT_TRUE(parsed.ok());
    const auto v = validate(parsed.model);
    EXPECT_TRUE(v.ok());
    EXPECT_TRUE(v.diagnostics.empty()) << rendered(v.diagnostics).front();
    EXPECT_EQ(v.model->boundary().name, "Root");
}

TEST(Validator, Idempotent) {
    const auto parsed = parse_file(testsupport::corpus_path());
    const auto a = validate(parsed.model);
    const auto b = validate(a.model->model());
    EXPECT_EQ(rendered(a.diagnostics), rendered(b.diagnostics));
    for (const auto& rule : testsupport::negative_rules()) {
        const auto p = parse_file(testsupport::negative_path(rule));
        EXPECT_EQ(rendered(validate(p.model).diagnostics), rendered(validate(p.model).diagnostics));
    }
}

class NegativeCorpus : public ::testing::TestWithParam<std::string> {};

TEST_P(NegativeCorpus, TriggersExactlyItsRule) {
    const auto& rule = GetParam();
    const auto parsed = parse_file(testsupport::negative_path(rule));
    ASSERT_TRUE(parsed.ok()) << rendered(parsed.diagnostics).front();
    const auto v = validate(parsed.model);
    EXPECT_FALSE(v.ok());
    EXPECT_EQ(rule_set(v.diagnostics), std::set<std::string>{rule});
}

INSTANTIATE_TEST_SUITE_P(Rules, NegativeCorpus, ::testing::ValuesIn(testsupport::negative_rules()));

TEST(Validator, SpecificNegativeFindings) {
    auto diags = [](const std::string& r) { return validate(parse_file(testsupport::negative_path(r)).model).diagnostics; };
    const auto sp007 = diags("SP007");
    ASSERT_EQ(sp007.size(), 1u);
    EXPECT_NE(sp007[0].message.find("Component"), std::string::npos);
    const auto sp003 = diags("SP003");
    ASSERT_EQ(sp003.size(), 1u);
    EXPECT_NE(sp003[0].message.find("Leaf"), std::string::npos);
    const auto sp001 = diags("SP001");
    ASSERT_EQ(sp001.size(), 1u);
    EXPECT_NE(sp001[0].message.find("no <<boundary>>"), std::string::npos);
}

TEST(Validator, PermutingClassesOnlyReordersNothing) {
    std::vector<std::string> files{testsupport::corpus_path()};
    for (const auto& r : testsupport::negative_rules()) files.push_back(testsupport::negative_path(r));
    std::mt19937 rng(11);
    for (const auto& f : files) {
        const auto parsed = parse_file(f);
        const auto base = rendered(validate(parsed.model).diagnostics);
        for (int round = 0; round < 5; ++round) {
            auto m = parsed.model;
            std::shuffle(m.classes.begin(), m.classes.end(), rng);
            const auto v = validate(m);
            EXPECT_EQ(rendered(v.diagnostics), base) << f;
        }
    }
}

TEST(Validator, MinimalModelIsValid) {
    EXPECT_TRUE(check(minimal_model("")).empty());
}

TEST(Validator, BoundaryCountAndExist) {
    const std::string two = minimal_model("", "    class B2 <<boundary>> concept \"Other\" {\n        op exist <<Exist>> () { }\n    }\n");
    EXPECT_EQ(rule_set(check(two)), std::set<std::string>{"SP001"});
    const std::string two_exist = minimal_model("", "", "        op exist2 <<Exist>> () { }\n");
    EXPECT_EQ(rule_set(check(two_exist)), std::set<std::string>{"SP002"});
}

TEST(Validator, AbstractBoundary) {
    auto text = minimal_model("");
    text.replace(text.find("class B <<boundary>>"), 5, "abstract class");
    EXPECT_EQ(rule_set(check(text)), std::set<std::string>{"SP010"});
}

TEST(Validator, InheritanceRules) {
    EXPECT_EQ(rule_set(check(minimal_model("", "    class L <<link>> extends Cell { }\n"))), std::set<std::string>{"SP012"});
    EXPECT_EQ(rule_set(check(minimal_model("", "    class A <<atom>> concept \"a\" extends Nowhere { }\n"))),
              std::set<std::string>{"SP012"});
    EXPECT_EQ(rule_set(check(minimal_model("", "    class A <<atom>> concept \"a\" extends A { }\n"))),
              std::set<std::string>{"SP012"});
}

TEST(Validator, StereotypeElementAgreement) {
    EXPECT_EQ(rule_set(check(minimal_model("", "    class A <<in>> concept \"a\" { }\n"))), std::set<std::string>{"SP013"});
    EXPECT_EQ(rule_set(check(with_op("        op f <<whole>> () { }\n"))), std::set<std::string>{"SP013"});
    EXPECT_EQ(rule_set(check(minimal_model("", "    association c <<channel>> Sys -- Cell;\n"))), std::set<std::string>{});
    EXPECT_EQ(rule_set(check(minimal_model("", "    class L <<link>> { }\n    association c <<channel>> Sys -- L;\n"))),
              std::set<std::string>{"SP013"});
    EXPECT_EQ(rule_set(check(minimal_model("", "    association c <<state>> Sys -- Cell;\n"))), std::set<std::string>{"SP013"});
    EXPECT_EQ(rule_set(check(minimal_model("", "    association c <<channel>> Sys -- Ghost;\n"))), std::set<std::string>{"SP013"});
}

TEST(Validator, DuplicateConceptIsOnlyAWarning) {
    const auto parsed = parse(minimal_model("", "    class A <<atom>> concept \"Cell\" { }\n"), "w.usp");
    const auto v = validate(parsed.model);
    EXPECT_TRUE(v.ok());
    ASSERT_EQ(v.diagnostics.size(), 1u);
    EXPECT_EQ(v.diagnostics[0].rule_id, "SP101");
    EXPECT_EQ(v.diagnostics[0].severity, Severity::Warning);
}

TEST(Validator, BodyTyping) {
    EXPECT_TRUE(check(with_op("        op f <<Rule>> () { r := k; r := r * 2; }\n")).empty());
    EXPECT_EQ(rules_of(check(with_op("        op f <<Rule>> () { k := r; }\n"))), std::vector<std::string>{"SP011"});
    EXPECT_EQ(rules_of(check(with_op("        op f <<Rule>> () { send i.nothing(); }\n"))), std::vector<std::string>{"SP011"});
    EXPECT_EQ(rules_of(check(with_op("        op f <<Rule>> (c: Cell?) { c := null; }\n"))), std::vector<std::string>{"SP011"});
    EXPECT_EQ(rules_of(check(with_op("        op f <<Rule>> () : Int { if k > 0 { return 1; } }\n"))),
              std::vector<std::string>{"SP011"});
    EXPECT_TRUE(check(with_op("        op f <<Rule>> () : Int { if k > 0 { return 1; } else { return 2; } }\n")).empty());
    EXPECT_EQ(rules_of(check(with_op("        op f <<Rule>> () { let x = zz; }\n"))), std::vector<std::string>{"SP011"});
    EXPECT_EQ(rules_of(check(with_op("        op f <<Rule>> () { if k { } }\n"))), std::vector<std::string>{"SP011"});
    EXPECT_EQ(rules_of(check(with_op("        op f <<Rule>> () { let x = i.missing; }\n"))), std::vector<std::string>{"SP011"});
    EXPECT_TRUE(check(with_op("        op f <<Rule>> () : Bool { return i = null and (k < 3 or not (r >= 1.5)); }\n")).empty());
    EXPECT_TRUE(check(with_op("        op f <<Rule>> () { i.n := i.n + 1; }\n")).empty());
    // one error per fault, no cascade through the poisoned expression
    EXPECT_EQ(rules_of(check(with_op("        op f <<Rule>> () { k := (k + true) * 2 + 1; }\n"))),
              std::vector<std::string>{"SP011"});
}

TEST(Validator, AttributeDeclarations) {
    EXPECT_EQ(rule_set(check(with_op("        attr bad <<state>> : Int?;\n"))), std::set<std::string>{"SP011"});
    EXPECT_EQ(rule_set(check(with_op("        attr bad <<state>> : Cell;\n"))), std::set<std::string>{"SP011"});
    EXPECT_EQ(rule_set(check(with_op("        attr bad <<ref>> : Int;\n"))), std::set<std::string>{"SP009"});
    EXPECT_EQ(rule_set(check(with_op("        attr bad <<state>> : Int = 1.5;\n"))), std::set<std::string>{"SP011"});
    EXPECT_TRUE(check(with_op("        attr good <<state>> : Real = 2;\n")).empty());
}

TEST(Validator, OverridesKeepSignatureAndStereotype) {
    const std::string base = "    abstract class P <<part>> concept \"P\" {\n        attr i <<in>> : Cell?;\n        attr o <<out>> : Cell?;\n"
                             "        op f <<Rule>> (x: Int) : Int { return x; }\n    }\n";
    EXPECT_TRUE(check(minimal_model("", base + "    class Q <<atom>> concept \"Q\" extends P {\n"
                                               "        op f <<Rule>> (x: Int) : Int { return x + 1; }\n    }\n")).empty());
    EXPECT_EQ(rule_set(check(minimal_model("", base + "    class Q <<atom>> concept \"Q\" extends P {\n"
                                                      "        op f <<Rule>> (x: Real) : Int { return 1; }\n    }\n"))),
              std::set<std::string>{"SP011"});
    EXPECT_EQ(rule_set(check(minimal_model("", base + "    class Q <<atom>> concept \"Q\" extends P {\n"
                                                      "        op f <<accept>> (x: Int) : Int { return x; }\n    }\n"))),
              std::set<std::string>{"SP011"});
}

TEST(Validator, InheritedPartsCount) {
    // Node inherits the parts slot of Composite in the corpus; a whole with none fails.
    EXPECT_EQ(rule_set(check(minimal_model("", "    class W <<whole>> concept \"W\" { }\n"))), std::set<std::string>{"SP005"});
}

TEST(Validator, ProgramTablesAreFlattened) {
    const auto vm = testsupport::load_corpus();
    const auto& prog = vm.program();
    const auto& node = prog.classes[static_cast<std::size_t>(prog.find_class("Node"))];
    std::vector<std::string> slots;
    for (const auto& s : node.slots) slots.push_back(s.name);
    const std::vector<std::string> want = {"input", "output", "list", "head", "tail", "departures"};
    EXPECT_EQ(slots, want);
    const auto& component = prog.classes[static_cast<std::size_t>(prog.find_class("Component"))];
    // vtable prefix compatibility
    for (std::size_t i = 0; i < component.method_names.size(); ++i) EXPECT_EQ(node.method_names[i], component.method_names[i]);
    const int exist = node.find_method("exist");
    EXPECT_EQ(prog.functions[static_cast<std::size_t>(node.vtable[static_cast<std::size_t>(exist)])].owner_class, node.id);
    EXPECT_GE(prog.init_function, 0);
    for (std::size_t i = 0; i < prog.classes.size(); ++i) EXPECT_EQ(prog.classes[i].name, vm.model().classes[i].name);
}
