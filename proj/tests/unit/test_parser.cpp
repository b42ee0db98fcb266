#include <gtest/gtest.h>

#include "support.hpp"
#include "uspkit/lexer.hpp"
#include "uspkit/parser.hpp"
#include "uspkit/printer.hpp"

using namespace uspkit;
using testsupport::read_file;

namespace {

std::vector<std::string> all_model_files() {
    std::vector<std::string> files{testsupport::corpus_path()};
    for (const auto& r : testsupport::negative_rules()) files.push_back(testsupport::negative_path(r));
    return files;
}

std::string reconstruct(const LexResult& lr) {
    std::string out;
    for (const auto& t : lr.tokens) out += t.leading_trivia + t.lexeme;
    return out;
}

std::string slice(const std::string& text, const SourceSpan& s) {
    return text.substr(s.begin_offset, s.end_offset - s.begin_offset);
}

}  // namespace

TEST(Lexer, TriviaReproducesSourceByteForByte) {
    for (const auto& f : all_model_files()) {
        const auto text = read_file(f);
        const auto lr = lex(text, f);
        EXPECT_TRUE(lr.diagnostics.empty()) << f;
        EXPECT_EQ(reconstruct(lr), text) << f;
    }
    const std::string odd = "model M { // comment «x»\n\tclass A <<whole>> {}\r\n  \"unterminated";
    const auto lr = lex(odd, "odd.usp");
    EXPECT_EQ(reconstruct(lr), odd);
    ASSERT_FALSE(lr.diagnostics.empty());
    EXPECT_EQ(lr.diagnostics[0].rule_id, "P001");
}

TEST(Lexer, TokenKinds) {
    const auto lr = lex("class «whole» <<atom>> x 12 3.5e2 \"a\\\"b\" := ≠ ≤ -- ?", "t");
    std::vector<TokenKind> kinds;
    for (const auto& t : lr.tokens) kinds.push_back(t.kind);
    const std::vector<TokenKind> want = {
        TokenKind::Keyword,        TokenKind::StereotypeOpen, TokenKind::Identifier,     TokenKind::StereotypeClose,
        TokenKind::StereotypeOpen, TokenKind::Identifier,     TokenKind::StereotypeClose, TokenKind::Identifier,
        TokenKind::Integer,        TokenKind::Real,           TokenKind::Text,            TokenKind::Punctuation,
        TokenKind::Punctuation,    TokenKind::Punctuation,    TokenKind::Punctuation,     TokenKind::Punctuation,
        TokenKind::End};
    EXPECT_EQ(kinds, want);
    EXPECT_EQ(canonical_punct("≠"), "!=");
    EXPECT_EQ(canonical_punct("≤"), "<=");
}

TEST(Lexer, ColumnsCountCodePoints) {
    const auto lr = lex("«whole» x", "t");
    ASSERT_GE(lr.tokens.size(), 4u);
    EXPECT_EQ(lr.tokens[3].span.column, 9u);
}

TEST(Lexer, BadCharacter) {
    const auto lr = lex("model M { $ }", "t.usp");
    ASSERT_EQ(lr.diagnostics.size(), 1u);
    EXPECT_EQ(lr.diagnostics[0].rule_id, "P001");
    EXPECT_EQ(lr.diagnostics[0].location.column, 11u);
}

TEST(Parser, EmptyModel) {
    const auto r = parse("model M { }", "m.usp");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.model.name, "M");
    EXPECT_TRUE(r.model.classes.empty());
}

TEST(Parser, CorpusRoster) {
    const auto r = parse_file(testsupport::corpus_path());
    ASSERT_TRUE(r.ok());
    std::vector<std::string> names;
    for (const auto& c : r.model.classes) names.push_back(c.name);
    const std::vector<std::string> want = {"Component", "Leaf", "Composite", "Root", "Node", "QueueMember", "Customer"};
    EXPECT_EQ(names, want);
    const auto* composite = r.model.find_class("Composite");
    EXPECT_TRUE(composite->is_abstract);
    EXPECT_EQ(composite->extends.value_or(""), "Component");
    EXPECT_EQ(composite->concept_tag.value_or(""), "Service Queue System");
    EXPECT_EQ(composite->find_attr("list")->type.kind, ast::TypeRef::Kind::List);
    EXPECT_TRUE(composite->find_attr("head")->type.nullable);
}

TEST(Parser, DuplicateClassReportsBothSpans) {
    const auto r = parse("model M {\n  class A «whole» { }\n  class A «atom» { }\n}", "d.usp");
    ASSERT_EQ(r.diagnostics.size(), 1u);
    const auto& d = r.diagnostics[0];
    EXPECT_EQ(d.rule_id, "P003");
    EXPECT_NE(d.message.find("duplicate class name A"), std::string::npos);
    EXPECT_EQ(d.location.line, 3u);
    ASSERT_TRUE(d.related.has_value());
    EXPECT_EQ(d.related->line, 2u);
}

TEST(Parser, UnknownStereotypeSuggests) {
    const auto r = parse("model M { class A «Exists» { } }", "u.usp");
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].rule_id, "P004");
    EXPECT_NE(r.diagnostics[0].message.find("Exist"), std::string::npos);
}

TEST(Parser, SyntaxErrorListsExpected) {
    const auto r = parse("model M { class A «whole» { attr x «state» Int; } }", "s.usp");
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.diagnostics[0].rule_id, "P002");
    EXPECT_NE(r.diagnostics[0].message.find("':'"), std::string::npos) << r.diagnostics[0].message;
}

TEST(Parser, RecoversAtClassBoundaries) {
    const std::string text =
        "model M {\n"
        "  class A «whole» { attr x «state» : ; }\n"
        "  class B «atom» concept \"b\" { }\n"
        "  class C «part» { op f «Rule» () { let = 1; } }\n"
        "  class D «link» { }\n"
        "}\n";
    const auto r = parse(text, "r.usp");
    EXPECT_EQ(r.diagnostics.size(), 2u);
    EXPECT_EQ(r.diagnostics[0].location.line, 2u);
    EXPECT_EQ(r.diagnostics[1].location.line, 4u);
    ASSERT_NE(r.model.find_class("B"), nullptr);
    ASSERT_NE(r.model.find_class("D"), nullptr);
}

TEST(Parser, IoFailureIsP000) {
    const auto r = parse_file("/nonexistent/nowhere.usp");
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].rule_id, "P000");
}

TEST(Parser, ComparisonsDoNotChain) {
    const auto r = parse("model M { class A «part» { op f «Rule» () : Bool { return 1 < 2 < 3; } } }", "c.usp");
    EXPECT_FALSE(r.ok());
}

TEST(Parser, AsciiAndGuillemetStereotypesAgree) {
    const auto a = parse("model M { class A «whole» concept \"x\" { } }", "a");
    const auto b = parse("model M { class A <<whole>> concept \"x\" { } }", "b");
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_EQ(a.model, b.model);
}

TEST(Spans, DeclarationSpansEncloseTheirText) {
    for (const auto& f : all_model_files()) {
        const auto text = read_file(f);
        const auto r = parse(text, f);
        ASSERT_TRUE(r.ok()) << f;
        for (const auto& c : r.model.classes) {
            const auto s = slice(text, c.span);
            EXPECT_TRUE(s.rfind(c.is_abstract ? "abstract" : "class", 0) == 0) << s;
            EXPECT_EQ(s.back(), '}');
            EXPECT_NE(s.find(c.name), std::string::npos);
            EXPECT_EQ(slice(text, c.name_span), c.name);
            for (const auto& a : c.attrs) {
                const auto as = slice(text, a.span);
                EXPECT_TRUE(as.rfind("attr " + a.name, 0) == 0) << as;
                EXPECT_EQ(as.back(), ';');
                EXPECT_GE(a.span.begin_offset, c.span.begin_offset);
                EXPECT_LE(a.span.end_offset, c.span.end_offset);
            }
            for (const auto& o : c.ops) {
                const auto os = slice(text, o.span);
                EXPECT_TRUE(os.rfind("op " + o.name, 0) == 0) << os;
                EXPECT_EQ(os.back(), '}');
                EXPECT_LE(o.span.end_offset, c.span.end_offset);
            }
        }
    }
}

TEST(Spans, LineAndColumn) {
    const auto r = parse("model M {\n    class A «whole» { }\n}", "l.usp");
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r.model.classes[0].span.line, 2u);
    EXPECT_EQ(r.model.classes[0].span.column, 5u);
    EXPECT_EQ(r.model.classes[0].name_span.column, 11u);
}

TEST(Printer, RoundTripFixpoint) {
    for (const auto& f : all_model_files()) {
        const auto r = parse_file(f);
        ASSERT_TRUE(r.ok()) << f;
        const auto printed = print(r.model);
        const auto again = parse(printed, "printed.usp");
        ASSERT_TRUE(again.ok()) << f << "\n" << printed;
        EXPECT_EQ(again.model, r.model) << f;
        EXPECT_EQ(print(again.model), printed) << f;
        EXPECT_EQ(print(r.model), printed);
    }
}

TEST(Printer, CanonicalForm) {
    const auto r = parse("model M{class A«whole»concept \"x\"{attr p<<parts>>:list<A>;op f «Rule»(a:Int):Int{return a*(a+1)-(2-3);}}}", "c");
    ASSERT_TRUE(r.ok());
    const std::string want =
        "model M {\n"
        "    class A <<whole>> concept \"x\" {\n"
        "        attr p <<parts>> : list<A>;\n"
        "        op f <<Rule>> (a: Int) : Int {\n"
        "            return a * (a + 1) - (2 - 3);\n"
        "        }\n"
        "    }\n"
        "}\n";
    EXPECT_EQ(print(r.model), want);
}

TEST(Printer, ExpressionPrecedenceSurvives) {
    const char* exprs[] = {"1 - (2 - 3)", "(1 - 2) - 3", "not (a and b)", "not a and b", "- -a", "-(1 + 2) * 3",
                           "a or b and c", "(a or b) and c", "(1 < 2) = true", "1.5 / 2.0 / 3.0", "1 / (2 / 3)"};
    for (const char* e : exprs) {
        const std::string src = std::string("model M { class A «part» { op f «Rule» (a: Bool, b: Bool, c: Bool) {"
                                            " let x = ") + e + "; } } }";
        const auto r = parse(src, "e");
        ASSERT_TRUE(r.ok()) << e;
        const auto again = parse(print(r.model), "e2");
        ASSERT_TRUE(again.ok()) << e << "\n" << print(r.model);
        EXPECT_EQ(again.model, r.model) << e;
    }
}

// Deleting any single token inside a class must leave every later class parsed
// exactly as before.
TEST(Recovery, SingleTokenDeletionHarness) {
    const auto text = read_file(testsupport::corpus_path());
    const auto lr = lex(text, "corpus");
    const auto original = parse(text, "corpus");
    ASSERT_TRUE(original.ok());
    const auto& classes = original.model.classes;

    std::size_t total = 0;
    std::size_t recovered = 0;
    std::vector<std::string> failures;
    for (std::size_t i = 0; i + 1 < lr.tokens.size(); ++i) {
        const auto& tok = lr.tokens[i];
        std::size_t owner = classes.size();
        for (std::size_t k = 0; k < classes.size(); ++k) {
            if (tok.span.begin_offset >= classes[k].span.begin_offset && tok.span.end_offset <= classes[k].span.end_offset) owner = k;
        }
        if (owner == classes.size()) continue;  // model header or closing brace
        ++total;
        std::string mutated = text;
        mutated.erase(tok.span.begin_offset, tok.span.end_offset - tok.span.begin_offset);
        const auto r = parse(mutated, "mutant");
        bool ok = true;
        for (std::size_t k = owner + 1; k < classes.size(); ++k) {
            const auto* c = r.model.find_class(classes[k].name);
            if (c == nullptr || !(*c == classes[k])) ok = false;
        }
        if (ok) {
            ++recovered;
        } else {
            failures.push_back("token " + std::to_string(i) + " '" + tok.lexeme + "' line " + std::to_string(tok.span.line));
        }
    }
    const double rate = static_cast<double>(recovered) / static_cast<double>(total);
    std::string listing;
    for (const auto& f : failures) listing += f + "\n";
    EXPECT_GE(rate, 0.95) << recovered << "/" << total << "\n" << listing;
    RecordProperty("recovery_rate", std::to_string(rate));
    std::printf("recovered %zu of %zu single-token deletions (%.1f%%)\n", recovered, total, 100.0 * rate);
}

namespace {

std::vector<std::string> quoted_in_production(const std::string& grammar, const std::string& name) {
    const auto start = grammar.find("\n" + name);
    const auto end = grammar.find(';', start);
    std::vector<std::string> out;
    const std::string body = grammar.substr(start, end - start);
    for (std::size_t p = body.find('"'); p != std::string::npos; p = body.find('"', p + 1)) {
        const auto q = body.find('"', p + 1);
        out.push_back(body.substr(p + 1, q - p - 1));
        p = q;
    }
    return out;
}

}  // namespace

TEST(Grammar, DocumentMatchesImplementation) {
    const auto grammar = read_file(testsupport::source_dir() + "/docs/grammar.ebnf");
    const auto keywords = quoted_in_production(grammar, "keyword ");
    EXPECT_EQ(keywords.size(), 23u);
    for (const auto& k : keywords) EXPECT_TRUE(is_keyword(k)) << k;
    for (const char* w : {"Int", "list", "rand", "push", "Exist", "whole"}) EXPECT_FALSE(is_keyword(w)) << w;
    const auto names = quoted_in_production(grammar, "stereotype_name");
    ASSERT_EQ(names.size(), kStereotypes.size());
    for (std::size_t i = 0; i < names.size(); ++i) EXPECT_EQ(names[i], kStereotypes[i].name);
}
