#include "uspkit/parser.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "uspkit/lexer.hpp"

namespace uspkit {

namespace {

using namespace ast;

// Unwinds to the nearest declaration boundary; the diagnostic is already recorded.
struct SyntaxError {};

std::string describe(const Token& t) {
    switch (t.kind) {
        case TokenKind::End: return "end of file";
        case TokenKind::Integer:
        case TokenKind::Real: return "number '" + t.lexeme + "'";
        case TokenKind::Text: return "string literal";
        case TokenKind::Identifier: return "identifier '" + t.lexeme + "'";
        default: return "'" + t.lexeme + "'";
    }
}

std::string unescape(std::string_view quoted) {
    std::string out;
    const std::string_view body = quoted.substr(1, quoted.size() - 2);
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (body[i] == '\\' && i + 1 < body.size()) {
            ++i;
            switch (body[i]) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: out += body[i]; break;
            }
        } else {
            out += body[i];
        }
    }
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> tokens, std::vector<Diagnostic> diags, std::string file)
        : toks_(std::move(tokens)), diags_(std::move(diags)), file_(std::move(file)) {}

    ParseResult run() {
        ParseResult out;
        out.model = parse_model();
        check_duplicates(out.model);
        out.diagnostics = std::move(diags_);
        sort_diagnostics(out.diagnostics);
        return out;
    }

private:
    // ---- token helpers --------------------------------------------------

    const Token& cur() const { return toks_[pos_]; }
    const Token& ahead(std::size_t n) const {
        return toks_[std::min(pos_ + n, toks_.size() - 1)];
    }
    const Token& take() {
        const Token& t = toks_[pos_];
        if (t.kind != TokenKind::End) ++pos_;
        // Invalid tokens were already reported by the lexer; skip them silently.
        while (toks_[pos_].kind == TokenKind::Invalid) ++pos_;
        return t;
    }
    const Token& last() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }

    bool at_punct(std::string_view p) const {
        return cur().kind == TokenKind::Punctuation && canonical_punct(cur().lexeme) == p;
    }
    bool at_keyword(std::string_view k) const { return cur().is_keyword(k); }

    [[noreturn]] void fail(const std::string& expected) {
        syntax_error(cur(), "expected " + expected + ", found " + describe(cur()));
        throw SyntaxError{};
    }

    void syntax_error(const Token& at, std::string msg) {
        diags_.push_back({"P002", Severity::Error, std::move(msg), at.span.begin(), {}});
    }

    const Token& expect_punct(std::string_view p) {
        if (!at_punct(p)) fail("'" + std::string(p) + "'");
        return take();
    }
    const Token& expect_keyword(std::string_view k) {
        if (!at_keyword(k)) fail("'" + std::string(k) + "'");
        return take();
    }
    const Token& expect_ident(std::string_view what) {
        if (cur().kind != TokenKind::Identifier) fail(std::string(what));
        return take();
    }

    SourceSpan span_from(const SourceSpan& begin) const { return merge(begin, last().span); }

    // ---- declarations ---------------------------------------------------

    bool at_decl_start() const {
        return at_keyword("class") || at_keyword("abstract") || at_keyword("association");
    }

    void synchronize(std::size_t start) {
        if (pos_ == start) take();
        while (cur().kind != TokenKind::End && !at_decl_start()) take();
    }

    Model parse_model() {
        Model m;
        // Skip invalid tokens that precede everything.
        while (cur().kind == TokenKind::Invalid) ++pos_;
        const SourceSpan begin = cur().span;
        try {
            expect_keyword("model");
            m.name = expect_ident("model name").lexeme;
            expect_punct("{");
        } catch (const SyntaxError&) {
            synchronize(pos_);
        }
        while (cur().kind != TokenKind::End && !at_punct("}")) {
            const std::size_t start = pos_;
            try {
                if (at_keyword("association")) {
                    m.associations.push_back(parse_association());
                } else if (at_keyword("class") || at_keyword("abstract")) {
                    m.classes.push_back(parse_class());
                } else {
                    fail("'class', 'abstract', 'association' or '}'");
                }
            } catch (const SyntaxError&) {
                synchronize(start);
            }
        }
        if (at_punct("}")) {
            take();
            if (cur().kind != TokenKind::End) {
                syntax_error(cur(), "expected end of file, found " + describe(cur()));
            }
        } else if (!has_errors(diags_)) {
            syntax_error(cur(), "expected '}' to close model, found " + describe(cur()));
        }
        m.span = span_from(begin);
        return m;
    }

    Stereotype parse_stereotype() {
        expect_stereo_open();
        const Token& name = cur();
        if (name.kind != TokenKind::Identifier && name.kind != TokenKind::Keyword) fail("stereotype name");
        take();
        if (cur().kind != TokenKind::StereotypeClose) fail("'>>'");
        take();
        if (auto s = find_stereotype(name.lexeme)) return *s;
        diags_.push_back({"P004", Severity::Error,
                          "unknown stereotype '" + name.lexeme + "' (did you mean '" +
                              std::string(nearest_stereotype(name.lexeme)) + "'?)",
                          name.span.begin(), {}});
        return Stereotype::State;
    }

    void expect_stereo_open() {
        if (cur().kind != TokenKind::StereotypeOpen) fail("stereotype '<<...>>'");
        take();
    }

    std::optional<std::string> parse_concept() {
        if (!at_keyword("concept")) return std::nullopt;
        take();
        if (cur().kind != TokenKind::Text) fail("concept text");
        return unescape(take().lexeme);
    }

    AssociationDef parse_association() {
        AssociationDef a;
        const SourceSpan begin = expect_keyword("association").span;
        a.name = expect_ident("association name").lexeme;
        a.stereotype = parse_stereotype();
        a.from = expect_ident("class name").lexeme;
        expect_punct("--");
        a.to = expect_ident("class name").lexeme;
        expect_punct(";");
        a.span = span_from(begin);
        return a;
    }

    ClassDef parse_class() {
        ClassDef c;
        const SourceSpan begin = cur().span;
        if (at_keyword("abstract")) {
            take();
            c.is_abstract = true;
        }
        expect_keyword("class");
        const Token& name = expect_ident("class name");
        c.name = name.lexeme;
        c.name_span = name.span;
        c.stereotype = parse_stereotype();
        c.concept_tag = parse_concept();
        if (at_keyword("extends")) {
            take();
            c.extends = expect_ident("base class name").lexeme;
        }
        expect_punct("{");
        while (!at_punct("}")) {
            if (at_keyword("attr")) {
                c.attrs.push_back(parse_attr());
            } else if (at_keyword("op")) {
                c.ops.push_back(parse_op());
            } else {
                fail("'attr', 'op' or '}'");
            }
        }
        take();
        c.span = span_from(begin);
        return c;
    }

    TypeRef parse_type() {
        TypeRef t;
        const Token& name = expect_ident("type");
        t.span = name.span;
        if (name.lexeme == "list" && at_punct("<")) {
            take();
            t.kind = TypeRef::Kind::List;
            t.class_name = expect_ident("element class").lexeme;
            expect_punct(">");
        } else if (name.lexeme == "Int") {
            t.kind = TypeRef::Kind::Int;
        } else if (name.lexeme == "Real") {
            t.kind = TypeRef::Kind::Real;
        } else if (name.lexeme == "Bool") {
            t.kind = TypeRef::Kind::Bool;
        } else if (name.lexeme == "Text") {
            t.kind = TypeRef::Kind::Text;
        } else {
            t.kind = TypeRef::Kind::Entity;
            t.class_name = name.lexeme;
        }
        if (at_punct("?")) {
            take();
            t.nullable = true;
        }
        t.span = span_from(t.span);
        return t;
    }

    Literal parse_literal() {
        bool negative = false;
        if (at_punct("-")) {
            take();
            negative = true;
            if (cur().kind != TokenKind::Integer && cur().kind != TokenKind::Real) fail("number");
        }
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::Integer: {
                take();
                std::int64_t v = integer_value(t);
                return Literal{negative ? -v : v};
            }
            case TokenKind::Real: {
                take();
                const double v = real_value(t);
                return Literal{negative ? -v : v};
            }
            case TokenKind::Text: take(); return Literal{unescape(t.lexeme)};
            case TokenKind::Keyword:
                if (t.lexeme == "true" || t.lexeme == "false") {
                    take();
                    return Literal{t.lexeme == "true"};
                }
                if (t.lexeme == "null") {
                    take();
                    return Literal{NullLiteral{}};
                }
                break;
            default: break;
        }
        fail("literal");
    }

    std::int64_t integer_value(const Token& t) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
        if (ec != std::errc{} || ptr != t.lexeme.data() + t.lexeme.size()) {
            syntax_error(t, "integer literal out of range");
            throw SyntaxError{};
        }
        return v;
    }

    double real_value(const Token& t) {
        double v = 0;
        auto [ptr, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
        if (ec != std::errc{} || ptr != t.lexeme.data() + t.lexeme.size()) {
            syntax_error(t, "real literal out of range");
            throw SyntaxError{};
        }
        return v;
    }

    AttrDef parse_attr() {
        AttrDef a;
        const SourceSpan begin = expect_keyword("attr").span;
        a.name = expect_ident("attribute name").lexeme;
        a.stereotype = parse_stereotype();
        a.concept_tag = parse_concept();
        expect_punct(":");
        a.type = parse_type();
        if (at_punct("=")) {
            take();
            a.initial = parse_literal();
        }
        expect_punct(";");
        a.span = span_from(begin);
        return a;
    }

    OpDef parse_op() {
        OpDef o;
        const SourceSpan begin = expect_keyword("op").span;
        o.name = expect_ident("operation name").lexeme;
        o.stereotype = parse_stereotype();
        o.concept_tag = parse_concept();
        expect_punct("(");
        if (!at_punct(")")) {
            do {
                Param p;
                const Token& pn = expect_ident("parameter name");
                p.name = pn.lexeme;
                expect_punct(":");
                p.type = parse_type();
                p.span = span_from(pn.span);
                o.params.push_back(std::move(p));
            } while (at_punct(",") && (take(), true));
        }
        expect_punct(")");
        if (at_punct(":")) {
            take();
            o.return_type = parse_type();
        }
        o.body = parse_block();
        o.span = span_from(begin);
        return o;
    }

    // ---- statements -----------------------------------------------------

    std::vector<Stmt> parse_block() {
        expect_punct("{");
        std::vector<Stmt> body;
        while (!at_punct("}")) {
            if (cur().kind == TokenKind::End || at_decl_start()) fail("statement or '}'");
            body.push_back(parse_stmt());
        }
        take();
        return body;
    }

    Stmt parse_stmt() {
        const SourceSpan begin = cur().span;
        Stmt s;
        if (at_keyword("let")) {
            take();
            LetStmt let;
            let.name = expect_ident("variable name").lexeme;
            if (at_punct(":")) {
                take();
                let.type = parse_type();
            }
            expect_punct("=");
            let.init = parse_expr();
            expect_punct(";");
            s.node = std::move(let);
        } else if (at_keyword("if")) {
            s.node = parse_if();
        } else if (at_keyword("foreach")) {
            take();
            ForeachStmt f;
            f.variable = expect_ident("loop variable").lexeme;
            expect_keyword("in");
            f.list = parse_expr();
            f.body = parse_block();
            s.node = std::move(f);
        } else if (at_keyword("return")) {
            take();
            ReturnStmt r;
            if (!at_punct(";")) r.value = parse_expr();
            expect_punct(";");
            s.node = std::move(r);
        } else {
            Expr e = parse_expr();
            if (at_punct(":=")) {
                const Token& op = take();
                if (!std::holds_alternative<NameRef>(e.node) && !std::holds_alternative<SlotRead>(e.node)) {
                    syntax_error(op, "left side of ':=' must be a name or a slot");
                    throw SyntaxError{};
                }
                AssignStmt a{std::move(e), parse_expr()};
                s.node = std::move(a);
            } else {
                const bool effect = std::holds_alternative<Send>(e.node) ||
                                    (std::holds_alternative<Call>(e.node) &&
                                     std::get<Call>(e.node).fn != Builtin::Rand &&
                                     std::get<Call>(e.node).fn != Builtin::Len);
                if (!effect) {
                    if (!at_punct(";")) fail("':=' or ';'");
                    syntax_error(cur(), "expression statement must be a send, push or popFront");
                    throw SyntaxError{};
                }
                s.node = ExprStmt{std::move(e)};
            }
            expect_punct(";");
        }
        s.span = span_from(begin);
        return s;
    }

    IfStmt parse_if() {
        expect_keyword("if");
        IfStmt i;
        i.condition = parse_expr();
        i.then_body = parse_block();
        if (at_keyword("else")) {
            take();
            i.has_else = true;
            if (at_keyword("if")) {
                const SourceSpan begin = cur().span;
                Stmt nested;
                nested.node = parse_if();
                nested.span = span_from(begin);
                i.else_body.push_back(std::move(nested));
            } else {
                i.else_body = parse_block();
            }
        }
        return i;
    }

    // ---- expressions ----------------------------------------------------

    Expr make(SourceSpan begin, auto node) {
        Expr e;
        e.node = std::move(node);
        e.span = span_from(begin);
        return e;
    }

    Expr parse_expr() { return parse_or(); }

    Expr parse_or() {
        const SourceSpan begin = cur().span;
        Expr lhs = parse_and();
        while (at_keyword("or")) {
            take();
            Expr rhs = parse_and();
            lhs = make(begin, Binary{BinaryOp::Or, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    Expr parse_and() {
        const SourceSpan begin = cur().span;
        Expr lhs = parse_not();
        while (at_keyword("and")) {
            take();
            Expr rhs = parse_not();
            lhs = make(begin, Binary{BinaryOp::And, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    Expr parse_not() {
        const SourceSpan begin = cur().span;
        if (at_keyword("not")) {
            take();
            Expr operand = parse_not();
            return make(begin, Unary{UnaryOp::Not, std::move(operand)});
        }
        return parse_comparison();
    }

    std::optional<BinaryOp> comparison_op() const {
        if (cur().kind != TokenKind::Punctuation) return std::nullopt;
        const std::string_view p = canonical_punct(cur().lexeme);
        if (p == "=") return BinaryOp::Eq;
        if (p == "!=") return BinaryOp::Ne;
        if (p == "<") return BinaryOp::Lt;
        if (p == "<=") return BinaryOp::Le;
        if (p == ">") return BinaryOp::Gt;
        if (p == ">=") return BinaryOp::Ge;
        return std::nullopt;
    }

    Expr parse_comparison() {
        const SourceSpan begin = cur().span;
        Expr lhs = parse_additive();
        if (auto op = comparison_op()) {
            take();
            Expr rhs = parse_additive();
            lhs = make(begin, Binary{*op, std::move(lhs), std::move(rhs)});
            if (comparison_op()) {
                syntax_error(cur(), "comparison operators do not chain; add parentheses");
                throw SyntaxError{};
            }
        }
        return lhs;
    }

    Expr parse_additive() {
        const SourceSpan begin = cur().span;
        Expr lhs = parse_multiplicative();
        while (at_punct("+") || at_punct("-")) {
            const BinaryOp op = at_punct("+") ? BinaryOp::Add : BinaryOp::Sub;
            take();
            Expr rhs = parse_multiplicative();
            lhs = make(begin, Binary{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    Expr parse_multiplicative() {
        const SourceSpan begin = cur().span;
        Expr lhs = parse_unary();
        while (at_punct("*") || at_punct("/")) {
            const BinaryOp op = at_punct("*") ? BinaryOp::Mul : BinaryOp::Div;
            take();
            Expr rhs = parse_unary();
            lhs = make(begin, Binary{op, std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    Expr parse_unary() {
        const SourceSpan begin = cur().span;
        if (at_punct("-")) {
            take();
            Expr operand = parse_unary();
            return make(begin, Unary{UnaryOp::Neg, std::move(operand)});
        }
        return parse_postfix();
    }

    Expr parse_postfix() {
        const SourceSpan begin = cur().span;
        Expr e = parse_primary();
        while (at_punct(".")) {
            take();
            std::string slot = expect_ident("slot name").lexeme;
            e = make(begin, SlotRead{std::move(e), std::move(slot)});
        }
        return e;
    }

    std::vector<Expr> parse_args() {
        expect_punct("(");
        std::vector<Expr> args;
        if (!at_punct(")")) {
            do {
                args.push_back(parse_expr());
            } while (at_punct(",") && (take(), true));
        }
        expect_punct(")");
        return args;
    }

    Expr parse_primary() {
        const SourceSpan begin = cur().span;
        const Token& t = cur();
        switch (t.kind) {
            case TokenKind::Integer:
            case TokenKind::Real:
            case TokenKind::Text: return make(begin, parse_literal());
            case TokenKind::Identifier: {
                if (ahead(1).is_punct("(")) {
                    static const std::unordered_map<std::string_view, Builtin> kBuiltins{
                        {"rand", Builtin::Rand},
                        {"len", Builtin::Len},
                        {"push", Builtin::Push},
                        {"popFront", Builtin::PopFront},
                    };
                    auto it = kBuiltins.find(t.lexeme);
                    if (it == kBuiltins.end()) {
                        syntax_error(t, "'" + t.lexeme +
                                            "' is not a builtin; operations are invoked with 'send receiver." +
                                            t.lexeme + "(...)'");
                        throw SyntaxError{};
                    }
                    take();
                    Call call{it->second, parse_args()};
                    return make(begin, std::move(call));
                }
                take();
                return make(begin, NameRef{t.lexeme});
            }
            case TokenKind::Keyword: {
                if (t.lexeme == "true" || t.lexeme == "false" || t.lexeme == "null") {
                    return make(begin, parse_literal());
                }
                if (t.lexeme == "self") {
                    take();
                    return make(begin, SelfRef{});
                }
                if (t.lexeme == "send") return parse_send();
                if (t.lexeme == "new") return parse_new();
                break;
            }
            case TokenKind::Punctuation:
                if (t.lexeme == "(") {
                    take();
                    Expr inner = parse_expr();
                    expect_punct(")");
                    return inner;
                }
                break;
            default: break;
        }
        fail("expression");
    }

    Expr parse_send() {
        const SourceSpan begin = expect_keyword("send").span;
        Expr target = parse_postfix();
        if (!std::holds_alternative<SlotRead>(target.node)) {
            syntax_error(last(), "send needs 'receiver.operation(...)'");
            throw SyntaxError{};
        }
        auto& read = std::get<SlotRead>(target.node);
        Send send{std::move(read.object), std::move(read.slot), {}};
        send.args = parse_args();
        return make(begin, std::move(send));
    }

    Expr parse_new() {
        const SourceSpan begin = expect_keyword("new").span;
        New n;
        n.class_name = expect_ident("class name").lexeme;
        expect_punct("(");
        if (!at_punct(")")) {
            do {
                FieldInit f;
                f.name = expect_ident("field name").lexeme;
                expect_punct(":");
                f.value = parse_expr();
                n.fields.push_back(std::move(f));
            } while (at_punct(",") && (take(), true));
        }
        expect_punct(")");
        return make(begin, std::move(n));
    }

    void check_duplicates(Model& m) {
        std::unordered_map<std::string, const ClassDef*> seen;
        std::vector<ClassDef> kept;
        kept.reserve(m.classes.size());
        for (auto& c : m.classes) {
            auto [it, fresh] = seen.emplace(c.name, nullptr);
            if (!fresh) {
                const SourceSpan& first = it->second->name_span;
                diags_.push_back({"P003", Severity::Error,
                                  "duplicate class name " + c.name + " (first declared at " + first.file +
                                      ":" + std::to_string(first.line) + ":" + std::to_string(first.column) + ")",
                                  c.name_span.begin(), first.begin()});
                continue;
            }
            kept.push_back(std::move(c));
            it->second = &kept.back();
        }
        m.classes = std::move(kept);
    }

    std::vector<Token> toks_;
    std::vector<Diagnostic> diags_;
    std::string file_;
    std::size_t pos_ = 0;
};

}  // namespace

ParseResult parse(std::string_view source, std::string_view file_name) {
    LexResult lexed = lex(source, file_name);
    return Parser(std::move(lexed.tokens), std::move(lexed.diagnostics), std::string(file_name)).run();
}

ParseResult parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ParseResult r;
        r.diagnostics.push_back({"P000", Severity::Error, "cannot read file", {path, 0, 0}, {}});
        return r;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

}  // namespace uspkit
