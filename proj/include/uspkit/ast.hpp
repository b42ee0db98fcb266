#pragma once

// Metamodel for textual UML SP models: stereotyped classes carrying
// Concept tags, attributes (slots) and operations with bodies written in a
// small statement language.
//
// Every node is a plain value type. operator== is structural and ignores
// source spans (see SourceSpan).

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "uspkit/box.hpp"
#include "uspkit/source.hpp"
#include "uspkit/stereotype.hpp"

namespace uspkit::ast {

struct TypeRef {
    enum class Kind : std::uint8_t { Int, Real, Bool, Text, Entity, List };

    Kind kind = Kind::Int;
    std::string class_name;  // Entity / List element
    bool nullable = false;   // `?` suffix
    SourceSpan span;

    bool operator==(const TypeRef&) const = default;

    static TypeRef primitive(Kind k) { return TypeRef{k, {}, false, {}}; }
    static TypeRef entity(std::string cls, bool nullable) {
        return TypeRef{Kind::Entity, std::move(cls), nullable, {}};
    }
    static TypeRef list_of(std::string cls) { return TypeRef{Kind::List, std::move(cls), false, {}}; }
};

/// `Int`, `Real?`, `Customer?`, `list<Component>`
std::string to_string(const TypeRef& t);

struct NullLiteral {
    bool operator==(const NullLiteral&) const = default;
};

struct Literal {
    std::variant<NullLiteral, std::int64_t, double, bool, std::string> value;

    bool operator==(const Literal&) const = default;
};

enum class UnaryOp : std::uint8_t { Neg, Not };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class Builtin : std::uint8_t { Rand, Len, Push, PopFront };

std::string_view spelling(BinaryOp op);
std::string_view spelling(Builtin fn);

struct Expr;

struct NameRef {
    std::string name;
    bool operator==(const NameRef&) const = default;
};

struct SelfRef {
    bool operator==(const SelfRef&) const = default;
};

struct SlotRead {
    Box<Expr> object;
    std::string slot;
    bool operator==(const SlotRead&) const = default;
};

struct Unary {
    UnaryOp op;
    Box<Expr> operand;
    bool operator==(const Unary&) const = default;
};

struct Binary {
    BinaryOp op;
    Box<Expr> lhs;
    Box<Expr> rhs;
    bool operator==(const Binary&) const = default;
};

/// `send receiver.op(args)`
struct Send {
    Box<Expr> receiver;
    std::string op;
    std::vector<Expr> args;
    bool operator==(const Send&) const;
};

/// rand(), len(list), push(list, x), popFront(list)
struct Call {
    Builtin fn;
    std::vector<Expr> args;
    bool operator==(const Call&) const;
};

struct FieldInit;

/// `new ClassName(field: expr, ...)`
struct New {
    std::string class_name;
    std::vector<FieldInit> fields;
    bool operator==(const New&) const;
};

struct Expr {
    std::variant<Literal, NameRef, SelfRef, SlotRead, Unary, Binary, Send, Call, New> node;
    SourceSpan span;

    bool operator==(const Expr&) const = default;
};

struct FieldInit {
    std::string name;
    Expr value;
    bool operator==(const FieldInit&) const = default;
};

inline bool Send::operator==(const Send& o) const {
    return receiver == o.receiver && op == o.op && args == o.args;
}
inline bool Call::operator==(const Call& o) const { return fn == o.fn && args == o.args; }
inline bool New::operator==(const New& o) const {
    return class_name == o.class_name && fields == o.fields;
}

struct Stmt;

struct LetStmt {
    std::string name;
    std::optional<TypeRef> type;
    Expr init;
    bool operator==(const LetStmt&) const = default;
};

/// `target := value` where target is a name or a slot read.
struct AssignStmt {
    Expr target;
    Expr value;
    bool operator==(const AssignStmt&) const = default;
};

/// A send or a list primitive evaluated for its effect.
struct ExprStmt {
    Expr expr;
    bool operator==(const ExprStmt&) const = default;
};

struct IfStmt {
    Expr condition;
    std::vector<Stmt> then_body;
    std::vector<Stmt> else_body;
    bool has_else = false;
    bool operator==(const IfStmt&) const;
};

/// Iterates a snapshot of the list taken at loop entry.
struct ForeachStmt {
    std::string variable;
    Expr list;
    std::vector<Stmt> body;
    bool operator==(const ForeachStmt&) const;
};

struct ReturnStmt {
    std::optional<Expr> value;
    bool operator==(const ReturnStmt&) const = default;
};

struct Stmt {
    std::variant<LetStmt, AssignStmt, ExprStmt, IfStmt, ForeachStmt, ReturnStmt> node;
    SourceSpan span;

    bool operator==(const Stmt&) const = default;
};

inline bool IfStmt::operator==(const IfStmt& o) const {
    return condition == o.condition && then_body == o.then_body && else_body == o.else_body &&
           has_else == o.has_else;
}
inline bool ForeachStmt::operator==(const ForeachStmt& o) const {
    return variable == o.variable && list == o.list && body == o.body;
}

struct AttrDef {
    std::string name;
    Stereotype stereotype = Stereotype::State;
    std::optional<std::string> concept_tag;
    TypeRef type;
    std::optional<Literal> initial;  // `= literal`
    SourceSpan span;

    bool operator==(const AttrDef&) const = default;
};

struct Param {
    std::string name;
    TypeRef type;
    SourceSpan span;

    bool operator==(const Param&) const = default;
};

struct OpDef {
    std::string name;
    Stereotype stereotype = Stereotype::Rule;
    std::optional<std::string> concept_tag;
    std::vector<Param> params;
    std::optional<TypeRef> return_type;
    std::vector<Stmt> body;
    SourceSpan span;

    bool operator==(const OpDef&) const = default;
};

struct ClassDef {
    std::string name;
    Stereotype stereotype = Stereotype::Part;
    std::optional<std::string> concept_tag;
    bool is_abstract = false;
    std::optional<std::string> extends;
    std::vector<AttrDef> attrs;
    std::vector<OpDef> ops;
    SourceSpan span;
    SourceSpan name_span;

    bool operator==(const ClassDef&) const = default;

    const AttrDef* find_attr(std::string_view attr) const;
    const OpDef* find_op(std::string_view op) const;
};

/// `association name «channel» A -- B;`
struct AssociationDef {
    std::string name;
    Stereotype stereotype = Stereotype::Channel;
    std::string from;
    std::string to;
    SourceSpan span;

    bool operator==(const AssociationDef&) const = default;
};

struct Model {
    std::string name;
    std::vector<ClassDef> classes;
    std::vector<AssociationDef> associations;
    SourceSpan span;

    bool operator==(const Model&) const = default;

    const ClassDef* find_class(std::string_view cls) const;
};

/// True iff the class is stereotyped whole, part, atom or boundary.
bool is_frame(const ClassDef& c);

/// The reserved initialisation hook: a «Rule» operation named `init`
/// declared on the boundary class, if any.
const OpDef* init_hook(const Model& m);

}  // namespace uspkit::ast
