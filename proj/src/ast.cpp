#include "uspkit/ast.hpp"

#include <algorithm>

namespace uspkit::ast {

std::string to_string(const TypeRef& t) {
    switch (t.kind) {
        case TypeRef::Kind::Int: return t.nullable ? "Int?" : "Int";
        case TypeRef::Kind::Real: return t.nullable ? "Real?" : "Real";
        case TypeRef::Kind::Bool: return t.nullable ? "Bool?" : "Bool";
        case TypeRef::Kind::Text: return t.nullable ? "Text?" : "Text";
        case TypeRef::Kind::Entity: return t.nullable ? t.class_name + "?" : t.class_name;
        case TypeRef::Kind::List: return "list<" + t.class_name + (t.nullable ? ">?" : ">");
    }
    return "?";
}

std::string_view spelling(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Eq: return "=";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::And: return "and";
        case BinaryOp::Or: return "or";
    }
    return "?";
}

std::string_view spelling(Builtin fn) {
    switch (fn) {
        case Builtin::Rand: return "rand";
        case Builtin::Len: return "len";
        case Builtin::Push: return "push";
        case Builtin::PopFront: return "popFront";
    }
    return "?";
}

const AttrDef* ClassDef::find_attr(std::string_view attr) const {
    auto it = std::find_if(attrs.begin(), attrs.end(), [&](const AttrDef& a) { return a.name == attr; });
    return it == attrs.end() ? nullptr : &*it;
}

const OpDef* ClassDef::find_op(std::string_view op) const {
    auto it = std::find_if(ops.begin(), ops.end(), [&](const OpDef& o) { return o.name == op; });
    return it == ops.end() ? nullptr : &*it;
}

const ClassDef* Model::find_class(std::string_view cls) const {
    auto it = std::find_if(classes.begin(), classes.end(), [&](const ClassDef& c) { return c.name == cls; });
    return it == classes.end() ? nullptr : &*it;
}

bool is_frame(const ClassDef& c) { return is_frame_stereotype(c.stereotype); }

const OpDef* init_hook(const Model& m) {
    for (const auto& c : m.classes) {
        if (c.stereotype != Stereotype::Boundary) continue;
        const OpDef* op = c.find_op("init");
        if (op != nullptr && op->stereotype == Stereotype::Rule) return op;
    }
    return nullptr;
}

}  // namespace uspkit::ast
