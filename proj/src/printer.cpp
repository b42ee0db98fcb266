#include "uspkit/printer.hpp"

#include <charconv>
#include <cmath>

namespace uspkit {

namespace {

using namespace ast;

enum Prec : int { kOr = 1, kAnd, kNot, kCompare, kAdd, kMul, kUnary, kPostfix, kPrimary };

int binary_prec(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return kOr;
        case BinaryOp::And: return kAnd;
        case BinaryOp::Eq:
        case BinaryOp::Ne:
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return kCompare;
        case BinaryOp::Add:
        case BinaryOp::Sub: return kAdd;
        case BinaryOp::Mul:
        case BinaryOp::Div: return kMul;
    }
    return kPrimary;
}

int prec_of(const Expr& e) {
    return std::visit(
        [](const auto& n) -> int {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Binary>) {
                return binary_prec(n.op);
            } else if constexpr (std::is_same_v<T, Unary>) {
                return n.op == UnaryOp::Not ? kNot : kUnary;
            } else if constexpr (std::is_same_v<T, SlotRead>) {
                return kPostfix;
            } else if constexpr (std::is_same_v<T, Literal>) {
                const auto* i = std::get_if<std::int64_t>(&n.value);
                const auto* d = std::get_if<double>(&n.value);
                return (i != nullptr && *i < 0) || (d != nullptr && std::signbit(*d)) ? kUnary : kPrimary;
            } else {
                return kPrimary;
            }
        },
        e.node);
}

std::string quote(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c; break;
        }
    }
    out += '"';
    return out;
}

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, ptr);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

class Printer {
public:
    std::string run(const Model& m) {
        out_ += "model " + m.name + " {\n";
        bool first = true;
        for (const auto& c : m.classes) {
            if (!first) out_ += '\n';
            first = false;
            print_class(c);
        }
        for (const auto& a : m.associations) {
            if (!first) out_ += '\n';
            first = false;
            indent(1);
            out_ += "association " + a.name + " " + stereo(a.stereotype) + " " + a.from + " -- " + a.to + ";\n";
        }
        out_ += "}\n";
        return std::move(out_);
    }

    std::string expr(const Expr& e, int min_prec = kOr) {
        std::string s = expr_inner(e);
        return prec_of(e) < min_prec ? "(" + s + ")" : s;
    }

private:
    static std::string stereo(Stereotype s) { return "<<" + std::string(name_of(s)) + ">>"; }

    static std::string concept_suffix(const std::optional<std::string>& c) {
        return c ? " concept " + quote(*c) : std::string();
    }

    void indent(int level) { out_.append(static_cast<std::size_t>(level) * 4, ' '); }

    void print_class(const ClassDef& c) {
        indent(1);
        if (c.is_abstract) out_ += "abstract ";
        out_ += "class " + c.name + " " + stereo(c.stereotype) + concept_suffix(c.concept_tag);
        if (c.extends) out_ += " extends " + *c.extends;
        out_ += " {\n";
        for (const auto& a : c.attrs) {
            indent(2);
            out_ += "attr " + a.name + " " + stereo(a.stereotype) + concept_suffix(a.concept_tag) + " : " +
                    to_string(a.type);
            if (a.initial) out_ += " = " + print_literal(*a.initial);
            out_ += ";\n";
        }
        for (const auto& o : c.ops) {
            indent(2);
            out_ += "op " + o.name + " " + stereo(o.stereotype) + concept_suffix(o.concept_tag) + " (";
            for (std::size_t i = 0; i < o.params.size(); ++i) {
                if (i != 0) out_ += ", ";
                out_ += o.params[i].name + ": " + to_string(o.params[i].type);
            }
            out_ += ")";
            if (o.return_type) out_ += " : " + to_string(*o.return_type);
            out_ += " {\n";
            block(o.body, 3);
            indent(2);
            out_ += "}\n";
        }
        indent(1);
        out_ += "}\n";
    }

    void block(const std::vector<Stmt>& body, int level) {
        for (const auto& s : body) stmt(s, level);
    }

    void stmt(const Stmt& s, int level) {
        indent(level);
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, LetStmt>) {
                    out_ += "let " + n.name;
                    if (n.type) out_ += ": " + to_string(*n.type);
                    out_ += " = " + expr(n.init) + ";\n";
                } else if constexpr (std::is_same_v<T, AssignStmt>) {
                    out_ += expr(n.target) + " := " + expr(n.value) + ";\n";
                } else if constexpr (std::is_same_v<T, ExprStmt>) {
                    out_ += expr(n.expr) + ";\n";
                } else if constexpr (std::is_same_v<T, IfStmt>) {
                    if_chain(n, level);
                } else if constexpr (std::is_same_v<T, ForeachStmt>) {
                    out_ += "foreach " + n.variable + " in " + expr(n.list) + " {\n";
                    block(n.body, level + 1);
                    indent(level);
                    out_ += "}\n";
                } else if constexpr (std::is_same_v<T, ReturnStmt>) {
                    out_ += n.value ? "return " + expr(*n.value) + ";\n" : std::string("return;\n");
                }
            },
            s.node);
    }

    void if_chain(const IfStmt& n, int level) {
        out_ += "if " + expr(n.condition) + " {\n";
        block(n.then_body, level + 1);
        indent(level);
        out_ += "}";
        if (n.has_else) {
            if (n.else_body.size() == 1 && std::holds_alternative<IfStmt>(n.else_body.front().node)) {
                out_ += " else ";
                if_chain(std::get<IfStmt>(n.else_body.front().node), level);
                return;
            }
            out_ += " else {\n";
            block(n.else_body, level + 1);
            indent(level);
            out_ += "}";
        }
        out_ += '\n';
    }

    std::string args(const std::vector<Expr>& list) {
        std::string s = "(";
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (i != 0) s += ", ";
            s += expr(list[i]);
        }
        return s + ")";
    }

    std::string receiver(const Expr& e) {
        if (std::holds_alternative<Send>(e.node)) return "(" + expr_inner(e) + ")";
        return expr(e, kPostfix);
    }

    std::string expr_inner(const Expr& e) {
        return std::visit(
            [&](const auto& n) -> std::string {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Literal>) {
                    return print_literal(n);
                } else if constexpr (std::is_same_v<T, NameRef>) {
                    return n.name;
                } else if constexpr (std::is_same_v<T, SelfRef>) {
                    return "self";
                } else if constexpr (std::is_same_v<T, SlotRead>) {
                    return receiver(*n.object) + "." + n.slot;
                } else if constexpr (std::is_same_v<T, Unary>) {
                    if (n.op == UnaryOp::Not) return "not " + expr(*n.operand, kNot);
                    std::string operand = expr(*n.operand, kUnary);
                    return operand.starts_with('-') ? "- " + operand : "-" + operand;
                } else if constexpr (std::is_same_v<T, Binary>) {
                    const int p = binary_prec(n.op);
                    const int lhs_min = p == kCompare ? p + 1 : p;
                    return expr(*n.lhs, lhs_min) + " " + std::string(spelling(n.op)) + " " + expr(*n.rhs, p + 1);
                } else if constexpr (std::is_same_v<T, Send>) {
                    return "send " + receiver(*n.receiver) + "." + n.op + args(n.args);
                } else if constexpr (std::is_same_v<T, Call>) {
                    return std::string(spelling(n.fn)) + args(n.args);
                } else if constexpr (std::is_same_v<T, New>) {
                    std::string s = "new " + n.class_name + "(";
                    for (std::size_t i = 0; i < n.fields.size(); ++i) {
                        if (i != 0) s += ", ";
                        s += n.fields[i].name + ": " + expr(n.fields[i].value);
                    }
                    return s + ")";
                }
            },
            e.node);
    }

    std::string out_;
};

}  // namespace

std::string print_literal(const Literal& lit) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, NullLiteral>) {
                return "null";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, double>) {
                return format_real(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else {
                return quote(v);
            }
        },
        lit.value);
}

std::string print(const Model& m) { return Printer().run(m); }

std::string print_expr(const Expr& e) { return Printer().expr(e); }

}  // namespace uspkit
