#pragma once

// Typed, name-resolved form of a validated model. Slot and method references
// are indices into inheritance-flattened tables; the engine executes this
// directly.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "uspkit/source.hpp"
#include "uspkit/stereotype.hpp"
#include "uspkit/value.hpp"

namespace uspkit::ir {

enum class TypeKind : std::uint8_t { Void, Null, Int, Real, Bool, Text, Entity, List, Error };

struct Type {
    TypeKind kind = TypeKind::Void;
    int class_id = -1;  // Entity / List element
    bool nullable = false;

    bool operator==(const Type&) const = default;

    static Type of(TypeKind k) { return Type{k, -1, false}; }
    static Type entity(int cls, bool nullable) { return Type{TypeKind::Entity, cls, nullable}; }
    static Type list(int cls) { return Type{TypeKind::List, cls, false}; }
};

enum class ExprOp : std::uint8_t {
    Const,
    Local,
    Self,
    Slot,       // operands[0] . slot `index`
    IntToReal,  // operands[0]
    Neg,
    Not,
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Send,      // operands[0] receiver, rest args; `index` = method slot
    Rand,
    Len,       // operands[0] list
    Push,      // operands[0] owner entity, `index` = list slot, operands[1] element
    PopFront,  // operands[0] owner entity, `index` = list slot
    New,       // `index` = class id; operands are field values for `field_slots`
};

struct Expr {
    ExprOp op = ExprOp::Const;
    Type type;
    int index = -1;
    bool real_operands = false;  // arithmetic / ordering on Real
    Value constant;
    std::vector<Expr> operands;
    std::vector<int> field_slots;
    std::string name;  // method name for Send
    SourceLocation location;
};

enum class StmtOp : std::uint8_t { SetLocal, SetSlot, Eval, If, Foreach, Return };

struct Stmt {
    StmtOp op = StmtOp::Eval;
    int index = -1;       // local (SetLocal, Foreach variable) or slot (SetSlot)
    Expr object;          // SetSlot owner
    Expr value;           // assigned value / condition / list / evaluated expr
    bool has_value = false;  // Return
    std::vector<Stmt> then_body;
    std::vector<Stmt> else_body;
    SourceLocation location;
};

struct Function {
    std::string name;
    Stereotype stereotype = Stereotype::Rule;
    int owner_class = -1;
    std::vector<Type> params;
    Type result;
    int local_count = 0;
    std::vector<Stmt> body;
    SourceLocation location;
};

struct Slot {
    std::string name;
    Stereotype stereotype = Stereotype::State;
    Type type;
    Value initial;
    int declared_in = -1;
};

struct Class {
    std::string name;
    int id = -1;
    Stereotype stereotype = Stereotype::Part;
    bool is_abstract = false;
    int parent = -1;
    std::vector<Slot> slots;  // flattened, ancestors first
    std::vector<int> vtable;  // method slot -> function index
    std::vector<std::string> method_names;
    std::unordered_map<std::string, int> slot_index;
    std::unordered_map<std::string, int> method_index;
    std::vector<bool> ancestors;  // ancestors[k]: this class is k or derives from k

    int find_slot(const std::string& n) const {
        auto it = slot_index.find(n);
        return it == slot_index.end() ? -1 : it->second;
    }
    int find_method(const std::string& n) const {
        auto it = method_index.find(n);
        return it == method_index.end() ? -1 : it->second;
    }
    bool derives_from(int other) const {
        return other >= 0 && static_cast<std::size_t>(other) < ancestors.size() && ancestors[static_cast<std::size_t>(other)];
    }
};

struct Program {
    std::vector<Class> classes;
    std::vector<Function> functions;
    int boundary_class = -1;
    int boundary_exist = -1;  // function index
    int init_function = -1;   // function index, -1 if absent
    std::unordered_map<std::string, int> class_index;

    int find_class(const std::string& n) const {
        auto it = class_index.find(n);
        return it == class_index.end() ? -1 : it->second;
    }
};

std::string to_string(const Type& t, const Program& p);

/// Default slot value: 0, 0.0, false, "", null, empty list.
Value default_value(const Type& t);

}  // namespace uspkit::ir
