#include "uspkit/validator.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace uspkit {

struct ValidatorAccess {
    static ValidatedModel make(std::shared_ptr<const ast::Model> m, std::shared_ptr<const ir::Program> p) {
        return ValidatedModel(std::move(m), std::move(p));
    }
};

const ast::ClassDef& ValidatedModel::boundary() const {
    return model_->classes[static_cast<std::size_t>(program_->boundary_class)];
}

namespace ir {

std::string to_string(const Type& t, const Program& p) {
    auto cls = [&](int id) {
        return id >= 0 && static_cast<std::size_t>(id) < p.classes.size() ? p.classes[static_cast<std::size_t>(id)].name
                                                                          : std::string("?");
    };
    switch (t.kind) {
        case TypeKind::Void: return "nothing";
        case TypeKind::Null: return "null";
        case TypeKind::Int: return "Int";
        case TypeKind::Real: return "Real";
        case TypeKind::Bool: return "Bool";
        case TypeKind::Text: return "Text";
        case TypeKind::Entity: return cls(t.class_id) + (t.nullable ? "?" : "");
        case TypeKind::List: return "list<" + cls(t.class_id) + ">";
        case TypeKind::Error: return "<error>";
    }
    return "?";
}

Value default_value(const Type& t) {
    switch (t.kind) {
        case TypeKind::Int: return std::int64_t{0};
        case TypeKind::Real: return 0.0;
        case TypeKind::Bool: return false;
        case TypeKind::Text: return make_text("");
        case TypeKind::List: return ListValue{};
        default: return NullValue{};
    }
}

}  // namespace ir

namespace {

using ir::Type;
using ir::TypeKind;

bool is_numeric(const Type& t) { return t.kind == TypeKind::Int || t.kind == TypeKind::Real; }

struct Local {
    std::string name;
    Type type;
    bool assignable = true;
};

struct FunctionContext {
    int self_class = -1;
    ir::Function* fn = nullptr;
    std::vector<Local> locals;
    std::vector<std::unordered_map<std::string, int>> scopes;

    int lookup(const std::string& n) const {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
            auto f = it->find(n);
            if (f != it->end()) return f->second;
        }
        return -1;
    }
};

bool always_returns(const std::vector<ast::Stmt>& body) {
    for (const auto& s : body) {
        if (std::holds_alternative<ast::ReturnStmt>(s.node)) return true;
        if (const auto* i = std::get_if<ast::IfStmt>(&s.node)) {
            if (i->has_else && always_returns(i->then_body) && always_returns(i->else_body)) return true;
        }
    }
    return false;
}

class Validator {
public:
    explicit Validator(const ast::Model& m) : m_(m) {}

    ValidationResult run() {
        index_classes();
        check_inheritance();
        flatten();
        check_structure();
        check_associations();
        check_bodies();
        check_concepts();

        ValidationResult out;
        sort_diagnostics(diags_);
        out.diagnostics = std::move(diags_);
        if (!has_errors(out.diagnostics)) {
            out.model = ValidatorAccess::make(std::make_shared<const ast::Model>(m_),
                                              std::make_shared<const ir::Program>(std::move(prog_)));
        }
        return out;
    }

private:
    // ---- diagnostics ------------------------------------------------------

    void report(std::string rule, std::string msg, const SourceSpan& at, Severity sev = Severity::Error) {
        diags_.push_back({std::move(rule), sev, std::move(msg), at.begin(), {}});
    }

    const ast::ClassDef& def(int cls) const { return m_.classes[static_cast<std::size_t>(cls)]; }
    ir::Class& cls(int id) { return prog_.classes[static_cast<std::size_t>(id)]; }
    const ir::Class& cls(int id) const { return prog_.classes[static_cast<std::size_t>(id)]; }
    std::string type_name(const Type& t) const { return ir::to_string(t, prog_); }

    bool class_kind_ok(int id) const { return element_kind(def(id).stereotype) == ElementKind::Class; }
    bool frame(int id) const { return class_kind_ok(id) && is_frame_stereotype(def(id).stereotype); }

    // ---- phase 1: class table, stereotype applicability -------------------

    void index_classes() {
        prog_.classes.resize(m_.classes.size());
        for (std::size_t i = 0; i < m_.classes.size(); ++i) {
            const auto& c = m_.classes[i];
            auto& k = prog_.classes[i];
            k.name = c.name;
            k.id = static_cast<int>(i);
            k.stereotype = c.stereotype;
            k.is_abstract = c.is_abstract;
            prog_.class_index.emplace(c.name, k.id);
            check_kind(c.stereotype, ElementKind::Class, "class " + c.name, c.name_span);
            for (const auto& a : c.attrs) {
                check_kind(a.stereotype, ElementKind::Attribute, "attribute " + c.name + "." + a.name, a.span);
            }
            for (const auto& o : c.ops) {
                check_kind(o.stereotype, ElementKind::Operation, "operation " + c.name + "." + o.name, o.span);
            }
        }
    }

    void check_kind(Stereotype s, ElementKind expected, const std::string& what, const SourceSpan& at) {
        if (element_kind(s) == expected) return;
        report("SP013",
               "stereotype <<" + std::string(name_of(s)) + ">> applies to " + std::string(name_of(element_kind(s))) +
                   " elements, not to " + what,
               at);
    }

    // ---- phase 2: inheritance ---------------------------------------------

    void check_inheritance() {
        const int n = static_cast<int>(m_.classes.size());
        for (int i = 0; i < n; ++i) {
            const auto& c = def(i);
            if (!c.extends) continue;
            const int p = prog_.find_class(*c.extends);
            if (p < 0) {
                report("SP012", "class " + c.name + " extends unknown class " + *c.extends, c.name_span);
                continue;
            }
            cls(i).parent = p;
        }
        // Cycles: every class whose parent chain returns to itself.
        std::vector<bool> on_cycle(static_cast<std::size_t>(n), false);
        for (int i = 0; i < n; ++i) {
            std::vector<int> chain{i};
            std::unordered_set<int> seen{i};
            bool looped = false;
            for (int p = cls(i).parent; p >= 0; p = cls(p).parent) {
                if (p == i) {
                    looped = true;
                    break;
                }
                if (!seen.insert(p).second) break;  // cycle not through i
                chain.push_back(p);
            }
            if (looped) {
                std::string path;
                for (int c : chain) path += def(c).name + " -> ";
                path += def(i).name;
                report("SP012", "inheritance cycle " + path, def(i).name_span);
                on_cycle[static_cast<std::size_t>(i)] = true;
            }
        }
        for (int i = 0; i < n; ++i) {
            if (on_cycle[static_cast<std::size_t>(i)]) cls(i).parent = -1;
        }
        for (int i = 0; i < n; ++i) {
            const int p = cls(i).parent;
            if (p < 0 || !class_kind_ok(i) || !class_kind_ok(p)) continue;
            if (frame(i) != frame(p)) {
                report("SP012",
                       "class " + def(i).name + " <<" + std::string(name_of(def(i).stereotype)) + ">> cannot extend " +
                           def(p).name + " <<" + std::string(name_of(def(p).stereotype)) +
                           ">>: frames extend frames and links extend links",
                       def(i).name_span);
            }
        }
    }

    // ---- phase 3: types, flattened tables, signatures ---------------------

    Type resolve(const ast::TypeRef& t) {
        using K = ast::TypeRef::Kind;
        Type out;
        switch (t.kind) {
            case K::Int: out = Type::of(TypeKind::Int); break;
            case K::Real: out = Type::of(TypeKind::Real); break;
            case K::Bool: out = Type::of(TypeKind::Bool); break;
            case K::Text: out = Type::of(TypeKind::Text); break;
            case K::Entity:
            case K::List: {
                const int c = prog_.find_class(t.class_name);
                if (c < 0) {
                    if (t.kind == K::List && (t.class_name == "Int" || t.class_name == "Real" ||
                                              t.class_name == "Bool" || t.class_name == "Text")) {
                        report("SP011", "list elements must be entity classes, not " + t.class_name, t.span);
                    } else {
                        report("SP011", "unknown type " + t.class_name, t.span);
                    }
                    return Type::of(TypeKind::Error);
                }
                out = t.kind == K::List ? Type::list(c) : Type::entity(c, t.nullable);
                break;
            }
        }
        if (t.nullable && out.kind != TypeKind::Entity) {
            report("SP011", "only entity references can be nullable, not " + ast::to_string(t), t.span);
            return Type::of(TypeKind::Error);
        }
        return out;
    }

    std::vector<int> topo_order() const {
        const int n = static_cast<int>(prog_.classes.size());
        std::vector<int> order;
        std::vector<bool> done(static_cast<std::size_t>(n), false);
        std::function<void(int)> visit = [&](int i) {
            if (done[static_cast<std::size_t>(i)]) return;
            done[static_cast<std::size_t>(i)] = true;
            if (cls(i).parent >= 0) visit(cls(i).parent);
            order.push_back(i);
        };
        for (int i = 0; i < n; ++i) visit(i);
        return order;
    }

    std::optional<Value> initial_value(const ast::Literal& lit, const Type& t) {
        if (t.kind == TypeKind::Error) return ir::default_value(t);
        return std::visit(
            [&](const auto& v) -> std::optional<Value> {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, ast::NullLiteral>) {
                    if (t.kind == TypeKind::Entity && t.nullable) return Value{NullValue{}};
                } else if constexpr (std::is_same_v<V, std::int64_t>) {
                    if (t.kind == TypeKind::Int) return Value{v};
                    if (t.kind == TypeKind::Real) return Value{static_cast<double>(v)};
                } else if constexpr (std::is_same_v<V, double>) {
                    if (t.kind == TypeKind::Real) return Value{v};
                } else if constexpr (std::is_same_v<V, bool>) {
                    if (t.kind == TypeKind::Bool) return Value{v};
                } else {
                    if (t.kind == TypeKind::Text) return make_text(v);
                }
                return std::nullopt;
            },
            lit.value);
    }

    void flatten() {
        const int n = static_cast<int>(prog_.classes.size());
        for (int i = 0; i < n; ++i) cls(i).ancestors.assign(static_cast<std::size_t>(n), false);
        fn_of_.resize(static_cast<std::size_t>(n));

        for (int id : topo_order()) {
            auto& k = cls(id);
            const auto& c = def(id);
            k.ancestors[static_cast<std::size_t>(id)] = true;
            if (k.parent >= 0) {
                const auto& p = cls(k.parent);
                for (std::size_t a = 0; a < p.ancestors.size(); ++a) {
                    if (p.ancestors[a]) k.ancestors[a] = true;
                }
                k.slots = p.slots;
                k.slot_index = p.slot_index;
                k.vtable = p.vtable;
                k.method_names = p.method_names;
                k.method_index = p.method_index;
            }

            for (const auto& a : c.attrs) {
                ir::Slot slot;
                slot.name = a.name;
                slot.stereotype = a.stereotype;
                slot.type = resolve(a.type);
                slot.declared_in = id;
                check_attr_type(c, a, slot.type);
                slot.initial = ir::default_value(slot.type);
                if (a.initial) {
                    if (auto v = initial_value(*a.initial, slot.type)) {
                        slot.initial = *v;
                    } else {
                        report("SP011", "initial value of " + c.name + "." + a.name + " does not fit type " +
                                            ast::to_string(a.type),
                               a.span);
                    }
                }
                const int existing = k.find_slot(a.name);
                if (existing >= 0) {
                    const bool inherited = k.slots[static_cast<std::size_t>(existing)].declared_in != id;
                    report("SP011",
                           inherited ? "attribute " + c.name + "." + a.name + " shadows an inherited attribute"
                                     : "duplicate attribute " + c.name + "." + a.name,
                           a.span);
                    continue;
                }
                k.slot_index.emplace(a.name, static_cast<int>(k.slots.size()));
                k.slots.push_back(std::move(slot));
            }

            std::unordered_set<std::string> own_ops;
            auto& fns = fn_of_[static_cast<std::size_t>(id)];
            for (const auto& o : c.ops) {
                ir::Function f;
                f.name = o.name;
                f.stereotype = o.stereotype;
                f.owner_class = id;
                f.location = o.span.begin();
                for (const auto& p : o.params) f.params.push_back(resolve(p.type));
                f.result = o.return_type ? resolve(*o.return_type) : Type::of(TypeKind::Void);
                if (o.stereotype == Stereotype::Exist && (!o.params.empty() || o.return_type)) {
                    report("SP008", "<<Exist>> operation " + c.name + "." + o.name +
                                        " must take no parameters and return nothing",
                           o.span);
                }
                const int fidx = static_cast<int>(prog_.functions.size());
                fns.push_back(fidx);
                if (!own_ops.insert(o.name).second) {
                    report("SP011", "duplicate operation " + c.name + "." + o.name, o.span);
                    prog_.functions.push_back(std::move(f));
                    continue;
                }
                if (k.find_slot(o.name) >= 0) {
                    report("SP011", "operation " + c.name + "." + o.name + " has the same name as an attribute",
                           o.span);
                }
                const int slot = k.find_method(o.name);
                if (slot >= 0) {
                    const auto& base = prog_.functions[static_cast<std::size_t>(k.vtable[static_cast<std::size_t>(slot)])];
                    if (base.params != f.params || base.result != f.result || base.stereotype != f.stereotype) {
                        report("SP011", "operation " + c.name + "." + o.name + " overrides " +
                                            def(base.owner_class).name + "." + o.name +
                                            " with a different signature or stereotype",
                               o.span);
                    }
                    k.vtable[static_cast<std::size_t>(slot)] = fidx;
                } else {
                    k.method_index.emplace(o.name, static_cast<int>(k.vtable.size()));
                    k.vtable.push_back(fidx);
                    k.method_names.push_back(o.name);
                }
                prog_.functions.push_back(std::move(f));
            }
        }
    }

    void check_attr_type(const ast::ClassDef& c, const ast::AttrDef& a, const Type& t) {
        if (t.kind == TypeKind::Error) return;
        const std::string what = c.name + "." + a.name;
        if (a.stereotype == Stereotype::Ref) {
            if (t.kind != TypeKind::Entity || !t.nullable) {
                report("SP009", "<<ref>> attribute " + what + " must have a nullable entity type, found " +
                                    ast::to_string(a.type),
                       a.span);
            }
            return;
        }
        if (a.stereotype == Stereotype::Parts && t.kind != TypeKind::List) {
            report("SP011", "<<parts>> attribute " + what + " must have a list type", a.span);
            return;
        }
        if (t.kind == TypeKind::Entity && !t.nullable) {
            report("SP011", "entity-typed attribute " + what + " must be nullable (slots start as null)", a.span);
        }
    }

    // ---- phase 4: profile structure ---------------------------------------

    int count_slots(int id, Stereotype s) const {
        const auto& slots = cls(id).slots;
        return static_cast<int>(
            std::count_if(slots.begin(), slots.end(), [&](const ir::Slot& x) { return x.stereotype == s; }));
    }

    void check_structure() {
        std::vector<int> boundaries;
        for (int id = 0; id < static_cast<int>(m_.classes.size()); ++id) {
            const auto& c = def(id);
            if (!class_kind_ok(id)) continue;
            const std::string_view st = name_of(c.stereotype);
            if (frame(id) && !c.concept_tag) {
                report("SP003", "frame class " + c.name + " <<" + std::string(st) + ">> needs a concept tag",
                       c.name_span);
            }
            if (c.stereotype == Stereotype::Link && c.concept_tag) {
                report("SP004", "<<link>> class " + c.name + " is not a frame and must not carry a concept tag",
                       c.name_span);
            }
            if (c.stereotype == Stereotype::Whole) {
                const int parts = count_slots(id, Stereotype::Parts);
                if (parts != 1) {
                    report("SP005", "<<whole>> class " + c.name + " must have exactly one <<parts>> attribute, has " +
                                        std::to_string(parts),
                           c.name_span);
                }
            }
            if (c.stereotype == Stereotype::Atom && count_slots(id, Stereotype::Parts) > 0) {
                report("SP006", "<<atom>> class " + c.name + " must not have a <<parts>> attribute", c.name_span);
            }
            if (c.stereotype == Stereotype::Part) {
                const bool in = count_slots(id, Stereotype::In) > 0;
                const bool out = count_slots(id, Stereotype::Out) > 0;
                if (!in || !out) {
                    std::string missing = !in && !out ? "<<in>> and <<out>> attributes"
                                          : !in       ? "an <<in>> attribute"
                                                      : "an <<out>> attribute";
                    report("SP007", "<<part>> class " + c.name + " is an open system and needs " + missing,
                           c.name_span);
                }
            }
            if (c.stereotype == Stereotype::Boundary) boundaries.push_back(id);
        }

        if (boundaries.empty()) {
            report("SP001", "model " + m_.name + " has no <<boundary>> class", m_.span);
            return;
        }
        if (boundaries.size() > 1) {
            for (int id : boundaries) {
                report("SP001", "model has " + std::to_string(boundaries.size()) + " <<boundary>> classes; " +
                                    def(id).name + " is one of them",
                       def(id).name_span);
            }
        }
        for (int id : boundaries) {
            const auto& k = cls(id);
            std::vector<int> exists;
            for (int f : k.vtable) {
                if (prog_.functions[static_cast<std::size_t>(f)].stereotype == Stereotype::Exist) exists.push_back(f);
            }
            if (exists.size() != 1) {
                report("SP002", "<<boundary>> class " + def(id).name + " must have exactly one <<Exist>> operation, has " +
                                    std::to_string(exists.size()),
                       def(id).name_span);
            } else if (boundaries.size() == 1) {
                prog_.boundary_exist = exists.front();
            }
            if (def(id).is_abstract) {
                report("SP010", "<<boundary>> class " + def(id).name + " is instantiated by the engine and must be concrete",
                       def(id).name_span);
            }
            const int init = k.find_method("init");
            if (init >= 0) {
                const auto& f = prog_.functions[static_cast<std::size_t>(k.vtable[static_cast<std::size_t>(init)])];
                if (f.stereotype == Stereotype::Rule) {
                    if (!f.params.empty() || f.result.kind != TypeKind::Void) {
                        report("SP011", "init hook " + def(id).name + ".init must take no parameters and return nothing",
                               def(f.owner_class).span);
                    } else if (boundaries.size() == 1) {
                        prog_.init_function = k.vtable[static_cast<std::size_t>(init)];
                    }
                }
            }
        }
        if (boundaries.size() == 1) prog_.boundary_class = boundaries.front();
    }

    void check_associations() {
        for (const auto& a : m_.associations) {
            if (a.stereotype != Stereotype::Channel) {
                report("SP013", "association " + a.name + " must be stereotyped <<channel>>, not <<" +
                                    std::string(name_of(a.stereotype)) + ">>",
                       a.span);
            }
            for (const std::string* end : {&a.from, &a.to}) {
                const int c = prog_.find_class(*end);
                if (c < 0) {
                    report("SP013", "association " + a.name + " connects unknown class " + *end, a.span);
                } else if (!frame(c)) {
                    report("SP013", "association " + a.name + " end " + *end + " is not a frame class", a.span);
                }
            }
        }
    }

    void check_concepts() {
        std::unordered_map<std::string, std::string> owner;
        for (int id = 0; id < static_cast<int>(m_.classes.size()); ++id) {
            const auto& c = def(id);
            if (!frame(id) || !c.concept_tag) continue;
            auto [it, fresh] = owner.emplace(*c.concept_tag, c.name);
            if (!fresh) {
                report("SP101", "frame " + c.name + " shares concept \"" + *c.concept_tag + "\" with " + it->second,
                       c.name_span, Severity::Warning);
            }
        }
    }

    // ---- phase 5: bodies ---------------------------------------------------

    void check_bodies() {
        for (int id = 0; id < static_cast<int>(m_.classes.size()); ++id) {
            const auto& c = def(id);
            for (std::size_t i = 0; i < c.ops.size(); ++i) {
                auto& fn = prog_.functions[static_cast<std::size_t>(fn_of_[static_cast<std::size_t>(id)][i])];
                check_function(id, c.ops[i], fn);
            }
        }
    }

    void check_function(int self, const ast::OpDef& op, ir::Function& fn) {
        FunctionContext ctx;
        ctx.self_class = self;
        ctx.fn = &fn;
        ctx.scopes.emplace_back();
        for (std::size_t i = 0; i < op.params.size(); ++i) {
            const auto& p = op.params[i];
            if (ctx.scopes.back().count(p.name) != 0) {
                report("SP011", "duplicate parameter " + p.name, p.span);
            }
            ctx.scopes.back()[p.name] = static_cast<int>(ctx.locals.size());
            ctx.locals.push_back({p.name, fn.params[i], false});
        }
        fn.body = check_block(op.body, ctx);
        fn.local_count = static_cast<int>(ctx.locals.size());
        if (fn.result.kind != TypeKind::Void && fn.result.kind != TypeKind::Error && !always_returns(op.body)) {
            report("SP011", "operation " + def(self).name + "." + op.name + " may finish without returning a value",
                   op.span);
        }
    }

    std::vector<ir::Stmt> check_block(const std::vector<ast::Stmt>& body, FunctionContext& ctx) {
        ctx.scopes.emplace_back();
        std::vector<ir::Stmt> out;
        out.reserve(body.size());
        for (const auto& s : body) out.push_back(check_stmt(s, ctx));
        ctx.scopes.pop_back();
        return out;
    }

    static bool assignable(const Type& from, const Type& to, const ir::Program& p) {
        if (from.kind == TypeKind::Error || to.kind == TypeKind::Error) return true;
        switch (to.kind) {
            case TypeKind::Real: return from.kind == TypeKind::Real || from.kind == TypeKind::Int;
            case TypeKind::Int:
            case TypeKind::Bool:
            case TypeKind::Text: return from.kind == to.kind;
            case TypeKind::Entity:
                if (from.kind == TypeKind::Null) return to.nullable;
                if (from.kind != TypeKind::Entity) return false;
                if (from.nullable && !to.nullable) return false;
                return p.classes[static_cast<std::size_t>(from.class_id)].derives_from(to.class_id);
            case TypeKind::List: return from.kind == TypeKind::List && from.class_id == to.class_id;
            default: return false;
        }
    }

    /// Type-checks `e` against `to` and inserts Int->Real promotion.
    ir::Expr coerce(ir::Expr e, const Type& to, const SourceSpan& at, const std::string& what) {
        if (!assignable(e.type, to, prog_)) {
            report("SP011", what + ": expected " + type_name(to) + ", found " + type_name(e.type), at);
            return e;
        }
        if (to.kind == TypeKind::Real && e.type.kind == TypeKind::Int) return promote(std::move(e));
        return e;
    }

    static ir::Expr promote(ir::Expr e) {
        ir::Expr out;
        out.op = ir::ExprOp::IntToReal;
        out.type = Type::of(TypeKind::Real);
        out.location = e.location;
        out.operands.push_back(std::move(e));
        return out;
    }

    ir::Expr error_expr(const ast::Expr& e) {
        ir::Expr out;
        out.type = Type::of(TypeKind::Error);
        out.location = e.span.begin();
        return out;
    }

    bool require_value(const ir::Expr& e, const SourceSpan& at) {
        if (e.type.kind == TypeKind::Void) {
            report("SP011", "operation call returns nothing and cannot be used as a value", at);
            return false;
        }
        return true;
    }

    ir::Stmt check_stmt(const ast::Stmt& s, FunctionContext& ctx) {
        ir::Stmt out;
        out.location = s.span.begin();
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ast::LetStmt>) {
                    ir::Expr init = check_expr(n.init, ctx);
                    require_value(init, n.init.span);
                    Type t = init.type;
                    if (n.type) {
                        t = resolve(*n.type);
                        init = coerce(std::move(init), t, n.init.span, "initialiser of " + n.name);
                    } else if (t.kind == TypeKind::Null) {
                        report("SP011", "cannot infer the type of " + n.name + " from null; add a type", s.span);
                        t = Type::of(TypeKind::Error);
                    } else if (t.kind == TypeKind::Void) {
                        t = Type::of(TypeKind::Error);
                    }
                    if (ctx.scopes.back().count(n.name) != 0) {
                        report("SP011", "variable " + n.name + " is already declared in this block", s.span);
                    }
                    const int idx = static_cast<int>(ctx.locals.size());
                    ctx.locals.push_back({n.name, t, true});
                    out.op = ir::StmtOp::SetLocal;
                    out.index = idx;
                    out.value = std::move(init);
                    // Bind after the initialiser so `let x = x` sees the outer x.
                    ctx.scopes.back()[n.name] = idx;
                } else if constexpr (std::is_same_v<T, ast::AssignStmt>) {
                    check_assign(n, ctx, out);
                } else if constexpr (std::is_same_v<T, ast::ExprStmt>) {
                    out.op = ir::StmtOp::Eval;
                    out.value = check_expr(n.expr, ctx);
                } else if constexpr (std::is_same_v<T, ast::IfStmt>) {
                    out.op = ir::StmtOp::If;
                    out.value = check_condition(n.condition, ctx);
                    out.then_body = check_block(n.then_body, ctx);
                    out.else_body = check_block(n.else_body, ctx);
                } else if constexpr (std::is_same_v<T, ast::ForeachStmt>) {
                    out.op = ir::StmtOp::Foreach;
                    out.value = check_expr(n.list, ctx);
                    Type elem = Type::of(TypeKind::Error);
                    if (out.value.type.kind == TypeKind::List) {
                        elem = Type::entity(out.value.type.class_id, false);
                    } else if (out.value.type.kind != TypeKind::Error) {
                        report("SP011", "foreach needs a list, found " + type_name(out.value.type), n.list.span);
                    }
                    ctx.scopes.emplace_back();
                    out.index = static_cast<int>(ctx.locals.size());
                    ctx.locals.push_back({n.variable, elem, false});
                    ctx.scopes.back()[n.variable] = out.index;
                    out.then_body = check_block(n.body, ctx);
                    ctx.scopes.pop_back();
                } else if constexpr (std::is_same_v<T, ast::ReturnStmt>) {
                    out.op = ir::StmtOp::Return;
                    const Type& result = ctx.fn->result;
                    if (n.value) {
                        out.has_value = true;
                        ir::Expr v = check_expr(*n.value, ctx);
                        if (result.kind == TypeKind::Void) {
                            report("SP011", "operation " + ctx.fn->name + " returns nothing but a value is returned",
                                   s.span);
                        } else if (require_value(v, n.value->span)) {
                            v = coerce(std::move(v), result, n.value->span, "return value");
                        }
                        out.value = std::move(v);
                    } else if (result.kind != TypeKind::Void && result.kind != TypeKind::Error) {
                        report("SP011", "operation " + ctx.fn->name + " must return a " + type_name(result), s.span);
                    }
                }
            },
            s.node);
        return out;
    }

    ir::Expr check_condition(const ast::Expr& e, FunctionContext& ctx) {
        ir::Expr c = check_expr(e, ctx);
        if (!require_value(c, e.span)) return c;
        if (c.type.kind != TypeKind::Bool && c.type.kind != TypeKind::Error) {
            report("SP011", "condition must be Bool, found " + type_name(c.type), e.span);
        }
        return c;
    }

    void check_assign(const ast::AssignStmt& n, FunctionContext& ctx, ir::Stmt& out) {
        ir::Expr value = check_expr(n.value, ctx);
        require_value(value, n.value.span);
        if (const auto* name = std::get_if<ast::NameRef>(&n.target.node)) {
            const int local = ctx.lookup(name->name);
            if (local >= 0) {
                const Local& l = ctx.locals[static_cast<std::size_t>(local)];
                if (!l.assignable) {
                    report("SP011", "cannot assign to " + l.name + " (parameters and loop variables are read-only)",
                           n.target.span);
                }
                out.op = ir::StmtOp::SetLocal;
                out.index = local;
                out.value = coerce(std::move(value), l.type, n.value.span, "assignment to " + l.name);
                return;
            }
        }
        ir::Expr target = check_expr(n.target, ctx);
        if (target.type.kind == TypeKind::Error) {
            out.op = ir::StmtOp::Eval;
            out.value = std::move(value);
            return;
        }
        // Slot targets compile to a Slot read; reuse its owner and index.
        out.op = ir::StmtOp::SetSlot;
        out.index = target.index;
        out.object = std::move(target.operands.front());
        out.value = coerce(std::move(value), target.type, n.value.span, "assignment");
    }

    ir::Expr slot_read(ir::Expr object, int slot, const Type& type, SourceLocation loc) {
        ir::Expr out;
        out.op = ir::ExprOp::Slot;
        out.index = slot;
        out.type = type;
        out.location = std::move(loc);
        out.operands.push_back(std::move(object));
        return out;
    }

    ir::Expr self_expr(const FunctionContext& ctx, SourceLocation loc) const {
        ir::Expr out;
        out.op = ir::ExprOp::Self;
        out.type = Type::entity(ctx.self_class, false);
        out.location = std::move(loc);
        return out;
    }

    ir::Expr check_expr(const ast::Expr& e, FunctionContext& ctx) {
        const SourceLocation loc = e.span.begin();
        return std::visit(
            [&](const auto& n) -> ir::Expr {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, ast::Literal>) {
                    return check_literal(n, loc);
                } else if constexpr (std::is_same_v<T, ast::NameRef>) {
                    const int local = ctx.lookup(n.name);
                    if (local >= 0) {
                        ir::Expr out;
                        out.op = ir::ExprOp::Local;
                        out.index = local;
                        out.type = ctx.locals[static_cast<std::size_t>(local)].type;
                        out.location = loc;
                        return out;
                    }
                    const auto& k = cls(ctx.self_class);
                    const int slot = k.find_slot(n.name);
                    if (slot >= 0) {
                        return slot_read(self_expr(ctx, loc), slot, k.slots[static_cast<std::size_t>(slot)].type, loc);
                    }
                    report("SP011", "unknown name " + n.name + " in " + def(ctx.self_class).name + "." + ctx.fn->name,
                           e.span);
                    return error_expr(e);
                } else if constexpr (std::is_same_v<T, ast::SelfRef>) {
                    return self_expr(ctx, loc);
                } else if constexpr (std::is_same_v<T, ast::SlotRead>) {
                    ir::Expr obj = check_expr(*n.object, ctx);
                    if (obj.type.kind == TypeKind::Error) return error_expr(e);
                    if (obj.type.kind != TypeKind::Entity) {
                        report("SP011", "cannot read slot " + n.slot + " of " + type_name(obj.type), e.span);
                        return error_expr(e);
                    }
                    const auto& k = cls(obj.type.class_id);
                    const int slot = k.find_slot(n.slot);
                    if (slot < 0) {
                        report("SP011", "class " + k.name + " has no attribute " + n.slot, e.span);
                        return error_expr(e);
                    }
                    const Type t = k.slots[static_cast<std::size_t>(slot)].type;
                    return slot_read(std::move(obj), slot, t, loc);
                } else if constexpr (std::is_same_v<T, ast::Unary>) {
                    return check_unary(n, e, ctx);
                } else if constexpr (std::is_same_v<T, ast::Binary>) {
                    return check_binary(n, e, ctx);
                } else if constexpr (std::is_same_v<T, ast::Send>) {
                    return check_send(n, e, ctx);
                } else if constexpr (std::is_same_v<T, ast::Call>) {
                    return check_call(n, e, ctx);
                } else {
                    return check_new(n, e, ctx);
                }
            },
            e.node);
    }

    static ir::Expr check_literal(const ast::Literal& lit, const SourceLocation& loc) {
        ir::Expr out;
        out.op = ir::ExprOp::Const;
        out.location = loc;
        std::visit(
            [&](const auto& v) {
                using V = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<V, ast::NullLiteral>) {
                    out.type = Type::of(TypeKind::Null);
                    out.constant = NullValue{};
                } else if constexpr (std::is_same_v<V, std::int64_t>) {
                    out.type = Type::of(TypeKind::Int);
                    out.constant = v;
                } else if constexpr (std::is_same_v<V, double>) {
                    out.type = Type::of(TypeKind::Real);
                    out.constant = v;
                } else if constexpr (std::is_same_v<V, bool>) {
                    out.type = Type::of(TypeKind::Bool);
                    out.constant = v;
                } else {
                    out.type = Type::of(TypeKind::Text);
                    out.constant = make_text(v);
                }
            },
            lit.value);
        return out;
    }

    ir::Expr check_unary(const ast::Unary& n, const ast::Expr& e, FunctionContext& ctx) {
        ir::Expr operand = check_expr(*n.operand, ctx);
        if (!require_value(operand, n.operand->span)) return error_expr(e);
        ir::Expr out;
        out.location = e.span.begin();
        if (n.op == ast::UnaryOp::Not) {
            out.op = ir::ExprOp::Not;
            out.type = Type::of(TypeKind::Bool);
            if (operand.type.kind != TypeKind::Bool && operand.type.kind != TypeKind::Error) {
                report("SP011", "'not' needs Bool, found " + type_name(operand.type), e.span);
            }
        } else {
            out.op = ir::ExprOp::Neg;
            out.type = operand.type;
            if (!is_numeric(operand.type) && operand.type.kind != TypeKind::Error) {
                report("SP011", "'-' needs Int or Real, found " + type_name(operand.type), e.span);
                out.type = Type::of(TypeKind::Error);
            }
        }
        out.operands.push_back(std::move(operand));
        return out;
    }

    ir::Expr check_binary(const ast::Binary& n, const ast::Expr& e, FunctionContext& ctx) {
        using B = ast::BinaryOp;
        ir::Expr lhs = check_expr(*n.lhs, ctx);
        ir::Expr rhs = check_expr(*n.rhs, ctx);
        if (!require_value(lhs, n.lhs->span) || !require_value(rhs, n.rhs->span)) return error_expr(e);
        ir::Expr out;
        out.location = e.span.begin();
        const bool poisoned = lhs.type.kind == TypeKind::Error || rhs.type.kind == TypeKind::Error;
        const std::string op_text(ast::spelling(n.op));
        auto mismatch = [&] {
            report("SP011", "operator '" + op_text + "' cannot combine " + type_name(lhs.type) + " and " +
                                type_name(rhs.type),
                   e.span);
        };
        auto numeric = [&] {
            if (lhs.type.kind == TypeKind::Real || rhs.type.kind == TypeKind::Real) {
                out.real_operands = true;
                if (lhs.type.kind == TypeKind::Int) lhs = promote(std::move(lhs));
                if (rhs.type.kind == TypeKind::Int) rhs = promote(std::move(rhs));
            }
        };
        static const std::unordered_map<B, ir::ExprOp> kOps{
            {B::Add, ir::ExprOp::Add}, {B::Sub, ir::ExprOp::Sub}, {B::Mul, ir::ExprOp::Mul},
            {B::Div, ir::ExprOp::Div}, {B::Eq, ir::ExprOp::Eq},   {B::Ne, ir::ExprOp::Ne},
            {B::Lt, ir::ExprOp::Lt},   {B::Le, ir::ExprOp::Le},   {B::Gt, ir::ExprOp::Gt},
            {B::Ge, ir::ExprOp::Ge},   {B::And, ir::ExprOp::And}, {B::Or, ir::ExprOp::Or},
        };
        out.op = kOps.at(n.op);
        switch (n.op) {
            case B::Add:
            case B::Sub:
            case B::Mul:
            case B::Div:
                if (poisoned) {
                    out.type = Type::of(TypeKind::Error);
                } else if (!is_numeric(lhs.type) || !is_numeric(rhs.type)) {
                    mismatch();
                    out.type = Type::of(TypeKind::Error);
                } else {
                    numeric();
                    out.type = Type::of(out.real_operands ? TypeKind::Real : TypeKind::Int);
                }
                break;
            case B::Lt:
            case B::Le:
            case B::Gt:
            case B::Ge:
                out.type = Type::of(TypeKind::Bool);
                if (!poisoned) {
                    if (!is_numeric(lhs.type) || !is_numeric(rhs.type)) {
                        mismatch();
                    } else {
                        numeric();
                    }
                }
                break;
            case B::Eq:
            case B::Ne:
                out.type = Type::of(TypeKind::Bool);
                if (!poisoned) {
                    auto ref_like = [](const Type& t) {
                        return t.kind == TypeKind::Entity || t.kind == TypeKind::Null;
                    };
                    if (is_numeric(lhs.type) && is_numeric(rhs.type)) {
                        numeric();
                    } else if (ref_like(lhs.type) && ref_like(rhs.type)) {
                        // any two references may be compared for identity
                    } else if (lhs.type.kind != rhs.type.kind || lhs.type.kind == TypeKind::List) {
                        mismatch();
                    }
                }
                break;
            case B::And:
            case B::Or:
                out.type = Type::of(TypeKind::Bool);
                if (!poisoned && (lhs.type.kind != TypeKind::Bool || rhs.type.kind != TypeKind::Bool)) mismatch();
                break;
        }
        out.operands.push_back(std::move(lhs));
        out.operands.push_back(std::move(rhs));
        return out;
    }

    ir::Expr check_send(const ast::Send& n, const ast::Expr& e, FunctionContext& ctx) {
        ir::Expr recv = check_expr(*n.receiver, ctx);
        std::vector<ir::Expr> args;
        for (const auto& a : n.args) args.push_back(check_expr(a, ctx));
        if (recv.type.kind == TypeKind::Error) return error_expr(e);
        if (recv.type.kind != TypeKind::Entity) {
            report("SP011", "send receiver must be an entity, found " + type_name(recv.type), n.receiver->span);
            return error_expr(e);
        }
        const auto& k = cls(recv.type.class_id);
        const int slot = k.find_method(n.op);
        if (slot < 0) {
            report("SP011", "class " + k.name + " has no operation " + n.op, e.span);
            return error_expr(e);
        }
        const auto& fn = prog_.functions[static_cast<std::size_t>(k.vtable[static_cast<std::size_t>(slot)])];
        if (args.size() != fn.params.size()) {
            report("SP011", "operation " + k.name + "." + n.op + " takes " + std::to_string(fn.params.size()) +
                                " argument(s), " + std::to_string(args.size()) + " given",
                   e.span);
            return error_expr(e);
        }
        ir::Expr out;
        out.op = ir::ExprOp::Send;
        out.index = slot;
        out.name = n.op;
        out.type = fn.result;
        out.location = e.span.begin();
        out.operands.push_back(std::move(recv));
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (!require_value(args[i], n.args[i].span)) continue;
            out.operands.push_back(coerce(std::move(args[i]), fn.params[i], n.args[i].span,
                                          "argument " + std::to_string(i + 1) + " of " + n.op));
        }
        if (out.operands.size() != args.size() + 1) return error_expr(e);
        return out;
    }

    ir::Expr check_call(const ast::Call& n, const ast::Expr& e, FunctionContext& ctx) {
        using ast::Builtin;
        const std::string fname(ast::spelling(n.fn));
        const std::size_t arity = n.fn == Builtin::Rand ? 0 : n.fn == Builtin::Push ? 2 : 1;
        if (n.args.size() != arity) {
            report("SP011", fname + " takes " + std::to_string(arity) + " argument(s)", e.span);
            return error_expr(e);
        }
        ir::Expr out;
        out.location = e.span.begin();
        if (n.fn == Builtin::Rand) {
            out.op = ir::ExprOp::Rand;
            out.type = Type::of(TypeKind::Real);
            return out;
        }
        ir::Expr list = check_expr(n.args.front(), ctx);
        if (list.type.kind == TypeKind::Error) return error_expr(e);
        if (list.type.kind != TypeKind::List) {
            report("SP011", fname + " needs a list, found " + type_name(list.type), n.args.front().span);
            return error_expr(e);
        }
        if (n.fn == Builtin::Len) {
            out.op = ir::ExprOp::Len;
            out.type = Type::of(TypeKind::Int);
            out.operands.push_back(std::move(list));
            return out;
        }
        // push / popFront mutate a «parts» slot in place.
        if (list.op != ir::ExprOp::Slot ||
            cls(list.operands.front().type.class_id).slots[static_cast<std::size_t>(list.index)].stereotype !=
                Stereotype::Parts) {
            report("SP011", fname + " needs a <<parts>> attribute as its first argument", n.args.front().span);
            return error_expr(e);
        }
        const int elem = list.type.class_id;
        out.index = list.index;
        out.operands.push_back(std::move(list.operands.front()));
        if (n.fn == Builtin::PopFront) {
            out.op = ir::ExprOp::PopFront;
            out.type = Type::entity(elem, false);
            return out;
        }
        out.op = ir::ExprOp::Push;
        out.type = Type::of(TypeKind::Void);
        ir::Expr item = check_expr(n.args[1], ctx);
        if (require_value(item, n.args[1].span)) {
            item = coerce(std::move(item), Type::entity(elem, false), n.args[1].span, "push element");
        }
        out.operands.push_back(std::move(item));
        return out;
    }

    ir::Expr check_new(const ast::New& n, const ast::Expr& e, FunctionContext& ctx) {
        const int c = prog_.find_class(n.class_name);
        if (c < 0) {
            report("SP011", "new of unknown class " + n.class_name, e.span);
            return error_expr(e);
        }
        if (def(c).is_abstract) {
            report("SP010", "abstract class " + n.class_name + " cannot be instantiated with new", e.span);
        }
        ir::Expr out;
        out.op = ir::ExprOp::New;
        out.index = c;
        out.type = Type::entity(c, false);
        out.location = e.span.begin();
        std::unordered_set<std::string> seen;
        const auto& k = cls(c);
        for (const auto& f : n.fields) {
            ir::Expr v = check_expr(f.value, ctx);
            const int slot = k.find_slot(f.name);
            if (slot < 0) {
                report("SP011", "class " + n.class_name + " has no attribute " + f.name, f.value.span);
                continue;
            }
            if (!seen.insert(f.name).second) {
                report("SP011", "attribute " + f.name + " initialised twice", f.value.span);
                continue;
            }
            if (!require_value(v, f.value.span)) continue;
            out.field_slots.push_back(slot);
            out.operands.push_back(coerce(std::move(v), k.slots[static_cast<std::size_t>(slot)].type, f.value.span,
                                          "field " + f.name));
        }
        return out;
    }

    const ast::Model& m_;
    ir::Program prog_;
    std::vector<std::vector<int>> fn_of_;  // class -> function index per declared op
    std::vector<Diagnostic> diags_;
};

}  // namespace

ValidationResult validate(const ast::Model& m) { return Validator(m).run(); }

}  // namespace uspkit
