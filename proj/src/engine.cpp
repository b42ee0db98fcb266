#include "uspkit/engine.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace uspkit {

namespace {

using ir::ExprOp;
using ir::StmtOp;
using ir::TypeKind;

struct RuntimeFault {
    std::string rule;
    std::string message;
    SourceLocation where;
};

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

struct ResolvedProbe {
    std::string path;
    bool queue_length = false;
    std::vector<int> slots;  // slot path from the root instance
    int head_slot = -1;
    int next_slot = -1;
};

enum class Flow { Normal, Return };

struct Frame {
    EntityRef self;
    std::vector<Value> locals;
};

}  // namespace

struct RunState::Impl {
    explicit Impl(const ValidatedModel& model) : vm(model), prog(&vm.program()) {}

    ValidatedModel vm;
    const ir::Program* prog;
    RunOptions options;
    SplitMix64 rng;
    std::vector<Entity> entities;
    EntityRef boundary_ref;
    EntityRef root_ref;
    int root_class = -1;

    std::uint64_t tick = 0;
    std::uint64_t seq = 0;
    std::uint64_t tick_messages = 0;
    std::uint32_t depth = 0;
    bool halted = false;

    Sha256 hash;
    std::vector<TraceSink*> sinks;
    std::vector<std::uint64_t> fn_counts;
    std::vector<ResolvedProbe> probes;
    std::vector<std::vector<std::int64_t>> samples;
    std::string line;
    std::vector<std::string> rendered_args;

    // ---- helpers ----------------------------------------------------------

    const ir::Class& class_of(EntityRef e) const {
        return prog->classes[static_cast<std::size_t>(entities[e.index].class_id)];
    }

    std::string id(EntityRef e) const { return class_of(e).name + "#" + std::to_string(e.index); }

    std::string render(const Value& v) const {
        return std::visit(
            [&](const auto& x) -> std::string {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, NullValue>) {
                    return "null";
                } else if constexpr (std::is_same_v<T, std::int64_t>) {
                    return std::to_string(x);
                } else if constexpr (std::is_same_v<T, double>) {
                    return format_real(x);
                } else if constexpr (std::is_same_v<T, bool>) {
                    return x ? "true" : "false";
                } else if constexpr (std::is_same_v<T, TextValue>) {
                    return x.str();
                } else if constexpr (std::is_same_v<T, EntityRef>) {
                    return id(x);
                } else {
                    std::string s = "[";
                    for (std::size_t i = 0; i < x.items().size(); ++i) {
                        if (i != 0) s += ',';
                        s += id(x.items()[i]);
                    }
                    return s + "]";
                }
            },
            v);
    }

    [[noreturn]] static void fault(std::string rule, std::string msg, const SourceLocation& at) {
        throw RuntimeFault{std::move(rule), std::move(msg), at};
    }

    EntityRef deref(const Value& v, const SourceLocation& at, std::string_view what) const {
        if (const auto* r = std::get_if<EntityRef>(&v)) return *r;
        fault("RT001", "null dereference: " + std::string(what), at);
    }

    bool conforms(const Value& v, const ir::Type& t) const {
        switch (t.kind) {
            case TypeKind::Int: return std::holds_alternative<std::int64_t>(v);
            case TypeKind::Real: return std::holds_alternative<double>(v);
            case TypeKind::Bool: return std::holds_alternative<bool>(v);
            case TypeKind::Text: return std::holds_alternative<TextValue>(v);
            case TypeKind::List: return std::holds_alternative<ListValue>(v);
            case TypeKind::Entity:
                if (is_null(v)) return t.nullable;
                if (const auto* r = std::get_if<EntityRef>(&v)) return class_of(*r).derives_from(t.class_id);
                return false;
            default: return false;
        }
    }

    void write_slot(EntityRef owner, int slot, Value v, const SourceLocation& at) {
        const ir::Slot& decl = class_of(owner).slots[static_cast<std::size_t>(slot)];
        if (!conforms(v, decl.type)) {
            fault("RT006", "value " + render(v) + " does not fit slot " + class_of(owner).name + "." + decl.name +
                               " of type " + ir::to_string(decl.type, *prog),
                  at);
        }
        entities[owner.index].slots[static_cast<std::size_t>(slot)] = std::move(v);
    }

    EntityRef create(int cls) {
        const auto& k = prog->classes[static_cast<std::size_t>(cls)];
        Entity e;
        e.class_id = cls;
        e.slots.reserve(k.slots.size());
        for (const auto& s : k.slots) e.slots.push_back(s.initial);
        const EntityRef ref{static_cast<std::uint32_t>(entities.size())};
        entities.push_back(std::move(e));
        return ref;
    }

    // ---- tracing ----------------------------------------------------------

    void record(std::optional<EntityRef> sender, EntityRef receiver, int fn, const std::vector<Value>& args) {
        ++seq;
        const ir::Function& f = prog->functions[static_cast<std::size_t>(fn)];
        ++fn_counts[static_cast<std::size_t>(fn)];
        rendered_args.clear();
        for (const auto& a : args) rendered_args.push_back(render(a));
        const std::string from = sender ? id(*sender) : std::string("engine");
        const std::string to = id(receiver);
        line.clear();
        append_canonical_line(line, tick, seq, from, to, f.name, rendered_args);
        hash.update(line);
        if (!sinks.empty()) {
            TraceEvent ev{tick, seq, from, to, f.name, rendered_args};
            for (auto* s : sinks) s->on_event(ev, line);
        }
    }

    // ---- interpreter --------------------------------------------------------

    Value invoke(std::optional<EntityRef> sender, EntityRef receiver, int fn, std::vector<Value> args,
                 const SourceLocation& at) {
        const ir::Function& f = prog->functions[static_cast<std::size_t>(fn)];
        if (++tick_messages > options.max_messages_per_tick) {
            fault("RT004", "more than " + std::to_string(options.max_messages_per_tick) + " messages in tick " +
                               std::to_string(tick),
                  at);
        }
        if (depth >= options.max_call_depth) {
            fault("RT003", "call depth exceeds " + std::to_string(options.max_call_depth) + " at " + f.name, at);
        }
        record(sender, receiver, fn, args);
        ++depth;
        Frame frame{receiver, std::vector<Value>(static_cast<std::size_t>(f.local_count))};
        for (std::size_t i = 0; i < args.size(); ++i) frame.locals[i] = std::move(args[i]);
        Value result;
        const Flow flow = exec(f.body, frame, result);
        if (flow != Flow::Return && f.result.kind != TypeKind::Void) {
            fault("RT007", "operation " + f.name + " finished without returning a value", f.location);
        }
        --depth;
        return result;
    }

    Flow exec(const std::vector<ir::Stmt>& body, Frame& frame, Value& result) {
        for (const auto& s : body) {
            switch (s.op) {
                case StmtOp::SetLocal: frame.locals[static_cast<std::size_t>(s.index)] = eval(s.value, frame); break;
                case StmtOp::SetSlot: {
                    const EntityRef owner = deref(eval(s.object, frame), s.location, "assignment target");
                    Value v = eval(s.value, frame);
                    write_slot(owner, s.index, std::move(v), s.location);
                    break;
                }
                case StmtOp::Eval: eval(s.value, frame); break;
                case StmtOp::If: {
                    const bool cond = std::get<bool>(eval(s.value, frame));
                    if (exec(cond ? s.then_body : s.else_body, frame, result) == Flow::Return) return Flow::Return;
                    break;
                }
                case StmtOp::Foreach: {
                    const Value list = eval(s.value, frame);  // snapshot
                    for (const EntityRef item : std::get<ListValue>(list).items()) {
                        frame.locals[static_cast<std::size_t>(s.index)] = item;
                        if (exec(s.then_body, frame, result) == Flow::Return) return Flow::Return;
                    }
                    break;
                }
                case StmtOp::Return:
                    if (s.has_value) result = eval(s.value, frame);
                    return Flow::Return;
            }
        }
        return Flow::Normal;
    }

    static void check_overflow(bool overflow, const SourceLocation& at) {
        if (overflow) fault("RT008", "integer overflow", at);
    }

    Value arithmetic(const ir::Expr& e, Frame& frame) {
        const Value a = eval(e.operands[0], frame);
        const Value b = eval(e.operands[1], frame);
        if (e.real_operands) {
            const double x = std::get<double>(a);
            const double y = std::get<double>(b);
            switch (e.op) {
                case ExprOp::Add: return x + y;
                case ExprOp::Sub: return x - y;
                case ExprOp::Mul: return x * y;
                default: return x / y;
            }
        }
        const std::int64_t x = std::get<std::int64_t>(a);
        const std::int64_t y = std::get<std::int64_t>(b);
        std::int64_t r = 0;
        switch (e.op) {
            case ExprOp::Add:
                check_overflow(__builtin_add_overflow(x, y, &r), e.location);
                return r;
            case ExprOp::Sub:
                check_overflow(__builtin_sub_overflow(x, y, &r), e.location);
                return r;
            case ExprOp::Mul:
                check_overflow(__builtin_mul_overflow(x, y, &r), e.location);
                return r;
            default:
                if (y == 0) fault("RT002", "Int division by zero", e.location);
                if (x == std::numeric_limits<std::int64_t>::min() && y == -1) fault("RT008", "integer overflow", e.location);
                if (x % y != 0) {
                    fault("RT002", "Int division " + std::to_string(x) + " / " + std::to_string(y) +
                                       " has a remainder; use Real operands",
                          e.location);
                }
                return x / y;
        }
    }

    bool ordering(const ir::Expr& e, Frame& frame) {
        const Value a = eval(e.operands[0], frame);
        const Value b = eval(e.operands[1], frame);
        auto cmp = [&](auto x, auto y) {
            switch (e.op) {
                case ExprOp::Lt: return x < y;
                case ExprOp::Le: return x <= y;
                case ExprOp::Gt: return x > y;
                default: return x >= y;
            }
        };
        if (e.real_operands) return cmp(std::get<double>(a), std::get<double>(b));
        return cmp(std::get<std::int64_t>(a), std::get<std::int64_t>(b));
    }

    bool equal(const ir::Expr& e, Frame& frame) {
        const Value a = eval(e.operands[0], frame);
        const Value b = eval(e.operands[1], frame);
        if (e.real_operands) return std::get<double>(a) == std::get<double>(b);
        return a == b;
    }

    Value eval(const ir::Expr& e, Frame& frame) {
        switch (e.op) {
            case ExprOp::Const: return e.constant;
            case ExprOp::Local: return frame.locals[static_cast<std::size_t>(e.index)];
            case ExprOp::Self: return frame.self;
            case ExprOp::Slot: {
                const EntityRef owner = deref(eval(e.operands[0], frame), e.location, "slot read");
                return entities[owner.index].slots[static_cast<std::size_t>(e.index)];
            }
            case ExprOp::IntToReal: return static_cast<double>(std::get<std::int64_t>(eval(e.operands[0], frame)));
            case ExprOp::Neg: {
                const Value v = eval(e.operands[0], frame);
                if (const auto* d = std::get_if<double>(&v)) return -*d;
                const std::int64_t i = std::get<std::int64_t>(v);
                if (i == std::numeric_limits<std::int64_t>::min()) fault("RT008", "integer overflow", e.location);
                return -i;
            }
            case ExprOp::Not: return !std::get<bool>(eval(e.operands[0], frame));
            case ExprOp::Add:
            case ExprOp::Sub:
            case ExprOp::Mul:
            case ExprOp::Div: return arithmetic(e, frame);
            case ExprOp::Eq: return equal(e, frame);
            case ExprOp::Ne: return !equal(e, frame);
            case ExprOp::Lt:
            case ExprOp::Le:
            case ExprOp::Gt:
            case ExprOp::Ge: return ordering(e, frame);
            case ExprOp::And:
                return std::get<bool>(eval(e.operands[0], frame)) && std::get<bool>(eval(e.operands[1], frame));
            case ExprOp::Or:
                return std::get<bool>(eval(e.operands[0], frame)) || std::get<bool>(eval(e.operands[1], frame));
            case ExprOp::Send: {
                const Value recv = eval(e.operands[0], frame);
                std::vector<Value> args;
                args.reserve(e.operands.size() - 1);
                for (std::size_t i = 1; i < e.operands.size(); ++i) args.push_back(eval(e.operands[i], frame));
                const EntityRef target = deref(recv, e.location, "send " + e.name + " to null");
                const int fn = class_of(target).vtable[static_cast<std::size_t>(e.index)];
                return invoke(frame.self, target, fn, std::move(args), e.location);
            }
            case ExprOp::Rand: return rng.next_unit();
            case ExprOp::Len: {
                const Value v = eval(e.operands[0], frame);
                return static_cast<std::int64_t>(std::get<ListValue>(v).items().size());
            }
            case ExprOp::Push: {
                const EntityRef owner = deref(eval(e.operands[0], frame), e.location, "push target");
                const Value item = eval(e.operands[1], frame);
                const EntityRef ref = deref(item, e.location, "push of null");
                auto& list = std::get<ListValue>(entities[owner.index].slots[static_cast<std::size_t>(e.index)]);
                list.mutable_items().push_back(ref);
                return NullValue{};
            }
            case ExprOp::PopFront: {
                const EntityRef owner = deref(eval(e.operands[0], frame), e.location, "popFront target");
                auto& list = std::get<ListValue>(entities[owner.index].slots[static_cast<std::size_t>(e.index)]);
                if (list.items().empty()) fault("RT005", "popFront on an empty list", e.location);
                auto& items = list.mutable_items();
                const EntityRef front = items.front();
                items.erase(items.begin());
                return front;
            }
            case ExprOp::New: {
                std::vector<Value> fields;
                fields.reserve(e.operands.size());
                for (const auto& op : e.operands) fields.push_back(eval(op, frame));
                const EntityRef ref = create(e.index);
                for (std::size_t i = 0; i < fields.size(); ++i) {
                    write_slot(ref, e.field_slots[i], std::move(fields[i]), e.location);
                }
                return ref;
            }
        }
        return NullValue{};
    }

    Diagnostic to_diagnostic(const RuntimeFault& f) const {
        return Diagnostic{f.rule, Severity::Error,
                          f.message + " (tick " + std::to_string(tick) + ", trace seq " + std::to_string(seq) + ")",
                          f.where, {}};
    }

    // ---- probes -------------------------------------------------------------

    std::optional<std::string> resolve_probe(const std::string& path, ResolvedProbe& out) const {
        out.path = path;
        const ir::Class& root = prog->classes[static_cast<std::size_t>(root_class)];
        if (path == kQueueLengthProbe) {
            out.queue_length = true;
            out.head_slot = root.find_slot("head");
            if (out.head_slot < 0) return "root class " + root.name + " has no head slot for queue_length";
            const ir::Type& t = root.slots[static_cast<std::size_t>(out.head_slot)].type;
            if (t.kind != TypeKind::Entity) return "slot " + root.name + ".head is not an entity reference";
            const ir::Class& link = prog->classes[static_cast<std::size_t>(t.class_id)];
            for (std::size_t i = 0; i < link.slots.size(); ++i) {
                const auto& s = link.slots[i];
                if (s.stereotype == Stereotype::Ref && s.type.kind == TypeKind::Entity && s.type.class_id == t.class_id) {
                    out.next_slot = static_cast<int>(i);
                    break;
                }
            }
            if (out.next_slot < 0) return "class " + link.name + " has no self-typed <<ref>> slot to follow";
            return std::nullopt;
        }
        int current = root_class;
        std::size_t begin = 0;
        while (true) {
            const std::size_t dot = path.find('.', begin);
            const std::string seg = path.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
            const ir::Class& k = prog->classes[static_cast<std::size_t>(current)];
            const int slot = k.find_slot(seg);
            if (slot < 0) return "class " + k.name + " has no slot " + seg + " (probe " + path + ")";
            out.slots.push_back(slot);
            const ir::Type& t = k.slots[static_cast<std::size_t>(slot)].type;
            if (dot == std::string::npos) {
                if (t.kind == TypeKind::Real || t.kind == TypeKind::Text) {
                    return "probe " + path + " is not integer-valued";
                }
                return std::nullopt;
            }
            if (t.kind != TypeKind::Entity) return "probe " + path + " walks through non-reference slot " + seg;
            current = t.class_id;
            begin = dot + 1;
        }
    }

    std::int64_t sample(const ResolvedProbe& p) const {
        const Entity& root = entities[root_ref.index];
        if (p.queue_length) {
            std::int64_t n = 0;
            Value cur = root.slots[static_cast<std::size_t>(p.head_slot)];
            while (const auto* r = std::get_if<EntityRef>(&cur)) {
                if (++n > static_cast<std::int64_t>(entities.size())) break;  // cyclic chain
                cur = entities[r->index].slots[static_cast<std::size_t>(p.next_slot)];
            }
            return n;
        }
        const Entity* e = &root;
        for (std::size_t i = 0; i < p.slots.size(); ++i) {
            const Value& v = e->slots[static_cast<std::size_t>(p.slots[i])];
            if (i + 1 < p.slots.size()) {
                const auto* r = std::get_if<EntityRef>(&v);
                if (r == nullptr) return 0;  // absent along the path counts as zero
                e = &entities[r->index];
                continue;
            }
            if (const auto* x = std::get_if<std::int64_t>(&v)) return *x;
            if (const auto* b = std::get_if<bool>(&v)) return *b ? 1 : 0;
            if (const auto* l = std::get_if<ListValue>(&v)) return static_cast<std::int64_t>(l->items().size());
            return std::holds_alternative<EntityRef>(v) ? 1 : 0;
        }
        return 0;
    }

    RunStats stats() const {
        RunStats s;
        s.ticks = tick;
        s.warmup = options.warmup;
        s.events = seq;
        for (std::size_t i = 0; i < fn_counts.size(); ++i) {
            if (fn_counts[i] == 0) continue;
            s.message_counts[prog->functions[i].name] += fn_counts[i];
        }
        for (std::size_t i = 0; i < probes.size(); ++i) {
            ProbeSeries series;
            series.path = probes[i].path;
            series.samples = samples[i];
            double sum = 0.0;
            std::uint64_t n = 0;
            for (std::size_t t = 0; t < series.samples.size(); ++t) {
                if (t < options.warmup) continue;
                sum += static_cast<double>(series.samples[t]);
                series.max = n == 0 ? series.samples[t] : std::max(series.max, series.samples[t]);
                ++n;
            }
            series.mean = n == 0 ? 0.0 : sum / static_cast<double>(n);
            s.probes.push_back(std::move(series));
        }
        return s;
    }
};

struct EngineAccess {
    static RunState make(std::unique_ptr<RunState::Impl> impl) { return RunState(std::move(impl)); }
    static RunState::Impl& impl(RunState& s) { return *s.impl_; }
};

RunState::RunState(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
RunState::RunState(RunState&&) noexcept = default;
RunState& RunState::operator=(RunState&&) noexcept = default;
RunState::~RunState() = default;

std::uint64_t RunState::tick() const { return impl_->tick; }
std::uint64_t RunState::events() const { return impl_->seq; }
bool RunState::halted() const { return impl_->halted; }
EntityRef RunState::boundary() const { return impl_->boundary_ref; }
EntityRef RunState::root() const { return impl_->root_ref; }
const std::vector<Entity>& RunState::entities() const { return impl_->entities; }
std::string RunState::entity_id(EntityRef e) const { return impl_->id(e); }
std::string RunState::render_value(const Value& v) const { return impl_->render(v); }
std::string RunState::trace_hash() const { return impl_->hash.hex_digest(); }
RunStats RunState::stats() const { return impl_->stats(); }
void RunState::add_sink(TraceSink* sink) { impl_->sinks.push_back(sink); }

const Value& RunState::slot(EntityRef e, std::string_view name) const {
    const auto& k = impl_->class_of(e);
    const int idx = k.find_slot(std::string(name));
    if (idx < 0) throw std::out_of_range("no slot " + std::string(name) + " on " + k.name);
    return impl_->entities[e.index].slots[static_cast<std::size_t>(idx)];
}

std::string RunState::render() const {
    std::string out;
    for (std::uint32_t i = 0; i < impl_->entities.size(); ++i) {
        const EntityRef ref{i};
        const auto& k = impl_->class_of(ref);
        out += impl_->id(ref);
        for (std::size_t s = 0; s < k.slots.size(); ++s) {
            out += ' ';
            out += k.slots[s].name;
            out += '=';
            out += impl_->render(impl_->entities[i].slots[s]);
        }
        out += '\n';
    }
    return out;
}

std::int64_t RunState::sample(std::string_view probe) const {
    ResolvedProbe p;
    if (auto err = impl_->resolve_probe(std::string(probe), p)) throw std::invalid_argument(*err);
    return impl_->sample(p);
}

namespace {

std::optional<Value> parse_override(const std::string& text, const ir::Type& t) {
    switch (t.kind) {
        case TypeKind::Int: {
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc{} || p != text.data() + text.size()) return std::nullopt;
            return v;
        }
        case TypeKind::Real: {
            double v = 0;
            auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec != std::errc{} || p != text.data() + text.size()) return std::nullopt;
            return v;
        }
        case TypeKind::Bool:
            if (text == "true") return true;
            if (text == "false") return false;
            return std::nullopt;
        case TypeKind::Text: return make_text(text);
        default: return std::nullopt;
    }
}

Diagnostic setup_error(std::string rule, std::string msg, const SourceLocation& at) {
    return Diagnostic{std::move(rule), Severity::Error, std::move(msg), at, {}};
}

int default_root(const ir::Program& prog) {
    int found = -1;
    for (const auto& k : prog.classes) {
        if (k.stereotype != Stereotype::Whole || k.is_abstract) continue;
        if (found >= 0) return -2;
        found = k.id;
    }
    return found;
}

}  // namespace

InstantiateResult instantiate(const ValidatedModel& vm, const RunOptions& options, TraceSink* sink) {
    InstantiateResult out;
    auto impl = std::make_unique<RunState::Impl>(vm);
    const ir::Program& prog = *impl->prog;
    const SourceLocation model_loc = vm.model().span.begin();
    impl->options = options;
    impl->rng = SplitMix64(options.seed);
    impl->fn_counts.assign(prog.functions.size(), 0);
    if (sink != nullptr) impl->sinks.push_back(sink);

    int root = -1;
    if (options.root_class.empty()) {
        root = default_root(prog);
        if (root < 0) {
            out.diagnostics.push_back(setup_error(
                "RT009", root == -1 ? "model has no concrete <<whole>> class; choose a root class explicitly"
                                    : "model has several concrete <<whole>> classes; choose a root class explicitly",
                model_loc));
            return out;
        }
    } else {
        root = prog.find_class(options.root_class);
        if (root < 0) {
            out.diagnostics.push_back(setup_error("RT009", "unknown root class " + options.root_class, model_loc));
            return out;
        }
    }
    const ir::Class& root_cls = prog.classes[static_cast<std::size_t>(root)];
    const SourceLocation root_loc = vm.model().classes[static_cast<std::size_t>(root)].name_span.begin();
    if (root_cls.is_abstract) {
        out.diagnostics.push_back(setup_error("SP010", "root class " + root_cls.name + " is abstract", root_loc));
        return out;
    }
    if (root_cls.stereotype == Stereotype::Link) {
        out.diagnostics.push_back(setup_error("RT009", "root class " + root_cls.name + " is a <<link>> class, not a frame", root_loc));
        return out;
    }
    impl->root_class = root;

    impl->boundary_ref = impl->create(prog.boundary_class);
    impl->root_ref = root == prog.boundary_class ? impl->boundary_ref : impl->create(root);

    const ir::Class& bcls = prog.classes[static_cast<std::size_t>(prog.boundary_class)];
    for (const auto& [name, text] : options.overrides) {
        const int slot = bcls.find_slot(name);
        if (slot < 0) {
            out.diagnostics.push_back(setup_error("RT010", "boundary class " + bcls.name + " has no slot " + name, model_loc));
            continue;
        }
        const ir::Type& t = bcls.slots[static_cast<std::size_t>(slot)].type;
        auto v = parse_override(text, t);
        if (!v) {
            out.diagnostics.push_back(setup_error(
                "RT010", "cannot set " + bcls.name + "." + name + " (" + ir::to_string(t, prog) + ") to '" + text + "'",
                model_loc));
            continue;
        }
        impl->entities[impl->boundary_ref.index].slots[static_cast<std::size_t>(slot)] = *v;
    }

    if (impl->root_ref.index != impl->boundary_ref.index) {
        auto bind = [&](EntityRef owner, EntityRef target) {
            const ir::Class& k = impl->class_of(owner);
            const ir::Class& tk = impl->class_of(target);
            for (std::size_t i = 0; i < k.slots.size(); ++i) {
                const auto& s = k.slots[i];
                if (s.stereotype == Stereotype::Ref && s.type.kind == TypeKind::Entity && tk.derives_from(s.type.class_id)) {
                    impl->entities[owner.index].slots[i] = target;
                }
            }
        };
        bind(impl->boundary_ref, impl->root_ref);
        bind(impl->root_ref, impl->boundary_ref);
    }

    for (const auto& path : options.probes) {
        ResolvedProbe p;
        if (auto err = impl->resolve_probe(path, p)) {
            out.diagnostics.push_back(setup_error("RT010", *err, model_loc));
            continue;
        }
        impl->probes.push_back(std::move(p));
    }
    impl->samples.resize(impl->probes.size());
    if (has_errors(out.diagnostics)) return out;

    if (prog.init_function >= 0) {
        try {
            impl->invoke(std::nullopt, impl->boundary_ref, prog.init_function, {}, model_loc);
        } catch (const RuntimeFault& f) {
            out.diagnostics.push_back(impl->to_diagnostic(f));
            return out;
        }
    }
    out.state = EngineAccess::make(std::move(impl));
    return out;
}

std::optional<Diagnostic> run_tick(RunState& state) {
    auto& s = EngineAccess::impl(state);
    if (s.halted) {
        return setup_error("RT012", "run_tick on a halted run", s.vm.model().span.begin());
    }
    ++s.tick;
    s.tick_messages = 0;
    s.depth = 0;
    try {
        s.invoke(std::nullopt, s.boundary_ref, s.prog->boundary_exist, {}, s.vm.model().span.begin());
    } catch (const RuntimeFault& f) {
        s.halted = true;
        return s.to_diagnostic(f);
    }
    for (std::size_t i = 0; i < s.probes.size(); ++i) s.samples[i].push_back(s.sample(s.probes[i]));
    return std::nullopt;
}

RunResult run(const ValidatedModel& vm, const RunOptions& options, std::uint64_t ticks, TraceSink* sink) {
    RunResult out;
    if (ticks == 0) {
        out.diagnostics.push_back(setup_error("RT011", "ticks must be at least 1", vm.model().span.begin()));
        return out;
    }
    InstantiateResult inst = instantiate(vm, options, sink);
    out.diagnostics = std::move(inst.diagnostics);
    if (!inst.state) return out;
    RunState& state = *inst.state;
    for (std::uint64_t t = 0; t < ticks; ++t) {
        if (auto err = run_tick(state)) {
            out.diagnostics.push_back(std::move(*err));
            break;
        }
        ++out.ticks_completed;
    }
    out.stats = state.stats();
    out.trace_hash = state.trace_hash();
    return out;
}

const ProbeSeries* RunStats::probe(std::string_view path) const {
    for (const auto& p : probes) {
        if (p.path == path) return &p;
    }
    return nullptr;
}

std::string RunStats::to_json(bool with_samples) const {
    nlohmann::json j;
    j["ticks"] = ticks;
    j["warmup"] = warmup;
    j["events"] = events;
    j["messages"] = nlohmann::json::object();
    for (const auto& [op, n] : message_counts) j["messages"][op] = n;
    j["probes"] = nlohmann::json::object();
    for (const auto& p : probes) {
        nlohmann::json pj;
        pj["mean"] = p.mean;
        pj["max"] = p.max;
        if (with_samples) pj["samples"] = p.samples;
        j["probes"][p.path] = std::move(pj);
    }
    return j.dump();
}

}  // namespace uspkit
