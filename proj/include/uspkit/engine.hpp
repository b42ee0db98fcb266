#pragma once

// Tick-driven execution of a validated model.
//
// Model time is a bare counter. Each run_tick() delivers exactly one message
// to the boundary instance's «Exist» operation; everything else happens as a
// synchronous, depth-first cascade of sends, and every delivered message is
// one TraceEvent with a gapless global sequence number.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uspkit/diagnostic.hpp"
#include "uspkit/rng.hpp"
#include "uspkit/trace.hpp"
#include "uspkit/validator.hpp"
#include "uspkit/value.hpp"

namespace uspkit {

/// Name of the derived probe counting the link chain hanging off `head`.
inline constexpr std::string_view kQueueLengthProbe = "queue_length";

struct RunOptions {
    std::string root_class;  // empty: the only concrete «whole» class
    std::uint64_t seed = 0;
    /// `queue_length` or dotted slot paths from the root instance.
    std::vector<std::string> probes;
    /// slot=value overrides on the boundary instance, applied before init.
    std::vector<std::pair<std::string, std::string>> overrides;
    std::uint32_t max_call_depth = 64;
    std::uint64_t max_messages_per_tick = 1'000'000;
    /// Leading ticks excluded from probe aggregates (samples are still kept).
    std::uint64_t warmup = 0;
};

struct ProbeSeries {
    std::string path;
    std::vector<std::int64_t> samples;  // one per tick, index 0 = tick 1
    double mean = 0.0;                  // over samples after warmup
    std::int64_t max = 0;
};

struct RunStats {
    std::map<std::string, std::uint64_t> message_counts;  // by operation name
    std::vector<ProbeSeries> probes;
    std::uint64_t ticks = 0;
    std::uint64_t warmup = 0;
    std::uint64_t events = 0;

    const ProbeSeries* probe(std::string_view path) const;
    /// Key-sorted JSON. Per-tick samples are included when `with_samples`.
    std::string to_json(bool with_samples = true) const;
};

struct Entity {
    int class_id = -1;
    std::vector<Value> slots;
};

class RunState {
public:
    RunState(const RunState&) = delete;
    RunState& operator=(const RunState&) = delete;
    RunState(RunState&&) noexcept;
    RunState& operator=(RunState&&) noexcept;
    ~RunState();

    std::uint64_t tick() const;
    std::uint64_t events() const;
    bool halted() const;

    EntityRef boundary() const;
    EntityRef root() const;
    const std::vector<Entity>& entities() const;
    /// "ClassName#n"
    std::string entity_id(EntityRef e) const;
    const Value& slot(EntityRef e, std::string_view name) const;
    std::string render_value(const Value& v) const;

    /// Deterministic dump of every entity and slot, one entity per line.
    std::string render() const;

    /// Current value of a configured probe expression.
    std::int64_t sample(std::string_view probe) const;

    /// Trace hash so far (lowercase hex SHA-256 of all canonical lines).
    std::string trace_hash() const;

    /// Stats collected so far.
    RunStats stats() const;

    void add_sink(TraceSink* sink);

    struct Impl;

private:
    friend struct EngineAccess;
    explicit RunState(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

struct InstantiateResult {
    std::optional<RunState> state;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return state.has_value(); }
};

/// Creates the boundary instance (#0) and the root instance (#1), binds the
/// boundary's «ref» slots that accept the root (and vice versa), applies
/// overrides and runs the boundary's `init` hook at tick 0.
InstantiateResult instantiate(const ValidatedModel& vm, const RunOptions& options, TraceSink* sink = nullptr);

/// Advances model time by one tick. On a runtime fault the state halts and
/// the fault is returned.
std::optional<Diagnostic> run_tick(RunState& state);

struct RunResult {
    RunStats stats;
    std::string trace_hash;
    std::uint64_t ticks_completed = 0;
    std::vector<Diagnostic> diagnostics;  // setup or runtime errors

    bool ok() const { return !has_errors(diagnostics); }
};

/// instantiate followed by exactly `ticks` run_tick calls.
RunResult run(const ValidatedModel& vm, const RunOptions& options, std::uint64_t ticks, TraceSink* sink = nullptr);

}  // namespace uspkit
