#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uspkit {

/// One delivered message. `sender` is an entity id or "engine".
struct TraceEvent {
    std::uint64_t tick = 0;
    std::uint64_t seq = 0;
    std::string sender;
    std::string receiver;
    std::string op;
    std::vector<std::string> args;

    bool operator==(const TraceEvent&) const = default;
};

/// JSON Lines record with fields in the fixed order
/// tick, seq, sender, receiver, op, args; terminated by '\n'.
/// These bytes are what the trace hash covers.
std::string canonical_line(const TraceEvent& ev);
void append_canonical_line(std::string& out, std::uint64_t tick, std::uint64_t seq, std::string_view sender,
                           std::string_view receiver, std::string_view op, const std::vector<std::string>& args);

/// Inverse of canonical_line; std::nullopt on malformed input.
std::optional<TraceEvent> parse_trace_line(std::string_view line);

std::string json_escape(std::string_view s);

class TraceSink {
public:
    virtual ~TraceSink() = default;
    virtual void on_event(const TraceEvent& ev, std::string_view canonical) = 0;
};

class TraceRecorder final : public TraceSink {
public:
    void on_event(const TraceEvent& ev, std::string_view) override { events.push_back(ev); }
    std::vector<TraceEvent> events;
};

class TraceFileWriter final : public TraceSink {
public:
    explicit TraceFileWriter(const std::string& path) : out_(path, std::ios::binary) {}
    bool good() const { return out_.good(); }
    void on_event(const TraceEvent&, std::string_view canonical) override { out_.write(canonical.data(), static_cast<std::streamsize>(canonical.size())); }
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

/// Incremental SHA-256 (OpenSSL EVP).
class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::string_view bytes);
    /// Lowercase hex digest of everything fed so far; does not reset.
    std::string hex_digest() const;

private:
    void* ctx_;
};

}  // namespace uspkit
