#include "uspkit/trace.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <stdexcept>

#include "json.hpp"

namespace uspkit {

std::string json_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    static constexpr char kHex[] = "0123456789abcdef";
                    out += "\\u00";
                    out += kHex[(c >> 4) & 0xF];
                    out += kHex[c & 0xF];
                } else {
                    out += c;
                }
        }
    }
    return out;
}

void append_canonical_line(std::string& out, std::uint64_t tick, std::uint64_t seq, std::string_view sender,
                           std::string_view receiver, std::string_view op, const std::vector<std::string>& args) {
    out += "{\"tick\":";
    out += std::to_string(tick);
    out += ",\"seq\":";
    out += std::to_string(seq);
    out += ",\"sender\":\"";
    out += json_escape(sender);
    out += "\",\"receiver\":\"";
    out += json_escape(receiver);
    out += "\",\"op\":\"";
    out += json_escape(op);
    out += "\",\"args\":[";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i != 0) out += ',';
        out += '"';
        out += json_escape(args[i]);
        out += '"';
    }
    out += "]}\n";
}

std::string canonical_line(const TraceEvent& ev) {
    std::string out;
    append_canonical_line(out, ev.tick, ev.seq, ev.sender, ev.receiver, ev.op, ev.args);
    return out;
}

std::optional<TraceEvent> parse_trace_line(std::string_view line) {
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    try {
        TraceEvent ev;
        ev.tick = j.at("tick").get<std::uint64_t>();
        ev.seq = j.at("seq").get<std::uint64_t>();
        ev.sender = j.at("sender").get<std::string>();
        ev.receiver = j.at("receiver").get<std::string>();
        ev.op = j.at("op").get<std::string>();
        ev.args = j.at("args").get<std::vector<std::string>>();
        return ev;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

Sha256::Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(static_cast<EVP_MD_CTX*>(ctx_), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 initialisation failed");
    }
}

Sha256::~Sha256() { EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_)); }

void Sha256::update(std::string_view bytes) {
    EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), bytes.data(), bytes.size());
}

std::string Sha256::hex_digest() const {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* copy = EVP_MD_CTX_new();
    EVP_MD_CTX_copy_ex(copy, static_cast<const EVP_MD_CTX*>(ctx_));
    EVP_DigestFinal_ex(copy, digest, &len);
    EVP_MD_CTX_free(copy);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

}  // namespace uspkit
