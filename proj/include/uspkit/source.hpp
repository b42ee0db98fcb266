#pragma once

#include <cstdint>
#include <string>

namespace uspkit {

struct SourceLocation {
    std::string file;
    std::uint32_t line = 0;
    std::uint32_t column = 0;
};

/// Half-open byte range [begin_offset, end_offset) plus line/column of both ends.
///
/// Spans never participate in structural equality: two spans always compare
/// equal so that AST nodes can default their operator== and a reprinted model
/// compares equal to the original. Compare fields directly when span fidelity
/// itself is under test.
struct SourceSpan {
    std::string file;
    std::uint32_t begin_offset = 0;
    std::uint32_t end_offset = 0;
    std::uint32_t line = 0;
    std::uint32_t column = 0;
    std::uint32_t end_line = 0;
    std::uint32_t end_column = 0;

    SourceLocation begin() const { return {file, line, column}; }

    friend bool operator==(const SourceSpan&, const SourceSpan&) { return true; }
};

/// Smallest span covering both arguments (assumed to be in the same file).
inline SourceSpan merge(const SourceSpan& first, const SourceSpan& last) {
    SourceSpan out = first;
    out.end_offset = last.end_offset;
    out.end_line = last.end_line;
    out.end_column = last.end_column;
    return out;
}

}  // namespace uspkit
