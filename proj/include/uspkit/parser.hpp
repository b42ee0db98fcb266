#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "uspkit/ast.hpp"
#include "uspkit/diagnostic.hpp"

namespace uspkit {

struct ParseResult {
    /// Declarations that parsed cleanly, in source order. Only meaningful as a
    /// complete model when ok().
    ast::Model model;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

/// Parses `.usp` text. Syntax errors inside a declaration drop that
/// declaration and resume at the next `class`, `abstract` or `association`
/// keyword, so one pass reports errors from several classes.
///
/// Rule ids: P001 lexical, P002 syntax, P003 duplicate class, P004 unknown
/// stereotype.
ParseResult parse(std::string_view source, std::string_view file_name);

/// Reads and parses a file; I/O failure yields a single P000 diagnostic.
ParseResult parse_file(const std::string& path);

}  // namespace uspkit
