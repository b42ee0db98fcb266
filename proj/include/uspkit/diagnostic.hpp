#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "uspkit/source.hpp"

namespace uspkit {

enum class Severity { Error, Warning };

/// Parse, validation or runtime finding.
///
/// Rule ids are stable: P0xx for lexing/parsing, SP0xx for profile rules,
/// SP1xx for advisory warnings, RT0xx for runtime faults.
struct Diagnostic {
    std::string rule_id;
    Severity severity = Severity::Error;
    std::string message;
    SourceLocation location;
    std::optional<SourceLocation> related;  // e.g. the first declaration for duplicates

    /// `file:line:col: error[SPxxx]: message`
    std::string render() const;
};

/// Total order: (file, line, column, rule_id, message).
bool diagnostic_less(const Diagnostic& a, const Diagnostic& b);
void sort_diagnostics(std::vector<Diagnostic>& diags);

bool has_errors(const std::vector<Diagnostic>& diags);
std::size_t count_rule(const std::vector<Diagnostic>& diags, std::string_view rule_id);

}  // namespace uspkit
