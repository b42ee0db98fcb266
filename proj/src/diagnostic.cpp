#include "uspkit/diagnostic.hpp"

#include <algorithm>
#include <tuple>

namespace uspkit {

std::string Diagnostic::render() const {
    std::string out = location.file;
    out += ':';
    out += std::to_string(location.line);
    out += ':';
    out += std::to_string(location.column);
    out += severity == Severity::Error ? ": error[" : ": warning[";
    out += rule_id;
    out += "]: ";
    out += message;
    return out;
}

bool diagnostic_less(const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.location.file, a.location.line, a.location.column, a.rule_id, a.message) <
           std::tie(b.location.file, b.location.line, b.location.column, b.rule_id, b.message);
}

void sort_diagnostics(std::vector<Diagnostic>& diags) {
    std::stable_sort(diags.begin(), diags.end(), diagnostic_less);
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::size_t count_rule(const std::vector<Diagnostic>& diags, std::string_view rule_id) {
    return static_cast<std::size_t>(std::count_if(
        diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.rule_id == rule_id; }));
}

}  // namespace uspkit
