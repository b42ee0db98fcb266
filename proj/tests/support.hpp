#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uspkit/parser.hpp"
#include "uspkit/validator.hpp"

namespace testsupport {

inline std::string source_dir() { return USPKIT_SOURCE_DIR; }
inline std::string corpus_path() { return source_dir() + "/models/service_queue.usp"; }
inline std::string negative_path(const std::string& rule) { return source_dir() + "/tests/negative/" + rule + ".usp"; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::string> negative_rules() {
    std::vector<std::string> rules;
    for (int i = 1; i <= 13; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "SP%03d", i);
        rules.emplace_back(buf);
    }
    return rules;
}

/// Parses and validates; throws when either step fails.
inline uspkit::ValidatedModel load_valid(const std::string& text, const std::string& name = "test.usp") {
    auto parsed = uspkit::parse(text, name);
    if (!parsed.ok()) {
        std::string msg = "parse failed:";
        for (const auto& d : parsed.diagnostics) msg += "\n" + d.render();
        throw std::runtime_error(msg);
    }
    auto v = uspkit::validate(parsed.model);
    if (!v.ok()) {
        std::string msg = "validation failed:";
        for (const auto& d : v.diagnostics) msg += "\n" + d.render();
        throw std::runtime_error(msg);
    }
    return *v.model;
}

inline uspkit::ValidatedModel load_corpus() { return load_valid(read_file(corpus_path()), corpus_path()); }

/// Validation diagnostics of a model that must parse.
inline std::vector<uspkit::Diagnostic> check(const std::string& text) {
    auto parsed = uspkit::parse(text, "test.usp");
    if (!parsed.ok()) {
        std::string msg = "parse failed:";
        for (const auto& d : parsed.diagnostics) msg += "\n" + d.render();
        throw std::runtime_error(msg);
    }
    return uspkit::validate(parsed.model).diagnostics;
}

inline std::vector<std::string> rules_of(const std::vector<uspkit::Diagnostic>& diags) {
    std::vector<std::string> out;
    for (const auto& d : diags) out.push_back(d.rule_id);
    return out;
}

/// Smallest valid model: a boundary driving one concrete whole.
inline std::string minimal_model(const std::string& boundary_body, const std::string& extra_classes = "",
                                 const std::string& boundary_attrs = "") {
    return "model T {\n"
           "    class Sys <<whole>> concept \"System\" {\n"
           "        attr parts <<parts>> : list<Cell>;\n"
           "    }\n"
           "    class Cell <<atom>> concept \"Cell\" {\n"
           "        attr n <<state>> : Int;\n"
           "    }\n"
           "    class B <<boundary>> concept \"Boundary\" {\n"
           "        attr sys <<ref>> : Sys?;\n" +
           boundary_attrs +
           "        op exist <<Exist>> () {\n" + boundary_body +
           "        }\n"
           "    }\n" +
           extra_classes + "}\n";
}

}  // namespace testsupport
