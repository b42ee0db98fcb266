// uspkit command-line front end.
//
// Exit codes: 0 clean, 1 validation errors, 2 parse/I-O or usage errors,
// 3 runtime errors.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "uspkit/engine.hpp"
#include "uspkit/ontology.hpp"
#include "uspkit/parser.hpp"
#include "uspkit/validator.hpp"

namespace {

constexpr int kClean = 0;
constexpr int kInvalid = 1;
constexpr int kParseError = 2;
constexpr int kRuntimeError = 3;

constexpr const char* kVersion = "uspkit 1.0.0 (UML2 SP 1.1-compatible textual form)";

void print(const std::vector<uspkit::Diagnostic>& diags) {
    for (const auto& d : diags) std::cerr << d.render() << '\n';
}

/// Parses and validates; on failure prints diagnostics and sets `code`.
std::optional<uspkit::ValidatedModel> load(const std::string& path, int& code) {
    auto parsed = uspkit::parse_file(path);
    if (!parsed.ok()) {
        print(parsed.diagnostics);
        code = kParseError;
        return std::nullopt;
    }
    auto validated = uspkit::validate(parsed.model);
    print(validated.diagnostics);
    if (!validated.ok()) {
        code = kInvalid;
        return std::nullopt;
    }
    code = kClean;
    return std::move(validated.model);
}

int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return kClean;
    }
    std::ofstream out(out_path, std::ios::binary);
    out << text;
    if (!out) {
        std::cerr << out_path << ": error: cannot write file\n";
        return kParseError;
    }
    return kClean;
}

struct RunArgs {
    std::string file;
    std::string root;
    std::uint64_t ticks = 1;
    std::uint64_t seed = 0;
    std::uint64_t warmup = 0;
    std::string trace_path;
    std::string stats_path;
    std::vector<std::string> probes;
    std::vector<std::string> sets;
};

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
}

int cmd_run(const RunArgs& a) {
    int code = kClean;
    auto vm = load(a.file, code);
    if (!vm) return code;

    uspkit::RunOptions options;
    options.root_class = a.root;
    options.seed = a.seed;
    options.probes = a.probes;
    options.warmup = a.warmup;
    for (const auto& s : a.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "error: --set expects slot=value, got '" << s << "'\n";
            return kParseError;
        }
        options.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }

    std::cout << "config: file=" << a.file << " root=" << (a.root.empty() ? "(default)" : a.root)
              << " seed=" << a.seed << " ticks=" << a.ticks << " warmup=" << a.warmup << " probes=" << join(a.probes)
              << " set=" << join(a.sets) << '\n';

    std::unique_ptr<uspkit::TraceFileWriter> writer;
    if (!a.trace_path.empty()) {
        writer = std::make_unique<uspkit::TraceFileWriter>(a.trace_path);
        if (!writer->good()) {
            std::cerr << a.trace_path << ": error: cannot write file\n";
            return kParseError;
        }
    }
    const auto result = uspkit::run(*vm, options, a.ticks, writer.get());
    if (writer) writer->flush();
    print(result.diagnostics);
    if (result.trace_hash.empty()) {  // never got past setup
        for (const auto& d : result.diagnostics) {
            if (d.rule_id.rfind("SP", 0) == 0) return kInvalid;
        }
        return kRuntimeError;
    }

    std::cout << "trace_hash: " << result.trace_hash << '\n';
    std::cout << "ticks: " << result.stats.ticks << " events: " << result.stats.events << '\n';
    for (const auto& p : result.stats.probes) {
        std::cout << "probe " << p.path << ": mean=" << p.mean << " max=" << p.max << '\n';
    }
    if (!a.stats_path.empty()) {
        if (emit(result.stats.to_json() + "\n", a.stats_path) != kClean) return kParseError;
    }
    return result.ok() ? kClean : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toolchain for the textual UML Scientific Profile"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string file;
    std::string out_path;
    std::string format = "json";

    auto* check = app.add_subcommand("check", "Parse and validate a model");
    check->add_option("file", file, "Model file")->required();

    auto* onto = app.add_subcommand("ontology", "Export the frame ontology");
    onto->add_option("file", file, "Model file")->required();
    onto->add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
    onto->add_option("--out", out_path, "Output file (default stdout)");

    auto* diagram = app.add_subcommand("diagram", "Emit a PlantUML class diagram");
    diagram->add_option("file", file, "Model file")->required();
    diagram->add_option("--out", out_path, "Output file (default stdout)");

    RunArgs run_args;
    auto* runc = app.add_subcommand("run", "Simulate a model");
    runc->add_option("file", run_args.file, "Model file")->required();
    runc->add_option("--root", run_args.root, "Root class (default: the only concrete <<whole>> class)");
    runc->add_option("--ticks", run_args.ticks, "Number of ticks")->check(CLI::PositiveNumber);
    runc->add_option("--seed", run_args.seed, "RNG seed");
    runc->add_option("--warmup", run_args.warmup, "Ticks excluded from probe means");
    runc->add_option("--trace", run_args.trace_path, "Write the JSONL trace here");
    runc->add_option("--stats", run_args.stats_path, "Write stats JSON here");
    runc->add_option("--probe", run_args.probes, "Probe: queue_length or a slot path from the root");
    runc->add_option("--set", run_args.sets, "Override a boundary slot: slot=value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kParseError;
    }

    int code = kClean;
    if (*check) {
        load(file, code);
        return code;
    }
    if (*onto) {
        auto vm = load(file, code);
        if (!vm) return code;
        const auto o = uspkit::extract_ontology(*vm);
        return emit(format == "dot" ? uspkit::export_dot(o) : uspkit::export_json(o) + "\n", out_path);
    }
    if (*diagram) {
        auto vm = load(file, code);
        if (!vm) return code;
        return emit(uspkit::emit_plantuml(*vm), out_path);
    }
    return cmd_run(run_args);
}
