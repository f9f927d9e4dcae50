// Command-line front end: validate specifications, check traces against
// them, explain per-value verdicts from a saved report, and simulate
// synthetic mortgage traces with known injected violations.
//
// Exit codes: 0 success (check: every value adheres), 1 usage or bad
// arguments, 2 unreadable or invalid input, 3 check ran but at least one
// value failed to adhere.

#include "glassbox/compliance.hpp"
#include "glassbox/event.hpp"
#include "glassbox/generator.hpp"
#include "glassbox/parser.hpp"
#include "glassbox/pipeline.hpp"
#include "glassbox/serializer.hpp"
#include "glassbox/version.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace glassbox;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNonCompliant = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw std::runtime_error("read failed on '" + path + "'");
    return std::move(buf).str();
}

void print_diagnostics(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags) std::cerr << d.render() << "\n";
}

struct ValidateArgs {
    std::string spec_path;
    bool canonical{false};
};

int run_validate(const ValidateArgs& args) {
    const std::string text = read_file(args.spec_path);
    ParseResult syntax = parse_spec_syntax(text);
    print_diagnostics(syntax.diagnostics);
    if (!syntax.ok()) return kExitInput;

    const GlassBoxSpec& spec = *syntax.spec;
    const std::vector<Diagnostic> diags = validate_hierarchy(spec);
    print_diagnostics(diags);
    if (has_errors(diags)) return kExitInput;

    if (args.canonical) {
        std::cout << serialize_spec(spec);
        return kExitOk;
    }
    std::cout << "OK: " << spec.name << " — " << spec.values.size() << " values, "
              << spec.contexts.size() << " contexts, " << spec.norms.size() << " norms, "
              << spec.requirements.size() << " requirements\n";
    return kExitOk;
}

struct CheckArgs {
    std::string spec_path;
    std::string trace_path;
    std::string policy{"strict"};
    std::string theta;
    std::string report_path;
    std::string verdicts_path;
    std::int64_t budget{-1};
    bool strict{false};
    int jobs{1};
};

int run_check(const CheckArgs& args) {
    const std::string spec_text = read_file(args.spec_path);
    ParseResult parsed = parse_spec(spec_text);
    print_diagnostics(parsed.diagnostics);
    if (!parsed.ok()) return kExitInput;
    const GlassBoxSpec& spec = *parsed.spec;

    CompliancePolicy policy;
    if (args.policy == "ratio") {
        policy.mode = PolicyMode::Ratio;
        if (args.theta.empty()) {
            std::cerr << "--policy ratio needs --theta (e.g. --theta 5% or --theta 1/20)\n";
            return kExitUsage;
        }
        if (!parse_fraction(args.theta, policy.theta)) {
            std::cerr << "--theta: cannot read '" << args.theta
                      << "' as a fraction (use N%, p/q, or an integer)\n";
            return kExitUsage;
        }
    } else {
        policy.mode = PolicyMode::Strict;
        if (!args.theta.empty()) {
            std::cerr << "--theta is only meaningful with --policy ratio\n";
            return kExitUsage;
        }
    }

    if (args.budget >= 0) {
        std::int64_t total = 0;
        for (const auto& r : spec.requirements) total += cost_class(r).bound;
        if (total > args.budget)
            std::cerr << "warning: declared monitoring cost " << total
                      << " exceeds the budget of " << args.budget << "\n";
    }

    const SchemaMode mode = args.strict ? SchemaMode::Strict : SchemaMode::Lenient;
    TraceReader reader(open_line_source(args.trace_path), spec.schema, mode);

    std::ofstream verdict_file;
    std::ostream* verdict_out = nullptr;
    if (args.verdicts_path == "-") {
        verdict_out = &std::cout;
    } else if (!args.verdicts_path.empty()) {
        verdict_file.open(args.verdicts_path, std::ios::binary);
        if (!verdict_file) {
            std::cerr << "cannot open '" << args.verdicts_path << "' for writing\n";
            return kExitInput;
        }
        verdict_out = &verdict_file;
    }

    PipelineOptions options;
    options.schema_mode = mode;
    options.policy = policy;
    options.jobs = args.jobs > 0 ? args.jobs : std::max(1u, std::thread::hardware_concurrency());
    options.verdict_out = verdict_out;
    options.trace_source = args.trace_path;
    options.spec_sha256 = sha256_hex(spec_text);
    options.tool_version = kVersion;

    PipelineResult result;
    try {
        result = run_pipeline(spec, reader, options);
    } catch (const TraceError& e) {
        std::cerr << "trace error: " << e.what() << "\n";
        return kExitInput;
    } catch (const EvaluationError& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return kExitInput;
    }

    if (verdict_file.is_open()) {
        verdict_file.close();
        if (verdict_file.fail()) {
            std::cerr << "write failed on '" << args.verdicts_path << "'\n";
            return kExitInput;
        }
    }

    std::uint64_t printed = 0;
    for (const auto& w : result.reader_warnings) {
        std::cerr << "warning: " << w.message() << "\n";
        ++printed;
    }
    for (const auto& w : result.eval_warnings) {
        std::cerr << "warning: requirement '" << w.req << "' at event '" << w.event
                  << "': " << w.message << "\n";
        ++printed;
    }
    if (result.report.warnings_total > printed)
        std::cerr << "(" << result.report.warnings_total - printed
                  << " more warnings suppressed)\n";

    if (args.report_path == "-") {
        std::cout << report_to_json(result.report).dump(2) << "\n";
    } else {
        if (!args.report_path.empty()) {
            std::ofstream out(args.report_path, std::ios::binary);
            if (!out) {
                std::cerr << "cannot open '" << args.report_path << "' for writing\n";
                return kExitInput;
            }
            out << report_to_json(result.report).dump(2) << "\n";
            out.close();
            if (out.fail()) {
                std::cerr << "write failed on '" << args.report_path << "'\n";
                return kExitInput;
            }
        }
        std::cout << report_to_text(result.report);
    }
    return result.report.all_adhere() ? kExitOk : kExitNonCompliant;
}

struct ExplainArgs {
    std::string report_path;
    std::string value;
    std::string context;
};

int run_explain(const ExplainArgs& args) {
    const std::string text = read_file(args.report_path);
    const ojson report = ojson::parse(text, nullptr, false);
    if (report.is_discarded()) {
        std::cerr << "'" << args.report_path << "' is not valid JSON\n";
        return kExitInput;
    }
    try {
        std::cout << explain_from_json(report, args.value, args.context);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

struct SimulateArgs {
    std::string config_path;
    std::string out_path;
};

int run_simulate(const SimulateArgs& args) {
    const std::string text = read_file(args.config_path);
    const nlohmann::json parsed = nlohmann::json::parse(text, nullptr, false);
    if (parsed.is_discarded()) {
        std::cerr << "'" << args.config_path << "' is not valid JSON\n";
        return kExitUsage;
    }
    GeneratorConfig config;
    GenerateResult result;
    try {
        config = GeneratorConfig::from_json(parsed);
        result = generate_trace_files(config, args.out_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    std::cout << "wrote " << result.events << " events to " << args.out_path << "\n"
              << "ground truth: " << result.truth.size()
              << " violating (event, requirement) pairs in " << sidecar_path_for(args.out_path)
              << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"glass-box runtime verification for black-box decision systems"};
    app.set_version_flag("--version", std::string("glassbox ") + kVersion);
    app.require_subcommand(1);

    ValidateArgs validate_args;
    auto* validate = app.add_subcommand("validate", "parse a specification and check its hierarchy");
    validate->add_option("spec", validate_args.spec_path, "path to the .gbx file")->required();
    validate->add_flag("--canonical", validate_args.canonical,
                       "print the canonical serialization instead of a summary");

    CheckArgs check_args;
    auto* check = app.add_subcommand("check", "monitor a trace against a specification");
    check->add_option("--spec", check_args.spec_path, "path to the .gbx file")->required();
    check->add_option("--trace", check_args.trace_path,
                      "trace JSONL ('-' = stdin, '.gz' accepted)")
        ->required();
    check->add_option("--policy", check_args.policy, "compliance policy (default strict)")
        ->check(CLI::IsMember({"strict", "ratio"}));
    check->add_option("--theta", check_args.theta, "violation-ratio threshold for --policy ratio");
    check->add_option("--report", check_args.report_path,
                      "write the JSON report here ('-' = stdout)");
    check->add_option("--verdicts", check_args.verdicts_path,
                      "stream per-requirement verdict JSONL here ('-' = stdout)");
    check->add_option("--budget", check_args.budget,
                      "warn when the declared per-event cost bound exceeds this");
    check->add_flag("--strict", check_args.strict,
                    "fail fast on schema violations and expression faults");
    check->add_option("--jobs", check_args.jobs, "worker threads (0 = hardware)")
        ->check(CLI::Range(0, 1024));

    ExplainArgs explain_args;
    auto* explain = app.add_subcommand("explain", "render one value's verdict tree from a report");
    explain->add_option("--report", explain_args.report_path, "JSON report from 'check --report'")
        ->required();
    explain->add_option("--value", explain_args.value, "value id")->required();
    explain->add_option("--context", explain_args.context, "context id")->required();

    SimulateArgs simulate_args;
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic mortgage trace");
    simulate->add_option("--config", simulate_args.config_path, "generator config JSON")
        ->required();
    simulate->add_option("--out", simulate_args.out_path,
                         "trace output path ('.gz' compresses); the ground-truth sidecar "
                         "lands next to it")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate->parsed()) return run_validate(validate_args);
        if (check->parsed()) return run_check(check_args);
        if (explain->parsed()) return run_explain(explain_args);
        return run_simulate(simulate_args);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    }
}
