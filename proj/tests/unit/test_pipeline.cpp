#include "glassbox/pipeline.hpp"

#include "glassbox/parser.hpp"

#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

using namespace glassbox;

namespace {

GlassBoxSpec mixed_spec() {
    ParseResult r = parse_spec(R"(glassbox mix {
  schema { in g: string; in x: int; out d: string; }
  value V "V"; context C "C";
  norm N obligation "N" { counts_as V in C; }
  requirement R_A { for_the_sake_of N; kind per_event; then out.d == "g"; }
  requirement R_B {
    for_the_sake_of N; kind window_parity;
    window 6; group_by in.g; outcome out.d == "g"; max_gap 50%; min_samples 2;
  }
  requirement R_C {
    for_the_sake_of N; kind pairwise_consistency;
    window 4; similar a.in.g == b.in.g; consistent a.out.d == b.out.d;
  }
  requirement R_D {
    for_the_sake_of N; kind window_drift;
    window 3; outcome out.d == "g"; max_delta 25%;
  }
  requirement R_E { for_the_sake_of N; kind field_whitelist; section in; allow g, x; }
})");
    REQUIRE(r.ok());
    return *r.spec;
}

std::string trace_text(int n) {
    std::string out;
    for (int i = 0; i < n; ++i) {
        std::string g = i % 2 == 0 ? "A" : "B";
        std::string d = i % 3 == 0 ? "g" : "d";
        out += R"({"id":"e)" + std::to_string(i) + R"(","ts":)" + std::to_string(i) +
               R"(,"in":{"g":")" + g + R"(","x":)" + std::to_string(i % 5) +
               R"(},"out":{"d":")" + d + R"("}})" "\n";
    }
    return out;
}

PipelineResult run_with(const GlassBoxSpec& spec, const std::string& text, int jobs,
                        std::ostream* sink = nullptr,
                        SchemaMode mode = SchemaMode::Lenient) {
    TraceReader reader(string_line_source(text), spec.schema, mode);
    PipelineOptions options;
    options.schema_mode = mode;
    options.jobs = jobs;
    options.verdict_out = sink;
    options.trace_source = "test";
    options.spec_sha256 = "cafe";
    options.tool_version = "1.0.0";
    return run_pipeline(spec, reader, options);
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("verdict stream is ordered by position, then requirement id") {
    GlassBoxSpec spec = mixed_spec();
    std::ostringstream sink;
    PipelineResult r = run_with(spec, trace_text(10), 1, &sink);
    CHECK(r.events == 10);

    std::istringstream lines(sink.str());
    std::string line;
    std::uint64_t seen = 0;
    std::uint64_t last_pos = 0;
    std::string last_req;
    while (std::getline(lines, line)) {
        ojson j = ojson::parse(line);
        std::uint64_t pos = j["pos"].get<std::uint64_t>();
        std::string req = j["req"].get<std::string>();
        if (seen > 0) {
            bool ordered = pos > last_pos || (pos == last_pos && req > last_req);
            CHECK_MESSAGE(ordered, "out of order at ", line);
        }
        last_pos = pos;
        last_req = req;
        ++seen;
    }
    CHECK(seen == r.verdicts);
    // R_A, R_C, R_E every event; R_B every event; R_D only at positions 2, 5, 8
    CHECK(r.verdicts == 10 * 4 + 3);
}

TEST_CASE("verdict bytes and report are identical across thread counts") {
    GlassBoxSpec spec = mixed_spec();
    std::string text = trace_text(120);

    std::ostringstream base_sink;
    PipelineResult base = run_with(spec, text, 1, &base_sink);
    std::string base_json = report_to_json(base.report).dump(2);

    for (int jobs : {2, 8}) {
        std::ostringstream sink;
        PipelineResult r = run_with(spec, text, jobs, &sink);
        CHECK(sink.str() == base_sink.str());
        CHECK(report_to_json(r.report).dump(2) == base_json);
        CHECK(r.verdicts == base.verdicts);
    }
}

TEST_CASE("empty traces produce an adhering, vacuous report") {
    GlassBoxSpec spec = mixed_spec();
    PipelineResult r = run_with(spec, "", 4);
    CHECK(r.events == 0);
    CHECK(r.verdicts == 0);
    CHECK(r.report.all_adhere());
    REQUIRE(r.report.values.size() == 1);
    CHECK(r.report.values[0].vacuous);
    for (const auto& s : r.report.requirements) {
        bool windowed = s.kind != RequirementKind::PerEvent &&
                        s.kind != RequirementKind::FieldWhitelist;
        CHECK(s.status() == (windowed ? "pending" : "no_data"));
    }
}

TEST_CASE("strict mode surfaces the smallest (position, requirement) fault") {
    GlassBoxSpec spec = mixed_spec();
    // out.d is missing at pos 1, so R_A, R_B and R_D all fault on the same
    // event; the error must name the lexicographically smallest requirement
    std::string text =
        R"({"id":"e0","ts":0,"in":{"g":"A","x":1},"out":{"d":"g"}})" "\n"
        R"({"id":"e1","ts":1,"in":{"g":"B","x":1},"out":{}})" "\n";
    try {
        run_with(spec, text, 4, nullptr, SchemaMode::Strict);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(e.req == "R_A");
        CHECK(e.event == "e1");
        CHECK(std::string(e.what()).find("missing field out.d") != std::string::npos);
    }
}

TEST_CASE("lenient mode converts faults into warnings and keeps going") {
    GlassBoxSpec spec = mixed_spec();
    std::string text =
        R"({"id":"e0","ts":0,"in":{"g":"A","x":1},"out":{}})" "\n"
        R"({"id":"e1","ts":1,"in":{"g":"A","x":1},"out":{"d":"g"}})" "\n";
    PipelineResult r = run_with(spec, text, 1);
    CHECK(r.events == 2);
    CHECK_FALSE(r.eval_warnings.empty());
    CHECK(r.eval_warnings[0].req == "R_A");
    CHECK(r.eval_warnings[0].event == "e0");
    // eval warnings follow the verdict stream's (position, req id) order
    for (std::size_t i = 1; i < r.eval_warnings.size(); ++i) {
        const auto& prev = r.eval_warnings[i - 1];
        const auto& cur = r.eval_warnings[i];
        CHECK(prev.event <= cur.event);
    }
}

TEST_CASE("reader warnings and totals reach the report") {
    GlassBoxSpec spec = mixed_spec();
    std::string text =
        R"({"id":"e0","ts":0,"in":{"g":"A","x":1,"zz":9},"out":{"d":"g"}})" "\n";
    PipelineResult r = run_with(spec, text, 1);
    REQUIRE(r.reader_warnings.size() == 1);
    CHECK(r.reader_warnings[0].field == "in.zz");
    CHECK(r.report.warnings_total >= 1);
    CHECK(r.report.event_count == 1);
    CHECK(r.report.trace_source == "test");
    CHECK(r.report.spec_sha256 == "cafe");
}

TEST_CASE("whitelist violations reach the aggregate through the pipeline") {
    GlassBoxSpec spec = mixed_spec();
    std::string text =
        R"({"id":"e0","ts":0,"in":{"g":"A","x":1,"zz":9},"out":{"d":"g"}})" "\n";
    PipelineResult r = run_with(spec, text, 1);
    const RequirementSummary* wl = nullptr;
    for (const auto& s : r.report.requirements)
        if (s.id == "R_E") wl = &s;
    REQUIRE(wl != nullptr);
    CHECK(wl->violated == 1);
    CHECK(wl->violating_sample == std::vector<std::string>{"e0"});
}

}  // TEST_SUITE
