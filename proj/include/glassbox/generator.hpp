#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace glassbox {

// Synthetic mortgage-decision traces: a rule-based reference decider over
// randomly drawn applicants, with optional deliberately injected violations.
//
// Clean mode constructs every event so that no shipped mortgage requirement
// is violated; injected violations are therefore exactly the entries of the
// ground-truth sidecar, which the generator re-derives from the finished
// event stream with its own windowed bookkeeping rather than trusting the
// injection plan.

struct IntRange {
    std::int64_t min{0};
    std::int64_t max{0};
};

struct InjectionRequest {
    std::string requirement;  // one of the mortgage requirement ids
    std::int64_t count{0};
};

struct GeneratorConfig {
    std::uint64_t events{1000};
    std::uint64_t seed{0};
    std::int64_t start_ts{1700000000000};
    IntRange age{21, 75};
    IntRange loan{5'000'000, 50'000'000};        // minor units
    IntRange afford_margin{60'000, 600'000};     // distance from the 30% boundary
    std::int64_t central_bank_rate_bp{150};
    std::vector<std::string> regions{"north", "south"};
    std::vector<InjectionRequest> inject;

    // Throws std::invalid_argument with a message on malformed input or
    // parameters outside the ranges the clean-mode guarantees need.
    static GeneratorConfig from_json(const nlohmann::json& j);
};

struct GroundTruthEntry {
    std::uint64_t pos{0};
    std::string event;
    std::string req;

    bool operator==(const GroundTruthEntry&) const = default;
};

class TraceWriter {
  public:
    virtual ~TraceWriter() = default;
    virtual void write_line(const std::string& line) = 0;
    // Flush and release the sink; write errors surface here for buffered
    // sinks, so call it instead of relying on the destructor.
    virtual void close() {}
};

std::unique_ptr<TraceWriter> open_trace_writer(const std::string& path);  // ".gz" = gzip
std::unique_ptr<TraceWriter> string_trace_writer(std::string& sink);

struct GenerateResult {
    std::uint64_t events{0};
    std::vector<GroundTruthEntry> truth;  // (pos, req id lexicographic) order
};

// Deterministic per config: identical config (including seed) gives a
// byte-identical trace and identical ground truth. Throws
// std::invalid_argument when the requested injections do not fit the trace.
GenerateResult generate_trace(const GeneratorConfig& config, TraceWriter& out);

// generate_trace + files: writes the trace to `trace_path` and the sidecar
// (one {"pos","event","req"} JSONL line per entry) next to it.
GenerateResult generate_trace_files(const GeneratorConfig& config, const std::string& trace_path);

// "t.jsonl" -> "t.truth.jsonl", "t.jsonl.gz" -> "t.truth.jsonl".
std::string sidecar_path_for(const std::string& trace_path);

// Mortgage-spec constants the generator's guarantees are built around; the
// shipped spec uses the same numbers, and tests pin the correspondence.
namespace mortgage {
inline constexpr std::int64_t kWindow = 100;
inline constexpr std::int64_t kMinSamples = 30;
// max_gap 1/4, max_delta 1/5
inline constexpr std::int64_t kGapNum = 1, kGapDen = 4;
inline constexpr std::int64_t kDeltaNum = 1, kDeltaDen = 5;
inline constexpr std::int64_t kAgeBucket = 5;
inline constexpr std::int64_t kIncomeSimilarity = 10'000;
inline constexpr std::int64_t kLoanSimilarity = 500'000;
inline constexpr std::int64_t kInstalmentMonths = 240;
}  // namespace mortgage

}  // namespace glassbox
