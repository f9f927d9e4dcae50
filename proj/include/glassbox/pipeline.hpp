#pragma once

#include "glassbox/compliance.hpp"
#include "glassbox/evaluator.hpp"
#include "glassbox/event.hpp"
#include "glassbox/spec.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace glassbox {

struct PipelineOptions {
    SchemaMode schema_mode{SchemaMode::Lenient};
    CompliancePolicy policy;
    int jobs{1};                         // threads for the stateless requirement kinds
    std::ostream* verdict_out{nullptr};  // optional verdict JSONL sink
    std::string trace_source;            // descriptor recorded in the report
    std::string spec_sha256;
    std::string tool_version;
};

struct PipelineResult {
    ComplianceReport report;
    std::uint64_t events{0};
    std::uint64_t verdicts{0};
    std::vector<SchemaViolation> reader_warnings;  // capped, reader order
    std::vector<EvalWarning> eval_warnings;        // capped, verdict order
};

// Runs the full observation stage: read events, evaluate every requirement,
// merge verdicts into (position, requirement id) order, aggregate.
//
// Stateless kinds (per_event, field_whitelist) are evaluated in parallel
// across `jobs` threads; windowed kinds run sequentially. The merge order —
// and therefore every byte of the report and verdict stream — is independent
// of `jobs`.
//
// Throws TraceError on trace problems and EvaluationError in strict mode on
// expression faults; on multiple faults the one with the smallest
// (position, requirement id) surfaces, regardless of scheduling.
PipelineResult run_pipeline(const GlassBoxSpec& spec, TraceReader& reader,
                            const PipelineOptions& options);

}  // namespace glassbox
