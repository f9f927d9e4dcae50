#pragma once

#include "glassbox/evaluator.hpp"
#include "glassbox/spec.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace glassbox {

// Quality-of-service level a norm must meet: strict tolerates no violation,
// ratio tolerates a bounded violation share.
enum class PolicyMode { Strict, Ratio };

struct CompliancePolicy {
    PolicyMode mode{PolicyMode::Strict};
    Fraction theta{0, 1};  // ratio mode only
};

// Violating-event samples are capped; totals stay exact.
inline constexpr std::size_t kSampleCap = 10;

struct RequirementSummary {
    std::string id;
    RequirementKind kind{RequirementKind::PerEvent};
    std::int64_t satisfied{0};
    std::int64_t violated{0};
    std::int64_t inapplicable{0};
    std::int64_t pending{0};
    std::uint64_t violating_total{0};            // number of Violated verdicts
    std::vector<std::string> violating_sample;   // first distinct event ids, ≤ kSampleCap

    // Derived headline: violated > satisfied > pending > inapplicable; with
    // zero verdicts, windowed kinds report "pending" and per-event kinds
    // "no_data".
    std::string status() const;
};

struct NormVerdict {
    std::string id;
    bool compliant{true};
    Fraction ratio{0, 1};  // violated / (violated + satisfied); 0/1 when no evidence
    std::int64_t satisfied{0};
    std::int64_t violated{0};
    std::uint64_t violating_total{0};
    std::vector<std::string> violating_sample;
    std::vector<std::string> requirement_ids;  // spec order
};

struct ValueAdherence {
    std::string value;
    std::string context;
    bool adheres{true};
    bool vacuous{false};           // no satisfied/violated evidence reached this value here
    std::string formula;           // rendered interpretation formula
    bool explicit_formula{false};  // false = default AND over linked norms
    std::vector<std::string> norm_ids;  // formula leaves, deduped, evaluation order
};

struct ComplianceReport {
    std::string tool_version;
    std::string spec_name;
    std::string spec_sha256;
    std::string trace_source;
    std::uint64_t event_count{0};
    std::uint64_t warnings_total{0};
    CompliancePolicy policy;
    std::vector<RequirementSummary> requirements;  // spec order
    std::vector<NormVerdict> norms;                // spec order
    std::vector<ValueAdherence> values;            // linked (value, context) pairs, spec order

    bool all_adhere() const;
};

// Boolean semantics of an interpretation formula over per-norm compliance.
// Throws std::invalid_argument on a leaf with no entry.
bool eval_formula(const FormulaPtr& f, const std::map<std::string, bool>& norm_compliance);

// Builds a ValueAdherence from already-computed norm verdicts, using the
// explicit interpretation formula when the spec has one and the default
// conjunction over counts-as-linked norms otherwise.
ValueAdherence evaluate_value(const GlassBoxSpec& spec,
                              const std::vector<NormVerdict>& norm_verdicts,
                              const std::string& value_id, const std::string& context_id);

// Sequential verdict consumer; feeds per-requirement counters and derives
// norm verdicts and value adherences at the end.
class Aggregator {
  public:
    Aggregator(const GlassBoxSpec& spec, CompliancePolicy policy);

    // Verdicts must arrive in final (position, requirement id) order; the
    // samples in the report inherit it. Throws std::invalid_argument for a
    // verdict naming an unknown requirement.
    void add(const Verdict& v);

    ComplianceReport finish(std::string trace_source, std::uint64_t event_count,
                            std::uint64_t warnings_total, std::string spec_sha256,
                            std::string tool_version) const;

  private:
    const GlassBoxSpec& spec_;
    CompliancePolicy policy_;
    std::vector<RequirementSummary> summaries_;       // spec order
    std::map<std::string, std::size_t> index_;        // req id -> summaries_ index
};

// SHA-256 of arbitrary bytes, lowercase hex.
std::string sha256_hex(const std::string& bytes);

// ── Serialization ─────────────────────────────────────────────────────────

// Single JSON document embedding per-value explanation trees; a byte-exact
// function of the report contents.
ojson report_to_json(const ComplianceReport& report);

std::string policy_to_string(const CompliancePolicy& policy);

// Human-readable rendering of the whole report.
std::string report_to_text(const ComplianceReport& report);

// Text rendering of one value/context explanation tree, from a report JSON
// document (as written by report_to_json). Throws std::invalid_argument when
// the pair is not in the report.
std::string explain_from_json(const ojson& report, const std::string& value_id,
                              const std::string& context_id);

}  // namespace glassbox
