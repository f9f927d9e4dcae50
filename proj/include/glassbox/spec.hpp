#pragma once

#include "glassbox/diagnostics.hpp"
#include "glassbox/expr.hpp"
#include "glassbox/types.hpp"

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace glassbox {

// ── Schema ────────────────────────────────────────────────────────────────

struct FieldDecl {
    Section section{Section::In};
    std::string name;
    FieldType type{FieldType::Int};
    SourceSpan span;

    bool operator==(const FieldDecl& o) const {
        return section == o.section && name == o.name && type == o.type;
    }
};

struct Schema {
    std::vector<FieldDecl> fields;

    const FieldDecl* find(Section section, const std::string& name) const;
    bool operator==(const Schema& o) const { return fields == o.fields; }
};

// ── Hierarchy elements ────────────────────────────────────────────────────
// Values sit at the top, norms in the middle, requirements at the bottom.
// counts_as edges point upward (norm -> norm or norm -> value, labelled with
// a context); for_the_sake_of edges connect each requirement to the norms it
// serves.

struct ValueDef {
    std::string id;
    std::string description;
    SourceSpan span;
};

struct ContextDef {
    std::string id;
    std::string description;
    ExprPtr guard;  // optional; structural metadata, validated against the schema
    SourceSpan span;
};

enum class Modality { Obligation, Prohibition };

struct CountsAsClause {
    std::string target;   // value id or norm id
    std::string context;  // context id
    SourceSpan span;
};

struct NormDef {
    std::string id;
    Modality modality{Modality::Obligation};
    std::string description;
    std::vector<CountsAsClause> counts_as;
    SourceSpan span;
};

// ── Requirements ──────────────────────────────────────────────────────────

enum class RequirementKind {
    PerEvent,
    WindowParity,
    PairwiseConsistency,
    WindowDrift,
    FieldWhitelist,
};

const char* requirement_kind_name(RequirementKind k);
bool requirement_kind_from_name(const std::string& name, RequirementKind& out);

// The grammar accepts time units after a window size, but only event-count
// windows are supported in v1; validation rejects the rest.
enum class WindowUnit { Events, Millis, Seconds, Minutes, Hours, Days };

struct Requirement {
    std::string id;
    std::string description;
    RequirementKind kind{RequirementKind::PerEvent};
    std::vector<std::string> for_the_sake_of;  // norm ids

    // per_event
    ExprPtr when;  // optional guard; absent = always applicable
    ExprPtr then;

    // windowed kinds
    std::int64_t window{0};
    WindowUnit window_unit{WindowUnit::Events};

    // window_parity
    ExprPtr group_by;
    Fraction max_gap;
    std::int64_t min_samples{30};

    // window_parity + window_drift outcome predicate
    ExprPtr outcome;

    // window_drift
    Fraction max_delta;

    // pairwise_consistency
    ExprPtr similar;
    ExprPtr consistent;

    // field_whitelist
    Section whitelist_section{Section::In};
    std::vector<std::string> allowed;

    SourceSpan span;
};

bool requirement_equal(const Requirement& a, const Requirement& b);

// Declared per-event cost of evaluating a requirement, from the kind alone.
enum class CostClass { PerEventConstant, WindowLinear, WindowQuadratic };

const char* cost_class_name(CostClass c);

struct CostBound {
    CostClass cls{CostClass::PerEventConstant};
    std::int64_t bound{1};  // declared window bound: 1 for per-event kinds, else W
};

CostBound cost_class(const Requirement& req);

// ── Interpretation formulas ───────────────────────────────────────────────
// AND/OR tree over norm ids; the explicit meaning of a value in a context.

struct FormulaNode;
using FormulaPtr = std::shared_ptr<const FormulaNode>;

struct FormulaNode {
    enum class Kind { Norm, And, Or };
    Kind kind{Kind::Norm};
    std::string norm_id;                // Kind::Norm
    std::vector<FormulaPtr> children;   // Kind::And / Kind::Or
    SourceSpan span;
};

FormulaPtr formula_norm(std::string id);
FormulaPtr formula_and(std::vector<FormulaPtr> children);
FormulaPtr formula_or(std::vector<FormulaPtr> children);
bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);
std::string formula_to_string(const FormulaPtr& f);
void formula_leaves(const FormulaPtr& f, std::vector<std::string>& out);

struct InterpretationDef {
    std::string value;
    std::string context;
    FormulaPtr formula;
    SourceSpan span;
};

// ── The full spec ─────────────────────────────────────────────────────────
// Immutable after validation; safe to share read-only across evaluation
// workers.

struct GlassBoxSpec {
    std::string name;
    Schema schema;
    std::vector<ValueDef> values;
    std::vector<ContextDef> contexts;
    std::vector<NormDef> norms;
    std::vector<Requirement> requirements;
    std::vector<InterpretationDef> interpretations;

    const ValueDef* find_value(const std::string& id) const;
    const ContextDef* find_context(const std::string& id) const;
    const NormDef* find_norm(const std::string& id) const;
    const Requirement* find_requirement(const std::string& id) const;
    const InterpretationDef* find_interpretation(const std::string& value,
                                                 const std::string& context) const;
};

bool spec_equal(const GlassBoxSpec& a, const GlassBoxSpec& b);

// Structural validation. Errors: duplicate ids, unknown references, counts_as
// cycles, requirements unreachable from any value, formula leaves not linked
// to their value in their context, malformed windows/thresholds, expression
// type problems. Dangling norms are warnings so half-written specs stay
// loadable.
std::vector<Diagnostic> validate_hierarchy(const GlassBoxSpec& spec);

// Values reachable from a requirement through one for_the_sake_of edge and
// then counts_as edges all labelled with context_id. Throws
// std::invalid_argument on unknown ids.
std::set<std::string> values_of_requirement(const GlassBoxSpec& spec,
                                            const std::string& requirement_id,
                                            const std::string& context_id);

// Inverse traversal: requirements from which the value is reachable in the
// given context.
std::set<std::string> requirements_of_value(const GlassBoxSpec& spec,
                                            const std::string& value_id,
                                            const std::string& context_id);

// Norms from which value_id is reachable via counts_as edges labelled
// context_id (includes intermediate norms on active paths). This is the
// member set of the default AND interpretation.
std::set<std::string> norms_of_value(const GlassBoxSpec& spec,
                                     const std::string& value_id,
                                     const std::string& context_id);

}  // namespace glassbox
