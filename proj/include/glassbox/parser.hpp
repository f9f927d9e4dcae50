#pragma once

#include "glassbox/diagnostics.hpp"
#include "glassbox/spec.hpp"

#include <optional>
#include <string>
#include <vector>

namespace glassbox {

struct ParseResult {
    std::optional<GlassBoxSpec> spec;  // engaged iff no error-severity diagnostic
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return spec.has_value(); }
};

// Parses .gbx text and, on syntactic success, runs validate_hierarchy so that
// duplicate-id / unknown-reference / type errors surface here too. Warnings
// do not prevent success.
ParseResult parse_spec(const std::string& text);

// Syntax only — returns the tree even when semantic validation would reject
// it. Used by the validate command to report semantic diagnostics itself.
ParseResult parse_spec_syntax(const std::string& text);

// Standalone expression parser (tests, tooling). a./b. references are always
// accepted syntactically; typechecking decides where they are legal.
struct ExprParseResult {
    ExprPtr expr;  // null on error
    std::vector<Diagnostic> diagnostics;
};

ExprParseResult parse_expression(const std::string& text);

}  // namespace glassbox
