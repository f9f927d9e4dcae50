#pragma once

#include "glassbox/diagnostics.hpp"
#include "glassbox/types.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace glassbox {

struct Schema;

// ── Expression AST ────────────────────────────────────────────────────────

enum class UnaryOp { Not, Neg, Abs };
enum class BinaryOp {
    Add, Sub, Mul, Div,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or, Implies,
};

const char* binary_op_symbol(BinaryOp op);

// Which event a field reference points at. A/B are only legal inside the
// similar/consistent expressions of a pairwise requirement, where two events
// are compared.
enum class PairSide { None, A, B };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct FieldRef {
    PairSide side{PairSide::None};
    Section section{Section::In};
    std::string name;

    std::string to_string() const;
    bool operator==(const FieldRef&) const = default;
};

struct Expr {
    enum class Kind { Literal, Field, Unary, Binary, Bucket };

    Kind kind{Kind::Literal};
    SourceSpan span;

    TypedValue literal;            // Literal (Int/String/Bool; money literals normalize to Int minor units)
    FieldRef field;                // Field
    UnaryOp unary_op{UnaryOp::Not};
    BinaryOp binary_op{BinaryOp::Add};
    ExprPtr lhs, rhs;              // Unary uses lhs only; Bucket uses lhs + bucket_width
    std::int64_t bucket_width{1};
};

// Structural equality, ignoring spans.
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// Canonical rendering with minimal parentheses; parse(print(e)) == e.
std::string expr_to_string(const ExprPtr& e);

// Builders (used by the parser, tests and the trace generator).
ExprPtr lit_int(std::int64_t v);
ExprPtr lit_string(std::string s);
ExprPtr lit_bool(bool b);
ExprPtr field_ref(Section s, std::string name, PairSide side = PairSide::None);
ExprPtr unary(UnaryOp op, ExprPtr operand);
ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr bucket(ExprPtr operand, std::int64_t width);

// ── Static typing ─────────────────────────────────────────────────────────

// Numeric covers Int and Money: integer literals unify with money fields so
// thresholds can be written as cross-multiplied integers.
enum class ExprType { Numeric, String, Bool };

struct TypecheckContext {
    const Schema* schema{nullptr};
    bool pairwise{false};  // true inside similar/consistent: only a./b. refs allowed
};

// Appends diagnostics on failure; returns the type on success.
std::optional<ExprType> typecheck(const ExprPtr& e, const TypecheckContext& ctx,
                                  std::vector<Diagnostic>& diags);

// Collects every field referenced by the expression.
void collect_fields(const ExprPtr& e, std::vector<FieldRef>& out);

// ── Evaluation ────────────────────────────────────────────────────────────

enum class FaultKind { MissingField, Overflow, DivisionByZero, TypeMismatch };

struct EvalFault {
    FaultKind kind{FaultKind::MissingField};
    std::string field;  // for MissingField

    std::string message() const;
};

using EvalResult = std::variant<TypedValue, EvalFault>;

inline bool is_fault(const EvalResult& r) { return std::holds_alternative<EvalFault>(r); }
inline const EvalFault& fault(const EvalResult& r) { return std::get<EvalFault>(r); }
inline const TypedValue& value(const EvalResult& r) { return std::get<TypedValue>(r); }

// Supplies field values during evaluation. Returns nullptr for fields absent
// from the event; that is a distinguished missing-field fault, which drives
// Inapplicable verdicts.
class FieldEnv {
  public:
    virtual ~FieldEnv() = default;
    virtual const TypedValue* lookup(const FieldRef& ref) const = 0;
};

// Strict semantics: any fault in a subexpression is the result. Integer
// arithmetic is exact; overflow is a fault, not wraparound.
// implies(a,b) == (not a) or b. bucket(x,w) == floor(x/w).
EvalResult eval_expression(const ExprPtr& e, const FieldEnv& env);

}  // namespace glassbox
