#include "glassbox/expr.hpp"

#include "glassbox/spec.hpp"

#include <sstream>

namespace glassbox {

const char* binary_op_symbol(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::And: return "and";
        case BinaryOp::Or: return "or";
        case BinaryOp::Implies: return "implies";
    }
    return "?";
}

std::string FieldRef::to_string() const {
    std::string s;
    if (side == PairSide::A) s += "a.";
    else if (side == PairSide::B) s += "b.";
    s += section_name(section);
    s += ".";
    s += name;
    return s;
}

// ── Builders ──────────────────────────────────────────────────────────────

static std::shared_ptr<Expr> make_node(Expr::Kind k) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    return e;
}

ExprPtr lit_int(std::int64_t v) {
    auto e = make_node(Expr::Kind::Literal);
    e->literal = TypedValue::make_int(v);
    return e;
}

ExprPtr lit_string(std::string s) {
    auto e = make_node(Expr::Kind::Literal);
    e->literal = TypedValue::make_string(std::move(s));
    return e;
}

ExprPtr lit_bool(bool b) {
    auto e = make_node(Expr::Kind::Literal);
    e->literal = TypedValue::make_bool(b);
    return e;
}

ExprPtr field_ref(Section s, std::string name, PairSide side) {
    auto e = make_node(Expr::Kind::Field);
    e->field = FieldRef{side, s, std::move(name)};
    return e;
}

ExprPtr unary(UnaryOp op, ExprPtr operand) {
    auto e = make_node(Expr::Kind::Unary);
    e->unary_op = op;
    e->lhs = std::move(operand);
    return e;
}

ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    auto e = make_node(Expr::Kind::Binary);
    e->binary_op = op;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
}

ExprPtr bucket(ExprPtr operand, std::int64_t width) {
    auto e = make_node(Expr::Kind::Bucket);
    e->lhs = std::move(operand);
    e->bucket_width = width;
    return e;
}

// ── Equality / printing ───────────────────────────────────────────────────

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Expr::Kind::Literal: return a->literal == b->literal;
        case Expr::Kind::Field: return a->field == b->field;
        case Expr::Kind::Unary:
            return a->unary_op == b->unary_op && expr_equal(a->lhs, b->lhs);
        case Expr::Kind::Binary:
            return a->binary_op == b->binary_op && expr_equal(a->lhs, b->lhs) &&
                   expr_equal(a->rhs, b->rhs);
        case Expr::Kind::Bucket:
            return a->bucket_width == b->bucket_width && expr_equal(a->lhs, b->lhs);
    }
    return false;
}

namespace {

// Precedence levels for minimal-paren printing. Comparison operands print at
// additive level, so comparisons never nest without parens.
int binop_prec(BinaryOp op) {
    switch (op) {
        case BinaryOp::Implies: return 1;
        case BinaryOp::Or: return 2;
        case BinaryOp::And: return 3;
        case BinaryOp::Eq:
        case BinaryOp::Ne:
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return 4;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 5;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 6;
    }
    return 0;
}

void print_expr(std::ostream& os, const ExprPtr& e, int min_prec);

void print_child(std::ostream& os, const ExprPtr& e, int min_prec) {
    bool parens = false;
    if (e->kind == Expr::Kind::Binary) parens = binop_prec(e->binary_op) < min_prec;
    if (parens) os << "(";
    print_expr(os, e, 0);
    if (parens) os << ")";
}

void print_expr(std::ostream& os, const ExprPtr& e, int) {
    switch (e->kind) {
        case Expr::Kind::Literal:
            switch (e->literal.type) {
                case FieldType::Int:
                case FieldType::Money:
                    os << e->literal.as_int();
                    break;
                case FieldType::Bool:
                    os << (e->literal.as_bool() ? "true" : "false");
                    break;
                case FieldType::String: {
                    os << '"';
                    for (char c : e->literal.as_string()) {
                        if (c == '"' || c == '\\') os << '\\';
                        os << c;
                    }
                    os << '"';
                    break;
                }
            }
            break;
        case Expr::Kind::Field:
            os << e->field.to_string();
            break;
        case Expr::Kind::Unary:
            if (e->unary_op == UnaryOp::Abs) {
                os << "abs(";
                print_expr(os, e->lhs, 0);
                os << ")";
            } else if (e->unary_op == UnaryOp::Not) {
                os << "not ";
                print_child(os, e->lhs, 7);
            } else {
                os << "-";
                print_child(os, e->lhs, 7);
            }
            break;
        case Expr::Kind::Binary: {
            int prec = binop_prec(e->binary_op);
            bool right_assoc = e->binary_op == BinaryOp::Implies;
            // comparisons are non-associative; operands sit one level up
            int lhs_min = right_assoc ? prec + 1 : prec;
            int rhs_min = right_assoc ? prec : prec + 1;
            if (prec == 4) { lhs_min = 5; rhs_min = 5; }
            print_child(os, e->lhs, lhs_min);
            os << " " << binary_op_symbol(e->binary_op) << " ";
            print_child(os, e->rhs, rhs_min);
            break;
        }
        case Expr::Kind::Bucket:
            os << "bucket(";
            print_expr(os, e->lhs, 0);
            os << ", " << e->bucket_width << ")";
            break;
    }
}

}  // namespace

std::string expr_to_string(const ExprPtr& e) {
    std::ostringstream os;
    print_expr(os, e, 0);
    return os.str();
}

// ── Typecheck ─────────────────────────────────────────────────────────────

namespace {

const char* type_label(ExprType t) {
    switch (t) {
        case ExprType::Numeric: return "numeric";
        case ExprType::String: return "string";
        case ExprType::Bool: return "bool";
    }
    return "?";
}

void type_error(std::vector<Diagnostic>& diags, const SourceSpan& span, std::string msg) {
    diags.push_back({Severity::Error, std::move(msg), span, {}});
}

}  // namespace

std::optional<ExprType> typecheck(const ExprPtr& e, const TypecheckContext& ctx,
                                  std::vector<Diagnostic>& diags) {
    if (!e) {
        type_error(diags, {}, "empty expression");
        return std::nullopt;
    }
    switch (e->kind) {
        case Expr::Kind::Literal:
            switch (e->literal.type) {
                case FieldType::Int:
                case FieldType::Money: return ExprType::Numeric;
                case FieldType::String: return ExprType::String;
                case FieldType::Bool: return ExprType::Bool;
            }
            return std::nullopt;
        case Expr::Kind::Field: {
            if (ctx.pairwise && e->field.side == PairSide::None) {
                type_error(diags, e->span,
                           "field '" + e->field.to_string() +
                               "' must use a. or b. inside a pairwise expression");
                return std::nullopt;
            }
            if (!ctx.pairwise && e->field.side != PairSide::None) {
                type_error(diags, e->span,
                           "pair reference '" + e->field.to_string() +
                               "' is only allowed in similar/consistent expressions");
                return std::nullopt;
            }
            if (!ctx.schema) return std::nullopt;
            const FieldDecl* decl = ctx.schema->find(e->field.section, e->field.name);
            if (!decl) {
                type_error(diags, e->span,
                           "unknown field '" + e->field.to_string() + "' (not in schema)");
                return std::nullopt;
            }
            switch (decl->type) {
                case FieldType::Int:
                case FieldType::Money: return ExprType::Numeric;
                case FieldType::String: return ExprType::String;
                case FieldType::Bool: return ExprType::Bool;
            }
            return std::nullopt;
        }
        case Expr::Kind::Unary: {
            auto t = typecheck(e->lhs, ctx, diags);
            if (!t) return std::nullopt;
            if (e->unary_op == UnaryOp::Not) {
                if (*t != ExprType::Bool) {
                    type_error(diags, e->span, "'not' needs a bool operand");
                    return std::nullopt;
                }
                return ExprType::Bool;
            }
            if (*t != ExprType::Numeric) {
                type_error(diags, e->span,
                           std::string(e->unary_op == UnaryOp::Abs ? "abs" : "negation") +
                               " needs a numeric operand");
                return std::nullopt;
            }
            return ExprType::Numeric;
        }
        case Expr::Kind::Binary: {
            auto lt = typecheck(e->lhs, ctx, diags);
            auto rt = typecheck(e->rhs, ctx, diags);
            if (!lt || !rt) return std::nullopt;
            switch (e->binary_op) {
                case BinaryOp::Add:
                case BinaryOp::Sub:
                case BinaryOp::Mul:
                case BinaryOp::Div:
                    if (*lt != ExprType::Numeric || *rt != ExprType::Numeric) {
                        type_error(diags, e->span,
                                   std::string("arithmetic '") + binary_op_symbol(e->binary_op) +
                                       "' needs numeric operands, got " + type_label(*lt) +
                                       " and " + type_label(*rt));
                        return std::nullopt;
                    }
                    if (e->binary_op == BinaryOp::Div) {
                        if (e->rhs->kind != Expr::Kind::Literal ||
                            !e->rhs->literal.is_numeric() || e->rhs->literal.as_int() == 0) {
                            type_error(diags, e->span,
                                       "division is only allowed by a nonzero literal");
                            return std::nullopt;
                        }
                    }
                    return ExprType::Numeric;
                case BinaryOp::Lt:
                case BinaryOp::Le:
                case BinaryOp::Gt:
                case BinaryOp::Ge:
                    if (*lt != ExprType::Numeric || *rt != ExprType::Numeric) {
                        type_error(diags, e->span,
                                   std::string("ordering '") + binary_op_symbol(e->binary_op) +
                                       "' needs numeric operands, got " + type_label(*lt) +
                                       " and " + type_label(*rt));
                        return std::nullopt;
                    }
                    return ExprType::Bool;
                case BinaryOp::Eq:
                case BinaryOp::Ne:
                    if (*lt != *rt) {
                        type_error(diags, e->span,
                                   std::string("cannot compare ") + type_label(*lt) + " with " +
                                       type_label(*rt));
                        return std::nullopt;
                    }
                    return ExprType::Bool;
                case BinaryOp::And:
                case BinaryOp::Or:
                case BinaryOp::Implies:
                    if (*lt != ExprType::Bool || *rt != ExprType::Bool) {
                        type_error(diags, e->span,
                                   std::string("'") + binary_op_symbol(e->binary_op) +
                                       "' needs bool operands");
                        return std::nullopt;
                    }
                    return ExprType::Bool;
            }
            return std::nullopt;
        }
        case Expr::Kind::Bucket: {
            auto t = typecheck(e->lhs, ctx, diags);
            if (!t) return std::nullopt;
            if (*t != ExprType::Numeric) {
                type_error(diags, e->span, "bucket needs a numeric operand");
                return std::nullopt;
            }
            if (e->bucket_width <= 0) {
                type_error(diags, e->span, "bucket width must be a positive integer");
                return std::nullopt;
            }
            return ExprType::Numeric;
        }
    }
    return std::nullopt;
}

void collect_fields(const ExprPtr& e, std::vector<FieldRef>& out) {
    if (!e) return;
    if (e->kind == Expr::Kind::Field) out.push_back(e->field);
    collect_fields(e->lhs, out);
    collect_fields(e->rhs, out);
}

// ── Evaluation ────────────────────────────────────────────────────────────

std::string EvalFault::message() const {
    switch (kind) {
        case FaultKind::MissingField: return "missing field " + field;
        case FaultKind::Overflow: return "integer overflow";
        case FaultKind::DivisionByZero: return "division by zero";
        case FaultKind::TypeMismatch: return "type mismatch at evaluation";
    }
    return "";
}

namespace {

EvalResult fault_of(FaultKind k, std::string field = {}) {
    return EvalFault{k, std::move(field)};
}

FieldType join_numeric(FieldType a, FieldType b) {
    return (a == FieldType::Money || b == FieldType::Money) ? FieldType::Money : FieldType::Int;
}

EvalResult numeric_binop(BinaryOp op, const TypedValue& l, const TypedValue& r) {
    if (!l.is_numeric() || !r.is_numeric()) return fault_of(FaultKind::TypeMismatch);
    std::int64_t a = l.as_int(), b = r.as_int(), out = 0;
    switch (op) {
        case BinaryOp::Add:
            if (__builtin_add_overflow(a, b, &out)) return fault_of(FaultKind::Overflow);
            break;
        case BinaryOp::Sub:
            if (__builtin_sub_overflow(a, b, &out)) return fault_of(FaultKind::Overflow);
            break;
        case BinaryOp::Mul:
            if (__builtin_mul_overflow(a, b, &out)) return fault_of(FaultKind::Overflow);
            break;
        case BinaryOp::Div:
            if (b == 0) return fault_of(FaultKind::DivisionByZero);
            if (a == INT64_MIN && b == -1) return fault_of(FaultKind::Overflow);
            out = a / b;  // truncating; bucket() provides floor semantics
            break;
        default:
            return fault_of(FaultKind::TypeMismatch);
    }
    TypedValue v;
    v.type = join_numeric(l.type, r.type);
    v.v = out;
    return v;
}

EvalResult compare_binop(BinaryOp op, const TypedValue& l, const TypedValue& r) {
    if (op == BinaryOp::Eq || op == BinaryOp::Ne) {
        bool eq;
        if (l.is_numeric() && r.is_numeric()) {
            eq = l.as_int() == r.as_int();
        } else if (l.type == FieldType::String && r.type == FieldType::String) {
            eq = l.as_string() == r.as_string();
        } else if (l.type == FieldType::Bool && r.type == FieldType::Bool) {
            eq = l.as_bool() == r.as_bool();
        } else {
            return fault_of(FaultKind::TypeMismatch);
        }
        return TypedValue::make_bool(op == BinaryOp::Eq ? eq : !eq);
    }
    if (!l.is_numeric() || !r.is_numeric()) return fault_of(FaultKind::TypeMismatch);
    std::int64_t a = l.as_int(), b = r.as_int();
    bool res = false;
    switch (op) {
        case BinaryOp::Lt: res = a < b; break;
        case BinaryOp::Le: res = a <= b; break;
        case BinaryOp::Gt: res = a > b; break;
        case BinaryOp::Ge: res = a >= b; break;
        default: return fault_of(FaultKind::TypeMismatch);
    }
    return TypedValue::make_bool(res);
}

}  // namespace

EvalResult eval_expression(const ExprPtr& e, const FieldEnv& env) {
    if (!e) return fault_of(FaultKind::TypeMismatch);
    switch (e->kind) {
        case Expr::Kind::Literal:
            return e->literal;
        case Expr::Kind::Field: {
            const TypedValue* v = env.lookup(e->field);
            if (!v) return fault_of(FaultKind::MissingField, e->field.to_string());
            return *v;
        }
        case Expr::Kind::Unary: {
            EvalResult r = eval_expression(e->lhs, env);
            if (is_fault(r)) return r;
            const TypedValue& v = value(r);
            if (e->unary_op == UnaryOp::Not) {
                if (v.type != FieldType::Bool) return fault_of(FaultKind::TypeMismatch);
                return TypedValue::make_bool(!v.as_bool());
            }
            if (!v.is_numeric()) return fault_of(FaultKind::TypeMismatch);
            std::int64_t x = v.as_int();
            if (x == INT64_MIN) return fault_of(FaultKind::Overflow);
            TypedValue out;
            out.type = v.type;
            out.v = e->unary_op == UnaryOp::Neg ? -x : (x < 0 ? -x : x);
            return out;
        }
        case Expr::Kind::Binary: {
            switch (e->binary_op) {
                case BinaryOp::And:
                case BinaryOp::Or:
                case BinaryOp::Implies: {
                    // strict semantics: both sides evaluate, faults propagate
                    EvalResult lr = eval_expression(e->lhs, env);
                    if (is_fault(lr)) return lr;
                    EvalResult rr = eval_expression(e->rhs, env);
                    if (is_fault(rr)) return rr;
                    const TypedValue& l = value(lr);
                    const TypedValue& r = value(rr);
                    if (l.type != FieldType::Bool || r.type != FieldType::Bool)
                        return fault_of(FaultKind::TypeMismatch);
                    bool a = l.as_bool(), b = r.as_bool(), res = false;
                    if (e->binary_op == BinaryOp::And) res = a && b;
                    else if (e->binary_op == BinaryOp::Or) res = a || b;
                    else res = !a || b;
                    return TypedValue::make_bool(res);
                }
                default: {
                    EvalResult lr = eval_expression(e->lhs, env);
                    if (is_fault(lr)) return lr;
                    EvalResult rr = eval_expression(e->rhs, env);
                    if (is_fault(rr)) return rr;
                    const TypedValue& l = value(lr);
                    const TypedValue& r = value(rr);
                    switch (e->binary_op) {
                        case BinaryOp::Add:
                        case BinaryOp::Sub:
                        case BinaryOp::Mul:
                        case BinaryOp::Div:
                            return numeric_binop(e->binary_op, l, r);
                        default:
                            return compare_binop(e->binary_op, l, r);
                    }
                }
            }
        }
        case Expr::Kind::Bucket: {
            EvalResult r = eval_expression(e->lhs, env);
            if (is_fault(r)) return r;
            const TypedValue& v = value(r);
            if (!v.is_numeric()) return fault_of(FaultKind::TypeMismatch);
            std::int64_t x = v.as_int(), w = e->bucket_width;
            if (w <= 0) return fault_of(FaultKind::DivisionByZero);
            std::int64_t q = x / w;
            if (x % w != 0 && x < 0) --q;  // floor, not trunc
            return TypedValue::make_int(q);
        }
    }
    return fault_of(FaultKind::TypeMismatch);
}

}  // namespace glassbox
