#include "glassbox/parser.hpp"

#include "glassbox/expr.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <utility>

namespace glassbox {
namespace {

// ── Tokens ────────────────────────────────────────────────────────────────

enum class Tok {
    Ident, Int, Money, String,
    LBrace, RBrace, LParen, RParen,
    Colon, Semi, Comma, Dot, Percent, Assign,
    Plus, Minus, Star, Slash,
    EqEq, NotEq, Lt, Le, Gt, Ge,
    KwGlassbox, KwSchema, KwValue, KwContext, KwNorm, KwRequirement,
    KwInterpretation, KwCountsAs, KwIn, KwOut, KwEnv, KwWhen, KwThen,
    KwForTheSakeOf, KwKind, KwWindow, KwGroupBy, KwOutcome, KwMaxGap,
    KwMaxDelta, KwMinSamples, KwSimilar, KwConsistent, KwSection, KwAllow,
    KwObligation, KwProhibition, KwInt, KwMoney, KwString, KwBool,
    KwNot, KwAnd, KwOr, KwImplies, KwAbs, KwBucket, KwTrue, KwFalse,
    Eof,
};

struct Token {
    Tok kind{Tok::Eof};
    std::string text;
    std::int64_t number{0};  // Int value, or Money already in minor units
    SourceSpan span;
};

const std::map<std::string, Tok>& keywords() {
    static const std::map<std::string, Tok> table{
        {"glassbox", Tok::KwGlassbox},
        {"schema", Tok::KwSchema},
        {"value", Tok::KwValue},
        {"context", Tok::KwContext},
        {"norm", Tok::KwNorm},
        {"requirement", Tok::KwRequirement},
        {"interpretation", Tok::KwInterpretation},
        {"counts_as", Tok::KwCountsAs},
        {"in", Tok::KwIn},
        {"out", Tok::KwOut},
        {"env", Tok::KwEnv},
        {"when", Tok::KwWhen},
        {"then", Tok::KwThen},
        {"for_the_sake_of", Tok::KwForTheSakeOf},
        {"kind", Tok::KwKind},
        {"window", Tok::KwWindow},
        {"group_by", Tok::KwGroupBy},
        {"outcome", Tok::KwOutcome},
        {"max_gap", Tok::KwMaxGap},
        {"max_delta", Tok::KwMaxDelta},
        {"min_samples", Tok::KwMinSamples},
        {"similar", Tok::KwSimilar},
        {"consistent", Tok::KwConsistent},
        {"section", Tok::KwSection},
        {"allow", Tok::KwAllow},
        {"obligation", Tok::KwObligation},
        {"prohibition", Tok::KwProhibition},
        {"int", Tok::KwInt},
        {"money", Tok::KwMoney},
        {"string", Tok::KwString},
        {"bool", Tok::KwBool},
        {"not", Tok::KwNot},
        {"and", Tok::KwAnd},
        {"or", Tok::KwOr},
        {"implies", Tok::KwImplies},
        {"abs", Tok::KwAbs},
        {"bucket", Tok::KwBucket},
        {"true", Tok::KwTrue},
        {"false", Tok::KwFalse},
    };
    return table;
}

std::string describe(const Token& t) {
    switch (t.kind) {
        case Tok::Eof: return "end of input";
        case Tok::String: return "string literal";
        case Tok::Int:
        case Tok::Money: return "'" + t.text + "'";
        default: return "'" + t.text + "'";
    }
}

// Thrown after the first diagnostic: the parser is fail-fast.
struct ParseAbort {};

// ── Lexer ─────────────────────────────────────────────────────────────────

class Lexer {
  public:
    Lexer(const std::string& src, std::vector<Diagnostic>& diags)
        : src_(src), diags_(diags) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_trivia();
            Token t = next();
            bool eof = t.kind == Tok::Eof;
            out.push_back(std::move(t));
            if (eof) return out;
        }
    }

  private:
    const std::string& src_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_{0};
    std::size_t line_{1};
    std::size_t col_{1};

    bool eof() const { return pos_ >= src_.size(); }
    char cur() const { return src_[pos_]; }
    char peek(std::size_t ahead = 1) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    SourceSpan here() const { return {pos_, pos_, line_, col_}; }

    [[noreturn]] void fail(std::string msg, SourceSpan span) {
        diags_.push_back({Severity::Error, std::move(msg), span, {}});
        throw ParseAbort{};
    }

    void skip_trivia() {
        while (!eof()) {
            char c = cur();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (!eof() && cur() != '\n') advance();
            } else {
                return;
            }
        }
    }

    static bool ident_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
    static bool digit(char c) { return c >= '0' && c <= '9'; }

    Token next() {
        if (eof()) return Token{Tok::Eof, "", 0, here()};
        SourceSpan start = here();
        char c = cur();

        if (ident_start(c)) return lex_ident(start);
        if (digit(c)) return lex_number(start);
        if (c == '"') return lex_string(start);

        auto one = [&](Tok k) {
            std::string text(1, c);
            advance();
            SourceSpan sp = start;
            sp.end = pos_;
            return Token{k, text, 0, sp};
        };
        auto two = [&](Tok k, const char* text) {
            advance();
            advance();
            SourceSpan sp = start;
            sp.end = pos_;
            return Token{k, text, 0, sp};
        };

        switch (c) {
            case '{': return one(Tok::LBrace);
            case '}': return one(Tok::RBrace);
            case '(': return one(Tok::LParen);
            case ')': return one(Tok::RParen);
            case ':': return one(Tok::Colon);
            case ';': return one(Tok::Semi);
            case ',': return one(Tok::Comma);
            case '.': return one(Tok::Dot);
            case '%': return one(Tok::Percent);
            case '+': return one(Tok::Plus);
            case '-': return one(Tok::Minus);
            case '*': return one(Tok::Star);
            case '/': return one(Tok::Slash);
            case '=':
                if (peek() == '=') return two(Tok::EqEq, "==");
                return one(Tok::Assign);
            case '!':
                if (peek() == '=') return two(Tok::NotEq, "!=");
                fail("unexpected character '!'", start);
            case '<':
                if (peek() == '=') return two(Tok::Le, "<=");
                return one(Tok::Lt);
            case '>':
                if (peek() == '=') return two(Tok::Ge, ">=");
                return one(Tok::Gt);
            default:
                break;
        }
        fail(std::string("unexpected character '") + c + "'", start);
    }

    Token lex_ident(SourceSpan start) {
        std::size_t begin = pos_;
        while (!eof() && ident_char(cur())) advance();
        std::string text = src_.substr(begin, pos_ - begin);
        SourceSpan sp = start;
        sp.end = pos_;
        auto it = keywords().find(text);
        Tok kind = it != keywords().end() ? it->second : Tok::Ident;
        return Token{kind, std::move(text), 0, sp};
    }

    // Integers are plain digit runs. A trailing 'M' marks a money amount in
    // major units; up to two decimals are allowed before the suffix
    // (1.50M == 150 minor units). A decimal without the suffix is an error:
    // there are no floating-point literals.
    Token lex_number(SourceSpan start) {
        std::size_t begin = pos_;
        std::int64_t whole = 0;
        bool overflow = false;
        while (!eof() && digit(cur())) {
            if (__builtin_mul_overflow(whole, 10, &whole) ||
                __builtin_add_overflow(whole, cur() - '0', &whole))
                overflow = true;
            advance();
        }

        std::int64_t frac = 0;
        int frac_digits = 0;
        bool has_frac = false;
        if (!eof() && cur() == '.' && digit(peek())) {
            has_frac = true;
            advance();  // '.'
            while (!eof() && digit(cur())) {
                frac = frac * 10 + (cur() - '0');
                ++frac_digits;
                advance();
            }
        }

        SourceSpan sp = start;
        bool money = !eof() && cur() == 'M';
        if (money) {
            advance();
            if (!eof() && ident_char(cur())) {
                sp.end = pos_;
                fail("malformed numeric literal", sp);
            }
        }
        sp.end = pos_;
        std::string text = src_.substr(begin, pos_ - begin);

        if (has_frac && !money)
            fail("floating-point literals are not allowed; write minor units or use the 'M' suffix",
                 sp);
        if (money && frac_digits > 2)
            fail("money literal has more than two decimals", sp);
        if (!money && !eof() && ident_char(cur()))
            fail("malformed numeric literal", sp);
        if (overflow) fail("integer literal out of range", sp);

        if (!money) return Token{Tok::Int, std::move(text), whole, sp};

        // scale to minor units: 1M = 100, 1.5M = 150, 1.05M = 105
        std::int64_t minor;
        std::int64_t scaled_frac = frac_digits == 1 ? frac * 10 : frac;
        if (__builtin_mul_overflow(whole, 100, &minor) ||
            __builtin_add_overflow(minor, scaled_frac, &minor))
            fail("money literal out of range", sp);
        return Token{Tok::Money, std::move(text), minor, sp};
    }

    Token lex_string(SourceSpan start) {
        advance();  // opening quote
        std::string value;
        while (true) {
            if (eof() || cur() == '\n') fail("unterminated string literal", start);
            char c = cur();
            if (c == '"') {
                advance();
                SourceSpan sp = start;
                sp.end = pos_;
                return Token{Tok::String, std::move(value), 0, sp};
            }
            if (c == '\\') {
                advance();
                if (eof()) fail("unterminated string literal", start);
                char esc = cur();
                if (esc == '"' || esc == '\\') {
                    value.push_back(esc);
                    advance();
                } else {
                    SourceSpan sp = here();
                    sp.start = pos_ - 1;
                    sp.end = pos_ + 1;
                    fail(std::string("unsupported escape '\\") + esc +
                             "' (only \\\" and \\\\ are recognized)",
                         sp);
                }
            } else {
                value.push_back(c);
                advance();
            }
        }
    }
};

// ── Parser ────────────────────────────────────────────────────────────────

SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
    SourceSpan s = a;
    s.end = b.end > a.end ? b.end : a.end;
    return s;
}

ExprPtr with_span(const ExprPtr& e, const SourceSpan& sp) {
    auto copy = std::make_shared<Expr>(*e);
    copy->span = sp;
    return copy;
}

class Parser {
  public:
    Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
        : toks_(std::move(tokens)), diags_(diags) {}

    GlassBoxSpec parse_spec_file() {
        GlassBoxSpec spec;
        expect(Tok::KwGlassbox, "expected 'glassbox' header");
        spec.name = expect(Tok::Ident, "expected spec name after 'glassbox'").text;
        expect(Tok::LBrace, "expected '{' after spec name");
        bool have_schema = false;
        while (!at(Tok::RBrace)) {
            switch (cur().kind) {
                case Tok::KwSchema:
                    if (have_schema) fail("duplicate schema block", cur().span);
                    have_schema = true;
                    parse_schema(spec.schema);
                    break;
                case Tok::KwValue: parse_value(spec); break;
                case Tok::KwContext: parse_context(spec); break;
                case Tok::KwNorm: parse_norm(spec); break;
                case Tok::KwRequirement: parse_requirement(spec); break;
                case Tok::KwInterpretation: parse_interpretation(spec); break;
                case Tok::Eof: fail("unexpected end of input: missing '}'", cur().span); break;
                default:
                    fail("expected a declaration (schema, value, context, norm, requirement, "
                         "interpretation), found " + describe(cur()),
                         cur().span);
            }
        }
        advance();  // '}'
        expect(Tok::Eof, "expected end of input after closing '}'");
        return spec;
    }

    ExprPtr parse_expression_only() {
        ExprPtr e = parse_expr();
        expect(Tok::Eof, "expected end of input after expression");
        return e;
    }

  private:
    std::vector<Token> toks_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_{0};

    const Token& cur() const { return toks_[pos_]; }
    bool at(Tok k) const { return cur().kind == k; }
    void advance() {
        if (cur().kind != Tok::Eof) ++pos_;
    }

    [[noreturn]] void fail(std::string msg, SourceSpan span) {
        diags_.push_back({Severity::Error, std::move(msg), span, {}});
        throw ParseAbort{};
    }

    Token expect(Tok k, const char* msg) {
        if (!at(k)) fail(std::string(msg) + ", found " + describe(cur()), cur().span);
        Token t = cur();
        advance();
        return t;
    }

    bool accept(Tok k, Token* out = nullptr) {
        if (!at(k)) return false;
        if (out) *out = cur();
        advance();
        return true;
    }

    // ── Declarations ──────────────────────────────────────────────────────

    bool section_kw(Section& out) {
        if (at(Tok::KwIn)) { out = Section::In; advance(); return true; }
        if (at(Tok::KwOut)) { out = Section::Out; advance(); return true; }
        if (at(Tok::KwEnv)) { out = Section::Env; advance(); return true; }
        return false;
    }

    void parse_schema(Schema& schema) {
        advance();  // 'schema'
        expect(Tok::LBrace, "expected '{' after 'schema'");
        while (!accept(Tok::RBrace)) {
            FieldDecl f;
            f.span = cur().span;
            if (!section_kw(f.section))
                fail("expected section (in, out, env) in schema field, found " + describe(cur()),
                     cur().span);
            f.name = expect(Tok::Ident, "expected field name").text;
            expect(Tok::Colon, "expected ':' after field name");
            if (at(Tok::KwInt)) f.type = FieldType::Int;
            else if (at(Tok::KwMoney)) f.type = FieldType::Money;
            else if (at(Tok::KwString)) f.type = FieldType::String;
            else if (at(Tok::KwBool)) f.type = FieldType::Bool;
            else
                fail("expected field type (int, money, string, bool), found " + describe(cur()),
                     cur().span);
            f.span = join(f.span, cur().span);
            advance();
            expect(Tok::Semi, "expected ';' after schema field");
            schema.fields.push_back(std::move(f));
        }
    }

    void parse_value(GlassBoxSpec& spec) {
        ValueDef v;
        v.span = cur().span;
        advance();  // 'value'
        v.id = expect(Tok::Ident, "expected value id").text;
        v.description = expect(Tok::String, "expected value description string").text;
        expect(Tok::Semi, "expected ';' after value declaration");
        spec.values.push_back(std::move(v));
    }

    void parse_context(GlassBoxSpec& spec) {
        ContextDef c;
        c.span = cur().span;
        advance();  // 'context'
        c.id = expect(Tok::Ident, "expected context id").text;
        c.description = expect(Tok::String, "expected context description string").text;
        if (accept(Tok::KwWhen)) c.guard = parse_expr();
        expect(Tok::Semi, "expected ';' after context declaration");
        spec.contexts.push_back(std::move(c));
    }

    void parse_norm(GlassBoxSpec& spec) {
        NormDef n;
        n.span = cur().span;
        advance();  // 'norm'
        n.id = expect(Tok::Ident, "expected norm id").text;
        if (accept(Tok::KwObligation)) n.modality = Modality::Obligation;
        else if (accept(Tok::KwProhibition)) n.modality = Modality::Prohibition;
        n.description = expect(Tok::String, "expected norm description string").text;
        expect(Tok::LBrace, "expected '{' after norm header");
        while (!accept(Tok::RBrace)) {
            CountsAsClause ca;
            ca.span = cur().span;
            expect(Tok::KwCountsAs, "expected 'counts_as' clause or '}'");
            ca.target = expect(Tok::Ident, "expected counts_as target id").text;
            expect(Tok::KwIn, "expected 'in' after counts_as target");
            ca.context = expect(Tok::Ident, "expected context id").text;
            ca.span = join(ca.span, toks_[pos_ - 1].span);
            expect(Tok::Semi, "expected ';' after counts_as clause");
            n.counts_as.push_back(std::move(ca));
        }
        spec.norms.push_back(std::move(n));
    }

    Fraction parse_rational() {
        Token t = expect(Tok::Int, "expected rational (N, N%, or N/D)");
        if (accept(Tok::Percent)) return {t.number, 100};
        if (accept(Tok::Slash)) {
            Token d = expect(Tok::Int, "expected denominator");
            if (d.number == 0) fail("rational denominator must be nonzero", d.span);
            return {t.number, d.number};
        }
        return {t.number, 1};
    }

    void parse_requirement(GlassBoxSpec& spec) {
        Requirement r;
        r.span = cur().span;
        advance();  // 'requirement'
        r.id = expect(Tok::Ident, "expected requirement id").text;
        Token desc;
        if (accept(Tok::String, &desc)) r.description = desc.text;
        expect(Tok::LBrace, "expected '{' after requirement header");

        // seen-clause spans, for duplicate/mismatch reporting
        std::map<std::string, SourceSpan> seen;
        bool have_kind = false;
        SourceSpan kind_span;

        auto mark = [&](const char* name, SourceSpan sp) {
            auto [it, inserted] = seen.emplace(name, sp);
            if (!inserted)
                fail("duplicate '" + std::string(name) + "' clause in requirement '" + r.id + "'",
                     sp);
        };

        while (!accept(Tok::RBrace)) {
            SourceSpan sp = cur().span;
            switch (cur().kind) {
                case Tok::KwForTheSakeOf: {
                    advance();
                    mark("for_the_sake_of", sp);
                    do {
                        r.for_the_sake_of.push_back(
                            expect(Tok::Ident, "expected norm id").text);
                    } while (accept(Tok::Comma));
                    expect(Tok::Semi, "expected ';' after for_the_sake_of clause");
                    break;
                }
                case Tok::KwKind: {
                    advance();
                    mark("kind", sp);
                    Token k = expect(Tok::Ident, "expected requirement kind");
                    if (!requirement_kind_from_name(k.text, r.kind))
                        fail("unknown requirement kind '" + k.text + "'", k.span);
                    have_kind = true;
                    kind_span = k.span;
                    expect(Tok::Semi, "expected ';' after kind clause");
                    break;
                }
                case Tok::KwWhen:
                    advance();
                    mark("when", sp);
                    r.when = parse_expr();
                    expect(Tok::Semi, "expected ';' after when clause");
                    break;
                case Tok::KwThen:
                    advance();
                    mark("then", sp);
                    r.then = parse_expr();
                    expect(Tok::Semi, "expected ';' after then clause");
                    break;
                case Tok::KwWindow: {
                    advance();
                    mark("window", sp);
                    r.window = expect(Tok::Int, "expected window size").number;
                    if (at(Tok::Ident)) {
                        const std::string& u = cur().text;
                        if (u == "events") r.window_unit = WindowUnit::Events;
                        else if (u == "ms") r.window_unit = WindowUnit::Millis;
                        else if (u == "s") r.window_unit = WindowUnit::Seconds;
                        else if (u == "min") r.window_unit = WindowUnit::Minutes;
                        else if (u == "h") r.window_unit = WindowUnit::Hours;
                        else if (u == "d") r.window_unit = WindowUnit::Days;
                        else
                            fail("unknown window unit '" + u + "'", cur().span);
                        advance();
                    }
                    expect(Tok::Semi, "expected ';' after window clause");
                    break;
                }
                case Tok::KwGroupBy:
                    advance();
                    mark("group_by", sp);
                    r.group_by = parse_expr();
                    expect(Tok::Semi, "expected ';' after group_by clause");
                    break;
                case Tok::KwOutcome:
                    advance();
                    mark("outcome", sp);
                    r.outcome = parse_expr();
                    expect(Tok::Semi, "expected ';' after outcome clause");
                    break;
                case Tok::KwMaxGap:
                    advance();
                    mark("max_gap", sp);
                    r.max_gap = parse_rational();
                    expect(Tok::Semi, "expected ';' after max_gap clause");
                    break;
                case Tok::KwMaxDelta:
                    advance();
                    mark("max_delta", sp);
                    r.max_delta = parse_rational();
                    expect(Tok::Semi, "expected ';' after max_delta clause");
                    break;
                case Tok::KwMinSamples:
                    advance();
                    mark("min_samples", sp);
                    r.min_samples = expect(Tok::Int, "expected min_samples count").number;
                    expect(Tok::Semi, "expected ';' after min_samples clause");
                    break;
                case Tok::KwSimilar:
                    advance();
                    mark("similar", sp);
                    r.similar = parse_expr();
                    expect(Tok::Semi, "expected ';' after similar clause");
                    break;
                case Tok::KwConsistent:
                    advance();
                    mark("consistent", sp);
                    r.consistent = parse_expr();
                    expect(Tok::Semi, "expected ';' after consistent clause");
                    break;
                case Tok::KwSection: {
                    advance();
                    mark("section", sp);
                    if (!section_kw(r.whitelist_section))
                        fail("expected section (in, out, env), found " + describe(cur()),
                             cur().span);
                    expect(Tok::Semi, "expected ';' after section clause");
                    break;
                }
                case Tok::KwAllow: {
                    advance();
                    mark("allow", sp);
                    do {
                        r.allowed.push_back(expect(Tok::Ident, "expected field name").text);
                    } while (accept(Tok::Comma));
                    expect(Tok::Semi, "expected ';' after allow clause");
                    break;
                }
                case Tok::Eof:
                    fail("unexpected end of input inside requirement '" + r.id + "'", sp);
                    break;
                default:
                    fail("expected a requirement clause or '}', found " + describe(cur()), sp);
            }
        }

        if (!have_kind) fail("requirement '" + r.id + "' has no kind clause", r.span);
        check_clauses(r, seen, kind_span);
        spec.requirements.push_back(std::move(r));
    }

    // Structural fit between declared kind and present clauses.
    void check_clauses(const Requirement& r, const std::map<std::string, SourceSpan>& seen,
                       SourceSpan kind_span) {
        auto allowed_for = [&](std::initializer_list<const char*> names) {
            for (const auto& [name, sp] : seen) {
                if (name == "for_the_sake_of" || name == "kind") continue;
                bool ok = false;
                for (const char* n : names)
                    if (name == n) ok = true;
                if (!ok)
                    fail("clause '" + name + "' is not valid for kind " +
                             requirement_kind_name(r.kind),
                         sp);
            }
        };
        auto need = [&](const char* name) {
            if (!seen.count(name))
                fail(std::string("requirement '") + r.id + "' of kind " +
                         requirement_kind_name(r.kind) + " is missing its '" + name + "' clause",
                     kind_span);
        };
        switch (r.kind) {
            case RequirementKind::PerEvent:
                allowed_for({"when", "then"});
                need("then");
                break;
            case RequirementKind::WindowParity:
                allowed_for({"window", "group_by", "outcome", "max_gap", "min_samples"});
                need("window");
                need("group_by");
                need("outcome");
                need("max_gap");
                break;
            case RequirementKind::PairwiseConsistency:
                allowed_for({"window", "similar", "consistent"});
                need("window");
                need("similar");
                need("consistent");
                break;
            case RequirementKind::WindowDrift:
                allowed_for({"window", "outcome", "max_delta"});
                need("window");
                need("outcome");
                need("max_delta");
                break;
            case RequirementKind::FieldWhitelist:
                allowed_for({"section", "allow"});
                need("section");
                need("allow");
                break;
        }
    }

    void parse_interpretation(GlassBoxSpec& spec) {
        InterpretationDef i;
        i.span = cur().span;
        advance();  // 'interpretation'
        i.value = expect(Tok::Ident, "expected value id").text;
        expect(Tok::KwIn, "expected 'in' after value id");
        i.context = expect(Tok::Ident, "expected context id").text;
        expect(Tok::Assign, "expected '=' in interpretation");
        i.formula = parse_formula();
        expect(Tok::Semi, "expected ';' after interpretation");
        spec.interpretations.push_back(std::move(i));
    }

    // ── Formulas: or < and < atom ─────────────────────────────────────────

    FormulaPtr parse_formula() {
        FormulaPtr lhs = parse_formula_and();
        if (!at(Tok::KwOr)) return lhs;
        std::vector<FormulaPtr> parts{lhs};
        while (accept(Tok::KwOr)) parts.push_back(parse_formula_and());
        return formula_or(std::move(parts));
    }

    FormulaPtr parse_formula_and() {
        FormulaPtr lhs = parse_formula_atom();
        if (!at(Tok::KwAnd)) return lhs;
        std::vector<FormulaPtr> parts{lhs};
        while (accept(Tok::KwAnd)) parts.push_back(parse_formula_atom());
        return formula_and(std::move(parts));
    }

    FormulaPtr parse_formula_atom() {
        if (accept(Tok::LParen)) {
            FormulaPtr f = parse_formula();
            expect(Tok::RParen, "expected ')' in formula");
            return f;
        }
        Token t = expect(Tok::Ident, "expected norm id in formula");
        return formula_norm(t.text);
    }

    // ── Expressions ───────────────────────────────────────────────────────
    // implies < or < and < comparison < additive < multiplicative < unary

    ExprPtr parse_expr() { return parse_implies(); }

    ExprPtr parse_implies() {
        ExprPtr lhs = parse_or();
        if (accept(Tok::KwImplies)) {
            ExprPtr rhs = parse_implies();  // right-associative
            return with_span(binary(BinaryOp::Implies, lhs, rhs), join(lhs->span, rhs->span));
        }
        return lhs;
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (accept(Tok::KwOr)) {
            ExprPtr rhs = parse_and();
            lhs = with_span(binary(BinaryOp::Or, lhs, rhs), join(lhs->span, rhs->span));
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_cmp();
        while (accept(Tok::KwAnd)) {
            ExprPtr rhs = parse_cmp();
            lhs = with_span(binary(BinaryOp::And, lhs, rhs), join(lhs->span, rhs->span));
        }
        return lhs;
    }

    bool cmp_op(BinaryOp& out) {
        switch (cur().kind) {
            case Tok::EqEq: out = BinaryOp::Eq; break;
            case Tok::NotEq: out = BinaryOp::Ne; break;
            case Tok::Lt: out = BinaryOp::Lt; break;
            case Tok::Le: out = BinaryOp::Le; break;
            case Tok::Gt: out = BinaryOp::Gt; break;
            case Tok::Ge: out = BinaryOp::Ge; break;
            default: return false;
        }
        advance();
        return true;
    }

    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_add();
        BinaryOp op;
        if (!cmp_op(op)) return lhs;
        ExprPtr rhs = parse_add();
        ExprPtr e = with_span(binary(op, lhs, rhs), join(lhs->span, rhs->span));
        BinaryOp next;
        if (cmp_op(next))
            fail("comparison operators do not chain; parenthesize the intended grouping",
                 toks_[pos_ - 1].span);
        return e;
    }

    ExprPtr parse_add() {
        ExprPtr lhs = parse_mul();
        for (;;) {
            BinaryOp op;
            if (at(Tok::Plus)) op = BinaryOp::Add;
            else if (at(Tok::Minus)) op = BinaryOp::Sub;
            else return lhs;
            advance();
            ExprPtr rhs = parse_mul();
            lhs = with_span(binary(op, lhs, rhs), join(lhs->span, rhs->span));
        }
    }

    ExprPtr parse_mul() {
        ExprPtr lhs = parse_unary();
        for (;;) {
            BinaryOp op;
            if (at(Tok::Star)) op = BinaryOp::Mul;
            else if (at(Tok::Slash)) op = BinaryOp::Div;
            else return lhs;
            advance();
            ExprPtr rhs = parse_unary();
            lhs = with_span(binary(op, lhs, rhs), join(lhs->span, rhs->span));
        }
    }

    ExprPtr parse_unary() {
        SourceSpan sp = cur().span;
        if (accept(Tok::KwNot)) {
            ExprPtr operand = parse_unary();
            return with_span(unary(UnaryOp::Not, operand), join(sp, operand->span));
        }
        if (accept(Tok::Minus)) {
            ExprPtr operand = parse_unary();
            return with_span(unary(UnaryOp::Neg, operand), join(sp, operand->span));
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        SourceSpan sp = cur().span;
        switch (cur().kind) {
            case Tok::Int: {
                Token t = cur();
                advance();
                return with_span(lit_int(t.number), sp);
            }
            case Tok::Money: {
                Token t = cur();
                advance();
                return with_span(lit_int(t.number), sp);
            }
            case Tok::String: {
                Token t = cur();
                advance();
                return with_span(lit_string(t.text), sp);
            }
            case Tok::KwTrue:
                advance();
                return with_span(lit_bool(true), sp);
            case Tok::KwFalse:
                advance();
                return with_span(lit_bool(false), sp);
            case Tok::KwAbs: {
                advance();
                expect(Tok::LParen, "expected '(' after abs");
                ExprPtr operand = parse_expr();
                Token close = expect(Tok::RParen, "expected ')' after abs argument");
                return with_span(unary(UnaryOp::Abs, operand), join(sp, close.span));
            }
            case Tok::KwBucket: {
                advance();
                expect(Tok::LParen, "expected '(' after bucket");
                ExprPtr operand = parse_expr();
                expect(Tok::Comma, "expected ',' between bucket arguments");
                Token w = expect(Tok::Int, "expected integer bucket width");
                Token close = expect(Tok::RParen, "expected ')' after bucket width");
                return with_span(bucket(operand, w.number), join(sp, close.span));
            }
            case Tok::LParen: {
                advance();
                ExprPtr e = parse_expr();
                expect(Tok::RParen, "expected ')'");
                return e;
            }
            case Tok::KwIn:
            case Tok::KwOut:
            case Tok::KwEnv:
                return parse_field_ref(PairSide::None, sp);
            case Tok::Ident: {
                const std::string& name = cur().text;
                if (name == "a" || name == "b") {
                    PairSide side = name == "a" ? PairSide::A : PairSide::B;
                    advance();
                    expect(Tok::Dot, "expected '.' after pair side");
                    return parse_field_ref(side, sp);
                }
                fail("unknown name '" + name +
                         "' (expected a field reference like in.income, or a literal)",
                     sp);
            }
            default:
                fail("expected an expression, found " + describe(cur()), sp);
        }
    }

    ExprPtr parse_field_ref(PairSide side, SourceSpan sp) {
        Section sec;
        if (!section_kw(sec))
            fail("expected section (in, out, env), found " + describe(cur()), cur().span);
        expect(Tok::Dot, "expected '.' after section");
        Token name = expect(Tok::Ident, "expected field name");
        return with_span(field_ref(sec, name.text, side), join(sp, name.span));
    }
};

}  // namespace

ParseResult parse_spec_syntax(const std::string& text) {
    ParseResult result;
    try {
        Lexer lexer(text, result.diagnostics);
        Parser parser(lexer.run(), result.diagnostics);
        result.spec = parser.parse_spec_file();
    } catch (const ParseAbort&) {
        result.spec.reset();
    }
    return result;
}

ParseResult parse_spec(const std::string& text) {
    ParseResult result = parse_spec_syntax(text);
    if (!result.spec) return result;
    std::vector<Diagnostic> semantic = validate_hierarchy(*result.spec);
    for (auto& d : semantic) result.diagnostics.push_back(std::move(d));
    if (has_errors(result.diagnostics)) result.spec.reset();
    return result;
}

ExprParseResult parse_expression(const std::string& text) {
    ExprParseResult result;
    try {
        Lexer lexer(text, result.diagnostics);
        Parser parser(lexer.run(), result.diagnostics);
        result.expr = parser.parse_expression_only();
    } catch (const ParseAbort&) {
        result.expr.reset();
    }
    return result;
}

}  // namespace glassbox
