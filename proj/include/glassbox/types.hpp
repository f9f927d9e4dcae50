#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace glassbox {

// Sections of an interaction record. `in` is what the monitored system was
// given, `out` is what it produced, `env` is reference data (e.g. the central
// bank rate) visible to the monitor but not produced by the system.
enum class Section { In, Out, Env };

const char* section_name(Section s);
bool section_from_name(const std::string& name, Section& out);

// money = integer minor units (cents, basis points, ...). No floating point
// anywhere in field values or expression arithmetic.
enum class FieldType { Int, Money, String, Bool };

const char* field_type_name(FieldType t);

struct TypedValue {
    FieldType type{FieldType::Int};
    std::variant<std::int64_t, std::string, bool> v{std::int64_t{0}};

    static TypedValue make_int(std::int64_t x) { return {FieldType::Int, x}; }
    static TypedValue make_money(std::int64_t x) { return {FieldType::Money, x}; }
    static TypedValue make_string(std::string s) { return {FieldType::String, std::move(s)}; }
    static TypedValue make_bool(bool b) { return {FieldType::Bool, b}; }

    bool is_numeric() const { return type == FieldType::Int || type == FieldType::Money; }
    std::int64_t as_int() const { return std::get<std::int64_t>(v); }
    const std::string& as_string() const { return std::get<std::string>(v); }
    bool as_bool() const { return std::get<bool>(v); }

    // Stable textual form, used for group keys and verdict details.
    std::string to_string() const;

    bool operator==(const TypedValue& o) const { return type == o.type && v == o.v; }
};

// Exact nonnegative rational, den > 0. Used for thresholds (max_gap, theta)
// and observed rates; all comparisons cross-multiply in 128-bit so no
// tolerance is ever needed.
struct Fraction {
    std::int64_t num{0};
    std::int64_t den{1};

    static Fraction zero() { return {0, 1}; }

    std::string to_string() const;

    bool operator==(const Fraction& o) const {
        return static_cast<__int128>(num) * o.den == static_cast<__int128>(o.num) * den;
    }
};

inline bool frac_le(const Fraction& a, const Fraction& b) {
    return static_cast<__int128>(a.num) * b.den <= static_cast<__int128>(b.num) * a.den;
}
inline bool frac_lt(const Fraction& a, const Fraction& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

// |a - b|, reduced to lowest terms.
Fraction frac_abs_diff(const Fraction& a, const Fraction& b);

// Parses "25%", "1/4" or "1" into an exact fraction. Returns false on
// malformed input or negative parts.
bool parse_fraction(const std::string& text, Fraction& out);

}  // namespace glassbox
