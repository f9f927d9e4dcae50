#include "glassbox/types.hpp"

#include <cstdlib>

namespace glassbox {

const char* section_name(Section s) {
    switch (s) {
        case Section::In: return "in";
        case Section::Out: return "out";
        case Section::Env: return "env";
    }
    return "?";
}

bool section_from_name(const std::string& name, Section& out) {
    if (name == "in") { out = Section::In; return true; }
    if (name == "out") { out = Section::Out; return true; }
    if (name == "env") { out = Section::Env; return true; }
    return false;
}

const char* field_type_name(FieldType t) {
    switch (t) {
        case FieldType::Int: return "int";
        case FieldType::Money: return "money";
        case FieldType::String: return "string";
        case FieldType::Bool: return "bool";
    }
    return "?";
}

std::string TypedValue::to_string() const {
    switch (type) {
        case FieldType::Int:
        case FieldType::Money:
            return std::to_string(as_int());
        case FieldType::String:
            return as_string();
        case FieldType::Bool:
            return as_bool() ? "true" : "false";
    }
    return "";
}

std::string Fraction::to_string() const {
    return std::to_string(num) + "/" + std::to_string(den);
}

Fraction frac_abs_diff(const Fraction& a, const Fraction& b) {
    __int128 num = static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den;
    if (num < 0) num = -num;
    __int128 den = static_cast<__int128>(a.den) * b.den;
    // canonical reduced form; dens are window counts, so the reduced values
    // always fit int64
    __int128 g = den;
    __int128 n = num;
    while (n != 0) {
        __int128 t = g % n;
        g = n;
        n = t;
    }
    return {static_cast<std::int64_t>(num / g), static_cast<std::int64_t>(den / g)};
}

bool parse_fraction(const std::string& text, Fraction& out) {
    if (text.empty()) return false;
    auto digits = [](const std::string& s) {
        if (s.empty()) return false;
        for (char c : s)
            if (c < '0' || c > '9') return false;
        return true;
    };
    std::size_t pct = text.find('%');
    if (pct != std::string::npos) {
        if (pct != text.size() - 1) return false;
        std::string head = text.substr(0, pct);
        if (!digits(head)) return false;
        out = {std::atoll(head.c_str()), 100};
        return true;
    }
    std::size_t slash = text.find('/');
    if (slash != std::string::npos) {
        std::string a = text.substr(0, slash), b = text.substr(slash + 1);
        if (!digits(a) || !digits(b)) return false;
        std::int64_t den = std::atoll(b.c_str());
        if (den == 0) return false;
        out = {std::atoll(a.c_str()), den};
        return true;
    }
    if (!digits(text)) return false;
    out = {std::atoll(text.c_str()), 1};
    return true;
}

}  // namespace glassbox
