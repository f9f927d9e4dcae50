#include "glassbox/serializer.hpp"

#include "glassbox/expr.hpp"

#include <sstream>

namespace glassbox {
namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

const char* window_unit_suffix(WindowUnit u) {
    switch (u) {
        case WindowUnit::Events: return "";
        case WindowUnit::Millis: return " ms";
        case WindowUnit::Seconds: return " s";
        case WindowUnit::Minutes: return " min";
        case WindowUnit::Hours: return " h";
        case WindowUnit::Days: return " d";
    }
    return "";
}

void emit_requirement(std::ostringstream& os, const Requirement& r) {
    os << "  requirement " << r.id;
    if (!r.description.empty()) os << " " << quote(r.description);
    os << " {\n";
    if (!r.for_the_sake_of.empty()) {
        os << "    for_the_sake_of ";
        for (std::size_t i = 0; i < r.for_the_sake_of.size(); ++i) {
            if (i) os << ", ";
            os << r.for_the_sake_of[i];
        }
        os << ";\n";
    }
    os << "    kind " << requirement_kind_name(r.kind) << ";\n";
    switch (r.kind) {
        case RequirementKind::PerEvent:
            if (r.when) os << "    when " << expr_to_string(r.when) << ";\n";
            os << "    then " << expr_to_string(r.then) << ";\n";
            break;
        case RequirementKind::WindowParity:
            os << "    window " << r.window << window_unit_suffix(r.window_unit) << ";\n";
            os << "    group_by " << expr_to_string(r.group_by) << ";\n";
            os << "    outcome " << expr_to_string(r.outcome) << ";\n";
            os << "    max_gap " << r.max_gap.num << "/" << r.max_gap.den << ";\n";
            os << "    min_samples " << r.min_samples << ";\n";
            break;
        case RequirementKind::PairwiseConsistency:
            os << "    window " << r.window << window_unit_suffix(r.window_unit) << ";\n";
            os << "    similar " << expr_to_string(r.similar) << ";\n";
            os << "    consistent " << expr_to_string(r.consistent) << ";\n";
            break;
        case RequirementKind::WindowDrift:
            os << "    window " << r.window << window_unit_suffix(r.window_unit) << ";\n";
            os << "    outcome " << expr_to_string(r.outcome) << ";\n";
            os << "    max_delta " << r.max_delta.num << "/" << r.max_delta.den << ";\n";
            break;
        case RequirementKind::FieldWhitelist:
            os << "    section " << section_name(r.whitelist_section) << ";\n";
            os << "    allow ";
            for (std::size_t i = 0; i < r.allowed.size(); ++i) {
                if (i) os << ", ";
                os << r.allowed[i];
            }
            os << ";\n";
            break;
    }
    os << "  }\n";
}

}  // namespace

std::string serialize_spec(const GlassBoxSpec& spec) {
    std::ostringstream os;
    os << "glassbox " << spec.name << " {\n";

    if (!spec.schema.fields.empty()) {
        os << "\n  schema {\n";
        for (const auto& f : spec.schema.fields)
            os << "    " << section_name(f.section) << " " << f.name << ": "
               << field_type_name(f.type) << ";\n";
        os << "  }\n";
    }

    if (!spec.values.empty()) {
        os << "\n";
        for (const auto& v : spec.values)
            os << "  value " << v.id << " " << quote(v.description) << ";\n";
    }

    if (!spec.contexts.empty()) {
        os << "\n";
        for (const auto& c : spec.contexts) {
            os << "  context " << c.id << " " << quote(c.description);
            if (c.guard) os << " when " << expr_to_string(c.guard);
            os << ";\n";
        }
    }

    for (const auto& n : spec.norms) {
        os << "\n  norm " << n.id << " "
           << (n.modality == Modality::Obligation ? "obligation" : "prohibition") << " "
           << quote(n.description) << " {\n";
        for (const auto& ca : n.counts_as)
            os << "    counts_as " << ca.target << " in " << ca.context << ";\n";
        os << "  }\n";
    }

    for (const auto& r : spec.requirements) {
        os << "\n";
        emit_requirement(os, r);
    }

    if (!spec.interpretations.empty()) {
        os << "\n";
        for (const auto& i : spec.interpretations)
            os << "  interpretation " << i.value << " in " << i.context << " = "
               << formula_to_string(i.formula) << ";\n";
    }

    os << "}\n";
    return os.str();
}

}  // namespace glassbox
