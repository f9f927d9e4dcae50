#include "glassbox/spec.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace glassbox {

const FieldDecl* Schema::find(Section section, const std::string& name) const {
    for (const auto& f : fields)
        if (f.section == section && f.name == name) return &f;
    return nullptr;
}

const char* requirement_kind_name(RequirementKind k) {
    switch (k) {
        case RequirementKind::PerEvent: return "per_event";
        case RequirementKind::WindowParity: return "window_parity";
        case RequirementKind::PairwiseConsistency: return "pairwise_consistency";
        case RequirementKind::WindowDrift: return "window_drift";
        case RequirementKind::FieldWhitelist: return "field_whitelist";
    }
    return "?";
}

bool requirement_kind_from_name(const std::string& name, RequirementKind& out) {
    if (name == "per_event") { out = RequirementKind::PerEvent; return true; }
    if (name == "window_parity") { out = RequirementKind::WindowParity; return true; }
    if (name == "pairwise_consistency") { out = RequirementKind::PairwiseConsistency; return true; }
    if (name == "window_drift") { out = RequirementKind::WindowDrift; return true; }
    if (name == "field_whitelist") { out = RequirementKind::FieldWhitelist; return true; }
    return false;
}

const char* cost_class_name(CostClass c) {
    switch (c) {
        case CostClass::PerEventConstant: return "per_event_constant";
        case CostClass::WindowLinear: return "window_linear";
        case CostClass::WindowQuadratic: return "window_quadratic";
    }
    return "?";
}

CostBound cost_class(const Requirement& req) {
    switch (req.kind) {
        case RequirementKind::PerEvent:
        case RequirementKind::FieldWhitelist:
            return {CostClass::PerEventConstant, 1};
        case RequirementKind::WindowParity:
        case RequirementKind::WindowDrift:
            return {CostClass::WindowLinear, req.window};
        case RequirementKind::PairwiseConsistency:
            return {CostClass::WindowQuadratic, req.window};
    }
    return {CostClass::PerEventConstant, 1};
}

bool requirement_equal(const Requirement& a, const Requirement& b) {
    if (a.id != b.id || a.description != b.description || a.kind != b.kind ||
        a.for_the_sake_of != b.for_the_sake_of)
        return false;
    switch (a.kind) {
        case RequirementKind::PerEvent:
            return expr_equal(a.when, b.when) && expr_equal(a.then, b.then);
        case RequirementKind::WindowParity:
            return a.window == b.window && a.window_unit == b.window_unit &&
                   expr_equal(a.group_by, b.group_by) && expr_equal(a.outcome, b.outcome) &&
                   a.max_gap == b.max_gap && a.min_samples == b.min_samples;
        case RequirementKind::PairwiseConsistency:
            return a.window == b.window && a.window_unit == b.window_unit &&
                   expr_equal(a.similar, b.similar) && expr_equal(a.consistent, b.consistent);
        case RequirementKind::WindowDrift:
            return a.window == b.window && a.window_unit == b.window_unit &&
                   expr_equal(a.outcome, b.outcome) && a.max_delta == b.max_delta;
        case RequirementKind::FieldWhitelist:
            return a.whitelist_section == b.whitelist_section && a.allowed == b.allowed;
    }
    return false;
}

// ── Formulas ──────────────────────────────────────────────────────────────

FormulaPtr formula_norm(std::string id) {
    auto f = std::make_shared<FormulaNode>();
    f->kind = FormulaNode::Kind::Norm;
    f->norm_id = std::move(id);
    return f;
}

namespace {

// Connectives are n-ary, so a same-kind child is just more operands of the
// parent. Folding it in here keeps every construction path — parser,
// generators, tests — on one canonical shape, which is what lets the
// serializer round-trip structurally.
FormulaPtr make_connective(FormulaNode::Kind kind, std::vector<FormulaPtr> children) {
    if (children.size() == 1) return children.front();
    auto f = std::make_shared<FormulaNode>();
    f->kind = kind;
    for (auto& c : children) {
        if (c && c->kind == kind)
            f->children.insert(f->children.end(), c->children.begin(), c->children.end());
        else
            f->children.push_back(std::move(c));
    }
    return f;
}

}  // namespace

FormulaPtr formula_and(std::vector<FormulaPtr> children) {
    return make_connective(FormulaNode::Kind::And, std::move(children));
}

FormulaPtr formula_or(std::vector<FormulaPtr> children) {
    return make_connective(FormulaNode::Kind::Or, std::move(children));
}

bool formula_equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    if (a->kind == FormulaNode::Kind::Norm) return a->norm_id == b->norm_id;
    if (a->children.size() != b->children.size()) return false;
    for (std::size_t i = 0; i < a->children.size(); ++i)
        if (!formula_equal(a->children[i], b->children[i])) return false;
    return true;
}

static void print_formula(std::ostream& os, const FormulaPtr& f, bool parent_and) {
    switch (f->kind) {
        case FormulaNode::Kind::Norm:
            os << f->norm_id;
            return;
        case FormulaNode::Kind::And: {
            const char* sep = "";
            for (const auto& c : f->children) {
                os << sep;
                sep = " and ";
                print_formula(os, c, true);
            }
            return;
        }
        case FormulaNode::Kind::Or: {
            if (parent_and) os << "(";
            const char* sep = "";
            for (const auto& c : f->children) {
                os << sep;
                sep = " or ";
                print_formula(os, c, false);
            }
            if (parent_and) os << ")";
            return;
        }
    }
}

std::string formula_to_string(const FormulaPtr& f) {
    std::ostringstream os;
    print_formula(os, f, false);
    return os.str();
}

void formula_leaves(const FormulaPtr& f, std::vector<std::string>& out) {
    if (!f) return;
    if (f->kind == FormulaNode::Kind::Norm) {
        out.push_back(f->norm_id);
        return;
    }
    for (const auto& c : f->children) formula_leaves(c, out);
}

// ── Spec lookups ──────────────────────────────────────────────────────────

const ValueDef* GlassBoxSpec::find_value(const std::string& id) const {
    for (const auto& v : values)
        if (v.id == id) return &v;
    return nullptr;
}

const ContextDef* GlassBoxSpec::find_context(const std::string& id) const {
    for (const auto& c : contexts)
        if (c.id == id) return &c;
    return nullptr;
}

const NormDef* GlassBoxSpec::find_norm(const std::string& id) const {
    for (const auto& n : norms)
        if (n.id == id) return &n;
    return nullptr;
}

const Requirement* GlassBoxSpec::find_requirement(const std::string& id) const {
    for (const auto& r : requirements)
        if (r.id == id) return &r;
    return nullptr;
}

const InterpretationDef* GlassBoxSpec::find_interpretation(const std::string& value,
                                                           const std::string& context) const {
    for (const auto& i : interpretations)
        if (i.value == value && i.context == context) return &i;
    return nullptr;
}

bool spec_equal(const GlassBoxSpec& a, const GlassBoxSpec& b) {
    if (a.name != b.name || !(a.schema == b.schema)) return false;
    if (a.values.size() != b.values.size() || a.contexts.size() != b.contexts.size() ||
        a.norms.size() != b.norms.size() || a.requirements.size() != b.requirements.size() ||
        a.interpretations.size() != b.interpretations.size())
        return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (a.values[i].id != b.values[i].id ||
            a.values[i].description != b.values[i].description)
            return false;
    }
    for (std::size_t i = 0; i < a.contexts.size(); ++i) {
        if (a.contexts[i].id != b.contexts[i].id ||
            a.contexts[i].description != b.contexts[i].description ||
            !expr_equal(a.contexts[i].guard, b.contexts[i].guard))
            return false;
    }
    for (std::size_t i = 0; i < a.norms.size(); ++i) {
        const NormDef& x = a.norms[i];
        const NormDef& y = b.norms[i];
        if (x.id != y.id || x.modality != y.modality || x.description != y.description ||
            x.counts_as.size() != y.counts_as.size())
            return false;
        for (std::size_t j = 0; j < x.counts_as.size(); ++j)
            if (x.counts_as[j].target != y.counts_as[j].target ||
                x.counts_as[j].context != y.counts_as[j].context)
                return false;
    }
    for (std::size_t i = 0; i < a.requirements.size(); ++i)
        if (!requirement_equal(a.requirements[i], b.requirements[i])) return false;
    for (std::size_t i = 0; i < a.interpretations.size(); ++i) {
        if (a.interpretations[i].value != b.interpretations[i].value ||
            a.interpretations[i].context != b.interpretations[i].context ||
            !formula_equal(a.interpretations[i].formula, b.interpretations[i].formula))
            return false;
    }
    return true;
}

// ── Validation ────────────────────────────────────────────────────────────

namespace {

void err(std::vector<Diagnostic>& out, std::string msg, const SourceSpan& span = {},
         std::string element = {}) {
    out.push_back({Severity::Error, std::move(msg), span, std::move(element)});
}

void warn(std::vector<Diagnostic>& out, std::string msg, const SourceSpan& span = {},
          std::string element = {}) {
    out.push_back({Severity::Warning, std::move(msg), span, std::move(element)});
}

void check_expr(const GlassBoxSpec& spec, const ExprPtr& e, bool pairwise,
                const std::string& element, std::vector<Diagnostic>& diags) {
    if (!e) return;
    TypecheckContext ctx{&spec.schema, pairwise};
    std::vector<Diagnostic> local;
    typecheck(e, ctx, local);
    for (auto& d : local) {
        if (d.element.empty()) d.element = element;
        diags.push_back(std::move(d));
    }
}

}  // namespace

std::vector<Diagnostic> validate_hierarchy(const GlassBoxSpec& spec) {
    std::vector<Diagnostic> diags;

    // ids must be unique across every element category so counts_as targets
    // and formula leaves are unambiguous
    std::map<std::string, std::string> owner;
    auto claim = [&](const std::string& id, const char* what, const SourceSpan& span) {
        if (id.empty()) {
            err(diags, std::string(what) + " with empty id", span);
            return;
        }
        auto [it, inserted] = owner.emplace(id, what);
        if (!inserted)
            err(diags, "duplicate id '" + id + "' (already used by a " + it->second + ")", span,
                id);
    };
    for (const auto& v : spec.values) {
        claim(v.id, "value", v.span);
        if (v.description.empty())
            err(diags, "value '" + v.id + "' has an empty description", v.span, v.id);
    }
    for (const auto& c : spec.contexts) claim(c.id, "context", c.span);
    for (const auto& n : spec.norms) claim(n.id, "norm", n.span);
    for (const auto& r : spec.requirements) claim(r.id, "requirement", r.span);

    // schema: field names unique per section
    for (std::size_t i = 0; i < spec.schema.fields.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.schema.fields.size(); ++j) {
            const auto& a = spec.schema.fields[i];
            const auto& b = spec.schema.fields[j];
            if (a.section == b.section && a.name == b.name)
                err(diags,
                    std::string("duplicate schema field '") + section_name(a.section) + "." +
                        a.name + "'",
                    b.span, a.name);
        }
    }

    // context guards reference only declared fields
    for (const auto& c : spec.contexts) check_expr(spec, c.guard, false, c.id, diags);

    // counts_as references resolve, and edges form a DAG
    for (const auto& n : spec.norms) {
        if (n.counts_as.empty())
            warn(diags, "norm '" + n.id + "' is not the source of any counts_as edge", n.span,
                 n.id);
        for (const auto& ca : n.counts_as) {
            if (!spec.find_value(ca.target) && !spec.find_norm(ca.target))
                err(diags,
                    "counts_as target '" + ca.target + "' of norm '" + n.id +
                        "' is neither a value nor a norm",
                    ca.span, n.id);
            if (!spec.find_context(ca.context))
                err(diags, "unknown context '" + ca.context + "' on counts_as edge of norm '" +
                        n.id + "'",
                    ca.span, n.id);
        }
    }

    // cycle detection over norm -> norm counts_as edges (norm -> value edges
    // cannot close a cycle: values have no outgoing edges)
    {
        enum class Mark { White, Grey, Black };
        std::map<std::string, Mark> mark;
        std::vector<std::string> stack;
        bool cycle_reported = false;

        std::function<bool(const NormDef&)> visit = [&](const NormDef& n) -> bool {
            mark[n.id] = Mark::Grey;
            stack.push_back(n.id);
            for (const auto& ca : n.counts_as) {
                const NormDef* next = spec.find_norm(ca.target);
                if (!next) continue;
                Mark m = mark.count(next->id) ? mark[next->id] : Mark::White;
                if (m == Mark::Grey) {
                    if (!cycle_reported) {
                        auto it = std::find(stack.begin(), stack.end(), next->id);
                        std::string names;
                        for (; it != stack.end(); ++it) {
                            if (!names.empty()) names += " -> ";
                            names += *it;
                        }
                        names += " -> " + next->id;
                        err(diags, "counts_as cycle: " + names, ca.span, n.id);
                        cycle_reported = true;
                    }
                    return false;
                }
                if (m == Mark::White && !visit(*next)) {
                    stack.pop_back();
                    return false;
                }
            }
            stack.pop_back();
            mark[n.id] = Mark::Black;
            return true;
        };
        for (const auto& n : spec.norms) {
            if (!mark.count(n.id) || mark[n.id] == Mark::White) visit(n);
        }
    }

    // norms that no requirement serves
    {
        std::set<std::string> served;
        for (const auto& r : spec.requirements)
            for (const auto& n : r.for_the_sake_of) served.insert(n);
        for (const auto& n : spec.norms)
            if (!served.count(n.id))
                warn(diags, "norm '" + n.id + "' is not the target of any for_the_sake_of edge",
                     n.span, n.id);
    }

    // requirements: edges resolve, payloads are sane, every requirement
    // reaches at least one value
    for (const auto& r : spec.requirements) {
        if (r.for_the_sake_of.empty())
            err(diags, "unreachable requirement '" + r.id + "': no for_the_sake_of edge", r.span,
                r.id);
        for (const auto& nid : r.for_the_sake_of)
            if (!spec.find_norm(nid))
                err(diags,
                    "for_the_sake_of target '" + nid + "' of requirement '" + r.id +
                        "' is not a norm",
                    r.span, r.id);

        switch (r.kind) {
            case RequirementKind::PerEvent:
                if (!r.then)
                    err(diags, "per_event requirement '" + r.id + "' has no then clause", r.span,
                        r.id);
                check_expr(spec, r.when, false, r.id, diags);
                check_expr(spec, r.then, false, r.id, diags);
                break;
            case RequirementKind::WindowParity:
                check_expr(spec, r.group_by, false, r.id, diags);
                check_expr(spec, r.outcome, false, r.id, diags);
                if (r.max_gap.num < 0 || r.max_gap.num > r.max_gap.den)
                    err(diags, "max_gap of '" + r.id + "' must lie in [0,1]", r.span, r.id);
                if (r.min_samples < 1)
                    err(diags, "min_samples of '" + r.id + "' must be >= 1", r.span, r.id);
                break;
            case RequirementKind::PairwiseConsistency:
                check_expr(spec, r.similar, true, r.id, diags);
                check_expr(spec, r.consistent, true, r.id, diags);
                break;
            case RequirementKind::WindowDrift:
                check_expr(spec, r.outcome, false, r.id, diags);
                if (r.max_delta.num < 0 || r.max_delta.num > r.max_delta.den)
                    err(diags, "max_delta of '" + r.id + "' must lie in [0,1]", r.span, r.id);
                break;
            case RequirementKind::FieldWhitelist:
                if (r.allowed.empty())
                    err(diags, "field_whitelist requirement '" + r.id + "' allows no fields",
                        r.span, r.id);
                break;
        }

        bool windowed = r.kind == RequirementKind::WindowParity ||
                        r.kind == RequirementKind::PairwiseConsistency ||
                        r.kind == RequirementKind::WindowDrift;
        if (windowed) {
            if (r.window < 1)
                err(diags, "window of '" + r.id + "' must be >= 1", r.span, r.id);
            if (r.window_unit != WindowUnit::Events)
                err(diags, "time-based window on '" + r.id + "' is unsupported in v1", r.span,
                    r.id);
        }

        // reachability: one for_the_sake_of hop, then counts_as upward under
        // any context
        if (!r.for_the_sake_of.empty()) {
            std::set<std::string> seen;
            std::vector<std::string> frontier;
            for (const auto& nid : r.for_the_sake_of)
                if (spec.find_norm(nid)) frontier.push_back(nid);
            bool reaches_value = false;
            while (!frontier.empty() && !reaches_value) {
                std::string cur = frontier.back();
                frontier.pop_back();
                if (!seen.insert(cur).second) continue;
                const NormDef* n = spec.find_norm(cur);
                if (!n) continue;
                for (const auto& ca : n->counts_as) {
                    if (spec.find_value(ca.target)) {
                        reaches_value = true;
                        break;
                    }
                    if (spec.find_norm(ca.target)) frontier.push_back(ca.target);
                }
            }
            if (!reaches_value && !spec.norms.empty())
                err(diags,
                    "unreachable requirement '" + r.id + "': no counts_as path to any value",
                    r.span, r.id);
        }
    }

    // interpretation formulas
    {
        std::set<std::pair<std::string, std::string>> seen_pairs;
        for (const auto& i : spec.interpretations) {
            if (!spec.find_value(i.value))
                err(diags, "interpretation references unknown value '" + i.value + "'", i.span,
                    i.value);
            if (!spec.find_context(i.context))
                err(diags, "interpretation references unknown context '" + i.context + "'",
                    i.span, i.context);
            if (!seen_pairs.insert({i.value, i.context}).second)
                err(diags,
                    "duplicate interpretation for (" + i.value + ", " + i.context + ")", i.span,
                    i.value);
            if (!spec.find_value(i.value) || !spec.find_context(i.context)) continue;
            std::set<std::string> linked = norms_of_value(spec, i.value, i.context);
            std::vector<std::string> leaves;
            formula_leaves(i.formula, leaves);
            for (const auto& leaf : leaves) {
                if (!spec.find_norm(leaf)) {
                    err(diags,
                        "interpretation of (" + i.value + ", " + i.context +
                            ") references unknown norm '" + leaf + "'",
                        i.span, leaf);
                } else if (!linked.count(leaf)) {
                    err(diags,
                        "norm '" + leaf + "' is not counts_as-linked to value '" + i.value +
                            "' in context '" + i.context + "'",
                        i.span, leaf);
                }
            }
        }
    }

    return diags;
}

// ── Traversals ────────────────────────────────────────────────────────────

namespace {

void require_known(const GlassBoxSpec& spec, const std::string& context_id) {
    if (!spec.find_context(context_id))
        throw std::invalid_argument("unknown context '" + context_id + "'");
}

// Norms reachable upward from `start` along counts_as edges labelled
// `context_id`, including `start` itself.
std::set<std::string> upward_closure(const GlassBoxSpec& spec, const std::string& start,
                                     const std::string& context_id) {
    std::set<std::string> seen;
    std::vector<std::string> frontier{start};
    while (!frontier.empty()) {
        std::string cur = frontier.back();
        frontier.pop_back();
        if (!seen.insert(cur).second) continue;
        const NormDef* n = spec.find_norm(cur);
        if (!n) continue;
        for (const auto& ca : n->counts_as) {
            if (ca.context != context_id) continue;
            frontier.push_back(ca.target);  // value targets end the walk in the next round
        }
    }
    return seen;
}

}  // namespace

std::set<std::string> values_of_requirement(const GlassBoxSpec& spec,
                                            const std::string& requirement_id,
                                            const std::string& context_id) {
    const Requirement* req = spec.find_requirement(requirement_id);
    if (!req) throw std::invalid_argument("unknown requirement '" + requirement_id + "'");
    require_known(spec, context_id);

    std::set<std::string> out;
    for (const auto& nid : req->for_the_sake_of) {
        if (!spec.find_norm(nid)) continue;
        for (const auto& reached : upward_closure(spec, nid, context_id))
            if (spec.find_value(reached)) out.insert(reached);
    }
    return out;
}

std::set<std::string> norms_of_value(const GlassBoxSpec& spec, const std::string& value_id,
                                     const std::string& context_id) {
    if (!spec.find_value(value_id))
        throw std::invalid_argument("unknown value '" + value_id + "'");
    require_known(spec, context_id);

    std::set<std::string> out;
    for (const auto& n : spec.norms) {
        auto closure = upward_closure(spec, n.id, context_id);
        if (closure.count(value_id)) out.insert(n.id);
    }
    return out;
}

std::set<std::string> requirements_of_value(const GlassBoxSpec& spec,
                                            const std::string& value_id,
                                            const std::string& context_id) {
    std::set<std::string> norms = norms_of_value(spec, value_id, context_id);
    std::set<std::string> out;
    for (const auto& r : spec.requirements) {
        for (const auto& nid : r.for_the_sake_of) {
            if (norms.count(nid)) {
                out.insert(r.id);
                break;
            }
        }
    }
    return out;
}

}  // namespace glassbox
