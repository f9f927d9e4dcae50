#include "glassbox/compliance.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace glassbox {

std::string RequirementSummary::status() const {
    if (violated > 0) return "violated";
    if (satisfied > 0) return "satisfied";
    if (pending > 0) return "pending";
    if (inapplicable > 0) return "inapplicable";
    bool windowed = kind == RequirementKind::WindowParity ||
                    kind == RequirementKind::PairwiseConsistency ||
                    kind == RequirementKind::WindowDrift;
    return windowed ? "pending" : "no_data";
}

bool ComplianceReport::all_adhere() const {
    for (const auto& v : values)
        if (!v.adheres) return false;
    return true;
}

bool eval_formula(const FormulaPtr& f, const std::map<std::string, bool>& norm_compliance) {
    if (!f) throw std::invalid_argument("empty formula");
    switch (f->kind) {
        case FormulaNode::Kind::Norm: {
            auto it = norm_compliance.find(f->norm_id);
            if (it == norm_compliance.end())
                throw std::invalid_argument("formula leaf '" + f->norm_id +
                                            "' has no norm verdict");
            return it->second;
        }
        case FormulaNode::Kind::And:
            for (const auto& c : f->children)
                if (!eval_formula(c, norm_compliance)) return false;
            return true;
        case FormulaNode::Kind::Or:
            for (const auto& c : f->children)
                if (eval_formula(c, norm_compliance)) return true;
            return false;
    }
    return false;
}

namespace {

const NormVerdict* find_norm_verdict(const std::vector<NormVerdict>& verdicts,
                                     const std::string& id) {
    for (const auto& n : verdicts)
        if (n.id == id) return &n;
    return nullptr;
}

}  // namespace

ValueAdherence evaluate_value(const GlassBoxSpec& spec,
                              const std::vector<NormVerdict>& norm_verdicts,
                              const std::string& value_id, const std::string& context_id) {
    ValueAdherence out;
    out.value = value_id;
    out.context = context_id;

    std::set<std::string> linked = norms_of_value(spec, value_id, context_id);

    FormulaPtr formula;
    if (const InterpretationDef* interp = spec.find_interpretation(value_id, context_id)) {
        formula = interp->formula;
        out.explicit_formula = true;
    } else {
        std::vector<FormulaPtr> leaves;
        for (const auto& n : spec.norms)  // default AND, spec norm order
            if (linked.count(n.id)) leaves.push_back(formula_norm(n.id));
        if (leaves.size() == 1) formula = leaves.front();
        else if (!leaves.empty()) formula = formula_and(std::move(leaves));
    }

    if (!formula) {  // value unreachable in this context
        out.adheres = true;
        out.vacuous = true;
        out.formula = "";
        return out;
    }

    out.formula = formula_to_string(formula);

    std::vector<std::string> leaf_ids;
    formula_leaves(formula, leaf_ids);
    std::map<std::string, bool> compliance;
    bool any_evidence = false;
    for (const auto& id : leaf_ids) {
        if (std::find(out.norm_ids.begin(), out.norm_ids.end(), id) == out.norm_ids.end())
            out.norm_ids.push_back(id);
        const NormVerdict* nv = find_norm_verdict(norm_verdicts, id);
        if (!nv) throw std::invalid_argument("no norm verdict for formula leaf '" + id + "'");
        compliance[id] = nv->compliant;
        if (nv->satisfied + nv->violated > 0) any_evidence = true;
    }

    out.adheres = eval_formula(formula, compliance);
    out.vacuous = !any_evidence;
    return out;
}

// ── Aggregator ────────────────────────────────────────────────────────────

Aggregator::Aggregator(const GlassBoxSpec& spec, CompliancePolicy policy)
    : spec_(spec), policy_(policy) {
    summaries_.reserve(spec.requirements.size());
    for (const auto& r : spec.requirements) {
        RequirementSummary s;
        s.id = r.id;
        s.kind = r.kind;
        index_.emplace(r.id, summaries_.size());
        summaries_.push_back(std::move(s));
    }
}

void Aggregator::add(const Verdict& v) {
    auto it = index_.find(v.req);
    if (it == index_.end())
        throw std::invalid_argument("verdict references unknown requirement '" + v.req + "'");
    RequirementSummary& s = summaries_[it->second];
    switch (v.status) {
        case VerdictStatus::Satisfied: ++s.satisfied; break;
        case VerdictStatus::Violated:
            ++s.violated;
            ++s.violating_total;
            if (s.violating_sample.size() < kSampleCap &&
                std::find(s.violating_sample.begin(), s.violating_sample.end(), v.event) ==
                    s.violating_sample.end())
                s.violating_sample.push_back(v.event);
            break;
        case VerdictStatus::Inapplicable: ++s.inapplicable; break;
        case VerdictStatus::Pending: ++s.pending; break;
    }
}

ComplianceReport Aggregator::finish(std::string trace_source, std::uint64_t event_count,
                                    std::uint64_t warnings_total, std::string spec_sha256,
                                    std::string tool_version) const {
    ComplianceReport report;
    report.tool_version = std::move(tool_version);
    report.spec_name = spec_.name;
    report.spec_sha256 = std::move(spec_sha256);
    report.trace_source = std::move(trace_source);
    report.event_count = event_count;
    report.warnings_total = warnings_total;
    report.policy = policy_;
    report.requirements = summaries_;

    for (const auto& n : spec_.norms) {
        NormVerdict nv;
        nv.id = n.id;
        for (std::size_t i = 0; i < spec_.requirements.size(); ++i) {
            const Requirement& r = spec_.requirements[i];
            if (std::find(r.for_the_sake_of.begin(), r.for_the_sake_of.end(), n.id) ==
                r.for_the_sake_of.end())
                continue;
            const RequirementSummary& s = summaries_[i];
            nv.requirement_ids.push_back(r.id);
            nv.satisfied += s.satisfied;
            nv.violated += s.violated;
            nv.violating_total += s.violating_total;
            for (const auto& id : s.violating_sample) {
                if (nv.violating_sample.size() >= kSampleCap) break;
                if (std::find(nv.violating_sample.begin(), nv.violating_sample.end(), id) ==
                    nv.violating_sample.end())
                    nv.violating_sample.push_back(id);
            }
        }
        std::int64_t evidence = nv.satisfied + nv.violated;
        nv.ratio = evidence == 0 ? Fraction{0, 1} : Fraction{nv.violated, evidence};
        nv.compliant = policy_.mode == PolicyMode::Strict ? nv.violated == 0
                                                          : frac_le(nv.ratio, policy_.theta);
        report.norms.push_back(std::move(nv));
    }

    for (const auto& v : spec_.values) {
        for (const auto& c : spec_.contexts) {
            if (norms_of_value(spec_, v.id, c.id).empty()) continue;
            report.values.push_back(evaluate_value(spec_, report.norms, v.id, c.id));
        }
    }

    return report;
}

// ── Hashing ───────────────────────────────────────────────────────────────

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

// ── Serialization ─────────────────────────────────────────────────────────

std::string policy_to_string(const CompliancePolicy& policy) {
    if (policy.mode == PolicyMode::Strict) return "strict";
    return "ratio(theta=" + policy.theta.to_string() + ")";
}

namespace {

ojson requirement_json(const RequirementSummary& s) {
    ojson j;
    j["id"] = s.id;
    j["kind"] = requirement_kind_name(s.kind);
    j["status"] = s.status();
    ojson counts;
    counts["satisfied"] = s.satisfied;
    counts["violated"] = s.violated;
    counts["inapplicable"] = s.inapplicable;
    counts["pending"] = s.pending;
    j["counts"] = std::move(counts);
    ojson violating;
    violating["total"] = s.violating_total;
    violating["sample"] = s.violating_sample;
    j["violating"] = std::move(violating);
    return j;
}

ojson norm_json(const NormVerdict& n) {
    ojson j;
    j["id"] = n.id;
    j["compliant"] = n.compliant;
    j["ratio"] = n.ratio.to_string();
    j["satisfied"] = n.satisfied;
    j["violated"] = n.violated;
    ojson violating;
    violating["total"] = n.violating_total;
    violating["sample"] = n.violating_sample;
    j["violating"] = std::move(violating);
    j["requirements"] = n.requirement_ids;
    return j;
}

const RequirementSummary* find_summary(const ComplianceReport& report, const std::string& id) {
    for (const auto& s : report.requirements)
        if (s.id == id) return &s;
    return nullptr;
}

ojson value_tree_json(const ComplianceReport& report, const ValueAdherence& v) {
    ojson j;
    j["value"] = v.value;
    j["context"] = v.context;
    j["adheres"] = v.adheres;
    j["vacuous"] = v.vacuous;
    j["formula"] = v.formula;
    j["explicit_formula"] = v.explicit_formula;
    ojson norms = ojson::array();
    for (const auto& nid : v.norm_ids) {
        const NormVerdict* nv = find_norm_verdict(report.norms, nid);
        if (!nv) continue;
        ojson n;
        n["id"] = nv->id;
        n["compliant"] = nv->compliant;
        n["ratio"] = nv->ratio.to_string();
        ojson reqs = ojson::array();
        for (const auto& rid : nv->requirement_ids)
            if (const RequirementSummary* s = find_summary(report, rid))
                reqs.push_back(requirement_json(*s));
        n["requirements"] = std::move(reqs);
        norms.push_back(std::move(n));
    }
    j["norms"] = std::move(norms);
    return j;
}

}  // namespace

ojson report_to_json(const ComplianceReport& report) {
    ojson j;
    ojson tool;
    tool["name"] = "glassbox";
    tool["version"] = report.tool_version;
    j["tool"] = std::move(tool);
    ojson spec;
    spec["name"] = report.spec_name;
    spec["sha256"] = report.spec_sha256;
    j["spec"] = std::move(spec);
    ojson trace;
    trace["source"] = report.trace_source;
    trace["events"] = report.event_count;
    trace["warnings"] = report.warnings_total;
    j["trace"] = std::move(trace);
    ojson policy;
    policy["mode"] = report.policy.mode == PolicyMode::Strict ? "strict" : "ratio";
    if (report.policy.mode == PolicyMode::Ratio)
        policy["theta"] = report.policy.theta.to_string();
    j["policy"] = std::move(policy);
    j["all_adhere"] = report.all_adhere();

    ojson reqs = ojson::array();
    for (const auto& s : report.requirements) reqs.push_back(requirement_json(s));
    j["requirements"] = std::move(reqs);

    ojson norms = ojson::array();
    for (const auto& n : report.norms) norms.push_back(norm_json(n));
    j["norms"] = std::move(norms);

    ojson values = ojson::array();
    for (const auto& v : report.values) values.push_back(value_tree_json(report, v));
    j["values"] = std::move(values);

    return j;
}

namespace {

void render_sample(std::ostringstream& os, const ojson& violating) {
    std::uint64_t total = violating["total"].get<std::uint64_t>();
    if (total == 0) return;
    os << "  violations: " << total;
    const auto& sample = violating["sample"];
    if (!sample.empty()) {
        os << "  (events:";
        for (const auto& id : sample) os << " " << id.get<std::string>();
        if (sample.size() < total) os << " ...";
        os << ")";
    }
}

void render_tree(std::ostringstream& os, const ojson& tree) {
    os << tree["value"].get<std::string>() << " in " << tree["context"].get<std::string>()
       << ": " << (tree["adheres"].get<bool>() ? "adheres" : "does not adhere");
    if (tree["vacuous"].get<bool>()) os << " (vacuously: no evidence)";
    os << "\n";
    os << "  formula: " << tree["formula"].get<std::string>()
       << (tree["explicit_formula"].get<bool>() ? "" : "  [default conjunction]") << "\n";
    for (const auto& n : tree["norms"]) {
        os << "  " << (n["compliant"].get<bool>() ? "+" : "-") << " norm "
           << n["id"].get<std::string>() << ": "
           << (n["compliant"].get<bool>() ? "compliant" : "non-compliant")
           << " (violation ratio " << n["ratio"].get<std::string>() << ")\n";
        for (const auto& r : n["requirements"]) {
            const auto& counts = r["counts"];
            os << "      " << r["id"].get<std::string>() << " [" << r["kind"].get<std::string>()
               << "] " << r["status"].get<std::string>() << "  S=" << counts["satisfied"]
               << " V=" << counts["violated"] << " I=" << counts["inapplicable"]
               << " P=" << counts["pending"];
            render_sample(os, r["violating"]);
            os << "\n";
        }
    }
}

}  // namespace

std::string report_to_text(const ComplianceReport& report) {
    ojson j = report_to_json(report);
    std::ostringstream os;
    os << "glass-box compliance report\n";
    os << "  spec: " << report.spec_name << " (sha256 " << report.spec_sha256.substr(0, 12)
       << ")\n";
    os << "  trace: " << report.trace_source << ", " << report.event_count << " events";
    if (report.warnings_total > 0) os << ", " << report.warnings_total << " warnings";
    os << "\n";
    os << "  policy: " << policy_to_string(report.policy) << "\n";
    os << "  overall: " << (report.all_adhere() ? "all values adhere" : "adherence failures")
       << "\n\n";
    for (const auto& tree : j["values"]) {
        render_tree(os, tree);
        os << "\n";
    }
    return os.str();
}

std::string explain_from_json(const ojson& report, const std::string& value_id,
                              const std::string& context_id) {
    if (!report.contains("values"))
        throw std::invalid_argument("report has no \"values\" section");
    for (const auto& tree : report["values"]) {
        if (tree["value"].get<std::string>() == value_id &&
            tree["context"].get<std::string>() == context_id) {
            std::ostringstream os;
            render_tree(os, tree);
            return os.str();
        }
    }
    throw std::invalid_argument("no adherence entry for value '" + value_id + "' in context '" +
                                context_id + "'");
}

}  // namespace glassbox
