#include "glassbox/evaluator.hpp"

#include <algorithm>

namespace glassbox {

const char* verdict_status_name(VerdictStatus s) {
    switch (s) {
        case VerdictStatus::Satisfied: return "Satisfied";
        case VerdictStatus::Violated: return "Violated";
        case VerdictStatus::Inapplicable: return "Inapplicable";
        case VerdictStatus::Pending: return "Pending";
    }
    return "?";
}

std::string Verdict::to_jsonl() const {
    ojson j;
    j["req"] = req;
    j["event"] = event;
    j["pos"] = pos;
    j["status"] = verdict_status_name(status);
    j["detail"] = detail;
    return j.dump();
}

ojson typed_value_json(const TypedValue& v) {
    switch (v.type) {
        case FieldType::Int:
        case FieldType::Money:
            return v.as_int();
        case FieldType::String:
            return v.as_string();
        case FieldType::Bool:
            return v.as_bool();
    }
    return nullptr;
}

ojson expr_bindings(const ExprPtr& e, const FieldEnv& env) {
    std::vector<FieldRef> refs;
    collect_fields(e, refs);
    ojson out = ojson::object();
    for (const auto& ref : refs) {
        std::string key = ref.to_string();
        if (out.contains(key)) continue;
        const TypedValue* v = env.lookup(ref);
        out[key] = v ? typed_value_json(*v) : ojson(nullptr);
    }
    return out;
}

namespace {

ojson fault_detail(const EvalFault& f) {
    ojson d;
    if (f.kind == FaultKind::MissingField) {
        d["reason"] = "missing_field";
        d["field"] = f.field;
    } else {
        d["reason"] = "fault";
        d["fault"] = f.message();
    }
    return d;
}

void report_fault(const Requirement& req, const Event& e, const EvalFault& f,
                  const char* clause, SchemaMode mode, WarningSink* warnings) {
    std::string msg = std::string(clause) + " clause of '" + req.id + "': " + f.message();
    if (mode == SchemaMode::Strict) throw EvaluationError(req.id, e.id, msg);
    if (warnings) warnings->add({req.id, e.id, msg});
}

std::string frac_str(const Fraction& f) { return f.to_string(); }

}  // namespace

// ── per_event ─────────────────────────────────────────────────────────────

Verdict eval_per_event(const Requirement& req, const Event& e, SchemaMode mode,
                       WarningSink* warnings) {
    Verdict v;
    v.req = req.id;
    v.event = e.id;
    v.pos = e.pos;

    EventEnv env(e);
    if (req.when) {
        EvalResult guard = eval_expression(req.when, env);
        if (is_fault(guard)) {
            report_fault(req, e, fault(guard), "when", mode, warnings);
            v.status = VerdictStatus::Inapplicable;
            v.detail = fault_detail(fault(guard));
            return v;
        }
        if (!value(guard).as_bool()) {
            v.status = VerdictStatus::Inapplicable;
            v.detail["reason"] = "when_false";
            return v;
        }
    }

    EvalResult body = eval_expression(req.then, env);
    if (is_fault(body)) {
        report_fault(req, e, fault(body), "then", mode, warnings);
        v.status = VerdictStatus::Inapplicable;
        v.detail = fault_detail(fault(body));
        return v;
    }

    if (value(body).as_bool()) {
        v.status = VerdictStatus::Satisfied;
    } else {
        v.status = VerdictStatus::Violated;
        ojson bindings = expr_bindings(req.then, env);
        if (req.when) {
            ojson guard_bindings = expr_bindings(req.when, env);
            for (auto it = guard_bindings.begin(); it != guard_bindings.end(); ++it)
                if (!bindings.contains(it.key())) bindings[it.key()] = it.value();
        }
        v.detail["bindings"] = std::move(bindings);
    }
    return v;
}

// ── field_whitelist ───────────────────────────────────────────────────────

Verdict eval_field_whitelist(const Requirement& req, const Event& e) {
    Verdict v;
    v.req = req.id;
    v.event = e.id;
    v.pos = e.pos;

    std::vector<std::string> extra;
    const auto& present = field_names_present(e, req.whitelist_section);
    for (const auto& name : present) {
        if (std::find(req.allowed.begin(), req.allowed.end(), name) == req.allowed.end())
            extra.push_back(name);  // std::set iteration keeps this sorted
    }

    if (extra.empty()) {
        v.status = VerdictStatus::Satisfied;
    } else {
        v.status = VerdictStatus::Violated;
        v.detail["section"] = section_name(req.whitelist_section);
        v.detail["extra"] = extra;
    }
    return v;
}

// ── window_parity ─────────────────────────────────────────────────────────

ParityEvaluator::ParityEvaluator(const Requirement& req, SchemaMode mode, WarningSink* warnings)
    : req_(req), mode_(mode), warnings_(warnings) {}

Verdict ParityEvaluator::on_event(const Event& e) {
    Slot slot;
    EventEnv env(e);
    EvalResult group = eval_expression(req_.group_by, env);
    EvalResult outcome = is_fault(group) ? group : eval_expression(req_.outcome, env);
    if (is_fault(group)) {
        report_fault(req_, e, fault(group), "group_by", mode_, warnings_);
    } else if (is_fault(outcome)) {
        report_fault(req_, e, fault(outcome), "outcome", mode_, warnings_);
    } else {
        slot.usable = true;
        slot.group = value(group).to_string();
        slot.positive = value(outcome).as_bool();
    }

    ring_.push_back(slot);
    if (slot.usable) {
        auto& c = counts_[slot.group];
        ++c.first;
        c.second += slot.positive ? 1 : 0;
        ++usable_;
    }
    if (static_cast<std::int64_t>(ring_.size()) > req_.window) {
        const Slot& old = ring_.front();
        if (old.usable) {
            auto it = counts_.find(old.group);
            --it->second.first;
            it->second.second -= old.positive ? 1 : 0;
            if (it->second.first == 0) counts_.erase(it);
            --usable_;
        }
        ring_.pop_front();
    }

    Verdict v;
    v.req = req_.id;
    v.event = e.id;
    v.pos = e.pos;

    if (usable_ < req_.min_samples) {
        v.status = VerdictStatus::Pending;
        v.detail["reason"] = "min_samples";
        v.detail["count"] = usable_;
        v.detail["min_samples"] = req_.min_samples;
        return v;
    }

    Fraction max_rate{0, 1};
    Fraction min_rate{0, 1};
    bool first = true;
    ojson groups = ojson::object();
    for (const auto& [key, c] : counts_) {
        Fraction rate{c.second, c.first};
        if (first || frac_lt(max_rate, rate)) max_rate = rate;
        if (first || frac_lt(rate, min_rate)) min_rate = rate;
        first = false;
        ojson g;
        g["count"] = c.first;
        g["positive"] = c.second;
        groups[key] = std::move(g);
    }
    Fraction gap = frac_abs_diff(max_rate, min_rate);

    v.status = frac_le(gap, req_.max_gap) ? VerdictStatus::Satisfied : VerdictStatus::Violated;
    v.detail["count"] = usable_;
    v.detail["groups"] = std::move(groups);
    v.detail["gap"] = frac_str(gap);
    v.detail["max_gap"] = frac_str(req_.max_gap);
    return v;
}

// ── pairwise_consistency ──────────────────────────────────────────────────

PairwiseEvaluator::PairwiseEvaluator(const Requirement& req, SchemaMode mode,
                                     WarningSink* warnings)
    : req_(req), mode_(mode), warnings_(warnings) {}

Verdict PairwiseEvaluator::on_event(const Event& e) {
    Verdict v;
    v.req = req_.id;
    v.event = e.id;
    v.pos = e.pos;

    std::int64_t similar_count = 0;
    std::int64_t violations = 0;
    const Event* first_violating = nullptr;

    for (const Event& prior : buffer_) {
        PairEnv env(prior, e);  // a = the earlier event, b = the newer one
        EvalResult sim = eval_expression(req_.similar, env);
        if (is_fault(sim)) {
            report_fault(req_, e, fault(sim), "similar", mode_, warnings_);
            continue;  // pair skipped
        }
        if (!value(sim).as_bool()) continue;
        EvalResult con = eval_expression(req_.consistent, env);
        if (is_fault(con)) {
            report_fault(req_, e, fault(con), "consistent", mode_, warnings_);
            continue;
        }
        ++similar_count;
        if (!value(con).as_bool()) {
            ++violations;
            if (!first_violating) first_violating = &prior;
        }
    }

    if (violations > 0) {
        v.status = VerdictStatus::Violated;
        v.detail["prior"] = first_violating->id;
        v.detail["violations"] = violations;
        v.detail["bindings"] = expr_bindings(req_.consistent, PairEnv(*first_violating, e));
    } else if (similar_count > 0) {
        v.status = VerdictStatus::Satisfied;
        v.detail["similar_count"] = similar_count;
    } else {
        v.status = VerdictStatus::Inapplicable;
        v.detail["reason"] = "no_similar_prior";
    }

    buffer_.push_back(e);
    while (static_cast<std::int64_t>(buffer_.size()) > req_.window - 1) buffer_.pop_front();
    return v;
}

// ── window_drift ──────────────────────────────────────────────────────────

DriftEvaluator::DriftEvaluator(const Requirement& req, SchemaMode mode, WarningSink* warnings)
    : req_(req), mode_(mode), warnings_(warnings) {}

bool DriftEvaluator::on_event(const Event& e, Verdict& out) {
    EventEnv env(e);
    EvalResult outcome = eval_expression(req_.outcome, env);
    if (is_fault(outcome)) {
        report_fault(req_, e, fault(outcome), "outcome", mode_, warnings_);
    } else {
        ++cur_count_;
        cur_positive_ += value(outcome).as_bool() ? 1 : 0;
    }

    if (++in_window_ < req_.window) return false;

    out = Verdict{};
    out.req = req_.id;
    out.event = e.id;
    out.pos = e.pos;

    if (!have_prev_) {
        out.status = VerdictStatus::Pending;
        out.detail["reason"] = "first_window";
        ojson cur;
        cur["count"] = cur_count_;
        cur["positive"] = cur_positive_;
        out.detail["cur"] = std::move(cur);
    } else if (prev_count_ == 0 || cur_count_ == 0) {
        out.status = VerdictStatus::Pending;
        out.detail["reason"] = "empty_window";
    } else {
        Fraction prev_rate{prev_positive_, prev_count_};
        Fraction cur_rate{cur_positive_, cur_count_};
        Fraction delta = frac_abs_diff(prev_rate, cur_rate);
        out.status =
            frac_le(delta, req_.max_delta) ? VerdictStatus::Satisfied : VerdictStatus::Violated;
        ojson prev;
        prev["count"] = prev_count_;
        prev["positive"] = prev_positive_;
        ojson cur;
        cur["count"] = cur_count_;
        cur["positive"] = cur_positive_;
        out.detail["prev"] = std::move(prev);
        out.detail["cur"] = std::move(cur);
        out.detail["delta"] = frac_str(delta);
        out.detail["max_delta"] = frac_str(req_.max_delta);
    }

    prev_count_ = cur_count_;
    prev_positive_ = cur_positive_;
    have_prev_ = true;
    cur_count_ = 0;
    cur_positive_ = 0;
    in_window_ = 0;
    return true;
}

}  // namespace glassbox
