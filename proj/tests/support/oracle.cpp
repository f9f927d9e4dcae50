#include "oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <string>

namespace glassbox::testing {

namespace {

Verdict stub(const Requirement& r, const Event& e) {
    Verdict v;
    v.req = r.id;
    v.event = e.id;
    v.pos = e.pos;
    return v;
}

// a/b vs c/d without ever leaving integers
bool rate_less(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    return a * d < c * b;
}

std::string reduced(std::int64_t num, std::int64_t den) {
    const std::int64_t g = std::gcd(num, den);
    return std::to_string(num / g) + "/" + std::to_string(den / g);
}

Verdict oracle_parity(const Requirement& r, const std::vector<Event>& events, std::size_t i) {
    struct Group {
        std::int64_t count{0};
        std::int64_t positive{0};
    };
    std::map<std::string, Group> groups;
    std::int64_t usable = 0;
    const std::size_t lo = i + 1 >= std::size_t(r.window) ? i + 1 - std::size_t(r.window) : 0;
    for (std::size_t j = lo; j <= i; ++j) {
        EventEnv env(events[j]);
        EvalResult g = eval_expression(r.group_by, env);
        if (is_fault(g)) continue;
        EvalResult o = eval_expression(r.outcome, env);
        if (is_fault(o)) continue;
        Group& slot = groups[value(g).to_string()];
        ++slot.count;
        slot.positive += value(o).as_bool() ? 1 : 0;
        ++usable;
    }

    Verdict v = stub(r, events[i]);
    if (usable < r.min_samples) {
        v.status = VerdictStatus::Pending;
        v.detail["reason"] = "min_samples";
        v.detail["count"] = usable;
        v.detail["min_samples"] = r.min_samples;
        return v;
    }

    std::int64_t max_p = 0, max_c = 1, min_p = 0, min_c = 1;
    bool first = true;
    ojson detail_groups = ojson::object();
    for (const auto& [key, g] : groups) {
        if (first || rate_less(max_p, max_c, g.positive, g.count)) {
            max_p = g.positive;
            max_c = g.count;
        }
        if (first || rate_less(g.positive, g.count, min_p, min_c)) {
            min_p = g.positive;
            min_c = g.count;
        }
        first = false;
        ojson entry;
        entry["count"] = g.count;
        entry["positive"] = g.positive;
        detail_groups[key] = std::move(entry);
    }

    const std::int64_t gap_num = max_p * min_c - min_p * max_c;
    const std::int64_t gap_den = max_c * min_c;
    const bool ok = gap_num * r.max_gap.den <= r.max_gap.num * gap_den;
    v.status = ok ? VerdictStatus::Satisfied : VerdictStatus::Violated;
    v.detail["count"] = usable;
    v.detail["groups"] = std::move(detail_groups);
    v.detail["gap"] = reduced(gap_num, gap_den);
    v.detail["max_gap"] = r.max_gap.to_string();
    return v;
}

Verdict oracle_pairwise(const Requirement& r, const std::vector<Event>& events, std::size_t i) {
    std::int64_t similar_count = 0;
    std::int64_t violations = 0;
    const Event* first_violating = nullptr;
    const std::size_t span = std::size_t(r.window) - 1;  // priors live in the last W-1 slots
    const std::size_t lo = i >= span ? i - span : 0;
    for (std::size_t j = lo; j < i; ++j) {
        PairEnv env(events[j], events[i]);
        EvalResult sim = eval_expression(r.similar, env);
        if (is_fault(sim) || !value(sim).as_bool()) continue;
        EvalResult con = eval_expression(r.consistent, env);
        if (is_fault(con)) continue;
        ++similar_count;
        if (!value(con).as_bool()) {
            ++violations;
            if (!first_violating) first_violating = &events[j];
        }
    }

    Verdict v = stub(r, events[i]);
    if (violations > 0) {
        v.status = VerdictStatus::Violated;
        v.detail["prior"] = first_violating->id;
        v.detail["violations"] = violations;
        v.detail["bindings"] = expr_bindings(r.consistent, PairEnv(*first_violating, events[i]));
    } else if (similar_count > 0) {
        v.status = VerdictStatus::Satisfied;
        v.detail["similar_count"] = similar_count;
    } else {
        v.status = VerdictStatus::Inapplicable;
        v.detail["reason"] = "no_similar_prior";
    }
    return v;
}

// Emits only at tumbling-window boundaries.
bool oracle_drift(const Requirement& r, const std::vector<Event>& events, std::size_t i,
                  Verdict& out) {
    const std::size_t w = std::size_t(r.window);
    if ((i + 1) % w != 0) return false;

    auto count_window = [&](std::size_t lo) {
        std::pair<std::int64_t, std::int64_t> c{0, 0};  // usable, positive
        for (std::size_t j = lo; j < lo + w; ++j) {
            EventEnv env(events[j]);
            EvalResult o = eval_expression(r.outcome, env);
            if (is_fault(o)) continue;
            ++c.first;
            c.second += value(o).as_bool() ? 1 : 0;
        }
        return c;
    };

    out = stub(r, events[i]);
    const auto cur = count_window(i + 1 - w);
    if (i + 1 == w) {
        out.status = VerdictStatus::Pending;
        out.detail["reason"] = "first_window";
        ojson c;
        c["count"] = cur.first;
        c["positive"] = cur.second;
        out.detail["cur"] = std::move(c);
        return true;
    }
    const auto prev = count_window(i + 1 - 2 * w);
    if (prev.first == 0 || cur.first == 0) {
        out.status = VerdictStatus::Pending;
        out.detail["reason"] = "empty_window";
        return true;
    }
    const std::int64_t delta_num =
        std::abs(prev.second * cur.first - cur.second * prev.first);
    const std::int64_t delta_den = prev.first * cur.first;
    const bool ok = delta_num * r.max_delta.den <= r.max_delta.num * delta_den;
    out.status = ok ? VerdictStatus::Satisfied : VerdictStatus::Violated;
    ojson p, c;
    p["count"] = prev.first;
    p["positive"] = prev.second;
    c["count"] = cur.first;
    c["positive"] = cur.second;
    out.detail["prev"] = std::move(p);
    out.detail["cur"] = std::move(c);
    out.detail["delta"] = reduced(delta_num, delta_den);
    out.detail["max_delta"] = r.max_delta.to_string();
    return true;
}

}  // namespace

std::vector<Verdict> oracle_verdicts(const GlassBoxSpec& spec, const std::vector<Event>& events) {
    std::vector<const Requirement*> order;
    for (const auto& r : spec.requirements) order.push_back(&r);
    std::sort(order.begin(), order.end(),
              [](const Requirement* a, const Requirement* b) { return a->id < b->id; });

    std::vector<Verdict> out;
    for (std::size_t i = 0; i < events.size(); ++i) {
        for (const Requirement* r : order) {
            switch (r->kind) {
                case RequirementKind::PerEvent:
                    out.push_back(eval_per_event(*r, events[i], SchemaMode::Lenient, nullptr));
                    break;
                case RequirementKind::FieldWhitelist:
                    out.push_back(eval_field_whitelist(*r, events[i]));
                    break;
                case RequirementKind::WindowParity:
                    out.push_back(oracle_parity(*r, events, i));
                    break;
                case RequirementKind::PairwiseConsistency:
                    out.push_back(oracle_pairwise(*r, events, i));
                    break;
                case RequirementKind::WindowDrift: {
                    Verdict v;
                    if (oracle_drift(*r, events, i, v)) out.push_back(std::move(v));
                    break;
                }
            }
        }
    }
    return out;
}

std::vector<Event> drain_reader(TraceReader& reader) {
    std::vector<Event> events;
    Event e;
    while (reader.next(e)) events.push_back(e);
    return events;
}

}  // namespace glassbox::testing
