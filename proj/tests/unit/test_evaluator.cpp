#include "glassbox/evaluator.hpp"

#include "glassbox/parser.hpp"

#include <doctest.h>

#include <string>
#include <vector>

#include "build_event.hpp"

using namespace glassbox;
using glassbox::testing::EventBuilder;

namespace {

ExprPtr expr(const std::string& text) {
    ExprParseResult r = parse_expression(text);
    REQUIRE_MESSAGE(r.expr != nullptr, "bad test expression: ", text);
    return r.expr;
}

Requirement afford30() {
    Requirement r;
    r.id = "R_Afford30";
    r.kind = RequirementKind::PerEvent;
    r.when = expr("in.monthly_instalment * 10 < in.expected_monthly_income * 3");
    r.then = expr("out.decision == \"grant\"");
    return r;
}

Event application(const std::string& id, std::uint64_t pos, std::int64_t instalment,
                  std::int64_t income, const std::string& decision) {
    return EventBuilder(id, static_cast<std::int64_t>(pos), pos)
        .in_money("monthly_instalment", instalment)
        .in_money("expected_monthly_income", income)
        .out_str("decision", decision)
        .build();
}

}  // namespace

TEST_SUITE("evaluator") {

TEST_CASE("per_event violation carries bindings, then-side first") {
    Requirement r = afford30();
    Event e = application("e1", 0, 80000, 300000, "deny");
    Verdict v = eval_per_event(r, e, SchemaMode::Lenient, nullptr);
    CHECK(v.status == VerdictStatus::Violated);
    CHECK(v.to_jsonl() ==
          R"({"req":"R_Afford30","event":"e1","pos":0,"status":"Violated","detail":{"bindings":{"out.decision":"deny","in.monthly_instalment":80000,"in.expected_monthly_income":300000}}})");
}

TEST_CASE("per_event satisfied and guard-excluded events") {
    Requirement r = afford30();
    CHECK(eval_per_event(r, application("e1", 0, 80000, 300000, "grant"), SchemaMode::Strict,
                         nullptr)
              .status == VerdictStatus::Satisfied);

    Verdict v = eval_per_event(r, application("e2", 1, 90000, 300000, "deny"),
                               SchemaMode::Strict, nullptr);
    CHECK(v.status == VerdictStatus::Inapplicable);  // 900000 < 900000 is false
    CHECK(v.detail["reason"] == "when_false");
}

TEST_CASE("per_event without a when clause applies to every event") {
    Requirement r;
    r.id = "R_Rate15";
    r.kind = RequirementKind::PerEvent;
    r.then = expr("out.interest_rate_bp * 10 <= env.central_bank_rate_bp * 15");
    Event e = EventBuilder("e3", 0, 0)
                  .out_int("interest_rate_bp", 300)
                  .env_int("central_bank_rate_bp", 150)
                  .build();
    Verdict v = eval_per_event(r, e, SchemaMode::Lenient, nullptr);
    CHECK(v.status == VerdictStatus::Violated);
    CHECK(v.detail["bindings"]["out.interest_rate_bp"] == 300);
    CHECK(v.detail["bindings"]["env.central_bank_rate_bp"] == 150);
}

TEST_CASE("per_event faults: lenient degrades to Inapplicable, strict throws") {
    Requirement r = afford30();
    Event missing = EventBuilder("e4", 0, 0).out_str("decision", "grant").build();

    WarningSink sink;
    Verdict v = eval_per_event(r, missing, SchemaMode::Lenient, &sink);
    CHECK(v.status == VerdictStatus::Inapplicable);
    CHECK(v.detail["reason"] == "missing_field");
    CHECK(v.detail["field"] == "in.monthly_instalment");
    REQUIRE(sink.items().size() == 1);
    CHECK(sink.items()[0].message ==
          "when clause of 'R_Afford30': missing field in.monthly_instalment");

    try {
        eval_per_event(r, missing, SchemaMode::Strict, nullptr);
        FAIL("expected EvaluationError");
    } catch (const EvaluationError& err) {
        CHECK(err.req == "R_Afford30");
        CHECK(err.event == "e4");
        CHECK(std::string(err.what()) ==
              "when clause of 'R_Afford30': missing field in.monthly_instalment");
    }
}

TEST_CASE("field_whitelist flags undeclared names, sorted") {
    Requirement r;
    r.id = "R_TaxFieldsOnly";
    r.kind = RequirementKind::FieldWhitelist;
    r.whitelist_section = Section::In;
    r.allowed = {"age", "loan_amount"};

    Event clean = EventBuilder("e5", 0, 0).in_int("age", 30).in_money("loan_amount", 5).build();
    CHECK(eval_field_whitelist(r, clean).status == VerdictStatus::Satisfied);

    Event dirty = EventBuilder("e6", 1, 1)
                      .in_int("age", 30)
                      .in_str("zodiac", "libra")
                      .name_only(Section::In, "marital_status")
                      .build();
    Verdict v = eval_field_whitelist(r, dirty);
    CHECK(v.status == VerdictStatus::Violated);
    CHECK(v.detail["section"] == "in");
    CHECK(v.detail["extra"] == ojson::array({"marital_status", "zodiac"}));
}

TEST_CASE("parity tracks trailing-window group rates exactly") {
    Requirement r;
    r.id = "R_P";
    r.kind = RequirementKind::WindowParity;
    r.window = 4;
    r.min_samples = 4;
    r.max_gap = {1, 4};
    r.group_by = expr("in.g");
    r.outcome = expr("out.d == \"grant\"");

    auto ev = [](const std::string& id, std::uint64_t pos, const std::string& g,
                 const std::string& d) {
        return EventBuilder(id, static_cast<std::int64_t>(pos), pos)
            .in_str("g", g)
            .out_str("d", d)
            .build();
    };

    ParityEvaluator eval(r, SchemaMode::Lenient, nullptr);
    Verdict v = eval.on_event(ev("p0", 0, "A", "grant"));
    CHECK(v.status == VerdictStatus::Pending);
    CHECK(v.detail["reason"] == "min_samples");
    CHECK(v.detail["count"] == 1);
    CHECK(v.detail["min_samples"] == 4);

    eval.on_event(ev("p1", 1, "A", "deny"));
    eval.on_event(ev("p2", 2, "B", "grant"));
    v = eval.on_event(ev("p3", 3, "B", "grant"));
    // A: 1/2, B: 2/2 -> gap 1/2 > 1/4
    CHECK(v.status == VerdictStatus::Violated);
    CHECK(v.detail["count"] == 4);
    CHECK(v.detail["gap"] == "1/2");
    CHECK(v.detail["max_gap"] == "1/4");
    CHECK(v.detail["groups"]["A"]["count"] == 2);
    CHECK(v.detail["groups"]["A"]["positive"] == 1);
    CHECK(v.detail["groups"]["B"]["count"] == 2);
    CHECK(v.detail["groups"]["B"]["positive"] == 2);

    // p0 (A grant) falls out; A: 1/2 {p1 deny, p4 grant}, B: 2/2 -> gap 1/2
    v = eval.on_event(ev("p4", 4, "A", "grant"));
    CHECK(v.status == VerdictStatus::Violated);
    // p1 (A deny) falls out; A: 2/2, B: 2/2 -> gap 0
    v = eval.on_event(ev("p5", 5, "A", "grant"));
    CHECK(v.status == VerdictStatus::Satisfied);
    CHECK(v.detail["gap"] == "0/1");
}

TEST_CASE("parity excludes faulting events but still ages the window") {
    Requirement r;
    r.id = "R_P";
    r.kind = RequirementKind::WindowParity;
    r.window = 3;
    r.min_samples = 2;
    r.max_gap = {0, 1};
    r.group_by = expr("in.g");
    r.outcome = expr("out.d == \"grant\"");

    ParityEvaluator eval(r, SchemaMode::Lenient, nullptr);
    auto with_group = [](const std::string& id, std::uint64_t pos, const std::string& d) {
        return EventBuilder(id, static_cast<std::int64_t>(pos), pos)
            .in_str("g", "A")
            .out_str("d", d)
            .build();
    };
    eval.on_event(with_group("q0", 0, "grant"));
    // no group field: excluded from the usable count
    Verdict v = eval.on_event(EventBuilder("q1", 1, 1).out_str("d", "grant").build());
    CHECK(v.status == VerdictStatus::Pending);
    CHECK(v.detail["count"] == 1);
    v = eval.on_event(with_group("q2", 2, "grant"));
    CHECK(v.status == VerdictStatus::Satisfied);
    CHECK(v.detail["count"] == 2);
    // window slides past q0: the unusable q1 still occupies a slot
    v = eval.on_event(with_group("q3", 3, "grant"));
    CHECK(v.detail["count"] == 2);
}

TEST_CASE("pairwise compares against priors in the trailing window") {
    Requirement r;
    r.id = "R_S";
    r.kind = RequirementKind::PairwiseConsistency;
    r.window = 100;
    r.similar = expr(
        "bucket(a.in.age, 5) == bucket(b.in.age, 5)"
        " and abs(a.in.income - b.in.income) <= 10000"
        " and abs(a.in.loan - b.in.loan) <= 500000");
    r.consistent = expr("a.out.decision == b.out.decision");

    auto person = [](const std::string& id, std::uint64_t pos, std::int64_t age,
                     std::int64_t income, std::int64_t loan, const std::string& d) {
        return EventBuilder(id, static_cast<std::int64_t>(pos), pos)
            .in_int("age", age)
            .in_money("income", income)
            .in_money("loan", loan)
            .out_str("decision", d)
            .build();
    };

    PairwiseEvaluator eval(r, SchemaMode::Lenient, nullptr);
    Verdict v = eval.on_event(person("s0", 0, 32, 250000, 10000000, "grant"));
    CHECK(v.status == VerdictStatus::Inapplicable);
    CHECK(v.detail["reason"] == "no_similar_prior");

    // same 5-year bucket, income within 10000, loan within 500000, same decision
    v = eval.on_event(person("s1", 1, 33, 255000, 10200000, "grant"));
    CHECK(v.status == VerdictStatus::Satisfied);
    CHECK(v.detail["similar_count"] == 1);

    // different bucket: not similar to anyone
    v = eval.on_event(person("s2", 2, 40, 255000, 10200000, "deny"));
    CHECK(v.status == VerdictStatus::Inapplicable);

    // similar to s0 and s1 but decided differently: two violations
    v = eval.on_event(person("s3", 3, 31, 252000, 10100000, "deny"));
    CHECK(v.status == VerdictStatus::Violated);
    CHECK(v.detail["prior"] == "s0");
    CHECK(v.detail["violations"] == 2);
    CHECK(v.detail["bindings"]["a.out.decision"] == "grant");
    CHECK(v.detail["bindings"]["b.out.decision"] == "deny");
}

TEST_CASE("pairwise window covers the current event plus window-1 priors") {
    Requirement r;
    r.id = "R_S";
    r.kind = RequirementKind::PairwiseConsistency;
    r.window = 2;
    r.similar = expr("a.in.x == b.in.x");
    r.consistent = expr("a.out.d == b.out.d");

    auto ev = [](const std::string& id, std::uint64_t pos, const std::string& d) {
        return EventBuilder(id, static_cast<std::int64_t>(pos), pos)
            .in_int("x", 1)
            .out_str("d", d)
            .build();
    };

    PairwiseEvaluator eval(r, SchemaMode::Lenient, nullptr);
    eval.on_event(ev("w0", 0, "grant"));
    Verdict v = eval.on_event(ev("w1", 1, "deny"));
    CHECK(v.status == VerdictStatus::Violated);  // w0 is the single prior
    CHECK(v.detail["prior"] == "w0");
    v = eval.on_event(ev("w2", 2, "deny"));
    CHECK(v.status == VerdictStatus::Satisfied);  // only w1 in range now
    CHECK(v.detail["similar_count"] == 1);
}

TEST_CASE("pairwise skips pairs whose expressions fault") {
    Requirement r;
    r.id = "R_S";
    r.kind = RequirementKind::PairwiseConsistency;
    r.window = 10;
    r.similar = expr("a.in.x == b.in.x");
    r.consistent = expr("a.out.d == b.out.d");

    WarningSink sink;
    PairwiseEvaluator eval(r, SchemaMode::Lenient, &sink);
    eval.on_event(EventBuilder("f0", 0, 0).in_int("x", 1).build());  // no out.d
    eval.on_event(
        EventBuilder("f1", 1, 1).in_int("x", 1).out_str("d", "grant").build());
    CHECK(sink.total() == 1);  // f0/f1 similar, consistent faulted -> skipped
    Verdict v = eval.on_event(
        EventBuilder("f2", 2, 2).in_int("x", 1).out_str("d", "grant").build());
    CHECK(v.status == VerdictStatus::Satisfied);
    CHECK(v.detail["similar_count"] == 1);  // f1 only; the f0 pair skipped again
    CHECK(sink.total() == 2);
}

TEST_CASE("drift reports only at tumbling-window boundaries") {
    Requirement r;
    r.id = "R_D";
    r.kind = RequirementKind::WindowDrift;
    r.window = 5;
    r.max_delta = {20, 100};
    r.outcome = expr("out.d == \"grant\"");

    auto ev = [](std::uint64_t pos, const std::string& d) {
        return EventBuilder("d" + std::to_string(pos), static_cast<std::int64_t>(pos), pos)
            .out_str("d", d)
            .build();
    };

    DriftEvaluator eval(r, SchemaMode::Lenient, nullptr);
    Verdict v;
    for (std::uint64_t i = 0; i < 4; ++i) CHECK_FALSE(eval.on_event(ev(i, "grant"), v));
    REQUIRE(eval.on_event(ev(4, "grant"), v));  // 5/5 grants
    CHECK(v.status == VerdictStatus::Pending);
    CHECK(v.detail["reason"] == "first_window");
    CHECK(v.detail["cur"]["count"] == 5);
    CHECK(v.detail["cur"]["positive"] == 5);

    for (std::uint64_t i = 5; i < 9; ++i) CHECK_FALSE(eval.on_event(ev(i, "deny"), v));
    REQUIRE(eval.on_event(ev(9, "deny"), v));  // 0/5 after 5/5
    CHECK(v.status == VerdictStatus::Violated);
    CHECK(v.pos == 9);
    CHECK(v.detail["prev"]["positive"] == 5);
    CHECK(v.detail["cur"]["positive"] == 0);
    CHECK(v.detail["delta"] == "1/1");
    CHECK(v.detail["max_delta"] == "20/100");

    // 1/5 after 0/5: delta 1/5 == 20/100 exactly -> satisfied (boundary inclusive)
    for (std::uint64_t i = 10; i < 14; ++i) eval.on_event(ev(i, "deny"), v);
    REQUIRE(eval.on_event(ev(14, "grant"), v));
    CHECK(v.status == VerdictStatus::Satisfied);
    CHECK(v.detail["delta"] == "1/5");
}

TEST_CASE("drift excludes faulting events from rates but they still fill the window") {
    Requirement r;
    r.id = "R_D";
    r.kind = RequirementKind::WindowDrift;
    r.window = 3;
    r.max_delta = {0, 1};
    r.outcome = expr("out.d == \"grant\"");

    DriftEvaluator eval(r, SchemaMode::Lenient, nullptr);
    Verdict v;
    auto grant = [](std::uint64_t pos) {
        return EventBuilder("g" + std::to_string(pos), static_cast<std::int64_t>(pos), pos)
            .out_str("d", "grant")
            .build();
    };
    auto blank = [](std::uint64_t pos) {
        return EventBuilder("b" + std::to_string(pos), static_cast<std::int64_t>(pos), pos)
            .build();
    };

    eval.on_event(grant(0), v);
    eval.on_event(blank(1), v);
    REQUIRE(eval.on_event(grant(2), v));
    CHECK(v.detail["cur"]["count"] == 2);  // the blank event is not counted
    CHECK(v.detail["cur"]["positive"] == 2);

    // a window of only blanks: empty_window, and prev still advances to it
    eval.on_event(blank(3), v);
    eval.on_event(blank(4), v);
    REQUIRE(eval.on_event(blank(5), v));
    CHECK(v.status == VerdictStatus::Pending);
    CHECK(v.detail["reason"] == "empty_window");

    eval.on_event(grant(6), v);
    eval.on_event(grant(7), v);
    REQUIRE(eval.on_event(grant(8), v));
    CHECK(v.status == VerdictStatus::Pending);  // prev window had count 0
    CHECK(v.detail["reason"] == "empty_window");
}

TEST_CASE("windowed strict mode throws on the faulting event") {
    Requirement r;
    r.id = "R_P";
    r.kind = RequirementKind::WindowParity;
    r.window = 5;
    r.min_samples = 1;
    r.max_gap = {1, 1};
    r.group_by = expr("in.g");
    r.outcome = expr("out.d == \"grant\"");

    ParityEvaluator eval(r, SchemaMode::Strict, nullptr);
    CHECK_THROWS_AS((void)eval.on_event(EventBuilder("x0", 0, 0).build()), EvaluationError);
}

}  // TEST_SUITE
