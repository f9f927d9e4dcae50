#include "glassbox/spec.hpp"

#include "glassbox/parser.hpp"

#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

using namespace glassbox;

namespace {

GlassBoxSpec parsed_syntax(const std::string& text) {
    ParseResult r = parse_spec_syntax(text);
    if (!r.ok())
        for (const auto& d : r.diagnostics) MESSAGE("  syntax: ", d.message);
    REQUIRE(r.ok());
    return *r.spec;
}

bool has_error(const std::vector<Diagnostic>& diags, const std::string& fragment) {
    for (const auto& d : diags)
        if (d.severity == Severity::Error && d.message.find(fragment) != std::string::npos)
            return true;
    for (const auto& d : diags) MESSAGE("  got: ", d.message);
    return false;
}

const GlassBoxSpec& mortgage() {
    static GlassBoxSpec spec = [] {
        std::ifstream in(std::string(GLASSBOX_SPEC_DIR) + "/mortgage.gbx", std::ios::binary);
        REQUIRE(in.good());
        std::ostringstream os;
        os << in.rdbuf();
        ParseResult r = parse_spec(os.str());
        REQUIRE(r.ok());
        return *r.spec;
    }();
    return spec;
}

}  // namespace

TEST_SUITE("hierarchy") {

TEST_CASE("counts_as cycles are reported with the full path") {
    GlassBoxSpec s = parsed_syntax(R"(glassbox x {
  schema { in f: int; }
  value V "V"; context C "C";
  norm A obligation "A" { counts_as B in C; }
  norm B obligation "B" { counts_as A in C; counts_as V in C; }
  requirement R { for_the_sake_of A; kind per_event; then in.f > 0; }
})");
    CHECK(has_error(validate_hierarchy(s), "counts_as cycle: A -> B -> A"));
}

TEST_CASE("ids are unique across categories") {
    GlassBoxSpec s = parsed_syntax(R"(glassbox x {
  schema { in f: int; }
  value X "X"; context C "C";
  norm X obligation "X" { counts_as X in C; }
  requirement R { for_the_sake_of X; kind per_event; then in.f > 0; }
})");
    CHECK(has_error(validate_hierarchy(s), "duplicate id 'X'"));
}

TEST_CASE("unknown references are errors") {
    GlassBoxSpec s = parsed_syntax(R"(glassbox x {
  schema { in f: int; }
  value V "V"; context C "C";
  norm N obligation "N" { counts_as V in Elsewhere; }
  requirement R { for_the_sake_of Ghost; kind per_event; then in.f > 0; }
})");
    std::vector<Diagnostic> diags = validate_hierarchy(s);
    CHECK(has_error(diags, "unknown context 'Elsewhere'"));
    CHECK(has_error(diags, "'Ghost' of requirement 'R' is not a norm"));
}

TEST_CASE("requirements must reach a value") {
    GlassBoxSpec no_edge = parsed_syntax(R"(glassbox x {
  schema { in f: int; }
  value V "V"; context C "C";
  norm N obligation "N" { counts_as V in C; }
  requirement R { kind per_event; then in.f > 0; }
})");
    CHECK(has_error(validate_hierarchy(no_edge), "no for_the_sake_of edge"));

    GlassBoxSpec dead_end = parsed_syntax(R"(glassbox x {
  schema { in f: int; }
  value V "V"; context C "C";
  norm Top obligation "Top" { counts_as V in C; }
  norm Stray obligation "Stray" { counts_as Stray2 in C; }
  norm Stray2 obligation "Stray2" { counts_as V in C; }
  requirement R { for_the_sake_of Top; kind per_event; then in.f > 0; }
})");
    // Stray/Stray2 reach V, but nothing serves them: warning, not error
    std::vector<Diagnostic> diags = validate_hierarchy(dead_end);
    for (const auto& d : diags) CHECK(d.severity == Severity::Warning);
}

TEST_CASE("interpretation formulas may only use linked norms") {
    GlassBoxSpec s = parsed_syntax(R"(glassbox x {
  schema { in f: int; }
  value V "V"; context C "C"; context D "D";
  norm N obligation "N" { counts_as V in C; }
  norm M obligation "M" { counts_as V in D; }
  requirement R { for_the_sake_of N; kind per_event; then in.f > 0; }
  requirement R2 { for_the_sake_of M; kind per_event; then in.f > 0; }
  interpretation V in C = N and M;
})");
    CHECK(has_error(validate_hierarchy(s),
                    "norm 'M' is not counts_as-linked to value 'V' in context 'C'"));
}

TEST_CASE("mortgage traversals") {
    const GlassBoxSpec& s = mortgage();

    CHECK(values_of_requirement(s, "R_Afford30", "bank_vs_customer") ==
          std::set<std::string>{"Fairness"});
    CHECK(values_of_requirement(s, "R_Afford30", "customer_view").empty());
    CHECK(values_of_requirement(s, "R_TaxFieldsOnly", "customer_view") ==
          std::set<std::string>{"Privacy"});

    CHECK(requirements_of_value(s, "Fairness", "between_customers") ==
          std::set<std::string>({"R_Parity", "R_SimilarSameDecision"}));
    CHECK(requirements_of_value(s, "Privacy", "customer_view") ==
          std::set<std::string>{"R_TaxFieldsOnly"});
    CHECK(requirements_of_value(s, "Privacy", "bank_vs_customer").empty());

    CHECK(norms_of_value(s, "Fairness", "over_time") ==
          std::set<std::string>{"N_NoAbruptPolicyChange"});

    CHECK_THROWS_AS((void)values_of_requirement(s, "R_Nope", "bank_vs_customer"),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)requirements_of_value(s, "Fairness", "nowhere"),
                    std::invalid_argument);
}

TEST_CASE("cost classes follow the kind") {
    const GlassBoxSpec& s = mortgage();
    CHECK(cost_class(*s.find_requirement("R_Afford30")).cls == CostClass::PerEventConstant);
    CHECK(cost_class(*s.find_requirement("R_Afford30")).bound == 1);
    CHECK(cost_class(*s.find_requirement("R_TaxFieldsOnly")).cls == CostClass::PerEventConstant);
    CHECK(cost_class(*s.find_requirement("R_Parity")).cls == CostClass::WindowLinear);
    CHECK(cost_class(*s.find_requirement("R_NoDrift")).cls == CostClass::WindowLinear);
    CHECK(cost_class(*s.find_requirement("R_SimilarSameDecision")).cls ==
          CostClass::WindowQuadratic);
    CHECK(cost_class(*s.find_requirement("R_SimilarSameDecision")).bound == 100);

    Requirement wide;
    wide.kind = RequirementKind::PairwiseConsistency;
    wide.window = 500;
    CHECK(cost_class(wide).bound == 500);
}

TEST_CASE("formula printing uses minimal parentheses") {
    FormulaPtr a = formula_norm("A"), b = formula_norm("B"), c = formula_norm("C");
    CHECK(formula_to_string(formula_and({a, b, c})) == "A and B and C");
    CHECK(formula_to_string(formula_or({a, formula_and({b, c})})) == "A or B and C");
    CHECK(formula_to_string(formula_and({a, formula_or({b, c})})) == "A and (B or C)");
    CHECK(formula_to_string(a) == "A");

    CHECK(formula_equal(formula_and({a, b}), formula_and({a, b})));
    CHECK_FALSE(formula_equal(formula_and({a, b}), formula_or({a, b})));
    CHECK_FALSE(formula_equal(formula_and({a, b}), formula_and({b, a})));

    std::vector<std::string> leaves;
    formula_leaves(formula_or({formula_and({a, b}), c}), leaves);
    CHECK(leaves == std::vector<std::string>({"A", "B", "C"}));
}

}  // TEST_SUITE
