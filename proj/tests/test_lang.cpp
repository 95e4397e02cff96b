#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "figkit/lang.hpp"

using namespace figkit;

namespace {

// Base object list, name for name.
const std::vector<std::string> kExpectedPrimitives = {
    "segment", "angle", "triangle", "iso_triangle", "r_triangle",
    "triangle_ab", "ieq_triangle", "risos", "rectangle", "isquare",
    "trapezoid", "r_trapezoid", "eq_trapezoid", "quadrangle",
    "eq_quadrangle", "eqdia_quadrangle", "pentagon", "eq_pentagon"};

// Construction list, name for name.
const std::vector<std::string> kExpectedRelations = {
    "angle_bisector", "angle_mirror", "circle", "circumcenter", "eq_triangle",
    "eqangle2", "eqdistance", "foot", "incenter", "excenter",
    "intersection_cc", "on_bline", "intersection_lc", "on_aline",
    "intersection_ll", "on_line", "intersection_lp", "intersection_lt",
    "intersection_pp", "intersection_tt", "lc_tangent", "midpoint", "mirror",
    "nsquare", "on_circle", "on_pline", "on_tline", "on_dia", "orthocenter",
    "parallelogram", "psquare", "reflect", "s_angle", "shift", "on_opline",
    "eqangle3", "on_circum", "square", "trisegment", "trisect", "tangent"};

const std::vector<std::string> kTwoPointRelations = {"square", "trisegment",
                                                     "trisect", "tangent"};

}  // namespace

TEST_CASE("primitive set matches the canonical list") {
    const auto& table = primitive_table();
    REQUIRE(table.size() == 18);
    REQUIRE(kPrimitiveCount == 18);

    std::set<std::string> names;
    for (const auto& p : table) names.insert(std::string(p.name));
    for (const auto& want : kExpectedPrimitives) {
        CHECK_MESSAGE(names.count(want) == 1, "missing primitive ", want);
    }
    CHECK(names.size() == kExpectedPrimitives.size());
}

TEST_CASE("primitive arities match the object class") {
    CHECK(primitive_info(PrimitiveKind::segment).arity == 2);
    CHECK(primitive_info(PrimitiveKind::angle).arity == 3);
    for (const auto& p : primitive_table()) {
        std::string name(p.name);
        if (name == "segment") {
            CHECK(p.arity == 2);
        } else if (name == "angle" || name.find("triangle") != std::string::npos ||
                   name == "risos") {
            CHECK_MESSAGE(p.arity == 3, name);
        } else if (name == "pentagon" || name == "eq_pentagon") {
            CHECK_MESSAGE(p.arity == 5, name);
        } else {
            CHECK_MESSAGE(p.arity == 4, name);
        }
    }
}

TEST_CASE("relation set matches the canonical list") {
    const auto& table = relation_table();
    REQUIRE(table.size() == 41);
    REQUIRE(kRelationCount == 41);

    std::set<std::string> names;
    for (const auto& r : table) names.insert(std::string(r.name));
    for (const auto& want : kExpectedRelations) {
        CHECK_MESSAGE(names.count(want) == 1, "missing relation ", want);
    }
    CHECK(names.size() == kExpectedRelations.size());

    int two_point = 0;
    for (const auto& r : table) {
        CHECK((r.new_points == 1 || r.new_points == 2));
        if (r.new_points == 2) {
            ++two_point;
            CHECK(std::find(kTwoPointRelations.begin(), kTwoPointRelations.end(),
                            std::string(r.name)) != kTwoPointRelations.end());
        }
        // Total classification: every relation is deterministic or parametric.
        CHECK((r.realization_class == RealizationClass::deterministic ||
               r.realization_class == RealizationClass::parametric));
        CHECK(r.input_arity >= 2);
        CHECK(r.input_arity <= 6);
    }
    CHECK(two_point == 4);
}

TEST_CASE("only s_angle takes a literal") {
    for (const auto& r : relation_table()) {
        CHECK(r.takes_literal == (r.kind == RelationKind::s_angle));
    }
}

TEST_CASE("parse: single primitive statement") {
    auto p = parse_program("a b c = triangle a b c");
    REQUIRE(p.statements.size() == 1);
    CHECK(p.statements[0].primitive == PrimitiveKind::triangle);
    CHECK(p.statements[0].introduced == std::vector<std::string>{"a", "b", "c"});
    CHECK(p.statements[0].args.empty());
    CHECK(p.point_names().size() == 3);
}

TEST_CASE("parse: relation with inputs") {
    auto p = parse_program("a b c = triangle a b c\nm = midpoint m a b");
    REQUIRE(p.statements.size() == 2);
    CHECK(p.statements[1].relation == RelationKind::midpoint);
    CHECK(p.statements[1].introduced == std::vector<std::string>{"m"});
    CHECK(p.statements[1].args == std::vector<std::string>{"a", "b"});
}

TEST_CASE("parse: unbound point is reported by name") {
    try {
        parse_program("m = midpoint m a b");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::unbound_point);
        CHECK(e.detail.find("'a'") != std::string::npos);
        CHECK(e.line == 1);
    }
}

TEST_CASE("parse: unknown relation") {
    CHECK_THROWS_AS(parse_program("a b = segment a b\nx = frobnicate x a b"),
                    ParseError);
    try {
        parse_program("a b = segment a b\nx = frobnicate x a b");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::unknown_relation);
        CHECK(e.line == 2);
    }
}

TEST_CASE("parse: arity mismatch") {
    try {
        parse_program("a b c = triangle a b c\nm = midpoint m a b c");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.kind == ParseError::Kind::arity_mismatch);
    }
}

TEST_CASE("parse: s_angle literal required and preserved") {
    auto p = parse_program("a b = segment a b\nx = s_angle x a b 40");
    REQUIRE(p.statements.size() == 2);
    CHECK(p.statements[1].literal == 40.0);
    CHECK_THROWS_AS(parse_program("a b = segment a b\nx = s_angle x a b"),
                    ParseError);
    // Literals are rejected where the signature does not allow them.
    CHECK_THROWS_AS(parse_program("a b = segment a b\nm = midpoint m a b 3"),
                    ParseError);
}

TEST_CASE("parse: comments and blank lines are skipped") {
    auto p = parse_program("# header\n\na b = segment a b\n\n# trailing\n");
    CHECK(p.statements.size() == 1);
}

TEST_CASE("serialize: canonical single statement") {
    auto p = parse_program("a b c = triangle a b c");
    CHECK(serialize_program(p) == "a b c = triangle a b c\n");
}

TEST_CASE("serialize: canonicalizes spacing") {
    auto p = parse_program("a b c =   triangle   a b c\n  m =\tmidpoint m a  b");
    CHECK(serialize_program(p) ==
          "a b c = triangle a b c\nm = midpoint m a b\n");
}

TEST_CASE("serialize/parse round trip") {
    std::string src =
        "a b c d = rectangle a b c d\n"
        "m = midpoint m a b\n"
        "x = s_angle x a m 22.5\n"
        "p q = square p q c d\n";
    auto p = parse_program(src);
    CHECK(serialize_program(p) == src);
    CHECK(parse_program(serialize_program(p)) == p);
    CHECK(p.id() == parse_program(src).id());
}

TEST_CASE("program id is deterministic and content addressed") {
    auto p1 = parse_program("a b = segment a b");
    auto p2 = parse_program("a b = segment a b");
    auto p3 = parse_program("a c = segment a c");
    CHECK(p1.id() == p2.id());
    CHECK(p1.id() != p3.id());
    CHECK(p1.id().size() == 16);
}

TEST_CASE("validate: well-formed program") {
    auto p = parse_program(
        "a b c = triangle a b c\nm = midpoint m a b\no = circumcenter o a b c");
    CHECK(validate_program(p).empty());
}

TEST_CASE("validate: missing base primitive") {
    ConstructionProgram p;
    Statement st;
    st.relation = RelationKind::midpoint;
    st.introduced = {"m"};
    st.args = {"a", "b"};
    p.statements.push_back(st);
    auto v = validate_program(p);
    REQUIRE(!v.empty());
    bool found = false;
    for (const auto& viol : v) {
        if (viol.rule == ViolationRule::missing_base_primitive &&
            viol.statement_index == 0) {
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("validate: duplicate point introduction") {
    ConstructionProgram p = parse_program("a b c = triangle a b c");
    Statement st;
    st.relation = RelationKind::midpoint;
    st.introduced = {"a"};  // already bound
    st.args = {"b", "c"};
    p.statements.push_back(st);
    auto v = validate_program(p);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == ViolationRule::duplicate_point);
    CHECK(v[0].statement_index == 1);
    CHECK(v[0].detail == "a");
}

TEST_CASE("validate: unbound and self-referencing args") {
    ConstructionProgram p = parse_program("a b = segment a b");
    Statement st;
    st.relation = RelationKind::midpoint;
    st.introduced = {"m"};
    st.args = {"a", "z"};
    p.statements.push_back(st);
    Statement st2;
    st2.relation = RelationKind::midpoint;
    st2.introduced = {"n"};
    st2.args = {"n", "a"};
    p.statements.push_back(st2);
    auto v = validate_program(p);
    REQUIRE(v.size() == 2);
    CHECK(v[0].rule == ViolationRule::unbound_arg);
    CHECK(v[0].detail == "z");
    CHECK(v[1].rule == ViolationRule::arg_is_introduced);
}

TEST_CASE("validate is pure") {
    ConstructionProgram p = parse_program("a b = segment a b");
    Statement st;
    st.relation = RelationKind::midpoint;
    st.introduced = {"m"};
    st.args = {"a", "q"};
    p.statements.push_back(st);
    auto v1 = validate_program(p);
    auto v2 = validate_program(p);
    REQUIRE(v1.size() == v2.size());
    for (size_t i = 0; i < v1.size(); ++i) {
        CHECK(v1[i].rule == v2[i].rule);
        CHECK(v1[i].statement_index == v2[i].statement_index);
        CHECK(v1[i].detail == v2[i].detail);
    }
}

TEST_CASE("identifier policy") {
    CHECK(valid_point_name("a"));
    CHECK(valid_point_name("m1"));
    CHECK(valid_point_name("ab2c"));
    CHECK(!valid_point_name(""));
    CHECK(!valid_point_name("A"));
    CHECK(!valid_point_name("1a"));
    CHECK(!valid_point_name("toolongname"));
}

TEST_CASE("fresh names skip bound ones") {
    CHECK(fresh_point_name({}) == "a");
    CHECK(fresh_point_name({"a", "b"}) == "c");
    std::vector<std::string> all;
    for (char c = 'a'; c <= 'z'; ++c) all.push_back(std::string(1, c));
    CHECK(fresh_point_name(all) == "a1");
}

TEST_CASE("literal formatting is canonical") {
    CHECK(format_literal(40.0) == "40");
    CHECK(format_literal(22.5) == "22.5");
    auto p = parse_program("a b = segment a b\nx = s_angle x a b 40.0");
    CHECK(serialize_program(p).find("40\n") != std::string::npos);
}
