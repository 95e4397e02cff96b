#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace figkit {

// ---------------------------------------------------------------------------
// Base objects a construction starts from.
// ---------------------------------------------------------------------------
enum class PrimitiveKind : uint8_t {
    segment,
    angle,
    triangle,
    iso_triangle,
    r_triangle,
    triangle_ab,
    ieq_triangle,
    risos,
    rectangle,
    isquare,
    trapezoid,
    r_trapezoid,
    eq_trapezoid,
    quadrangle,
    eq_quadrangle,
    eqdia_quadrangle,
    pentagon,
    eq_pentagon,
};

inline constexpr int kPrimitiveCount = 18;

// ---------------------------------------------------------------------------
// Constructions that extend a figure by one or two new points.
// ---------------------------------------------------------------------------
enum class RelationKind : uint8_t {
    angle_bisector,
    angle_mirror,
    circle,
    circumcenter,
    eq_triangle,
    eqangle2,
    eqdistance,
    foot,
    incenter,
    excenter,
    intersection_cc,
    on_bline,
    intersection_lc,
    on_aline,
    intersection_ll,
    on_line,
    intersection_lp,
    intersection_lt,
    intersection_pp,
    intersection_tt,
    lc_tangent,
    midpoint,
    mirror,
    nsquare,
    on_circle,
    on_pline,
    on_tline,
    on_dia,
    orthocenter,
    parallelogram,
    psquare,
    reflect,
    s_angle,
    shift,
    on_opline,
    eqangle3,
    on_circum,
    square,
    trisegment,
    trisect,
    tangent,
};

inline constexpr int kRelationCount = 41;

// Closed-form constructions are fully determined by their inputs; parametric
// ones keep at least one degree of freedom that realization must sample.
enum class RealizationClass : uint8_t { deterministic, parametric };

struct PrimitiveInfo {
    PrimitiveKind kind;
    std::string_view name;
    int arity;  // points the base object introduces
};

struct RelationInfo {
    RelationKind kind;
    std::string_view name;
    int new_points;   // 1 or 2
    int input_arity;  // previously bound points referenced
    bool takes_literal;
    RealizationClass realization_class;
};

const std::vector<PrimitiveInfo>& primitive_table();
const std::vector<RelationInfo>& relation_table();

const PrimitiveInfo& primitive_info(PrimitiveKind k);
const RelationInfo& relation_info(RelationKind k);

std::optional<PrimitiveKind> primitive_by_name(std::string_view name);
std::optional<RelationKind> relation_by_name(std::string_view name);

std::string_view to_string(PrimitiveKind k);
std::string_view to_string(RelationKind k);

// ---------------------------------------------------------------------------
// Programs
// ---------------------------------------------------------------------------
struct Statement {
    // Exactly one of primitive/relation is set; primitives only at index 0.
    std::optional<PrimitiveKind> primitive;
    std::optional<RelationKind> relation;
    std::vector<std::string> introduced;
    std::vector<std::string> args;      // previously bound points
    std::optional<double> literal;      // s_angle degrees

    bool operator==(const Statement&) const = default;

    std::string_view relation_name() const;
};

struct ConstructionProgram {
    std::vector<Statement> statements;

    bool operator==(const ConstructionProgram&) const = default;

    // Content hash of the canonical serialization, 16 hex chars.
    std::string id() const;

    // Point names in introduction order.
    std::vector<std::string> point_names() const;
};

// ---------------------------------------------------------------------------
// Parse / serialize
// ---------------------------------------------------------------------------
class ParseError : public std::runtime_error {
public:
    enum class Kind { syntax, unknown_relation, unbound_point, arity_mismatch };

    ParseError(Kind kind, int line, int column, std::string detail);

    Kind kind;
    int line;    // 1-based
    int column;  // 1-based
    std::string detail;
};

// Parses construction source. One statement per line, blank lines and
// '#' comment lines ignored. Throws ParseError.
ConstructionProgram parse_program(std::string_view text);

// Canonical form: lowercase tokens, single spaces, LF line ends, trailing
// newline. parse_program(serialize_program(p)) == p for any valid p.
std::string serialize_program(const ConstructionProgram& program);

// Canonical text of one statement (no newline).
std::string serialize_statement(const Statement& s);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------
enum class ViolationRule {
    empty_program,
    missing_base_primitive,
    primitive_not_first,
    duplicate_point,
    unbound_arg,
    arg_is_introduced,
    arity_mismatch,
    bad_identifier,
    literal_not_allowed,
    missing_literal,
};

struct Violation {
    ViolationRule rule;
    int statement_index;
    std::string detail;
};

std::string_view to_string(ViolationRule r);

// Returns every rule violation; empty means the program is well formed.
std::vector<Violation> validate_program(const ConstructionProgram& program);

// Identifier policy: [a-z][a-z0-9]*, at most 8 chars.
bool valid_point_name(std::string_view name);

// a, b, ..., z, a1, b1, ... skipping anything in `taken`.
std::string fresh_point_name(const std::vector<std::string>& taken);

// Canonical literal formatting ("40", "22.5").
std::string format_literal(double v);

}  // namespace figkit
