#include "figkit/lang.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "figkit/rng.hpp"

namespace figkit {

namespace {

using PK = PrimitiveKind;
using RK = RelationKind;
constexpr auto DET = RealizationClass::deterministic;
constexpr auto PAR = RealizationClass::parametric;

const std::vector<PrimitiveInfo> kPrimitives = {
    {PK::segment, "segment", 2},
    {PK::angle, "angle", 3},
    {PK::triangle, "triangle", 3},
    {PK::iso_triangle, "iso_triangle", 3},
    {PK::r_triangle, "r_triangle", 3},
    {PK::triangle_ab, "triangle_ab", 3},
    {PK::ieq_triangle, "ieq_triangle", 3},
    {PK::risos, "risos", 3},
    {PK::rectangle, "rectangle", 4},
    {PK::isquare, "isquare", 4},
    {PK::trapezoid, "trapezoid", 4},
    {PK::r_trapezoid, "r_trapezoid", 4},
    {PK::eq_trapezoid, "eq_trapezoid", 4},
    {PK::quadrangle, "quadrangle", 4},
    {PK::eq_quadrangle, "eq_quadrangle", 4},
    {PK::eqdia_quadrangle, "eqdia_quadrangle", 4},
    {PK::pentagon, "pentagon", 5},
    {PK::eq_pentagon, "eq_pentagon", 5},
};

// Signature table. Input conventions follow each construction's standard
// geometric meaning; see docs/grammar.md for the exact reading of every row.
const std::vector<RelationInfo> kRelations = {
    {RK::angle_bisector, "angle_bisector", 1, 3, false, PAR},
    {RK::angle_mirror, "angle_mirror", 1, 3, false, PAR},
    {RK::circle, "circle", 1, 3, false, DET},
    {RK::circumcenter, "circumcenter", 1, 3, false, DET},
    {RK::eq_triangle, "eq_triangle", 1, 2, false, DET},
    {RK::eqangle2, "eqangle2", 1, 3, false, PAR},
    {RK::eqdistance, "eqdistance", 1, 3, false, PAR},
    {RK::foot, "foot", 1, 3, false, DET},
    {RK::incenter, "incenter", 1, 3, false, DET},
    {RK::excenter, "excenter", 1, 3, false, DET},
    {RK::intersection_cc, "intersection_cc", 1, 3, false, DET},
    {RK::on_bline, "on_bline", 1, 2, false, PAR},
    {RK::intersection_lc, "intersection_lc", 1, 3, false, DET},
    {RK::on_aline, "on_aline", 1, 5, false, PAR},
    {RK::intersection_ll, "intersection_ll", 1, 4, false, DET},
    {RK::on_line, "on_line", 1, 2, false, PAR},
    {RK::intersection_lp, "intersection_lp", 1, 5, false, DET},
    {RK::intersection_lt, "intersection_lt", 1, 5, false, DET},
    {RK::intersection_pp, "intersection_pp", 1, 6, false, DET},
    {RK::intersection_tt, "intersection_tt", 1, 6, false, DET},
    {RK::lc_tangent, "lc_tangent", 1, 2, false, PAR},
    {RK::midpoint, "midpoint", 1, 2, false, DET},
    {RK::mirror, "mirror", 1, 2, false, DET},
    {RK::nsquare, "nsquare", 1, 2, false, DET},
    {RK::on_circle, "on_circle", 1, 2, false, PAR},
    {RK::on_pline, "on_pline", 1, 3, false, PAR},
    {RK::on_tline, "on_tline", 1, 3, false, PAR},
    {RK::on_dia, "on_dia", 1, 2, false, PAR},
    {RK::orthocenter, "orthocenter", 1, 3, false, DET},
    {RK::parallelogram, "parallelogram", 1, 3, false, DET},
    {RK::psquare, "psquare", 1, 2, false, DET},
    {RK::reflect, "reflect", 1, 3, false, DET},
    {RK::s_angle, "s_angle", 1, 2, true, PAR},
    {RK::shift, "shift", 1, 3, false, DET},
    {RK::on_opline, "on_opline", 1, 2, false, PAR},
    {RK::eqangle3, "eqangle3", 1, 5, false, PAR},
    {RK::on_circum, "on_circum", 1, 3, false, PAR},
    {RK::square, "square", 2, 2, false, DET},
    {RK::trisegment, "trisegment", 2, 2, false, DET},
    {RK::trisect, "trisect", 2, 3, false, DET},
    {RK::tangent, "tangent", 2, 3, false, DET},
};

const std::unordered_map<std::string_view, PrimitiveKind>& primitive_names() {
    static const auto* map = [] {
        auto* m = new std::unordered_map<std::string_view, PrimitiveKind>();
        for (const auto& p : kPrimitives) (*m)[p.name] = p.kind;
        return m;
    }();
    return *map;
}

const std::unordered_map<std::string_view, RelationKind>& relation_names() {
    static const auto* map = [] {
        auto* m = new std::unordered_map<std::string_view, RelationKind>();
        for (const auto& r : kRelations) (*m)[r.name] = r.kind;
        return m;
    }();
    return *map;
}

uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

const std::vector<PrimitiveInfo>& primitive_table() { return kPrimitives; }
const std::vector<RelationInfo>& relation_table() { return kRelations; }

const PrimitiveInfo& primitive_info(PrimitiveKind k) {
    return kPrimitives[static_cast<size_t>(k)];
}

const RelationInfo& relation_info(RelationKind k) {
    return kRelations[static_cast<size_t>(k)];
}

std::optional<PrimitiveKind> primitive_by_name(std::string_view name) {
    auto it = primitive_names().find(name);
    if (it == primitive_names().end()) return std::nullopt;
    return it->second;
}

std::optional<RelationKind> relation_by_name(std::string_view name) {
    auto it = relation_names().find(name);
    if (it == relation_names().end()) return std::nullopt;
    return it->second;
}

std::string_view to_string(PrimitiveKind k) { return primitive_info(k).name; }
std::string_view to_string(RelationKind k) { return relation_info(k).name; }

std::string_view Statement::relation_name() const {
    if (primitive) return to_string(*primitive);
    return to_string(*relation);
}

std::vector<std::string> ConstructionProgram::point_names() const {
    std::vector<std::string> names;
    for (const auto& s : statements) {
        names.insert(names.end(), s.introduced.begin(), s.introduced.end());
    }
    return names;
}

std::string ConstructionProgram::id() const {
    uint64_t h = fnv1a64(serialize_program(*this));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool valid_point_name(std::string_view name) {
    if (name.empty() || name.size() > 8) return false;
    if (name[0] < 'a' || name[0] > 'z') return false;
    for (char c : name.substr(1)) {
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
    }
    return true;
}

std::string fresh_point_name(const std::vector<std::string>& taken) {
    std::unordered_set<std::string_view> used(taken.begin(), taken.end());
    for (int suffix = 0;; ++suffix) {
        for (char c = 'a'; c <= 'z'; ++c) {
            std::string name(1, c);
            if (suffix > 0) name += std::to_string(suffix);
            if (!used.count(name)) return name;
        }
    }
}

std::string format_literal(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

ParseError::ParseError(Kind k, int line_, int column_, std::string detail_)
    : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                         std::to_string(column_) + ": " + detail_),
      kind(k),
      line(line_),
      column(column_),
      detail(std::move(detail_)) {}

namespace {

struct Token {
    std::string text;
    int column;  // 1-based
};

std::vector<Token> tokenize_line(std::string_view line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
               line[i] != '\r') {
            ++i;
        }
        out.push_back({std::string(line.substr(start, i - start)),
                       static_cast<int>(start) + 1});
    }
    return out;
}

bool is_number_token(const std::string& t) {
    if (t.empty()) return false;
    char c = t[0];
    return (c >= '0' && c <= '9') || c == '-' || c == '.';
}

double parse_number(const Token& tok, int line_no) {
    double v = 0.0;
    auto [ptr, ec] =
        std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
    if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size()) {
        throw ParseError(ParseError::Kind::syntax, line_no, tok.column,
                         "malformed numeric literal '" + tok.text + "'");
    }
    return v;
}

}  // namespace

ConstructionProgram parse_program(std::string_view text) {
    ConstructionProgram program;
    std::unordered_set<std::string> bound;

    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        auto tokens = tokenize_line(line);
        if (tokens.empty() || tokens[0].text[0] == '#') continue;

        // intro... '=' relname intro... args...
        size_t eq = 0;
        while (eq < tokens.size() && tokens[eq].text != "=") ++eq;
        if (eq == tokens.size()) {
            throw ParseError(ParseError::Kind::syntax, line_no,
                             static_cast<int>(line.size()) + 1, "expected '='");
        }
        if (eq == 0) {
            throw ParseError(ParseError::Kind::syntax, line_no, tokens[0].column,
                             "expected introduced point name before '='");
        }

        Statement st;
        for (size_t i = 0; i < eq; ++i) {
            const auto& t = tokens[i];
            if (!valid_point_name(t.text)) {
                throw ParseError(ParseError::Kind::syntax, line_no, t.column,
                                 "invalid point name '" + t.text + "'");
            }
            st.introduced.push_back(t.text);
        }

        if (eq + 1 >= tokens.size()) {
            throw ParseError(ParseError::Kind::syntax, line_no,
                             static_cast<int>(line.size()) + 1,
                             "expected construction name after '='");
        }
        const Token& name_tok = tokens[eq + 1];
        int expected_new = 0;
        int expected_args = 0;
        bool takes_literal = false;
        if (auto pk = primitive_by_name(name_tok.text)) {
            st.primitive = *pk;
            expected_new = primitive_info(*pk).arity;
            expected_args = 0;
        } else if (auto rk = relation_by_name(name_tok.text)) {
            st.relation = *rk;
            const auto& info = relation_info(*rk);
            expected_new = info.new_points;
            expected_args = info.input_arity;
            takes_literal = info.takes_literal;
        } else {
            throw ParseError(ParseError::Kind::unknown_relation, line_no,
                             name_tok.column,
                             "unknown construction '" + name_tok.text + "'");
        }

        if (static_cast<int>(st.introduced.size()) != expected_new) {
            throw ParseError(
                ParseError::Kind::arity_mismatch, line_no, tokens[0].column,
                std::string(name_tok.text) + " introduces " +
                    std::to_string(expected_new) + " point(s), got " +
                    std::to_string(st.introduced.size()));
        }

        // The introduced names repeat directly after the construction name.
        size_t cursor = eq + 2;
        for (const auto& intro : st.introduced) {
            if (cursor >= tokens.size() || tokens[cursor].text != intro) {
                int col = cursor < tokens.size()
                              ? tokens[cursor].column
                              : static_cast<int>(line.size()) + 1;
                throw ParseError(ParseError::Kind::syntax, line_no, col,
                                 "expected introduced point '" + intro +
                                     "' after construction name");
            }
            ++cursor;
        }

        for (; cursor < tokens.size(); ++cursor) {
            const Token& t = tokens[cursor];
            if (is_number_token(t.text)) {
                if (!takes_literal) {
                    throw ParseError(ParseError::Kind::syntax, line_no, t.column,
                                     "numeric literal not allowed for " +
                                         std::string(name_tok.text));
                }
                if (st.literal) {
                    throw ParseError(ParseError::Kind::syntax, line_no, t.column,
                                     "duplicate numeric literal");
                }
                st.literal = parse_number(t, line_no);
                continue;
            }
            if (!valid_point_name(t.text)) {
                throw ParseError(ParseError::Kind::syntax, line_no, t.column,
                                 "invalid point name '" + t.text + "'");
            }
            st.args.push_back(t.text);
        }

        if (static_cast<int>(st.args.size()) != expected_args) {
            throw ParseError(ParseError::Kind::arity_mismatch, line_no,
                             name_tok.column,
                             std::string(name_tok.text) + " takes " +
                                 std::to_string(expected_args) +
                                 " input point(s), got " +
                                 std::to_string(st.args.size()));
        }
        if (takes_literal && !st.literal) {
            throw ParseError(ParseError::Kind::syntax, line_no,
                             static_cast<int>(line.size()) + 1,
                             std::string(name_tok.text) +
                                 " requires a numeric literal");
        }

        for (const auto& arg : st.args) {
            if (!bound.count(arg)) {
                throw ParseError(ParseError::Kind::unbound_point, line_no,
                                 name_tok.column,
                                 "unbound point '" + arg + "'");
            }
        }
        for (const auto& intro : st.introduced) {
            if (bound.count(intro)) {
                throw ParseError(ParseError::Kind::syntax, line_no,
                                 tokens[0].column,
                                 "point '" + intro + "' already bound");
            }
            bound.insert(intro);
        }

        program.statements.push_back(std::move(st));
    }
    return program;
}

std::string serialize_statement(const Statement& s) {
    std::string out;
    for (size_t i = 0; i < s.introduced.size(); ++i) {
        if (i) out += ' ';
        out += s.introduced[i];
    }
    out += " = ";
    out += s.relation_name();
    for (const auto& p : s.introduced) {
        out += ' ';
        out += p;
    }
    for (const auto& a : s.args) {
        out += ' ';
        out += a;
    }
    if (s.literal) {
        out += ' ';
        out += format_literal(*s.literal);
    }
    return out;
}

std::string serialize_program(const ConstructionProgram& program) {
    std::string out;
    for (const auto& s : program.statements) {
        out += serialize_statement(s);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::string_view to_string(ViolationRule r) {
    switch (r) {
        case ViolationRule::empty_program: return "EmptyProgram";
        case ViolationRule::missing_base_primitive: return "MissingBasePrimitive";
        case ViolationRule::primitive_not_first: return "PrimitiveNotFirst";
        case ViolationRule::duplicate_point: return "DuplicatePoint";
        case ViolationRule::unbound_arg: return "UnboundArg";
        case ViolationRule::arg_is_introduced: return "ArgIsIntroduced";
        case ViolationRule::arity_mismatch: return "ArityMismatch";
        case ViolationRule::bad_identifier: return "BadIdentifier";
        case ViolationRule::literal_not_allowed: return "LiteralNotAllowed";
        case ViolationRule::missing_literal: return "MissingLiteral";
    }
    return "?";
}

std::vector<Violation> validate_program(const ConstructionProgram& program) {
    std::vector<Violation> out;
    if (program.statements.empty()) {
        out.push_back({ViolationRule::empty_program, 0, "program has no statements"});
        return out;
    }

    std::unordered_set<std::string> bound;
    for (size_t k = 0; k < program.statements.size(); ++k) {
        const Statement& s = program.statements[k];
        int idx = static_cast<int>(k);

        if (k == 0 && !s.primitive) {
            out.push_back({ViolationRule::missing_base_primitive, 0,
                           "statement 0 must be a base object"});
        }
        if (k > 0 && s.primitive) {
            out.push_back({ViolationRule::primitive_not_first, idx,
                           "base object past statement 0"});
        }

        int expected_new = 0;
        int expected_args = 0;
        bool takes_literal = false;
        if (s.primitive) {
            expected_new = primitive_info(*s.primitive).arity;
        } else if (s.relation) {
            const auto& info = relation_info(*s.relation);
            expected_new = info.new_points;
            expected_args = info.input_arity;
            takes_literal = info.takes_literal;
        }

        if (static_cast<int>(s.introduced.size()) != expected_new ||
            static_cast<int>(s.args.size()) != expected_args) {
            out.push_back({ViolationRule::arity_mismatch, idx,
                           std::string(s.relation_name())});
        }
        if (s.literal && !takes_literal) {
            out.push_back({ViolationRule::literal_not_allowed, idx,
                           std::string(s.relation_name())});
        }
        if (!s.literal && takes_literal) {
            out.push_back({ViolationRule::missing_literal, idx,
                           std::string(s.relation_name())});
        }

        for (const auto& name : s.introduced) {
            if (!valid_point_name(name)) {
                out.push_back({ViolationRule::bad_identifier, idx, name});
            }
        }
        for (const auto& arg : s.args) {
            if (std::find(s.introduced.begin(), s.introduced.end(), arg) !=
                s.introduced.end()) {
                out.push_back({ViolationRule::arg_is_introduced, idx, arg});
            } else if (!bound.count(arg)) {
                out.push_back({ViolationRule::unbound_arg, idx, arg});
            }
        }
        for (const auto& name : s.introduced) {
            if (bound.count(name)) {
                out.push_back({ViolationRule::duplicate_point, idx, name});
            }
            bound.insert(name);
        }
    }
    return out;
}

}  // namespace figkit
