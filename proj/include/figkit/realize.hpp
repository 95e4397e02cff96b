#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "figkit/lang.hpp"
#include "figkit/vec2.hpp"

namespace figkit {

// All thresholds apply in the normalized frame (figure fitted to
// [-0.9, 0.9]^2); length residuals are divided by the figure extent so the
// same tolerances are meaningful at any raw scale.
struct RealizeOptions {
    double tau_solve = 1e-8;
    double delta_min = 0.04;          // min pairwise point distance
    double theta_min_deg = 8.0;       // min angle at triangles/intersections
    double radius_min = 0.05;
    double radius_max = 2.0;
    int max_iterations = 200;         // damped least-squares cap
    int max_resamples = 16;           // parametric retry budget
    double out_of_frame_limit = 1e6;  // raw coordinate magnitude cap
    bool force_generic_solver = false;  // test hook: skip closed forms
};

enum class ElementKind : uint8_t {
    segment,       // anchors: 2 endpoints
    line_through,  // anchors: >=2 collinear points, drawn spanning them
    circle,        // anchors: [center]; radius set
    angle_mark,    // anchors: [vertex, ray_end_1, ray_end_2]
    right_angle_mark,
};

struct DrawableElement {
    ElementKind kind;
    int statement_index;
    std::string id;  // stable across steps of one figure
    std::vector<Vec2> anchors;
    double radius = 0.0;
};

struct RealizedPoint {
    std::string name;
    Vec2 pos;
    int statement_index;
};

struct FigureRealization {
    std::vector<RealizedPoint> points;  // introduction order
    std::vector<DrawableElement> derived;
    double residual = 0.0;  // max scale-normalized constraint violation

    Vec2 coord(std::string_view name) const;
    const RealizedPoint* find(std::string_view name) const;
};

class RealizeError : public std::runtime_error {
public:
    enum class Kind { solver_diverged, inconsistent_constraints, degenerate_extent };

    RealizeError(Kind k, int statement_index_, const std::string& message)
        : std::runtime_error(message), kind(k), statement_index(statement_index_) {}

    Kind kind;
    int statement_index;
};

// Assigns coordinates to every point, statement by statement. Deterministic
// in (program, seed): closed forms for fully determined constructions,
// seeded sampling plus damped least-squares refinement for parametric ones.
// Throws RealizeError. Precondition: validate_program(program) is empty.
FigureRealization realize(const ConstructionProgram& program, uint64_t seed,
                          const RealizeOptions& options = {});

// Similarity transform (uniform scale + translation) fitting the point
// bounding box into [-0.9, 0.9]^2 centered at the origin. Exact identity on
// already-normalized figures. Throws RealizeError(degenerate_extent) when
// all points coincide.
FigureRealization normalize_frame(const FigureRealization& fig);

// ---------------------------------------------------------------------------
// Degeneracy checking
// ---------------------------------------------------------------------------
enum class DegeneracyReason : uint8_t {
    points_too_close,
    near_collinear,
    angle_too_small,
    radius_out_of_range,
    solver_diverged,
    out_of_frame,
};

std::string_view to_string(DegeneracyReason r);

struct DegeneracyFinding {
    DegeneracyReason reason;
    int statement_index;  // -1 for figure-wide findings
    std::vector<std::string> points;
    std::string detail;
};

struct DegeneracyReport {
    std::vector<DegeneracyFinding> reasons;
    bool valid() const { return reasons.empty(); }
};

// Applies every threshold rule and returns the complete finding list.
// The verdict is invariant under normalize_frame (checks run on a
// normalized copy internally).
DegeneracyReport check_degeneracy(const FigureRealization& fig,
                                  const ConstructionProgram& program,
                                  const RealizeOptions& options = {});

// ---------------------------------------------------------------------------
// Pieces exposed for oracle tests and the synthesis loop
// ---------------------------------------------------------------------------

// Closed-form solution for a deterministic relation given input coordinates.
// Returns one position per introduced point. Throws RealizeError for
// geometrically impossible inputs (parallel lines, empty intersections).
std::vector<Vec2> closed_form_points(RelationKind kind,
                                     const std::vector<Vec2>& inputs);

// Scale-normalized residual vector of one relation at the given positions.
std::vector<double> relation_residuals(RelationKind kind,
                                       const std::vector<Vec2>& inputs,
                                       const std::vector<Vec2>& news,
                                       double literal_deg, double scale);

// Solves one relation through the seeded-init + damped least-squares path,
// ignoring any closed form. Backs the force_generic_solver hook and the
// closed-form agreement tests. Throws RealizeError(solver_diverged) when no
// init converges within options.max_resamples attempts.
std::vector<Vec2> generic_solve_points(RelationKind kind,
                                       const std::vector<Vec2>& inputs,
                                       double literal_deg, uint64_t seed,
                                       const RealizeOptions& options = {});

// JSON dump of a realization (point map + residual) for fixtures/debugging.
std::string realization_to_json(const FigureRealization& fig);

}  // namespace figkit
