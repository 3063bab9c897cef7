#ifndef INCDET_SHAPES_HPP
#define INCDET_SHAPES_HPP

#include <optional>
#include <string>
#include <vector>

#include "incdet/grid.hpp"

namespace incdet {

enum class ShapeKind { None, Ball, Ellipsoid, LevelSetTable };

// Inclusion described by a signed-distance-like level function sampled at
// cell centers; the mask is the sublevel set {phi < 0}. `None` is the empty
// inclusion used by background-only trial configurations.
struct InclusionShape {
    ShapeKind kind = ShapeKind::None;
    Vec3 center{};
    double radius = 0.0;        // ball
    Vec3 semi_axes{};           // ellipsoid
    std::vector<double> table;  // level-set values per cell (LevelSetTable)
    CellMask mask;              // chi_D sampled at cell centers

    bool empty() const { return kind == ShapeKind::None; }

    // Level function; negative inside.
    double level(const Vec3& p, const Grid& g) const;

    // Outer unit normal of the analytic boundary at p (closed-form shapes only).
    Vec3 analytic_normal(const Vec3& p) const;

    // Closest boundary point of the analytic shape in direction `dir` from the
    // center (closed-form shapes only).
    Vec3 boundary_point(const Vec3& dir) const;

    // Shape scaled about its center (dilation family member).
    InclusionShape dilated(double factor) const;
};

InclusionShape make_ball(const Vec3& center, double radius);
InclusionShape make_ellipsoid(const Vec3& center, const Vec3& semi_axes);
InclusionShape make_level_set(std::vector<double> table);
InclusionShape make_empty();

// Samples chi_D on the grid and enforces the inclusion priors: the mask must
// be connected, lie inside `omega` at distance >= delta0 from its boundary,
// and leave omega \ D connected. Throws ValidationError otherwise.
void rasterize_inclusion(InclusionShape& shape, const Grid& g, const CellMask& omega,
                         double delta0);

}  // namespace incdet

#endif  // INCDET_SHAPES_HPP
