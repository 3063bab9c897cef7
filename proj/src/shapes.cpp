#include "incdet/shapes.hpp"

#include <cmath>
#include <limits>

namespace incdet {

double InclusionShape::level(const Vec3& p, const Grid& g) const {
    switch (kind) {
        case ShapeKind::None:
            return 1.0;
        case ShapeKind::Ball:
            return (p - center).norm() - radius;
        case ShapeKind::Ellipsoid: {
            const Vec3 d = p - center;
            const double q = (d.x / semi_axes.x) * (d.x / semi_axes.x) +
                             (d.y / semi_axes.y) * (d.y / semi_axes.y) +
                             (d.z / semi_axes.z) * (d.z / semi_axes.z);
            return q - 1.0;
        }
        case ShapeKind::LevelSetTable: {
            const int c = g.nearest_cell(p);
            return table[c];
        }
    }
    return 1.0;
}

Vec3 InclusionShape::analytic_normal(const Vec3& p) const {
    switch (kind) {
        case ShapeKind::Ball:
            return (p - center).normalized();
        case ShapeKind::Ellipsoid: {
            const Vec3 d = p - center;
            const Vec3 grad{2.0 * d.x / (semi_axes.x * semi_axes.x),
                            2.0 * d.y / (semi_axes.y * semi_axes.y),
                            2.0 * d.z / (semi_axes.z * semi_axes.z)};
            return grad.normalized();
        }
        default:
            throw ValidationError("analytic_normal: shape has no closed form");
    }
}

Vec3 InclusionShape::boundary_point(const Vec3& dir) const {
    const Vec3 u = dir.normalized();
    switch (kind) {
        case ShapeKind::Ball:
            return center + u * radius;
        case ShapeKind::Ellipsoid: {
            const double t = 1.0 / std::sqrt((u.x / semi_axes.x) * (u.x / semi_axes.x) +
                                             (u.y / semi_axes.y) * (u.y / semi_axes.y) +
                                             (u.z / semi_axes.z) * (u.z / semi_axes.z));
            return center + u * t;
        }
        default:
            throw ValidationError("boundary_point: shape has no closed form");
    }
}

InclusionShape InclusionShape::dilated(double factor) const {
    if (factor <= 0.0) throw ValidationError("dilated: factor must be positive");
    InclusionShape s = *this;
    s.mask = CellMask(0);
    switch (kind) {
        case ShapeKind::None:
            return s;
        case ShapeKind::Ball:
            s.radius = radius * factor;
            return s;
        case ShapeKind::Ellipsoid:
            s.semi_axes = semi_axes * factor;
            return s;
        default:
            throw ValidationError("dilated: level-set shapes cannot be scaled");
    }
}

InclusionShape make_ball(const Vec3& center, double radius) {
    if (radius <= 0.0) throw ValidationError("ball: radius must be positive");
    InclusionShape s;
    s.kind = ShapeKind::Ball;
    s.center = center;
    s.radius = radius;
    return s;
}

InclusionShape make_ellipsoid(const Vec3& center, const Vec3& semi_axes) {
    if (semi_axes.x <= 0.0 || semi_axes.y <= 0.0 || semi_axes.z <= 0.0)
        throw ValidationError("ellipsoid: semi-axes must be positive");
    InclusionShape s;
    s.kind = ShapeKind::Ellipsoid;
    s.center = center;
    s.semi_axes = semi_axes;
    return s;
}

InclusionShape make_level_set(std::vector<double> table) {
    InclusionShape s;
    s.kind = ShapeKind::LevelSetTable;
    s.table = std::move(table);
    return s;
}

InclusionShape make_empty() { return InclusionShape(); }

void rasterize_inclusion(InclusionShape& shape, const Grid& g, const CellMask& omega,
                         double delta0) {
    CellMask mask(g.ncells());
    if (shape.kind == ShapeKind::LevelSetTable &&
        static_cast<int>(shape.table.size()) != g.ncells())
        throw ValidationError("inclusion: level-set table size does not match grid");

    if (!shape.empty()) {
        for (int c = 0; c < g.ncells(); ++c) {
            if (!omega[c]) continue;
            if (shape.level(g.center(c), g) < 0.0) mask.set(c);
        }
        if (mask.empty()) throw ValidationError("inclusion: mask is empty on this grid");
        if (!is_connected(g, mask)) throw ValidationError("inclusion: mask is not connected");

        // dist(partial D, partial Omega) >= delta0, checked between boundary
        // cell centers.
        const auto bd = boundary_cells(g, mask);
        const auto bo = boundary_cells(g, omega);
        double dmin = std::numeric_limits<double>::max();
        for (int cd : bd) {
            const Vec3 pd = g.center(cd);
            for (int co : bo) dmin = std::min(dmin, (pd - g.center(co)).norm());
        }
        if (dmin < delta0)
            throw ValidationError("inclusion: violates the stand-off margin from the boundary");

        // Omega \ closure(D) must stay connected.
        CellMask complement(g.ncells());
        for (int c = 0; c < g.ncells(); ++c)
            if (omega[c] && !mask[c]) complement.set(c);
        if (complement.empty() || !is_connected(g, complement))
            throw ValidationError("inclusion: complement in the domain is disconnected");
    }
    shape.mask = std::move(mask);
}

}  // namespace incdet
