#include "incdet/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace incdet {

namespace {

// Checks that extent/h is an integer within a relative slack and returns it.
int divide_exactly(double extent, double h, const char* what) {
    const double q = extent / h;
    const int n = static_cast<int>(std::lround(q));
    if (n <= 0 || std::abs(q - n) > 1e-9 * std::max(1.0, q)) {
        throw ValidationError(std::string(what) +
                              ": box extent is not an integer multiple of the spacing");
    }
    return n;
}

}  // namespace

Grid::Grid(const Box& box, int nx, int ny, int nz, double h)
    : box_(box), h_(h), dims_{nx, ny, nz} {}

int Grid::nearest_cell(const Vec3& p) const {
    if (!box_.contains(p)) throw ValidationError("point outside grid box");
    auto clampi = [](int v, int n) { return std::min(std::max(v, 0), n - 1); };
    const int i = clampi(static_cast<int>(std::floor((p.x - box_.lo.x) / h_)), dims_[0]);
    const int j = clampi(static_cast<int>(std::floor((p.y - box_.lo.y) / h_)), dims_[1]);
    const int k = clampi(static_cast<int>(std::floor((p.z - box_.lo.z) / h_)), dims_[2]);
    return lin(i, j, k);
}

int Grid::neighbor(int cell, int dir) const {
    Index3 c = unlin(cell);
    const int axis = dir_axis(dir);
    const int sign = dir_sign(dir);
    int coords[3] = {c.i, c.j, c.k};
    coords[axis] += sign;
    if (coords[axis] < 0 || coords[axis] >= dims_[axis]) return -1;
    return lin(coords[0], coords[1], coords[2]);
}

Grid build_grid(const Box& box, int resolution) {
    if (resolution < 8) throw ValidationError("build_grid: resolution must be >= 8");
    for (int a = 0; a < 3; ++a) {
        if (box.extent(a) <= 0.0) throw ValidationError("build_grid: degenerate box");
    }
    const double h = box.max_extent() / resolution;
    const int nx = divide_exactly(box.extent(0), h, "build_grid x");
    const int ny = divide_exactly(box.extent(1), h, "build_grid y");
    const int nz = divide_exactly(box.extent(2), h, "build_grid z");
    return Grid(box, nx, ny, nz, h);
}

Index3 SurfacePatch::cell(int f) const {
    const auto& ab = cols[f];
    int coords[3];
    int t = 0;
    for (int a = 0; a < 3; ++a) {
        if (a == axis) {
            coords[a] = slab;
        } else {
            coords[a] = ab[t++];
        }
    }
    return {coords[0], coords[1], coords[2]};
}

Vec3 SurfacePatch::face_center(int f, const Grid& g) const {
    const Index3 c = cell(f);
    Vec3 p = g.center(c.i, c.j, c.k);
    p[axis] += 0.5 * side * g.h();
    return p;
}

Vec3 SurfacePatch::outward_normal() const {
    Vec3 n{0, 0, 0};
    n[axis] = static_cast<double>(side);
    return n;
}

bool SurfacePatch::contains_col(int a, int b) const {
    const std::array<int, 2> key{a, b};
    return std::binary_search(cols.begin(), cols.end(), key);
}

void SurfacePatch::sort_cols() { std::sort(cols.begin(), cols.end()); }

SurfacePatch make_rect_patch(int axis, int side, int slab, int a0, int a1, int b0, int b1) {
    SurfacePatch p;
    p.axis = axis;
    p.side = side;
    p.slab = slab;
    for (int a = a0; a <= a1; ++a)
        for (int b = b0; b <= b1; ++b) p.cols.push_back({a, b});
    p.sort_cols();
    return p;
}

CellMask connected_component(const Grid& g, const CellMask& mask, int seed) {
    if (seed < 0 || seed >= g.ncells() || !mask[seed])
        throw ValidationError("connected_component: seed outside mask");
    CellMask out(g.ncells());
    std::deque<int> queue{seed};
    out.set(seed);
    while (!queue.empty()) {
        const int c = queue.front();
        queue.pop_front();
        for (int dir = 0; dir < 6; ++dir) {
            const int n = g.neighbor(c, dir);
            if (n >= 0 && mask[n] && !out[n]) {
                out.set(n);
                queue.push_back(n);
            }
        }
    }
    return out;
}

std::vector<int> boundary_cells(const Grid& g, const CellMask& mask) {
    std::vector<int> out;
    for (int c = 0; c < g.ncells(); ++c) {
        if (!mask[c]) continue;
        for (int dir = 0; dir < 6; ++dir) {
            const int n = g.neighbor(c, dir);
            if (n < 0 || !mask[n]) {
                out.push_back(c);
                break;
            }
        }
    }
    return out;
}

bool is_connected(const Grid& g, const CellMask& mask) {
    int seed = -1;
    for (int c = 0; c < g.ncells(); ++c) {
        if (mask[c]) {
            seed = c;
            break;
        }
    }
    if (seed < 0) return true;
    return connected_component(g, mask, seed).count() == mask.count();
}

}  // namespace incdet
