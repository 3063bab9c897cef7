#ifndef INCDET_GRID_HPP
#define INCDET_GRID_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "incdet/core.hpp"

namespace incdet {

struct Index3 {
    int i = 0, j = 0, k = 0;
    bool operator==(const Index3&) const = default;
};

// Axis-aligned box.
struct Box {
    Vec3 lo, hi;
    double extent(int axis) const { return hi[axis] - lo[axis]; }
    double max_extent() const {
        return std::max(extent(0), std::max(extent(1), extent(2)));
    }
    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y &&
               p.z >= lo.z && p.z <= hi.z;
    }
};

// Uniform Cartesian cell-centered grid over a box. Cells are cubes of side h;
// every box extent must be an integer multiple of h.
class Grid {
public:
    Grid() = default;
    Grid(const Box& box, int nx, int ny, int nz, double h);

    const Box& box() const { return box_; }
    double h() const { return h_; }
    const std::array<int, 3>& dims() const { return dims_; }
    int ncells() const { return dims_[0] * dims_[1] * dims_[2]; }
    double cell_volume() const { return h_ * h_ * h_; }
    double face_area() const { return h_ * h_; }

    bool valid(int i, int j, int k) const {
        return i >= 0 && i < dims_[0] && j >= 0 && j < dims_[1] && k >= 0 && k < dims_[2];
    }
    int lin(int i, int j, int k) const { return (i * dims_[1] + j) * dims_[2] + k; }
    int lin(const Index3& c) const { return lin(c.i, c.j, c.k); }
    Index3 unlin(int cell) const {
        const int k = cell % dims_[2];
        const int j = (cell / dims_[2]) % dims_[1];
        const int i = cell / (dims_[1] * dims_[2]);
        return {i, j, k};
    }

    Vec3 center(int i, int j, int k) const {
        return {box_.lo.x + (i + 0.5) * h_, box_.lo.y + (j + 0.5) * h_,
                box_.lo.z + (k + 0.5) * h_};
    }
    Vec3 center(int cell) const {
        const Index3 c = unlin(cell);
        return center(c.i, c.j, c.k);
    }

    // Cell whose center is nearest to p (p must lie inside the box).
    int nearest_cell(const Vec3& p) const;

    // Neighbor cell in direction dir (0..5: -x,+x,-y,+y,-z,+z); -1 if outside.
    int neighbor(int cell, int dir) const;

    static int dir_axis(int dir) { return dir / 2; }
    static int dir_sign(int dir) { return (dir % 2 == 0) ? -1 : +1; }

private:
    Box box_{};
    double h_ = 0.0;
    std::array<int, 3> dims_{0, 0, 0};
};

// Uniform grid over `box` with spacing h = max_extent / resolution. Every
// box extent must be an integer multiple of h. resolution >= 8 required.
Grid build_grid(const Box& box, int resolution);

// Boolean per-cell mask over a grid.
struct CellMask {
    std::vector<std::uint8_t> cells;

    explicit CellMask(int n = 0) : cells(n, 0) {}
    bool operator[](int c) const { return cells[c] != 0; }
    void set(int c, bool v = true) { cells[c] = v ? 1 : 0; }
    int count() const {
        int n = 0;
        for (auto v : cells) n += v;
        return n;
    }
    bool empty() const { return count() == 0; }
    bool operator==(const CellMask&) const = default;
};

// Boundary condition kinds carried by boundary faces. Interior faces carry none.
enum class FaceLabel : std::uint8_t { Interior, Dirichlet, Impedance, Measurement };

// A set of coplanar grid faces on one side of a cell slab: all faces
// (i,j,slab)->dir for (i,j) in `cols`. `axis` is the face normal axis and
// `side` is -1/+1 for the low/high face of the slab cell. In-plane columns
// are kept sorted row-major, which fixes the face enumeration shared by all
// Cauchy pairs.
struct SurfacePatch {
    int axis = 2;
    int side = -1;
    int slab = 0;                             // cell index along `axis` adjacent to the faces
    std::vector<std::array<int, 2>> cols;     // in-plane (a,b) with a<b axis order

    int dir() const { return 2 * axis + (side > 0 ? 1 : 0); }
    int nfaces() const { return static_cast<int>(cols.size()); }

    Index3 cell(int f) const;                 // adjacent cell of face f
    Vec3 face_center(int f, const Grid& g) const;
    Vec3 outward_normal() const;              // unit normal pointing away from the slab cell

    bool contains_col(int a, int b) const;
    void sort_cols();
};

// Rectangular patch helper: columns [a0,a1] x [b0,b1] inclusive.
SurfacePatch make_rect_patch(int axis, int side, int slab, int a0, int a1, int b0, int b1);

// 6-neighborhood flood fill inside `mask` starting at `seed`; throws if the
// seed lies outside the mask.
CellMask connected_component(const Grid& g, const CellMask& mask, int seed);

// All cells of `mask` with at least one 6-neighbor outside the mask (or
// outside the grid).
std::vector<int> boundary_cells(const Grid& g, const CellMask& mask);

bool is_connected(const Grid& g, const CellMask& mask);

}  // namespace incdet

#endif  // INCDET_GRID_HPP
