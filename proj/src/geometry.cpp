#include "incdet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "incdet/parallel.hpp"

namespace incdet {

namespace {

std::vector<Vec3> cell_centers(const Grid& g, const std::vector<int>& cells) {
    std::vector<Vec3> pts;
    pts.reserve(cells.size());
    for (int c : cells) pts.push_back(g.center(c));
    return pts;
}

double min_distance_to(const Vec3& p, const std::vector<Vec3>& to) {
    double best = std::numeric_limits<double>::max();
    for (const Vec3& q : to) best = std::min(best, (p - q).norm());
    return best;
}

// Directed distance sup_{a in bd A} dist(a, B): zero for points inside B,
// otherwise distance to the boundary cells of B.
double directed_distance(const Grid& g, const std::vector<int>& bd_from,
                         const CellMask& to, const std::vector<Vec3>& bd_to_pts) {
    std::vector<Vec3> outside;
    outside.reserve(bd_from.size());
    for (int c : bd_from)
        if (!to[c]) outside.push_back(g.center(c));
    if (outside.empty()) return 0.0;
    return max_min_distance(outside, bd_to_pts);
}

}  // namespace

double max_min_distance_serial(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    double worst = 0.0;
    for (const Vec3& p : from) worst = std::max(worst, min_distance_to(p, to));
    return worst;
}

double max_min_distance_omp(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    const int n = static_cast<int>(from.size());
    double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (int i = 0; i < n; ++i) worst = std::max(worst, min_distance_to(from[i], to));
    return worst;
}

double max_min_distance(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    if (from.empty()) return 0.0;
    if (to.empty()) throw ValidationError("max_min_distance: empty target set");
    return threads() > 1 ? max_min_distance_omp(from, to) : max_min_distance_serial(from, to);
}

double hausdorff_distance(const Grid& g, const CellMask& A, const CellMask& B) {
    if (A.empty() || B.empty()) throw ValidationError("hausdorff_distance: empty mask");
    const auto bdA = boundary_cells(g, A);
    const auto bdB = boundary_cells(g, B);
    const auto ptsA = cell_centers(g, bdA);
    const auto ptsB = cell_centers(g, bdB);
    const double ab = directed_distance(g, bdA, B, ptsB);
    const double ba = directed_distance(g, bdB, A, ptsA);
    return std::max(ab, ba);
}

CellMask omega_d(const Grid& g, const CellMask& D1, const CellMask& D2, const CellMask& omega) {
    CellMask free_cells(g.ncells());
    for (int c = 0; c < g.ncells(); ++c)
        if (omega[c] && !D1[c] && !D2[c]) free_cells.set(c);
    if (free_cells.empty())
        throw ValidationError("omega_d: inclusions swallow the whole domain");

    // Seed the reachable component at any free cell touching the boundary of omega.
    int seed = -1;
    for (int c : boundary_cells(g, omega)) {
        if (free_cells[c]) {
            seed = c;
            break;
        }
    }
    if (seed < 0) throw ValidationError("omega_d: no free cell on the domain boundary");
    const CellMask reachable = connected_component(g, free_cells, seed);

    CellMask od(g.ncells());
    for (int c = 0; c < g.ncells(); ++c)
        if (omega[c] && !reachable[c]) od.set(c);
    return od;
}

double modified_distance(const Grid& g, const CellMask& D1, const CellMask& D2,
                         const CellMask& omega) {
    if (D1 == D2) return 0.0;
    if (D1.empty() || D2.empty()) throw ValidationError("modified_distance: empty mask");
    const CellMask od = omega_d(g, D1, D2, omega);

    const std::vector<int> od_bd_cells = boundary_cells(g, od);
    const std::set<int> od_bd(od_bd_cells.begin(), od_bd_cells.end());
    auto reachable_bd = [&](const CellMask& D) {
        std::vector<int> out;
        for (int c : boundary_cells(g, D))
            if (od_bd.count(c)) out.push_back(c);
        return out;
    };

    const auto bd1 = reachable_bd(D1);
    const auto bd2 = reachable_bd(D2);
    const auto pts1 = cell_centers(g, boundary_cells(g, D1));
    const auto pts2 = cell_centers(g, boundary_cells(g, D2));

    double d = 0.0;
    if (!bd1.empty()) d = std::max(d, directed_distance(g, bd1, D2, pts2));
    if (!bd2.empty()) d = std::max(d, directed_distance(g, bd2, D1, pts1));
    return d;
}

AugmentedDomain augment_domain(const Grid& g, const CellMask& omega,
                               const SurfacePatch& sigma, double r0) {
    if (r0 <= 0.0) throw ValidationError("augment_domain: r0 must be positive");
    const double h = g.h();
    const int depth = static_cast<int>(std::lround(r0 / h));
    if (depth < 1 || std::abs(depth * h - r0) > 1e-9)
        throw ValidationError("augment_domain: r0 must be an integer multiple of h");

    const int axis = sigma.axis;
    if (sigma.cols.empty()) throw ValidationError("augment_domain: empty sigma");

    // Sigma must sit on a flat side of omega: every sigma face is a boundary
    // face of omega with nothing on the outer side.
    for (int f = 0; f < sigma.nfaces(); ++f) {
        const Index3 c = sigma.cell(f);
        if (!g.valid(c.i, c.j, c.k) || !omega[g.lin(c)])
            throw ValidationError("augment_domain: sigma face not adjacent to the domain");
        int coords[3] = {c.i, c.j, c.k};
        coords[axis] += sigma.side;
        if (g.valid(coords[0], coords[1], coords[2]) &&
            omega[g.lin(coords[0], coords[1], coords[2])])
            throw ValidationError("augment_domain: sigma is not flat");
    }

    // Connectivity of sigma as a face set (4-neighborhood in the plane).
    {
        const int n = sigma.nfaces();
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const auto ab = sigma.cols[stack.back()];
            stack.pop_back();
            const std::array<std::array<int, 2>, 4> nb{{{ab[0] - 1, ab[1]},
                                                        {ab[0] + 1, ab[1]},
                                                        {ab[0], ab[1] - 1},
                                                        {ab[0], ab[1] + 1}}};
            for (const auto& q : nb) {
                const auto it = std::lower_bound(sigma.cols.begin(), sigma.cols.end(), q);
                if (it != sigma.cols.end() && *it == q) {
                    const int idx = static_cast<int>(it - sigma.cols.begin());
                    if (!seen[idx]) {
                        seen[idx] = 1;
                        ++count;
                        stack.push_back(idx);
                    }
                }
            }
        }
        if (count != n) throw ValidationError("augment_domain: sigma is not connected");
    }

    // Sigma must keep a margin from the side's edges (flatness margin).
    const int ta = (axis == 0) ? 1 : 0;
    const int tb = (axis == 2) ? 1 : 2;
    for (const auto& ab : sigma.cols) {
        if (ab[0] <= 0 || ab[0] >= g.dims()[ta] - 1 || ab[1] <= 0 || ab[1] >= g.dims()[tb] - 1)
            throw ValidationError("augment_domain: sigma touches a box edge");
    }

    // Footprint of D0: sigma eroded by one cell ring, so closure(footprint)
    // stays inside sigma.
    SurfacePatch foot = sigma;
    foot.cols.clear();
    for (const auto& ab : sigma.cols) {
        bool inner = true;
        for (int da = -1; da <= 1 && inner; ++da)
            for (int db = -1; db <= 1 && inner; ++db)
                if (!sigma.contains_col(ab[0] + da, ab[1] + db)) inner = false;
        if (inner) foot.cols.push_back(ab);
    }
    if (foot.cols.empty())
        throw ValidationError("augment_domain: sigma too small to host the attached box");

    AugmentedDomain dom;
    dom.grid = g;
    dom.omega = omega;
    dom.sigma = sigma;

    // Columns of depth `depth` on the outer side of the footprint.
    CellMask d0(g.ncells());
    for (int f = 0; f < foot.nfaces(); ++f) {
        const Index3 c = foot.cell(f);
        int coords[3] = {c.i, c.j, c.k};
        for (int l = 1; l <= depth; ++l) {
            coords[axis] = (axis == 0 ? c.i : (axis == 1 ? c.j : c.k)) + sigma.side * l;
            if (!g.valid(coords[0], coords[1], coords[2]))
                throw ValidationError("augment_domain: attached box exits the grid");
            const int cc = g.lin(coords[0], coords[1], coords[2]);
            if (omega[cc]) throw ValidationError("augment_domain: attached box meets the domain");
            d0.set(cc);
        }
    }
    dom.d0 = d0;

    dom.omega0 = CellMask(g.ncells());
    for (int c = 0; c < g.ncells(); ++c)
        if (omega[c] || d0[c]) dom.omega0.set(c);

    dom.sigma0 = foot;
    dom.sigma0.slab = sigma.slab + sigma.side * depth;

    std::string why;
    if (!dom.check_invariants(&why)) throw ValidationError("augment_domain: " + why);
    return dom;
}

bool AugmentedDomain::check_invariants(std::string* why) const {
    auto fail = [&](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    for (int c = 0; c < grid.ncells(); ++c) {
        if (d0[c] && omega[c]) return fail("d0 overlaps omega");
        if (omega0[c] != (omega[c] || d0[c])) return fail("omega0 is not the union");
    }
    // The glued interface (faces between d0 and omega) must lie strictly
    // inside sigma.
    for (int c = 0; c < grid.ncells(); ++c) {
        if (!d0[c]) continue;
        for (int dir = 0; dir < 6; ++dir) {
            const int n = grid.neighbor(c, dir);
            if (n < 0 || !omega[n]) continue;
            const Index3 nc = grid.unlin(n);
            int coords[3] = {nc.i, nc.j, nc.k};
            const int ta = (sigma.axis == 0) ? 1 : 0;
            const int tb = (sigma.axis == 2) ? 1 : 2;
            bool inside = sigma.contains_col(coords[ta], coords[tb]);
            for (int da = -1; da <= 1 && inside; ++da)
                for (int db = -1; db <= 1 && inside; ++db)
                    if (!sigma.contains_col(coords[ta] + da, coords[tb] + db)) inside = false;
            if (!inside) return fail("interface not compactly contained in sigma");
        }
    }
    // Sigma0 faces must not touch the boundary of omega.
    for (int f = 0; f < sigma0.nfaces(); ++f) {
        const Index3 c = sigma0.cell(f);
        if (!d0[grid.lin(c)]) return fail("sigma0 face not on d0");
        int coords[3] = {c.i, c.j, c.k};
        coords[sigma0.axis] += sigma0.side;
        if (grid.valid(coords[0], coords[1], coords[2]) &&
            omega[grid.lin(coords[0], coords[1], coords[2])])
            return fail("sigma0 touches the domain boundary");
    }
    return true;
}

}  // namespace incdet
