#include "incdet/green.hpp"

#include <cmath>

#include "incdet/parallel.hpp"

namespace incdet {

namespace {

constexpr int kDimension = 3;
constexpr int kRecursionDepth = (kDimension - 1) / 2;  // J

BoundarySpec augmented_bc(const AugmentedDomain& dom) {
    BoundarySpec bc;
    bc.impedance.push_back(dom.sigma0);
    return bc;
}

void validate_pole(const Grid& g, const CellMask& active, int pole_cell) {
    const Index3 p = g.unlin(pole_cell);
    const double h = g.h();
    const int r = 2;
    for (int di = -r; di <= r; ++di)
        for (int dj = -r; dj <= r; ++dj)
            for (int dk = -r; dk <= r; ++dk) {
                const Vec3 off{di * h, dj * h, dk * h};
                if (off.norm() > 2.0 * h + 1e-12) continue;
                const int i = p.i + di, j = p.j + dj, k = p.k + dk;
                if (!g.valid(i, j, k) || !active[g.lin(i, j, k)])
                    throw ValidationError(
                        "green: pole closer than two cells to the domain boundary");
            }
}

}  // namespace

GreenWorkspace::GreenWorkspace(const AugmentedDomain& dom, const MediumField& medium,
                               SolverOptions opts)
    : dom_(&dom),
      medium_(&medium),
      medium_no_q_(medium.zero_q_copy()),
      op_(dom.grid, dom.omega0, medium, augmented_bc(dom), opts),
      opts_(opts) {}

const DiscreteOperator& GreenWorkspace::op_no_q() const {
    if (!op0_) {
        op0_ = std::make_unique<DiscreteOperator>(dom_->grid, dom_->omega0, medium_no_q_,
                                                  augmented_bc(*dom_), opts_);
    }
    return *op0_;
}

GreenField green_direct(const GreenWorkspace& ws, const Vec3& y) {
    const Grid& g = ws.domain().grid;
    const int pole_cell = g.nearest_cell(y);
    if (!ws.domain().omega0[pole_cell])
        throw ValidationError("green: pole outside the augmented domain");
    validate_pole(g, ws.domain().omega0, pole_cell);

    auto rhs = ws.op().zero_rhs();
    ws.op().add_dirac(rhs, pole_cell);
    GreenField out;
    out.pole = y;
    out.pole_cell = pole_cell;
    out.route = GreenRoute::Direct;
    out.values = ws.op().solve(rhs);
    return out;
}

GreenField green_recursive(const GreenWorkspace& ws, const Vec3& y) {
    const Grid& g = ws.domain().grid;
    const int pole_cell = g.nearest_cell(y);
    if (!ws.domain().omega0[pole_cell])
        throw ValidationError("green: pole outside the augmented domain");
    validate_pole(g, ws.domain().omega0, pole_cell);

    const DiscreteOperator& op0 = ws.op_no_q();
    const MediumField& med = ws.medium();
    const double h = g.h();
    const Vec3 pole_center = g.center(pole_cell);

    auto rhs = op0.zero_rhs();
    op0.add_dirac(rhs, pole_cell);
    ComplexField g_tilde = op0.solve(rhs);

    ComplexField total = g_tilde;
    ComplexField prev = g_tilde;
    // R_1 .. R_J: quadrature of the recursion against the q = 0 kernel, with
    // the contaminated pole halo (|x - y| < 3h) dropped for j = 1.
    for (int j = 1; j <= kRecursionDepth; ++j) {
        auto rj_rhs = op0.zero_rhs();
        bool nonzero = false;
        op0.add_volume_source(rj_rhs, [&](int c) -> cdouble {
            const double q = med.effective_q(c);
            if (q == 0.0) return {0.0, 0.0};
            if (j == 1 && (g.center(c) - pole_center).norm() < 3.0 * h - 1e-12) return {0.0, 0.0};
            nonzero = true;
            return q * prev.v[c];
        });
        ComplexField rj(g);
        if (nonzero) rj = op0.solve(rj_rhs);
        for (int c = 0; c < g.ncells(); ++c) total.v[c] += rj.v[c];
        prev = rj;
    }
    // R_{J+1}: full operator with q, source -q R_J.
    {
        auto rhs2 = ws.op().zero_rhs();
        bool nonzero = false;
        ws.op().add_volume_source(rhs2, [&](int c) -> cdouble {
            const double q = med.effective_q(c);
            if (q == 0.0) return {0.0, 0.0};
            nonzero = true;
            return q * prev.v[c];
        });
        if (nonzero) {
            const ComplexField r_last = ws.op().solve(rhs2);
            for (int c = 0; c < g.ncells(); ++c) total.v[c] += r_last.v[c];
        }
    }

    GreenField out;
    out.pole = y;
    out.pole_cell = pole_cell;
    out.route = GreenRoute::Recursive;
    out.values = total;
    return out;
}

GreenField green_with_boundary_data(const DiscreteOperator& op, const Vec3& y,
                                    const std::function<cdouble(const Vec3&)>& data) {
    const Grid& g = op.grid();
    const int pole_cell = g.nearest_cell(y);
    auto rhs = op.zero_rhs();
    op.add_dirac(rhs, pole_cell);
    op.add_dirichlet_data(rhs, [&](int cell, int dir) -> cdouble {
        Vec3 p = g.center(cell);
        p[Grid::dir_axis(dir)] += 0.5 * Grid::dir_sign(dir) * g.h();
        return data(p);
    });
    GreenField out;
    out.pole = y;
    out.pole_cell = pole_cell;
    out.route = GreenRoute::Direct;
    out.values = op.solve(rhs);
    return out;
}

double check_symmetry(const GreenWorkspace& ws, const std::vector<Vec3>& poles) {
    if (poles.size() < 2) throw ValidationError("check_symmetry: need at least 2 poles");
    const Grid& g = ws.domain().grid;
    const double h = g.h();
    for (size_t i = 0; i < poles.size(); ++i)
        for (size_t j = i + 1; j < poles.size(); ++j)
            if ((poles[i] - poles[j]).norm() < 5.0 * h)
                throw ValidationError("check_symmetry: poles closer than 5h");

    std::vector<GreenField> fields;
    fields.reserve(poles.size());
    for (const Vec3& y : poles) fields.push_back(green_direct(ws, y));

    double worst = 0.0;
    for (size_t i = 0; i < poles.size(); ++i) {
        for (size_t j = 0; j < poles.size(); ++j) {
            if (i == j) continue;
            const cdouble gij = fields[i].values.v[fields[j].pole_cell];
            const cdouble gji = fields[j].values.v[fields[i].pole_cell];
            worst = std::max(worst, std::abs(gij - gji) / std::max(std::abs(gij), 1e-14));
        }
    }
    return worst;
}

namespace {

ComplexVec3 gradient_at(const ComplexField& f, const CellMask& mask, const Grid& g, int c) {
    const double h = g.h();
    ComplexVec3 grad;
    for (int axis = 0; axis < 3; ++axis) {
        const int p = g.neighbor(c, 2 * axis + 1);
        const int m = g.neighbor(c, 2 * axis);
        const bool hp = p >= 0 && mask[p];
        const bool hm = m >= 0 && mask[m];
        if (hp && hm) {
            grad[axis] = (f.v[p] - f.v[m]) / (2.0 * h);
        } else if (hp) {
            const int pp = g.neighbor(p, 2 * axis + 1);
            if (pp >= 0 && mask[pp])
                grad[axis] = (-3.0 * f.v[c] + 4.0 * f.v[p] - f.v[pp]) / (2.0 * h);
            else
                grad[axis] = (f.v[p] - f.v[c]) / h;
        } else if (hm) {
            const int mm = g.neighbor(m, 2 * axis);
            if (mm >= 0 && mask[mm])
                grad[axis] = (3.0 * f.v[c] - 4.0 * f.v[m] + f.v[mm]) / (2.0 * h);
            else
                grad[axis] = (f.v[c] - f.v[m]) / h;
        }
    }
    return grad;
}

}  // namespace

std::vector<ComplexVec3> gradient_serial(const ComplexField& f, const CellMask& mask) {
    const Grid& g = *f.grid;
    std::vector<ComplexVec3> out(g.ncells());
    for (int c = 0; c < g.ncells(); ++c)
        if (mask[c]) out[c] = gradient_at(f, mask, g, c);
    return out;
}

std::vector<ComplexVec3> gradient_omp(const ComplexField& f, const CellMask& mask) {
    const Grid& g = *f.grid;
    std::vector<ComplexVec3> out(g.ncells());
    const int n = g.ncells();
#pragma omp parallel for schedule(static)
    for (int c = 0; c < n; ++c)
        if (mask[c]) out[c] = gradient_at(f, mask, g, c);
    return out;
}

std::vector<ComplexVec3> gradient(const ComplexField& f, const CellMask& mask) {
    return threads() > 1 ? gradient_omp(f, mask) : gradient_serial(f, mask);
}

ComplexVec3 gradient_in_region(const ComplexField& f, const CellMask& active,
                               const CellMask& region, int cell) {
    const Grid& g = *f.grid;
    const double h = g.h();
    const bool side = region[cell];
    auto usable = [&](int c) { return c >= 0 && active[c] && region[c] == side; };

    ComplexVec3 grad;
    for (int axis = 0; axis < 3; ++axis) {
        const int p = g.neighbor(cell, 2 * axis + 1);
        const int m = g.neighbor(cell, 2 * axis);
        const bool hp = usable(p);
        const bool hm = usable(m);
        if (hp && hm) {
            grad[axis] = (f.v[p] - f.v[m]) / (2.0 * h);
        } else if (hp) {
            const int pp = g.neighbor(p, 2 * axis + 1);
            grad[axis] = usable(pp)
                             ? (-3.0 * f.v[cell] + 4.0 * f.v[p] - f.v[pp]) / (2.0 * h)
                             : (f.v[p] - f.v[cell]) / h;
        } else if (hm) {
            const int mm = g.neighbor(m, 2 * axis);
            grad[axis] = usable(mm)
                             ? (3.0 * f.v[cell] - 4.0 * f.v[m] + f.v[mm]) / (2.0 * h)
                             : (f.v[cell] - f.v[m]) / h;
        }
    }
    return grad;
}

}  // namespace incdet
