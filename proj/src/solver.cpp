#include "incdet/solver.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

namespace incdet {

namespace {

// face key for impedance lookup
inline std::int64_t face_key(int cell, int dir) { return static_cast<std::int64_t>(cell) * 6 + dir; }

}  // namespace

struct DiscreteOperator::Factorization {
    bool direct = false;
    Eigen::SparseLU<SpMat> lu;
    Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<cdouble>> krylov;
    double cond_estimate = 0.0;
};

DiscreteOperator::DiscreteOperator(const Grid& g, const CellMask& active,
                                   const MediumField& medium, const BoundarySpec& bc,
                                   SolverOptions opts)
    : grid_(&g), active_(active), medium_(&medium), opts_(opts) {
    cell_to_eq_.assign(g.ncells(), -1);
    for (int c = 0; c < g.ncells(); ++c) {
        if (active_[c]) {
            cell_to_eq_[c] = n_++;
            eq_to_cell_.push_back(c);
        }
    }
    if (n_ == 0) throw ValidationError("operator: empty active set");
    assemble(bc);
}

void DiscreteOperator::assemble(const BoundarySpec& bc) {
    const Grid& g = *grid_;
    const double h = g.h();
    const double inv_h2 = 1.0 / (h * h);

    std::unordered_set<std::int64_t> impedance_faces;
    for (const auto& patch : bc.impedance) {
        for (int f = 0; f < patch.nfaces(); ++f) {
            const Index3 c = patch.cell(f);
            if (!g.valid(c.i, c.j, c.k) || !active_[g.lin(c)])
                throw ValidationError("operator: impedance face not on an active cell");
            impedance_faces.insert(face_key(g.lin(c), patch.dir()));
        }
    }

    std::vector<Eigen::Triplet<cdouble>> trip;
    trip.reserve(static_cast<size_t>(n_) * 8);

    for (int e = 0; e < n_; ++e) {
        const int c = eq_to_cell_[e];
        cdouble diag{0.0, 0.0};
        for (int dir = 0; dir < 6; ++dir) {
            const int axis = Grid::dir_axis(dir);
            const int nb = g.neighbor(c, dir);
            if (nb >= 0 && active_[nb]) {
                const double w = medium_->face_sigma_normal(c, nb, axis) * inv_h2;
                diag += w;
                trip.emplace_back(e, cell_to_eq_[nb], cdouble{-w, 0.0});
            } else if (impedance_faces.count(face_key(c, dir))) {
                diag += cdouble{0.0, 1.0 / h};
            } else {
                const double coef = 2.0 * medium_->sigma_normal(c, axis) * inv_h2;
                diag += coef;
                dirichlet_.push_back({c, dir, coef});
            }
        }
        diag -= medium_->effective_q(c);
        trip.emplace_back(e, e, diag);
    }

    // Cross-derivative couplings from off-diagonal tensor entries,
    // D_a^T diag(sigma_ab) D_b with centered differences; stencils that would
    // leave the active set are dropped.
    const double inv_4h2 = 1.0 / (4.0 * h * h);
    for (int e = 0; e < n_; ++e) {
        const int c = eq_to_cell_[e];
        const Mat3 sig = medium_->effective_sigma(c);
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                if (a == b || sig(a, b) == 0.0) continue;
                int na[2], nb[2];
                na[0] = g.neighbor(c, 2 * a);
                na[1] = g.neighbor(c, 2 * a + 1);
                nb[0] = g.neighbor(c, 2 * b);
                nb[1] = g.neighbor(c, 2 * b + 1);
                bool ok = true;
                for (int s = 0; s < 2 && ok; ++s)
                    ok = na[s] >= 0 && active_[na[s]] && nb[s] >= 0 && active_[nb[s]];
                if (!ok) continue;
                for (int sa = 0; sa < 2; ++sa) {
                    for (int sb = 0; sb < 2; ++sb) {
                        const double sgn = (sa == sb) ? 1.0 : -1.0;
                        trip.emplace_back(cell_to_eq_[na[sa]], cell_to_eq_[nb[sb]],
                                          cdouble{sgn * sig(a, b) * inv_4h2, 0.0});
                    }
                }
            }
        }
    }

    M_.resize(n_, n_);
    M_.setFromTriplets(trip.begin(), trip.end());
    M_.makeCompressed();

    const double defect = symmetry_defect();
    if (defect > 1e-12)
        throw NumericalError("operator: assembled matrix is not complex symmetric");
}

double DiscreteOperator::symmetry_defect() const {
    SpMat Mt = SpMat(M_.transpose());
    double num = 0.0, den = 0.0;
    for (int k = 0; k < M_.outerSize(); ++k) {
        SpMat::InnerIterator it(M_, k), jt(Mt, k);
        for (; it; ++it, ++jt) {
            num = std::max(num, std::abs(it.value() - jt.value()));
            den = std::max(den, std::abs(it.value()));
        }
    }
    return den > 0.0 ? num / den : 0.0;
}

void DiscreteOperator::add_dirac(Vector& rhs, int cell) const {
    const int e = cell_to_eq_[cell];
    if (e < 0) throw ValidationError("add_dirac: pole cell is not active");
    const double h = grid_->h();
    rhs[e] += 1.0 / (h * h * h);
}

void DiscreteOperator::add_volume_source(Vector& rhs, const std::function<cdouble(int)>& f) const {
    for (int e = 0; e < n_; ++e) rhs[e] += f(eq_to_cell_[e]);
}

void DiscreteOperator::add_dirichlet_data(Vector& rhs,
                                          const std::function<cdouble(int, int)>& g) const {
    for (const auto& df : dirichlet_) {
        const cdouble val = g(df.cell, df.dir);
        if (val != cdouble{0.0, 0.0}) rhs[cell_to_eq_[df.cell]] += df.coef * val;
    }
}

void DiscreteOperator::factorize() const {
    auto fact = std::make_shared<Factorization>();
    fact->direct = n_ <= opts_.direct_max_unknowns;
    if (fact->direct) {
        fact->lu.compute(M_);
        if (fact->lu.info() != Eigen::Success)
            throw NumericalError(
                "solver: factorization breakdown (eigenvalue regime for Dirichlet problems)");
        // Condition probe: a solve with a fixed vector; a blow-up beyond
        // 1/pivot_threshold marks the system as numerically singular.
        Vector probe = Vector::Ones(n_);
        for (int i = 0; i < n_; i += 2) probe[i] = cdouble{-1.0, 0.0};
        Vector z = fact->lu.solve(probe);
        double mnorm = 0.0;
        for (int k = 0; k < M_.outerSize(); ++k) {
            double rowsum = 0.0;
            for (SpMat::InnerIterator it(M_, k); it; ++it) rowsum += std::abs(it.value());
            mnorm = std::max(mnorm, rowsum);
        }
        fact->cond_estimate = mnorm * z.template lpNorm<Eigen::Infinity>() /
                              probe.template lpNorm<Eigen::Infinity>();
        if (!std::isfinite(fact->cond_estimate) ||
            fact->cond_estimate > 1.0 / opts_.pivot_threshold)
            throw NumericalError(
                "solver: near-singular system (eigenvalue regime); condition estimate " +
                std::to_string(fact->cond_estimate));
    } else {
        fact->krylov.preconditioner().setDroptol(opts_.ilut_drop_tol);
        fact->krylov.preconditioner().setFillfactor(opts_.ilut_fill);
        fact->krylov.setTolerance(opts_.residual_tol * 0.1);
        fact->krylov.setMaxIterations(opts_.max_iterations);
        fact->krylov.compute(M_);
        if (fact->krylov.info() != Eigen::Success)
            throw NumericalError("solver: preconditioner setup failed");
    }
    fact_ = fact;
}

ComplexField DiscreteOperator::solve(const Vector& rhs) const {
    if (!fact_) factorize();
    Vector u;
    if (fact_->direct) {
        u = fact_->lu.solve(rhs);
        stats_.iterations = 0;
    } else {
        u = fact_->krylov.solve(rhs);
        stats_.iterations = static_cast<int>(fact_->krylov.iterations());
    }
    stats_.direct = fact_->direct;
    stats_.cond_estimate = fact_->cond_estimate;
    const double bnorm = rhs.norm();
    stats_.rel_residual = bnorm > 0.0 ? (M_ * u - rhs).norm() / bnorm : (M_ * u).norm();
    if (!std::isfinite(stats_.rel_residual) || stats_.rel_residual > opts_.residual_tol)
        throw NumericalError("solver: residual contract violated, rel residual " +
                             std::to_string(stats_.rel_residual));
    return expand(u);
}

std::vector<ComplexField> DiscreteOperator::solve_many(const std::vector<Vector>& rhs) const {
    std::vector<ComplexField> out;
    out.reserve(rhs.size());
    for (const auto& b : rhs) out.push_back(solve(b));
    return out;
}

ComplexField DiscreteOperator::expand(const Vector& u) const {
    ComplexField f(*grid_);
    for (int e = 0; e < n_; ++e) f.v[eq_to_cell_[e]] = u[e];
    return f;
}

DiscreteOperator::Vector DiscreteOperator::restrict_field(const ComplexField& f) const {
    Vector u(n_);
    for (int e = 0; e < n_; ++e) u[e] = f.v[eq_to_cell_[e]];
    return u;
}

ComplexField solve_dirichlet(const DiscreteOperator& op, const SurfacePatch& sigma,
                             const std::vector<cdouble>& trace) {
    if (static_cast<int>(trace.size()) != sigma.nfaces())
        throw ValidationError("solve_dirichlet: trace size does not match sigma");
    const Grid& g = op.grid();
    const int dir = sigma.dir();
    const int ta = (sigma.axis == 0) ? 1 : 0;
    const int tb = (sigma.axis == 2) ? 1 : 2;

    auto rhs = op.zero_rhs();
    op.add_dirichlet_data(rhs, [&](int cell, int d) -> cdouble {
        if (d != dir) return {0.0, 0.0};
        const Index3 c = g.unlin(cell);
        int coords[3] = {c.i, c.j, c.k};
        if (coords[sigma.axis] != sigma.slab) return {0.0, 0.0};
        const std::array<int, 2> key{coords[ta], coords[tb]};
        const auto it = std::lower_bound(sigma.cols.begin(), sigma.cols.end(), key);
        if (it == sigma.cols.end() || *it != key) return {0.0, 0.0};
        return trace[static_cast<int>(it - sigma.cols.begin())];
    });
    return op.solve(rhs);
}

}  // namespace incdet
