#include "incdet/cauchy.hpp"

#include <algorithm>
#include <cmath>

namespace incdet {

namespace {

// One-sided second-order derivative along the outward normal at the face,
// from up to three cells inside the body; degrades to first order when the
// body is too thin.
cdouble outward_derivative(int n_avail, const cdouble* vals, double h) {
    if (n_avail >= 3) return (2.0 * vals[0] - 3.0 * vals[1] + vals[2]) / h;
    if (n_avail == 2) return (vals[0] - vals[1]) / h;
    return cdouble{0.0, 0.0};
}

}  // namespace

CauchyPair cauchy_pair(const ComplexField& u, const MediumField& medium,
                       const CellMask& body, const SurfacePatch& sigma) {
    const Grid& g = u.grid ? *u.grid : medium.grid();
    const double h = g.h();
    CauchyPair out;
    out.trace.resize(sigma.nfaces());
    out.flux.resize(sigma.nfaces());

    const int axis = sigma.axis;
    const int inward_dir = 2 * axis + (sigma.side > 0 ? 0 : 1);  // opposite of the outward side

    for (int f = 0; f < sigma.nfaces(); ++f) {
        const Index3 ci = sigma.cell(f);
        const int c0 = g.lin(ci);
        const int c1 = g.neighbor(c0, inward_dir);
        const int c2 = (c1 >= 0) ? g.neighbor(c1, inward_dir) : -1;
        const bool has1 = c1 >= 0 && body[c1];
        const bool has2 = has1 && c2 >= 0 && body[c2];

        cdouble vals[3] = {u.v[c0], has1 ? u.v[c1] : cdouble{0, 0}, has2 ? u.v[c2] : cdouble{0, 0}};
        out.trace[f] = has1 ? (3.0 * vals[0] - vals[1]) * 0.5 : vals[0];

        const Mat3 sig = medium.effective_sigma(c0);
        cdouble flux = sig(axis, axis) * outward_derivative(has2 ? 3 : (has1 ? 2 : 1), vals, h);

        // Tangential contributions of the conormal for full tensors, from
        // centered differences in the boundary cell layer.
        for (int b = 0; b < 3; ++b) {
            if (b == axis || sig(axis, b) == 0.0) continue;
            const int pb = g.neighbor(c0, 2 * b + 1);
            const int mb = g.neighbor(c0, 2 * b);
            if (pb >= 0 && body[pb] && mb >= 0 && body[mb]) {
                const cdouble du = (u.v[pb] - u.v[mb]) / (2.0 * h);
                flux += static_cast<double>(sigma.side) * sig(axis, b) * du;
            }
        }
        out.flux[f] = flux;
    }
    return out;
}

TraceNormModel::TraceNormModel(const SurfacePatch& sigma, double face_area) {
    const int n = sigma.nfaces();
    if (n == 0) throw ValidationError("norm model: empty measurement patch");
    scale_ = std::sqrt(face_area);

    // 4-neighbor graph Laplacian of the face lattice.
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (int f = 0; f < n; ++f) {
        const auto& ab = sigma.cols[f];
        const std::array<std::array<int, 2>, 4> nb{{{ab[0] - 1, ab[1]},
                                                    {ab[0] + 1, ab[1]},
                                                    {ab[0], ab[1] - 1},
                                                    {ab[0], ab[1] + 1}}};
        for (const auto& q : nb) {
            const auto it = std::lower_bound(sigma.cols.begin(), sigma.cols.end(), q);
            if (it != sigma.cols.end() && *it == q) {
                const int j = static_cast<int>(it - sigma.cols.begin());
                L(f, f) += 1.0;
                L(f, j) -= 1.0;
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    const Eigen::VectorXd mu = es.eigenvalues();
    const Eigen::MatrixXd& U = es.eigenvectors();
    Eigen::VectorXd wp(n), wm(n);
    for (int k = 0; k < n; ++k) {
        wp[k] = std::pow(1.0 + std::max(mu[k], 0.0), 0.25);
        wm[k] = 1.0 / wp[k];
    }
    wplus_ = U * wp.asDiagonal() * U.transpose();
    wminus_ = U * wm.asDiagonal() * U.transpose();
}

namespace {
Eigen::VectorXcd to_vec(const std::vector<cdouble>& v) {
    Eigen::VectorXcd x(static_cast<int>(v.size()));
    for (int i = 0; i < x.size(); ++i) x[i] = v[i];
    return x;
}
}  // namespace

double TraceNormModel::trace_norm(const std::vector<cdouble>& f) const {
    return scale_ * (wplus_ * to_vec(f)).norm();
}

double TraceNormModel::flux_norm(const std::vector<cdouble>& g) const {
    return scale_ * (wminus_ * to_vec(g)).norm();
}

double TraceNormModel::pair_norm(const CauchyPair& p) const {
    const double tf = trace_norm(p.trace);
    const double gf = flux_norm(p.flux);
    return std::sqrt(tf * tf + gf * gf);
}

Eigen::VectorXcd TraceNormModel::embed(const CauchyPair& p) const {
    const int n = nfaces();
    Eigen::VectorXcd col(2 * n);
    col.head(n) = scale_ * (wplus_ * to_vec(p.trace));
    col.tail(n) = scale_ * (wminus_ * to_vec(p.flux));
    return col;
}

CauchyDataSet CauchyDataSet::build(const DiscreteOperator& forward_op, const SurfacePatch& sigma,
                                   const std::vector<std::vector<cdouble>>& basis_traces,
                                   const TraceNormModel& norm) {
    if (basis_traces.size() < 8)
        throw ValidationError("cauchy set: basis must contain at least 8 inputs");
    CauchyDataSet set;
    set.norm = &norm;
    set.columns.resize(2 * sigma.nfaces(), static_cast<int>(basis_traces.size()));
    int k = 0;
    for (const auto& f : basis_traces) {
        const ComplexField u = solve_dirichlet(forward_op, sigma, f);
        CauchyPair pair = cauchy_pair(u, forward_op.medium(), forward_op.active(), sigma);
        set.columns.col(k++) = norm.embed(pair);
        set.pairs.push_back(std::move(pair));
    }
    return set;
}

namespace {

// Thin orthonormal basis of the column span; rank decided at tol relative to
// the largest pivot.
Eigen::MatrixXcd orthonormal_basis(const Eigen::MatrixXcd& A, double tol, int* rank_out) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(A);
    qr.setThreshold(tol);
    const int r = static_cast<int>(qr.rank());
    if (rank_out) *rank_out = r;
    Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(A.rows(), r);
    return Q;
}

double largest_singular_value(const Eigen::MatrixXcd& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
    return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

}  // namespace

ApertureResult subspace_aperture(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                 double rank_tol) {
    if (A.rows() != B.rows()) throw ValidationError("aperture: dimension mismatch");
    int ra = 0, rb = 0;
    const Eigen::MatrixXcd Qa = orthonormal_basis(A, rank_tol, &ra);
    const Eigen::MatrixXcd Qb = orthonormal_basis(B, rank_tol, &rb);
    ApertureResult res;
    res.d_ab = std::min(1.0, largest_singular_value(Qb - Qa * (Qa.adjoint() * Qb)));
    res.d_ba = std::min(1.0, largest_singular_value(Qa - Qb * (Qb.adjoint() * Qa)));
    return res;
}

double cauchy_aperture(const CauchyDataSet& a, const CauchyDataSet& b) {
    if (a.columns.rows() != b.columns.rows())
        throw ValidationError("aperture: sets do not share the face enumeration");
    int ra = 0, rb = 0;
    (void)orthonormal_basis(a.columns, 1e-10, &ra);
    (void)orthonormal_basis(b.columns, 1e-10, &rb);
    if (ra < a.columns.cols() || rb < b.columns.cols())
        throw ValidationError("aperture: rank-deficient basis");
    return subspace_aperture(a.columns, b.columns).value();
}

std::vector<std::vector<cdouble>> bump_basis(const SurfacePatch& sigma, const Grid& g) {
    (void)g;
    int a0 = sigma.cols.front()[0], a1 = a0, b0 = sigma.cols.front()[1], b1 = b0;
    for (const auto& ab : sigma.cols) {
        a0 = std::min(a0, ab[0]);
        a1 = std::max(a1, ab[0]);
        b0 = std::min(b0, ab[1]);
        b1 = std::max(b1, ab[1]);
    }
    const double la = a1 - a0 + 1.0, lb = b1 - b0 + 1.0;

    auto bump = [](double t) {
        if (std::abs(t) >= 1.0) return 0.0;
        const double c = std::cos(0.5 * kPi * t);
        return c * c;
    };

    struct Spec {
        double ca, cb, wa, wb;
    };
    std::vector<Spec> specs;
    // coarse scale: 2 x 2
    for (int ia = 0; ia < 2; ++ia)
        for (int ib = 0; ib < 2; ++ib)
            specs.push_back({a0 + (0.25 + 0.5 * ia) * la, b0 + (0.25 + 0.5 * ib) * lb,
                             0.45 * la, 0.45 * lb});
    // fine scale: 4 x 3
    for (int ia = 0; ia < 4; ++ia)
        for (int ib = 0; ib < 3; ++ib)
            specs.push_back({a0 + (0.125 + 0.25 * ia) * la, b0 + (1.0 / 6.0 + ib / 3.0) * lb,
                             0.19 * la, 0.26 * lb});

    std::vector<std::vector<cdouble>> basis;
    for (const auto& s : specs) {
        std::vector<cdouble> f(sigma.nfaces());
        for (int k = 0; k < sigma.nfaces(); ++k) {
            const auto& ab = sigma.cols[k];
            f[k] = bump((ab[0] + 0.5 - s.ca) / s.wa) * bump((ab[1] + 0.5 - s.cb) / s.wb);
        }
        basis.push_back(std::move(f));
    }
    return basis;
}

}  // namespace incdet
