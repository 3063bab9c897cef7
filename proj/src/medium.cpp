#include "incdet/medium.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace incdet {

std::pair<double, double> sym_eig_range(const Mat3& A) {
    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = A(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M, Eigen::EigenvaluesOnly);
    return {es.eigenvalues()(0), es.eigenvalues()(2)};
}

Mat3 MediumField::effective_sigma(int cell) const {
    if (in_d0(cell)) return Mat3::identity();
    const double a = chi_[cell] ? a_d_[cell] : a_b_[cell];
    return A_[cell] * a;
}

double MediumField::effective_q(int cell) const {
    if (zero_q_) return 0.0;
    if (in_d0(cell)) return 1.0;
    return chi_[cell] ? q_d_[cell] : q_b_[cell];
}

MediumField MediumField::zero_q_copy() const {
    MediumField m = *this;
    m.zero_q_ = true;
    return m;
}

double MediumField::sigma_normal(int cell, int axis) const {
    if (in_d0(cell)) return 1.0;
    const double a = chi_[cell] ? a_d_[cell] : a_b_[cell];
    return a * A_[cell](axis, axis);
}

double MediumField::face_sigma_normal(int c0, int c1, int axis) const {
    const double s0 = sigma_normal(c0, axis);
    const double s1 = sigma_normal(c1, axis);
    return 2.0 * s0 * s1 / (s0 + s1);
}

MediumField build_medium(const Grid& g, const CellMask& active, const CellMask& d0,
                         const BackgroundSpec& bg, const InclusionParams& inc,
                         const CellMask& chi_d, const MediumBounds& bounds) {
    if (bounds.gamma_bar <= 1.0)
        throw ValidationError("medium: gamma_bar must exceed 1");
    if (bounds.eta0 <= 0.0) throw ValidationError("medium: eta0 must be positive");
    if (bounds.lambda_bar <= 1.0)
        throw ValidationError("medium: lambda_bar must exceed 1");

    MediumField m;
    m.grid_ = &g;
    m.active_ = active;
    m.d0_ = d0;
    m.chi_ = chi_d.cells.empty() ? CellMask(g.ncells()) : chi_d;
    m.bounds_ = bounds;
    const int n = g.ncells();
    m.a_b_.assign(n, 1.0);
    m.a_d_.assign(n, 1.0);
    m.q_b_.assign(n, 0.0);
    m.q_d_.assign(n, 0.0);
    m.A_.assign(n, Mat3::identity());

    auto cell_str = [&](int c) {
        const Index3 id = g.unlin(c);
        return "cell (" + std::to_string(id.i) + "," + std::to_string(id.j) + "," +
               std::to_string(id.k) + ")";
    };

    for (int c = 0; c < n; ++c) {
        if (!active[c]) continue;
        if (m.in_d0(c)) continue;  // overridden to sigma = I, q = 1
        const Vec3 p = g.center(c);
        m.a_b_[c] = bg.a_b(p);
        m.a_d_[c] = inc.a_D(p);
        m.q_b_[c] = bg.q_b(p);
        m.q_d_[c] = inc.q_D(p);
        m.A_[c] = bg.A(p);

        if (m.A_[c].max_asym() != 0.0)
            throw ValidationError("medium: tensor A not symmetric at " + cell_str(c));
        const double gb = bounds.gamma_bar;
        if (m.a_b_[c] < 1.0 / gb || m.a_b_[c] > gb || m.a_d_[c] < 1.0 / gb || m.a_d_[c] > gb)
            throw ValidationError("medium: scalar coefficient outside [1/gamma,gamma] at " +
                                  cell_str(c));
        const double jump = m.a_d_[c] - m.a_b_[c];
        if (jump * jump < bounds.eta0 * bounds.eta0)
            throw ValidationError("medium: coefficient jump below eta0 at " + cell_str(c));
        if (std::abs(m.effective_q(c)) > gb)
            throw ValidationError("medium: |q| exceeds gamma_bar at " + cell_str(c));

        const auto [lo, hi] = sym_eig_range(m.effective_sigma(c));
        if (lo < 1.0 / bounds.lambda_bar - 1e-12 || hi > bounds.lambda_bar + 1e-12)
            throw ValidationError("medium: ellipticity bound violated at " + cell_str(c));
    }
    return m;
}

MediumField build_medium(const AugmentedDomain& dom, const BackgroundSpec& bg,
                         const InclusionParams& inc, const CellMask& chi_d,
                         const MediumBounds& bounds) {
    return build_medium(dom.grid, dom.omega0, dom.d0, bg, inc, chi_d, bounds);
}

}  // namespace incdet
