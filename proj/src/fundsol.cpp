#include "incdet/fundsol.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace incdet {

namespace {

constexpr double kC3 = 1.0 / (4.0 * kPi);

Vec3 image(const Vec3& y) { return {y.x, y.y, -y.z}; }

// grad_x Gamma(Jx, Jy) = -c3 A0^{-1} (x - y) / |J(x-y)|^3, using J^T J = A0^{-1}.
Vec3 gamma_grad(const Vec3& x, const Vec3& y, const Mat3& J) {
    const Vec3 d = x - y;
    const Vec3 jd = J.apply(d);
    const double r = jd.norm();
    if (r == 0.0) throw ValidationError("gamma_aniso: coincident points");
    const Vec3 jtjd = J.apply(jd);  // J symmetric
    return jtjd * (-kC3 / (r * r * r));
}

}  // namespace

double gamma_aniso(const Vec3& x, const Vec3& y, const Mat3& J) {
    const double r = (J.apply(x - y)).norm();
    if (r == 0.0) throw ValidationError("gamma_aniso: coincident points");
    return kC3 / r;
}

LayeredKernel LayeredKernel::make(double a_plus, double a_minus, const Mat3& A0) {
    if (a_plus <= 0.0 || a_minus <= 0.0)
        throw ValidationError("layered kernel: phase coefficients must be positive");
    if (A0.max_asym() != 0.0) throw ValidationError("layered kernel: A0 must be symmetric");
    if (A0(2, 0) != 0.0 || A0(2, 1) != 0.0)
        throw ValidationError("layered kernel: e_z must be an eigenvector of A0");

    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) M(i, j) = A0(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
    if (es.eigenvalues()(0) <= 0.0)
        throw ValidationError("layered kernel: A0 must be positive definite");
    const Eigen::Matrix3d Jm =
        es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
        es.eigenvectors().transpose();

    LayeredKernel k;
    k.a_plus = a_plus;
    k.a_minus = a_minus;
    k.A0 = A0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) k.J(i, j) = Jm(i, j);
    k.detJ = Jm.determinant();

    const Eigen::Matrix3d check = Jm * Jm * M - Eigen::Matrix3d::Identity();
    if (check.cwiseAbs().maxCoeff() > 1e-12)
        throw NumericalError("layered kernel: J*J does not match inverse(A0)");
    return k;
}

double layered_H(const Vec3& x, const Vec3& y, const LayeredKernel& k) {
    if (y.z == 0.0) throw ValidationError("layered_H: pole on the interface");
    const double ap = k.a_plus, am = k.a_minus;
    double v;
    if (x.z * y.z < 0.0 || x.z == 0.0) {
        v = 2.0 / (am + ap) * gamma_aniso(x, y, k.J);
    } else if (y.z > 0.0) {
        v = gamma_aniso(x, y, k.J) / ap +
            (ap - am) / (ap * (ap + am)) * gamma_aniso(x, image(y), k.J);
    } else {
        v = gamma_aniso(x, y, k.J) / am +
            (am - ap) / (am * (ap + am)) * gamma_aniso(x, image(y), k.J);
    }
    return k.detJ * v;
}

Vec3 layered_H_grad(const Vec3& x, const Vec3& y, const LayeredKernel& k) {
    if (y.z == 0.0) throw ValidationError("layered_H: pole on the interface");
    const double ap = k.a_plus, am = k.a_minus;
    Vec3 gr;
    if (x.z * y.z < 0.0 || x.z == 0.0) {
        gr = gamma_grad(x, y, k.J) * (2.0 / (am + ap));
    } else if (y.z > 0.0) {
        gr = gamma_grad(x, y, k.J) / ap +
             gamma_grad(x, image(y), k.J) * ((ap - am) / (ap * (ap + am)));
    } else {
        gr = gamma_grad(x, y, k.J) / am +
             gamma_grad(x, image(y), k.J) * ((am - ap) / (am * (ap + am)));
    }
    return gr * k.detJ;
}

double layered_H_conormal(const Vec3& x, const Vec3& y, const LayeredKernel& k) {
    const double a = (x.z > 0.0) ? k.a_plus : k.a_minus;
    const Vec3 g = layered_H_grad(x, y, k);
    const Vec3 cg = k.A0.apply(g);
    return a * cg.z;
}

TransmissionMismatch transmission_check(const LayeredKernel& k, const Vec3& y,
                                        const std::vector<std::array<double, 2>>& probes,
                                        double step) {
    if (y.z == 0.0) throw ValidationError("transmission_check: pole on the interface");
    TransmissionMismatch out;
    // quadratic extrapolation to t -> 0 from samples at t, 2t, 3t
    auto extrap = [](double f1, double f2, double f3) { return 3.0 * f1 - 3.0 * f2 + f3; };

    for (const auto& pr : probes) {
        auto at = [&](double z) { return Vec3{pr[0], pr[1], z}; };
        const double vp = extrap(layered_H(at(step), y, k), layered_H(at(2 * step), y, k),
                                 layered_H(at(3 * step), y, k));
        const double vm = extrap(layered_H(at(-step), y, k), layered_H(at(-2 * step), y, k),
                                 layered_H(at(-3 * step), y, k));
        const double fp =
            extrap(layered_H_conormal(at(step), y, k), layered_H_conormal(at(2 * step), y, k),
                   layered_H_conormal(at(3 * step), y, k));
        const double fm =
            extrap(layered_H_conormal(at(-step), y, k), layered_H_conormal(at(-2 * step), y, k),
                   layered_H_conormal(at(-3 * step), y, k));
        const double vref = std::max(std::abs(vp), std::abs(vm));
        const double fref = std::max(std::abs(fp), std::abs(fm));
        if (vref > 0.0) out.value_rel = std::max(out.value_rel, std::abs(vp - vm) / vref);
        if (fref > 0.0) out.flux_rel = std::max(out.flux_rel, std::abs(fp - fm) / fref);
    }
    return out;
}

LineFit fit_residual_exponent(const GreenField& G, const CellMask& mask, const LayeredKernel& k,
                              double rmin, double rmax, ResidualQuantity what,
                              int margin_cells) {
    if (rmin <= 0.0 || rmax <= rmin)
        throw ValidationError("fit_residual_exponent: bad radial window");
    if (rmax / rmin < std::sqrt(10.0))
        throw ValidationError("fit_residual_exponent: window narrower than half a decade");

    const Grid& g = *G.values.grid;
    const double h = g.h();

    std::vector<ComplexVec3> grad;
    if (what == ResidualQuantity::Gradient) grad = gradient(G.values, mask);

    auto interior = [&](int c) {
        const Index3 p = g.unlin(c);
        for (int di = -margin_cells; di <= margin_cells; ++di)
            for (int dj = -margin_cells; dj <= margin_cells; ++dj)
                for (int dk = -margin_cells; dk <= margin_cells; ++dk) {
                    const int i = p.i + di, j = p.j + dj, kk = p.k + dk;
                    if (!g.valid(i, j, kk) || !mask[g.lin(i, j, kk)]) return false;
                }
        return true;
    };

    std::vector<double> lx, ly;
    for (int c = 0; c < g.ncells(); ++c) {
        if (!mask[c] || !interior(c)) continue;
        const Vec3 x = g.center(c);
        const double r = (x - G.pole).norm();
        if (r < rmin || r > rmax) continue;
        if (std::abs(x.z) < 1.5 * h) continue;  // interface layer: H kinks there
        double resid;
        if (what == ResidualQuantity::Value) {
            resid = std::abs(G.values.v[c] - layered_H(x, G.pole, k));
        } else {
            const Vec3 gh = layered_H_grad(x, G.pole, k);
            const ComplexVec3& gg = grad[c];
            const double dx = std::abs(gg.x - gh.x);
            const double dy = std::abs(gg.y - gh.y);
            const double dz = std::abs(gg.z - gh.z);
            resid = std::sqrt(dx * dx + dy * dy + dz * dz);
        }
        if (resid <= 0.0) continue;
        lx.push_back(std::log(r));
        ly.push_back(std::log(resid));
    }
    if (lx.size() < 8) throw ValidationError("fit_residual_exponent: too few cells in window");
    return fit_line(lx, ly);
}

}  // namespace incdet
