#ifndef INCDET_FUNDSOL_HPP
#define INCDET_FUNDSOL_HPP

#include <utility>
#include <vector>

#include "incdet/green.hpp"
#include "incdet/numerics.hpp"

namespace incdet {

// Explicit fundamental solution of div(sigma0 grad H) = -delta for the flat
// two-phase medium sigma0 = (a_minus + (a_plus - a_minus) chi_{z>0}) A0.
// A0 must be symmetric positive definite with e_z as an eigenvector, so the
// image point z -> -z is an isometry of |J .|, which makes the three-case
// formula continuous across the interface.
struct LayeredKernel {
    double a_plus = 2.0;   // coefficient on z > 0
    double a_minus = 1.0;  // coefficient on z < 0
    Mat3 A0 = Mat3::identity();
    Mat3 J = Mat3::identity();  // inverse square root of A0
    double detJ = 1.0;

    static LayeredKernel make(double a_plus, double a_minus, const Mat3& A0);
};

// c3 / |J (x - y)| with c3 = 1/(4 pi): the n = 3 Laplace kernel composed with
// the linear map J.
double gamma_aniso(const Vec3& x, const Vec3& y, const Mat3& J);

double layered_H(const Vec3& x, const Vec3& y, const LayeredKernel& k);
Vec3 layered_H_grad(const Vec3& x, const Vec3& y, const LayeredKernel& k);

// Conormal flux a(x_z) (A0 grad H) . e_z, the quantity continuous across the
// interface.
double layered_H_conormal(const Vec3& x, const Vec3& y, const LayeredKernel& k);

struct TransmissionMismatch {
    double value_rel = 0.0;
    double flux_rel = 0.0;
};

// One-sided limits of H and of the conormal flux at z -> 0 from both sides,
// computed by quadratic extrapolation at offsets {step, 2 step, 3 step};
// returns max relative mismatches over the tangential probe points.
TransmissionMismatch transmission_check(const LayeredKernel& k, const Vec3& y,
                                        const std::vector<std::array<double, 2>>& probes,
                                        double step = 1e-3);

enum class ResidualQuantity { Value, Gradient };

// Log-log fit of |G - H| (or |grad G - grad H|) against |x - y| over the
// radial window [rmin, rmax]; cells within `margin_cells` of the mask
// boundary are skipped. The window must span at least half a decade.
LineFit fit_residual_exponent(const GreenField& G, const CellMask& mask,
                              const LayeredKernel& k, double rmin, double rmax,
                              ResidualQuantity what, int margin_cells = 1);

}  // namespace incdet

#endif  // INCDET_FUNDSOL_HPP
