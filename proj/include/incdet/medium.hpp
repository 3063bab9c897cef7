#ifndef INCDET_MEDIUM_HPP
#define INCDET_MEDIUM_HPP

#include <functional>
#include <vector>

#include "incdet/geometry.hpp"
#include "incdet/grid.hpp"

namespace incdet {

using ScalarField = std::function<double(const Vec3&)>;
using TensorField = std::function<Mat3(const Vec3&)>;

inline ScalarField constant_field(double v) {
    return [v](const Vec3&) { return v; };
}
inline TensorField constant_tensor(const Mat3& A) {
    return [A](const Vec3&) { return A; };
}

// A priori bounds the sampled coefficients are checked against.
struct MediumBounds {
    double gamma_bar = 4.0;   // scalar coefficient and q bound
    double eta0 = 0.5;        // lower bound on |a_D - a_b|
    double lambda_bar = 8.0;  // ellipticity bound for sigma
};

struct BackgroundSpec {
    ScalarField a_b = constant_field(1.0);
    ScalarField q_b = constant_field(0.0);
    TensorField A = constant_tensor(Mat3::identity());
};

struct InclusionParams {
    ScalarField a_D = constant_field(2.0);
    ScalarField q_D = constant_field(0.0);
};

// Piecewise coefficients sigma = (a_b + (a_D - a_b) chi_D) A and
// q = q_b + (q_D - q_b) chi_D, sampled at cell centers over the active set.
// Cells of the attached box d0 are overridden to sigma = I, q = 1.
class MediumField {
public:
    MediumField() = default;

    const Grid& grid() const { return *grid_; }
    const CellMask& active() const { return active_; }
    const CellMask& chi_d() const { return chi_; }
    const CellMask& d0() const { return d0_; }
    const MediumBounds& bounds() const { return bounds_; }

    bool in_d0(int cell) const { return !d0_.cells.empty() && d0_[cell]; }

    double a_b(int cell) const { return a_b_[cell]; }
    double a_d(int cell) const { return a_d_[cell]; }
    double q_b(int cell) const { return q_b_[cell]; }
    double q_d(int cell) const { return q_d_[cell]; }
    const Mat3& tensor_a(int cell) const { return A_[cell]; }

    // chi_D-selected blends, exact at cell centers.
    Mat3 effective_sigma(int cell) const;
    double effective_q(int cell) const;

    // Same sigma with the zero-order term removed everywhere (including the
    // attached-box override); used by the recursive Green construction.
    MediumField zero_q_copy() const;
    bool zero_q() const { return zero_q_; }

    // Normal-direction coefficient sigma_{aa} of a cell (used for face fluxes).
    double sigma_normal(int cell, int axis) const;
    // Harmonic mean of the normal coefficients across the face between two cells.
    double face_sigma_normal(int c0, int c1, int axis) const;

    friend MediumField build_medium(const Grid& g, const CellMask& active, const CellMask& d0,
                                    const BackgroundSpec& bg, const InclusionParams& inc,
                                    const CellMask& chi_d, const MediumBounds& bounds);

private:
    const Grid* grid_ = nullptr;
    CellMask active_;
    CellMask d0_;
    CellMask chi_;
    MediumBounds bounds_;
    bool zero_q_ = false;
    std::vector<double> a_b_, a_d_, q_b_, q_d_;
    std::vector<Mat3> A_;
};

// Samples the coefficient fields over `active` and validates every a priori
// bound at every active cell; violations are reported with the cell index.
MediumField build_medium(const Grid& g, const CellMask& active, const CellMask& d0,
                         const BackgroundSpec& bg, const InclusionParams& inc,
                         const CellMask& chi_d, const MediumBounds& bounds);

// Convenience builder on an augmented domain.
MediumField build_medium(const AugmentedDomain& dom, const BackgroundSpec& bg,
                         const InclusionParams& inc, const CellMask& chi_d,
                         const MediumBounds& bounds);

// Extremal eigenvalues of a symmetric 3x3 tensor.
std::pair<double, double> sym_eig_range(const Mat3& A);

}  // namespace incdet

#endif  // INCDET_MEDIUM_HPP
