#ifndef INCDET_FUNCTIONALS_HPP
#define INCDET_FUNCTIONALS_HPP

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "incdet/cauchy.hpp"
#include "incdet/fundsol.hpp"
#include "incdet/green.hpp"
#include "incdet/numerics.hpp"

namespace incdet {

// Two media over one augmented domain, with shared Green factorizations,
// cached pole solves, and the forward (all-Dirichlet) operators for the
// Cauchy-data machinery. The caller owns the domain and the media.
class ConfigPair {
public:
    ConfigPair(const AugmentedDomain& dom, const MediumField& m1, const MediumField& m2,
               SolverOptions opts = {});

    const AugmentedDomain& dom() const { return *dom_; }
    const MediumField& m1() const { return *m1_; }
    const MediumField& m2() const { return *m2_; }
    GreenWorkspace& ws1() { return ws1_; }
    GreenWorkspace& ws2() { return ws2_; }

    // Reachability complement Omega_D = omega \ G for this inclusion pair.
    const CellMask& omega_d_mask();

    const GreenField& green1(const Vec3& y);
    const GreenField& green2(const Vec3& z);

    const DiscreteOperator& forward1();
    const DiscreteOperator& forward2();
    const TraceNormModel& norm_model();

    double aperture();  // Cauchy-data aperture on the shipped bump basis

private:
    const AugmentedDomain* dom_;
    const MediumField* m1_;
    const MediumField* m2_;
    SolverOptions opts_;
    GreenWorkspace ws1_;
    GreenWorkspace ws2_;
    std::optional<CellMask> omega_d_;
    std::map<int, GreenField> cache1_, cache2_;
    std::unique_ptr<DiscreteOperator> fwd1_, fwd2_;
    std::unique_ptr<TraceNormModel> norm_;
    std::optional<double> aperture_;
};

// Boundary form of the relative data: the measurement-face quadrature of
//   sigma1 grad G1 . nu  G2  -  sigma2 grad G2 . nu  G1
// using the discrete face fluxes and face-averaged traces, so the pairing is
// consistent with the assembled operators and vanishes at solver precision
// for identical media. Poles must lie in the attached box.
cdouble s_boundary(const GreenField& G1, const GreenField& G2, const MediumField& m1,
                   const MediumField& m2, const AugmentedDomain& dom);

// Volume form: cell quadrature over the body of
//   (sigma1 - sigma2) grad G1 . grad G2 + (q2 - q1) G1 G2
// with interface-aware gradients; the independent counterpart of s_boundary.
cdouble s_volume(const GreenField& G1, const GreenField& G2, const MediumField& m1,
                 const MediumField& m2, const AugmentedDomain& dom);
cdouble s_volume_serial(const GreenField& G1, const GreenField& G2, const MediumField& m1,
                        const MediumField& m2, const AugmentedDomain& dom);
cdouble s_volume_omp(const GreenField& G1, const GreenField& G2, const MediumField& m1,
                     const MediumField& m2, const AugmentedDomain& dom);

// Inclusion-wise split S_1 - S_2; equals s_volume by rearrangement. The
// 3h halos of both poles are excluded from the quadratures.
struct SplitS {
    cdouble s1{0.0, 0.0};
    cdouble s2{0.0, 0.0};
    cdouble f() const { return s1 - s2; }
};
SplitS f_split(ConfigPair& pair, const Vec3& y, const Vec3& z);
cdouble f_eval(ConfigPair& pair, const Vec3& y, const Vec3& z);

// Lattice of source poles inside a sub-box of the attached box.
struct PoleGrid {
    Box box;
    std::array<int, 3> counts{4, 4, 2};

    std::vector<Vec3> poles() const;
    double weight() const {  // midpoint weight per pole
        return box.extent(0) / counts[0] * box.extent(1) / counts[1] * box.extent(2) /
               counts[2];
    }
};

struct MisfitResult {
    double value = 0.0;
    std::vector<Vec3> poles_y, poles_z;
    Eigen::MatrixXcd S;  // S(y_i, z_j)
};

// Quadrature of |S(y,z)|^2 over the two disjoint pole grids.
MisfitResult misfit(ConfigPair& pair, const PoleGrid& dy, const PoleGrid& dz);

struct ProbeResult {
    Vec3 point{};      // boundary point O
    Vec3 normal{};     // outer unit normal of the inclusion at O
    std::vector<double> h;
    std::vector<cdouble> f;
    bool degenerate = false;  // |f| at noise level, no fit
    double slope = 0.0;       // log|f| vs log h over the smallest decade
    double fit_r2 = 0.0;
};

// Singular-sources scan: f(y_h, y_h) for poles y_h = O + h nu marching toward
// the inclusion boundary point O.
ProbeResult probe_scan(ConfigPair& pair, const Vec3& O, const Vec3& nu,
                       std::vector<double> h_values);

// Best log-modulus fit: scans eta over {0.1, ..., 1.0} and reports the eta
// maximizing the correlation of `dh` against |log s|^{-eta}.
struct LogModulusFit {
    double eta = 0.0;
    double corr = 0.0;
};
LogModulusFit fit_log_modulus(const std::vector<double>& dh, const std::vector<double>& s);

}  // namespace incdet

#endif  // INCDET_FUNCTIONALS_HPP
