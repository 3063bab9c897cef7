#ifndef INCDET_CAUCHY_HPP
#define INCDET_CAUCHY_HPP

#include <Eigen/Dense>

#include <vector>

#include "incdet/solver.hpp"

namespace incdet {

// Trace and conormal flux sampled on the measurement faces, in the patch's
// face enumeration order. The trace is the boundary-cell value extrapolated
// to the face; the flux is the conormal derivative sigma grad u . nu from a
// one-sided second-order difference into the body.
struct CauchyPair {
    std::vector<cdouble> trace;
    std::vector<cdouble> flux;
};

CauchyPair cauchy_pair(const ComplexField& u, const MediumField& medium,
                       const CellMask& body, const SurfacePatch& sigma);

// Discrete H^{1/2} / H^{-1/2} surrogate: weights (1 + mu_k)^{+-1/2} in the
// eigenbasis of the 4-neighbor graph Laplacian of the measurement face
// lattice. Wplus / Wminus are the symmetric square roots of the weighting,
// so weighted Euclidean norms realize the trace norms.
class TraceNormModel {
public:
    explicit TraceNormModel(const SurfacePatch& sigma, double face_area);

    int nfaces() const { return static_cast<int>(wplus_.rows()); }
    const Eigen::MatrixXd& wplus() const { return wplus_; }
    const Eigen::MatrixXd& wminus() const { return wminus_; }

    double trace_norm(const std::vector<cdouble>& f) const;   // H^{1/2}
    double flux_norm(const std::vector<cdouble>& g) const;    // H^{-1/2}
    double pair_norm(const CauchyPair& p) const;

    // Column embedding [W+ f ; W- g] used by the aperture computation.
    Eigen::VectorXcd embed(const CauchyPair& p) const;

private:
    Eigen::MatrixXd wplus_, wminus_;
    double scale_;  // sqrt(face area)
};

// Local Cauchy data sampled on a fixed basis of boundary inputs.
struct CauchyDataSet {
    const TraceNormModel* norm = nullptr;
    std::vector<CauchyPair> pairs;
    Eigen::MatrixXcd columns;  // embedded pairs, one column per basis input

    static CauchyDataSet build(const DiscreteOperator& forward_op, const SurfacePatch& sigma,
                               const std::vector<std::vector<cdouble>>& basis_traces,
                               const TraceNormModel& norm);
};

// Aperture (gap) between the column spans: the operator norms of
// (I - P_A) P_B and (I - P_B) P_A; the overall distance is their max, which
// equals the sine of the largest principal angle when below 1.
struct ApertureResult {
    double d_ab = 0.0;
    double d_ba = 0.0;
    double value() const { return std::max(d_ab, d_ba); }
};

ApertureResult subspace_aperture(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                 double rank_tol = 1e-10);

double cauchy_aperture(const CauchyDataSet& a, const CauchyDataSet& b);

// Tensor-product bump traces on the measurement patch at two scales
// (4 coarse + 12 fine = 16 inputs), deterministic.
std::vector<std::vector<cdouble>> bump_basis(const SurfacePatch& sigma, const Grid& g);

}  // namespace incdet

#endif  // INCDET_CAUCHY_HPP
