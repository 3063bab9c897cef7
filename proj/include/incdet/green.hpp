#ifndef INCDET_GREEN_HPP
#define INCDET_GREEN_HPP

#include <vector>

#include "incdet/cauchy.hpp"
#include "incdet/solver.hpp"

namespace incdet {

enum class GreenRoute { Direct, Recursive };

struct GreenField {
    Vec3 pole{};
    int pole_cell = -1;
    GreenRoute route = GreenRoute::Direct;
    ComplexField values;
};

// Holds the impedance operators for one medium on the augmented domain:
// Dirichlet zero on the outer boundary except the impedance condition on the
// far face of the attached box. One factorization is reused across poles.
class GreenWorkspace {
public:
    GreenWorkspace(const AugmentedDomain& dom, const MediumField& medium,
                   SolverOptions opts = {});

    const AugmentedDomain& domain() const { return *dom_; }
    const MediumField& medium() const { return *medium_; }
    const DiscreteOperator& op() const { return op_; }
    // Same problem with the zero-order term removed everywhere.
    const DiscreteOperator& op_no_q() const;

private:
    const AugmentedDomain* dom_;
    const MediumField* medium_;
    MediumField medium_no_q_;
    DiscreteOperator op_;
    mutable std::unique_ptr<DiscreteOperator> op0_;
    SolverOptions opts_;
};

// Direct route: impedance solve with a discrete Dirac at the pole. The pole
// must be at least two cells away from every boundary of the augmented set.
GreenField green_direct(const GreenWorkspace& ws, const Vec3& y);

// Recursive route: q = 0 solve, then midpoint quadrature of the kernel
// recursion realized through the equivalent superposition solves (the cell
// quadrature with weight h^3 against the discrete kernel is algebraically a
// solve of the q = 0 operator). Cells within 3h of the pole are excluded from
// the quadrature because the discrete delta contaminates them. The final
// correction solves the full operator.
GreenField green_recursive(const GreenWorkspace& ws, const Vec3& y);

// Max relative asymmetry |G(x,y) - G(y,x)| / max(|G(x,y)|, 1e-14) over all
// ordered pole pairs. Poles must be pairwise at least 5h apart.
double check_symmetry(const GreenWorkspace& ws, const std::vector<Vec3>& poles);

// Dirac solve with Dirichlet data from `data` on every outer face: the
// whole-space surrogate used to compare against free-space kernels without
// boundary contamination. The operator must be all-Dirichlet.
GreenField green_with_boundary_data(const DiscreteOperator& op, const Vec3& y,
                                    const std::function<cdouble(const Vec3&)>& data);

// Per-cell gradient by centered differences inside the mask, one-sided at
// its boundary.
std::vector<ComplexVec3> gradient(const ComplexField& f, const CellMask& mask);
std::vector<ComplexVec3> gradient_serial(const ComplexField& f, const CellMask& mask);
std::vector<ComplexVec3> gradient_omp(const ComplexField& f, const CellMask& mask);

// Gradient at one cell with stencils that never cross the boundary of
// `region` (the mask the cell belongs to, or its complement); used by the
// volume quadratures where fields kink across an inclusion interface.
ComplexVec3 gradient_in_region(const ComplexField& f, const CellMask& active,
                               const CellMask& region, int cell);

}  // namespace incdet

#endif  // INCDET_GREEN_HPP
