#ifndef INCDET_GEOMETRY_HPP
#define INCDET_GEOMETRY_HPP

#include <vector>

#include "incdet/grid.hpp"

namespace incdet {

// Domain Omega with the external box D0 glued across the measurement patch
// Sigma, for hosting the impedance Green problems.
struct AugmentedDomain {
    Grid grid;
    CellMask omega;          // body cells
    CellMask d0;             // attached box cells, disjoint from omega
    CellMask omega0;         // interior of closure(omega union d0)
    SurfacePatch sigma;      // measurement faces on the boundary of omega
    SurfacePatch sigma0;     // impedance faces: far face of d0

    bool check_invariants(std::string* why = nullptr) const;
};

// Glues a box of depth r0 below `sigma` (the footprint is sigma eroded by one
// cell ring, so its closure stays inside sigma). sigma must be a flat patch on
// a box side of omega, not touching the side's edges; the box must fit inside
// the grid.
AugmentedDomain augment_domain(const Grid& g, const CellMask& omega,
                               const SurfacePatch& sigma, double r0);

// Hausdorff distance between two nonempty masks, evaluated over boundary-cell
// centers; error budget +-h.
double hausdorff_distance(const Grid& g, const CellMask& A, const CellMask& B);

// Modified distance: directed sups restricted to boundary points reachable
// from the boundary of omega, i.e. lying on the boundary of
// Omega_D = omega \ G where G is the connected component of
// omega \ (D1 u D2) whose boundary meets the boundary of omega.
double modified_distance(const Grid& g, const CellMask& D1, const CellMask& D2,
                         const CellMask& omega);

// Omega_D = omega minus the component of omega \ (D1 u D2) reachable from the
// boundary of omega. Throws if the inclusions swallow the whole domain.
CellMask omega_d(const Grid& g, const CellMask& D1, const CellMask& D2,
                 const CellMask& omega);

// Pairwise kernel behind the distances: max over `from` of the min distance
// to `to`. Serial reference and OpenMP variant; the dispatcher picks one from
// the configured thread count.
double max_min_distance_serial(const std::vector<Vec3>& from, const std::vector<Vec3>& to);
double max_min_distance_omp(const std::vector<Vec3>& from, const std::vector<Vec3>& to);
double max_min_distance(const std::vector<Vec3>& from, const std::vector<Vec3>& to);

}  // namespace incdet

#endif  // INCDET_GEOMETRY_HPP
