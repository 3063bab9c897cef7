#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "incdet/cauchy.hpp"
#include "incdet/solver.hpp"
#include "test_helpers.hpp"

using namespace incdet;
using incdet::testing::BoxScene;
using incdet::testing::CubeScene;

namespace {

MediumField cube_medium(const CubeScene& s, const ScalarField& a, const ScalarField& q,
                        const Mat3& A = Mat3::identity()) {
    BackgroundSpec bg{a, q, constant_tensor(A)};
    InclusionParams inc{[a](const Vec3& p) { return a(p) + 1.0; }, q};
    MediumBounds bounds;
    bounds.gamma_bar = 64.0;
    bounds.lambda_bar = 64.0;
    return build_medium(s.grid, s.all, CellMask(s.grid.ncells()), bg, inc,
                        CellMask(s.grid.ncells()), bounds);
}

// Inverse power iteration for the smallest eigenvalue of the (real) operator.
double smallest_eigenvalue(const DiscreteOperator& op, int iters = 60) {
    const int n = op.nunknowns();
    Eigen::VectorXcd x = Eigen::VectorXcd::Ones(n);
    x.normalize();
    for (int it = 0; it < iters; ++it) {
        const ComplexField f = op.solve(x);
        x = op.restrict_field(f);
        x.normalize();
    }
    const Eigen::VectorXcd mx = op.matrix() * x;
    return (x.dot(mx)).real();  // Rayleigh quotient
}

}  // namespace

TEST_CASE("assembly: standard 7-point stencil for the Laplacian") {
    const CubeScene s = CubeScene::make(8);
    const MediumField m = cube_medium(s, constant_field(1.0), constant_field(0.0));
    const DiscreteOperator op(s.grid, s.all, m, BoundarySpec{});
    const double inv_h2 = 64.0;

    const int c = s.grid.lin(4, 4, 4);  // interior cell
    const int e = op.eq_of_cell(c);
    CHECK(op.matrix().coeff(e, e) == cdouble{6.0 * inv_h2, 0.0});
    for (int dir = 0; dir < 6; ++dir) {
        const int nb = s.grid.neighbor(c, dir);
        CHECK(op.matrix().coeff(e, op.eq_of_cell(nb)) == cdouble{-inv_h2, 0.0});
    }

    SUBCASE("interior row sums vanish for q = 0 (discrete divergence)") {
        Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(op.nunknowns());
        const Eigen::VectorXcd r = op.matrix() * ones;
        // rows of cells with no boundary face are exactly zero
        for (int cc = 0; cc < s.grid.ncells(); ++cc) {
            const Index3 id = s.grid.unlin(cc);
            const bool interior = id.i > 0 && id.i < 7 && id.j > 0 && id.j < 7 && id.k > 0 &&
                                  id.k < 7;
            if (interior) CHECK(std::abs(r[op.eq_of_cell(cc)]) < 1e-10);
        }
    }
}

TEST_CASE("assembly: anisotropic diagonal tensor scales the stencil") {
    const CubeScene s = CubeScene::make(8);
    const MediumField m =
        cube_medium(s, constant_field(1.0), constant_field(0.0), Mat3::diag(1, 1, 4));
    const DiscreteOperator op(s.grid, s.all, m, BoundarySpec{});
    const int c = s.grid.lin(4, 4, 4);
    const int e = op.eq_of_cell(c);
    const double wx = -op.matrix().coeff(e, op.eq_of_cell(s.grid.neighbor(c, 1))).real();
    const double wz = -op.matrix().coeff(e, op.eq_of_cell(s.grid.neighbor(c, 5))).real();
    CHECK(wz == doctest::Approx(4.0 * wx).epsilon(1e-14));
    // hand-assembled row: diagonal collects (1+1+1+1+4+4)/h^2
    CHECK(op.matrix().coeff(e, e).real() == doctest::Approx((4.0 + 8.0) * 64.0));
}

TEST_CASE("assembly: complex symmetric with impedance faces") {
    const BoxScene s = BoxScene::make(16);
    const MediumField m = incdet::testing::ball_medium(s, {0.5, 0.5, 0.5}, 0.2, 2.0, 0.5);
    BoundarySpec bc;
    bc.impedance.push_back(s.dom.sigma0);
    const DiscreteOperator op(s.dom.grid, s.dom.omega0, m, bc);
    CHECK(op.symmetry_defect() <= 1e-12);

    // impedance faces contribute +i/h to the boundary-cell diagonal
    const Index3 bc_cell = s.dom.sigma0.cell(0);
    const int e = op.eq_of_cell(s.grid.lin(bc_cell));
    CHECK(op.matrix().coeff(e, e).imag() == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("assembly: off-diagonal tensor keeps the matrix symmetric") {
    const CubeScene s = CubeScene::make(8);
    Mat3 A = Mat3::identity();
    A(0, 1) = A(1, 0) = 0.4;
    A(1, 2) = A(2, 1) = -0.2;
    const MediumField m =
        cube_medium(s, [](const Vec3& p) { return 1.0 + 0.3 * p.x; }, constant_field(0.0), A);
    const DiscreteOperator op(s.grid, s.all, m, BoundarySpec{});
    CHECK(op.symmetry_defect() <= 1e-12);
}

TEST_CASE("solve: zero data gives the zero solution") {
    const CubeScene s = CubeScene::make(8);
    const MediumField m = cube_medium(s, constant_field(1.0), constant_field(0.0));
    const DiscreteOperator op(s.grid, s.all, m, BoundarySpec{});
    const ComplexField u = op.solve(op.zero_rhs());
    for (int c = 0; c < s.grid.ncells(); ++c) CHECK(std::abs(u.v[c]) == 0.0);
}

TEST_CASE("solve: linear Dirichlet data reproduced exactly") {
    const CubeScene s = CubeScene::make(12);
    const MediumField m = cube_medium(s, constant_field(1.0), constant_field(0.0));
    const DiscreteOperator op(s.grid, s.all, m, BoundarySpec{});
    auto rhs = op.zero_rhs();
    op.add_dirichlet_data(rhs, [&](int cell, int dir) -> cdouble {
        Vec3 p = s.grid.center(cell);
        p[Grid::dir_axis(dir)] += 0.5 * Grid::dir_sign(dir) * s.grid.h();
        return p.x;
    });
    const ComplexField u = op.solve(rhs);
    for (int c = 0; c < s.grid.ncells(); ++c)
        CHECK(std::abs(u.v[c] - s.grid.center(c).x) < 1e-9);
}

TEST_CASE("solve: eigenvalue regime raises a numerical error, impedance survives") {
    const CubeScene s = CubeScene::make(16);
    const MediumField free_medium = cube_medium(s, constant_field(1.0), constant_field(0.0));
    const DiscreteOperator laplace(s.grid, s.all, free_medium, BoundarySpec{});
    const double lambda = smallest_eigenvalue(laplace);
    CHECK(lambda == doctest::Approx(3.0 * kPi * kPi).epsilon(0.02));

    SUBCASE("dense eigensolve cross-check at 8^3") {
        const CubeScene s8 = CubeScene::make(8);
        const MediumField m8 = cube_medium(s8, constant_field(1.0), constant_field(0.0));
        const DiscreteOperator op8(s8.grid, s8.all, m8, BoundarySpec{});
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(op8.nunknowns(), op8.nunknowns());
        for (int k = 0; k < op8.matrix().outerSize(); ++k)
            for (DiscreteOperator::SpMat::InnerIterator it(op8.matrix(), k); it; ++it)
                dense(it.row(), it.col()) = it.value().real();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
        const double l8 = smallest_eigenvalue(op8);
        CHECK(l8 == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-8));
    }

    SUBCASE("Dirichlet problem at the eigenvalue breaks down") {
        const MediumField sing = cube_medium(s, constant_field(1.0), constant_field(lambda));
        const DiscreteOperator op(s.grid, s.all, sing, BoundarySpec{});
        auto rhs = op.zero_rhs();
        op.add_dirac(rhs, s.grid.lin(8, 8, 8));
        CHECK_THROWS_AS(op.solve(rhs), NumericalError);
    }

    SUBCASE("impedance system with the same q solves fine") {
        const BoxScene b = BoxScene::make(16);
        BackgroundSpec bg{constant_field(1.0), constant_field(lambda),
                          constant_tensor(Mat3::identity())};
        InclusionParams inc{constant_field(2.0), constant_field(lambda)};
        MediumBounds bounds;
        bounds.gamma_bar = 2.0 * lambda;
        const MediumField m =
            build_medium(b.dom, bg, inc, CellMask(b.grid.ncells()), bounds);
        BoundarySpec bc;
        bc.impedance.push_back(b.dom.sigma0);
        const DiscreteOperator op(b.grid, b.dom.omega0, m, bc);
        auto rhs = op.zero_rhs();
        op.add_dirac(rhs, b.grid.lin(8, 8, 8));
        ComplexField u;
        CHECK_NOTHROW(u = op.solve(rhs));
        CHECK(op.last_stats().rel_residual <= 1e-9);
    }
}

TEST_CASE("solve_dirichlet: forward problem on the body") {
    const BoxScene s = BoxScene::make(12);
    const MediumField bg = incdet::testing::homogeneous_medium(s);
    const DiscreteOperator op(s.grid, s.dom.omega, bg, BoundarySpec{});

    SUBCASE("zero trace gives zero") {
        std::vector<cdouble> zero(s.sigma.nfaces(), cdouble{0, 0});
        const ComplexField u = solve_dirichlet(op, s.sigma, zero);
        for (int c = 0; c < s.grid.ncells(); ++c) CHECK(std::abs(u.v[c]) == 0.0);
    }

    SUBCASE("bump data: maximum principle and dense-solve oracle") {
        const auto basis = bump_basis(s.sigma, s.grid);
        const ComplexField u = solve_dirichlet(op, s.sigma, basis[0]);

        double interior_max = 0.0, trace_max = 0.0;
        for (int c = 0; c < s.grid.ncells(); ++c)
            if (s.dom.omega[c]) interior_max = std::max(interior_max, std::abs(u.v[c]));
        for (const auto& v : basis[0]) trace_max = std::max(trace_max, std::abs(v));
        CHECK(interior_max <= trace_max * (1.0 + 1e-9));

        // dense LU on the same matrix reproduces the sparse solution
        auto rhs = op.zero_rhs();
        {
            // rebuild the rhs the same way solve_dirichlet does
            const int dir = s.sigma.dir();
            op.add_dirichlet_data(rhs, [&](int cell, int d) -> cdouble {
                if (d != dir) return {0, 0};
                const Index3 id = s.grid.unlin(cell);
                if (id.k != s.sigma.slab) return {0, 0};
                for (int f = 0; f < s.sigma.nfaces(); ++f)
                    if (s.sigma.cols[f][0] == id.i && s.sigma.cols[f][1] == id.j)
                        return basis[0][f];
                return {0, 0};
            });
        }
        Eigen::MatrixXcd dense = Eigen::MatrixXcd(op.matrix());
        Eigen::VectorXcd ud = dense.partialPivLu().solve(rhs);
        double diff = 0.0;
        for (int e = 0; e < op.nunknowns(); ++e)
            diff = std::max(diff, std::abs(ud[e] - u.v[op.cell_of_eq(e)]));
        CHECK(diff < 1e-9);
    }

    SUBCASE("inclusion perturbs the boundary flux") {
        const MediumField with_ball = incdet::testing::ball_medium(s, {0.5, 0.5, 0.45}, 0.2);
        const DiscreteOperator op2(s.grid, s.dom.omega, with_ball, BoundarySpec{});
        const auto basis = bump_basis(s.sigma, s.grid);
        const ComplexField u1 = solve_dirichlet(op, s.sigma, basis[0]);
        const ComplexField u2 = solve_dirichlet(op2, s.sigma, basis[0]);
        const CauchyPair p1 = cauchy_pair(u1, bg, s.dom.omega, s.sigma);
        const CauchyPair p2 = cauchy_pair(u2, with_ball, s.dom.omega, s.sigma);
        double diff = 0.0, scale = 0.0;
        for (int f = 0; f < s.sigma.nfaces(); ++f) {
            diff = std::max(diff, std::abs(p1.flux[f] - p2.flux[f]));
            scale = std::max(scale, std::abs(p1.flux[f]));
        }
        CHECK(diff > 1e-4 * scale);
    }
}

TEST_CASE("cauchy_pair extraction") {
    const BoxScene s = BoxScene::make(16);
    const MediumField m = incdet::testing::homogeneous_medium(s);

    SUBCASE("linear field: unit conormal flux") {
        ComplexField u(s.grid);
        for (int c = 0; c < s.grid.ncells(); ++c) u.v[c] = s.grid.center(c).z;
        const CauchyPair p = cauchy_pair(u, m, s.dom.omega, s.sigma);
        for (int f = 0; f < s.sigma.nfaces(); ++f) {
            CHECK(p.flux[f].real() == doctest::Approx(-1.0).epsilon(1e-12));  // nu = -e_z
            CHECK(p.trace[f].real() == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
    SUBCASE("constant field: zero flux") {
        ComplexField u(s.grid);
        for (int c = 0; c < s.grid.ncells(); ++c) u.v[c] = cdouble{3.25, -1.0};
        const CauchyPair p = cauchy_pair(u, m, s.dom.omega, s.sigma);
        for (int f = 0; f < s.sigma.nfaces(); ++f) {
            CHECK(std::abs(p.flux[f]) < 1e-12);
            CHECK(p.trace[f] == cdouble{3.25, -1.0});
        }
    }
    SUBCASE("quadratic field: one-sided second order is exact") {
        ComplexField u(s.grid);
        for (int c = 0; c < s.grid.ncells(); ++c) {
            const double z = s.grid.center(c).z;
            u.v[c] = z * z;
        }
        const CauchyPair p = cauchy_pair(u, m, s.dom.omega, s.sigma);
        // at z = 0 with nu = -e_z: flux = -(2 z)|_0 = 0; trace = 0
        for (int f = 0; f < s.sigma.nfaces(); ++f)
            CHECK(std::abs(p.flux[f]) < 1e-10);
    }
}

TEST_CASE("manufactured solution: second-order convergence") {
    auto exact = [](const Vec3& p) {
        return std::sin(kPi * p.x) * std::sin(kPi * p.y) * std::sin(kPi * p.z);
    };
    auto coeff = [](const Vec3& p) { return 1.0 + 0.5 * p.x * p.y * p.z; };
    const double q0 = 0.3;
    // F = div(a grad u) + q u = a lap(u) + grad(a) . grad(u) + q u
    auto source = [&](const Vec3& p) {
        const double sx = std::sin(kPi * p.x), sy = std::sin(kPi * p.y), sz = std::sin(kPi * p.z);
        const double cx = std::cos(kPi * p.x), cy = std::cos(kPi * p.y), cz = std::cos(kPi * p.z);
        const double u = sx * sy * sz;
        const double lap = -3.0 * kPi * kPi * u;
        const Vec3 gu{kPi * cx * sy * sz, kPi * sx * cy * sz, kPi * sx * sy * cz};
        const Vec3 ga{0.5 * p.y * p.z, 0.5 * p.x * p.z, 0.5 * p.x * p.y};
        return coeff(p) * lap + ga.dot(gu) + q0 * u;
    };

    auto max_error = [&](int res) {
        const CubeScene s = CubeScene::make(res);
        const MediumField m = cube_medium(s, coeff, constant_field(q0));
        const DiscreteOperator op(s.grid, s.all, m, BoundarySpec{});
        auto rhs = op.zero_rhs();
        op.add_volume_source(rhs, [&](int c) -> cdouble {
            return -source(s.grid.center(c));  // M u = -(div sigma grad + q) u = -F
        });
        op.add_dirichlet_data(rhs, [&](int cell, int dir) -> cdouble {
            Vec3 p = s.grid.center(cell);
            p[Grid::dir_axis(dir)] += 0.5 * Grid::dir_sign(dir) * s.grid.h();
            return exact(p);
        });
        const ComplexField u = op.solve(rhs);
        double err = 0.0;
        for (int c = 0; c < s.grid.ncells(); ++c)
            err = std::max(err, std::abs(u.v[c] - exact(s.grid.center(c))));
        return err;
    };

    const double e12 = max_error(12);
    const double e24 = max_error(24);
    CHECK(e12 / e24 >= 3.5);
}

TEST_CASE("discrete Green identity: antisymmetric boundary pairing vanishes") {
    // two fields under one operator: the difference of the two boundary
    // pairings equals the (zero) volume difference form, measured relative to
    // the pairing magnitudes
    const BoxScene s = BoxScene::make(24);
    const MediumField m = incdet::testing::ball_medium(s, {0.5, 0.5, 0.5}, 0.2, 2.0, 0.4);
    const DiscreteOperator op(s.grid, s.dom.omega, m, BoundarySpec{});
    const auto basis = bump_basis(s.sigma, s.grid);
    const ComplexField u = solve_dirichlet(op, s.sigma, basis[0]);
    const ComplexField v = solve_dirichlet(op, s.sigma, basis[5]);
    const CauchyPair pu = cauchy_pair(u, m, s.dom.omega, s.sigma);
    const CauchyPair pv = cauchy_pair(v, m, s.dom.omega, s.sigma);

    cdouble b1{0, 0}, b2{0, 0};
    for (int f = 0; f < s.sigma.nfaces(); ++f) {
        b1 += pu.flux[f] * pv.trace[f];
        b2 += pv.flux[f] * pu.trace[f];
    }
    CHECK(std::abs(b1 - b2) <= 5e-2 * std::max(std::abs(b1), std::abs(b2)));
}
