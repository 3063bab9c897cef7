#include <algorithm>
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "incdet/green.hpp"
#include "incdet/numerics.hpp"
#include "incdet/parallel.hpp"
#include "test_helpers.hpp"

using namespace incdet;
using incdet::testing::BoxScene;
using incdet::testing::CubeScene;

namespace {

double free_kernel(double r) { return 1.0 / (4.0 * kPi * r); }

// Whole-space surrogate on a centered cube: exact-kernel Dirichlet data.
GreenField surrogate(const CubeScene& s, const MediumField& m, const Vec3& pole) {
    const DiscreteOperator op(s.grid, s.all, m, BoundarySpec{});
    return green_with_boundary_data(op, pole, [&](const Vec3& p) {
        return cdouble{free_kernel((p - pole).norm()), 0.0};
    });
}

MediumField free_medium(const CubeScene& s, double q = 0.0) {
    BackgroundSpec bg{constant_field(1.0), constant_field(q),
                      constant_tensor(Mat3::identity())};
    InclusionParams inc{constant_field(2.0), constant_field(q)};
    MediumBounds bounds;
    bounds.gamma_bar = 4.0;
    return build_medium(s.grid, s.all, CellMask(s.grid.ncells()), bg, inc,
                        CellMask(s.grid.ncells()), bounds);
}

}  // namespace

TEST_CASE("green_direct approximates the free-space kernel") {
    const CubeScene s = CubeScene::make(32);
    const MediumField m = free_medium(s);
    const Vec3 pole{0.5, 0.5, 0.5};
    const GreenField G = surrogate(s, m, pole);
    const double h = s.grid.h();

    double worst_mid = 0.0;
    for (int c = 0; c < s.grid.ncells(); ++c) {
        const double r = (s.grid.center(c) - pole).norm();
        if (r < 3.0 * h || r > 0.4) continue;
        const double expect = free_kernel(r);
        worst_mid = std::max(worst_mid, std::abs(G.values.v[c].real() - expect) / expect);
    }
    CHECK(worst_mid < 0.10);

    SUBCASE("pole-cell value is finite (discrete regularization)") {
        CHECK(std::isfinite(std::abs(G.values.v[G.pole_cell])));
        CHECK(std::abs(G.values.v[G.pole_cell]) > 0.0);
    }
}

TEST_CASE("green_direct on the augmented domain: decay between distant poles") {
    const BoxScene s = BoxScene::make(24);
    const MediumField m = incdet::testing::ball_medium(s, {0.5, 0.5, 0.5}, 0.2);
    const GreenWorkspace ws(s.dom, m);

    const Vec3 y{0.3, 0.5, 0.25};
    const GreenField G = green_direct(ws, y);
    // |G(w,y)| should fall roughly like 1/|w-y| between two sample points
    const Vec3 w1{0.45, 0.5, 0.35};
    const Vec3 w2{0.7, 0.5, 0.6};
    const double g1 = std::abs(G.values.v[s.grid.nearest_cell(w1)]);
    const double g2 = std::abs(G.values.v[s.grid.nearest_cell(w2)]);
    CHECK(g1 > g2);

    SUBCASE("pole too close to the boundary is rejected") {
        CHECK_THROWS_AS(green_direct(ws, Vec3{0.03, 0.5, 0.5}), ValidationError);
    }
}

TEST_CASE("green bound certificate: sup |G| r finite and refinement-stable") {
    auto certificate = [](int res) {
        const BoxScene s = BoxScene::make(res);
        const MediumField m = incdet::testing::ball_medium(s, {0.5, 0.5, 0.5}, 0.2, 2.0, 0.5);
        const GreenWorkspace ws(s.dom, m);
        const Vec3 y{0.5, 0.5, 0.35};
        const GreenField G = green_direct(ws, y);
        double sup = 0.0;
        for (int c = 0; c < s.grid.ncells(); ++c) {
            if (!s.dom.omega0[c]) continue;
            const double r = (s.grid.center(c) - y).norm();
            if (r < 3.0 * s.grid.h()) continue;
            sup = std::max(sup, std::abs(G.values.v[c]) * r);
        }
        return sup;
    };
    const double c24 = certificate(24);
    const double c48 = certificate(48);
    CHECK(std::isfinite(c24));
    CHECK(std::abs(c48 - c24) / c24 < 0.25);
}

TEST_CASE("green_recursive: collapse at q = 0 and consistency for moderate q") {
    SUBCASE("q = 0: the recursion collapses to the q-free solve exactly") {
        const BoxScene s = BoxScene::make(16);
        const MediumField m = incdet::testing::ball_medium(s, {0.5, 0.5, 0.5}, 0.2, 2.0, 0.0);
        // zero-order term vanishes in the body but not in the attached box;
        // build a fully q-free medium to exercise the exact-collapse path
        const MediumField m0 = m.zero_q_copy();
        const GreenWorkspace ws(s.dom, m0);
        const Vec3 y{0.5, 0.5, 0.3};
        const GreenField gd = green_direct(ws, y);
        const GreenField gr = green_recursive(ws, y);
        double diff = 0.0;
        for (int c = 0; c < s.grid.ncells(); ++c)
            diff = std::max(diff, std::abs(gd.values.v[c] - gr.values.v[c]));
        CHECK(diff == 0.0);
    }

    SUBCASE("moderate q: within 5% of the direct route away from the pole") {
        const BoxScene s = BoxScene::make(24);
        const MediumField m =
            incdet::testing::ball_medium(s, {0.5, 0.5, 0.5}, 0.2, 2.0, 1.0, 1.0, 1.0);
        const GreenWorkspace ws(s.dom, m);
        const Vec3 y{0.5, 0.5, 0.3};
        const GreenField gd = green_direct(ws, y);
        const GreenField gr = green_recursive(ws, y);
        double num = 0.0, den = 0.0;
        for (int c = 0; c < s.grid.ncells(); ++c) {
            if (!s.dom.omega0[c]) continue;
            const double r = (s.grid.center(c) - y).norm();
            if (r < 0.2) continue;
            num = std::max(num, std::abs(gd.values.v[c] - gr.values.v[c]));
            den = std::max(den, std::abs(gd.values.v[c]));
        }
        CHECK(num / den < 0.05);
    }
}

TEST_CASE("green_recursive: consistency improves at least 1.8x per doubling") {
    auto max_diff = [](int res) {
        const BoxScene s = BoxScene::make(res);
        const MediumField m =
            incdet::testing::ball_medium(s, {0.5, 0.5, 0.5}, 0.2, 2.0, 1.0, 1.0, 1.0);
        const GreenWorkspace ws(s.dom, m);
        const Vec3 y{0.5, 0.5, 0.3};
        const GreenField gd = green_direct(ws, y);
        const GreenField gr = green_recursive(ws, y);
        double num = 0.0, den = 0.0;
        for (int c = 0; c < s.grid.ncells(); ++c) {
            if (!s.dom.omega0[c]) continue;
            const double r = (s.grid.center(c) - y).norm();
            if (r < 0.2) continue;
            num = std::max(num, std::abs(gd.values.v[c] - gr.values.v[c]));
            den = std::max(den, std::abs(gd.values.v[c]));
        }
        return num / den;
    };
    const double d12 = max_diff(12);
    const double d24 = max_diff(24);
    CHECK(d12 / d24 >= 1.8);
}

TEST_CASE("check_symmetry") {
    const BoxScene s = BoxScene::make(24);

    SUBCASE("symmetric medium, poles mirrored about the symmetry plane") {
        const MediumField m = incdet::testing::ball_medium(s, {0.5, 0.5, 0.5}, 0.2, 2.0, 0.5);
        const GreenWorkspace ws(s.dom, m);
        // mirror pair about x = 0.5 (medium symmetric in x)
        const double asym =
            check_symmetry(ws, {Vec3{0.25, 0.5, 0.35}, Vec3{0.75, 0.5, 0.35}});
        CHECK(asym <= 1e-9);
    }

    SUBCASE("generic anisotropic medium with inclusion") {
        Mat3 A = Mat3::diag(1.0, 1.4, 2.0);
        A(0, 1) = A(1, 0) = 0.2;
        const MediumField m =
            incdet::testing::ball_medium(s, {0.55, 0.45, 0.5}, 0.18, 2.0, 0.7, 1.0, 0.3, A);
        const GreenWorkspace ws(s.dom, m);
        const double asym = check_symmetry(
            ws, {Vec3{0.3, 0.45, 0.3}, Vec3{0.7, 0.55, 0.35}, Vec3{0.5, 0.5, 0.72}});
        CHECK(asym <= 2e-2);
    }

    SUBCASE("poles closer than 5h rejected") {
        const MediumField m = incdet::testing::ball_medium(s, {0.5, 0.5, 0.5}, 0.2);
        const GreenWorkspace ws(s.dom, m);
        CHECK_THROWS_AS(
            check_symmetry(ws, {Vec3{0.4, 0.5, 0.3}, Vec3{0.4, 0.5, 0.3 + 3 * s.grid.h()}}),
            ValidationError);
    }
}

TEST_CASE("gradient of fields") {
    const CubeScene s = CubeScene::make(24);

    SUBCASE("constant field has zero gradient") {
        ComplexField f(s.grid);
        for (int c = 0; c < s.grid.ncells(); ++c) f.v[c] = cdouble{2.5, -1.0};
        const auto g = gradient(f, s.all);
        for (int c = 0; c < s.grid.ncells(); ++c) {
            CHECK(std::abs(g[c].x) == 0.0);
            CHECK(std::abs(g[c].z) == 0.0);
        }
    }

    SUBCASE("free-space kernel gradient magnitude at mid-range") {
        const CubeScene s32 = CubeScene::make(32);
        const MediumField m = free_medium(s32);
        const Vec3 pole{0.5, 0.5, 0.5};
        const GreenField G = surrogate(s32, m, pole);
        const auto grad = gradient(G.values, s32.all);
        const double h = s32.grid.h();
        double worst = 0.0;
        for (int c = 0; c < s32.grid.ncells(); ++c) {
            const double r = (s32.grid.center(c) - pole).norm();
            if (r < 4.0 * h || r > 0.35) continue;
            const double mag = std::sqrt(std::norm(grad[c].x) + std::norm(grad[c].y) +
                                         std::norm(grad[c].z));
            const double expect = 1.0 / (4.0 * kPi * r * r);
            worst = std::max(worst, std::abs(mag - expect) / expect);
        }
        CHECK(worst < 0.15);
    }

    SUBCASE("serial and parallel gradients agree") {
        ComplexField f(s.grid);
        for (int c = 0; c < s.grid.ncells(); ++c) {
            const Vec3 p = s.grid.center(c);
            f.v[c] = cdouble{std::sin(5 * p.x) * p.y, std::cos(3 * p.z)};
        }
        const auto gs = gradient_serial(f, s.all);
        set_threads(4);
        const auto gp = gradient_omp(f, s.all);
        set_threads(1);
        for (int c = 0; c < s.grid.ncells(); ++c)
            for (int a = 0; a < 3; ++a) CHECK(std::abs(gs[c][a] - gp[c][a]) == 0.0);
    }
}

TEST_CASE("decay exponents of |G| and |grad G| on the free-space surrogate") {
    const CubeScene s = CubeScene::make(32);
    const MediumField m = free_medium(s);
    const Vec3 pole{0.15625, 0.15625, 0.15625};  // off-center: radii span a decade
    const GreenField G = surrogate(s, m, pole);
    const auto grad = gradient(G.values, s.all);
    const double h = s.grid.h();

    std::vector<double> lx, lg, lgrad_x, lgrad_y;
    for (int c = 0; c < s.grid.ncells(); ++c) {
        const Index3 id = s.grid.unlin(c);
        const auto& d = s.grid.dims();
        if (id.i == 0 || id.j == 0 || id.k == 0 || id.i == d[0] - 1 || id.j == d[1] - 1 ||
            id.k == d[2] - 1)
            continue;  // one-sided gradients at the hull are first order
        const double r = (s.grid.center(c) - pole).norm();
        if (r < 3.0 * h) continue;
        lx.push_back(std::log(r));
        lg.push_back(std::log(std::abs(G.values.v[c])));
        const double mag = std::sqrt(std::norm(grad[c].x) + std::norm(grad[c].y) +
                                     std::norm(grad[c].z));
        lgrad_x.push_back(std::log(r));
        lgrad_y.push_back(std::log(mag));
    }
    const LineFit fg = fit_line(lx, lg);
    const LineFit fgrad = fit_line(lgrad_x, lgrad_y);
    const auto [rmin_it, rmax_it] = std::minmax_element(lx.begin(), lx.end());
    CHECK(std::exp(*rmax_it - *rmin_it) >= 10.0);  // the window spans a decade
    CHECK(std::abs(fg.slope - (-1.0)) <= 0.2);
    CHECK(std::abs(fgrad.slope - (-2.0)) <= 0.2);
}
