// Timing comparison of the serial reference kernels against their OpenMP
// variants: pairwise set distances, field gradients, and the volume
// quadrature behind the relative-data functionals.

#include <chrono>
#include <cstdio>
#include <vector>

#include "incdet/functionals.hpp"
#include "incdet/geometry.hpp"
#include "incdet/green.hpp"
#include "incdet/parallel.hpp"
#include "incdet/shapes.hpp"

using namespace incdet;
namespace chrono = std::chrono;

namespace {

double ms_since(chrono::high_resolution_clock::time_point t0) {
    return chrono::duration<double, std::milli>(chrono::high_resolution_clock::now() - t0)
        .count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = chrono::high_resolution_clock::now();
        fn();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    int nthreads = 4;
    if (argc > 1) nthreads = std::atoi(argv[1]);

    std::printf("kernel benchmark, serial vs OpenMP(%d threads)\n", nthreads);

    // pairwise max-min distance on two spherical point clouds
    {
        std::vector<Vec3> a, b;
        const int n = 140;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double th = kPi * (i + 0.5) / n, ph = 2 * kPi * j / n;
                const Vec3 p{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                             std::cos(th)};
                a.push_back(p * 0.2);
                b.push_back(p * 0.3 + Vec3{0.05, 0.0, 0.0});
            }
        set_threads(1);
        const double t_ser = time_best_of(3, [&] { max_min_distance_serial(a, b); });
        set_threads(nthreads);
        const double t_omp = time_best_of(3, [&] { max_min_distance_omp(a, b); });
        std::printf("  max_min_distance  %7zu x %zu pts   serial %8.2f ms   omp %8.2f ms   speedup %.2fx\n",
                    a.size(), b.size(), t_ser, t_omp, t_ser / t_omp);
    }

    // gradient of a scalar field on a 96^3 grid
    {
        const Grid g = build_grid(Box{{0, 0, 0}, {1, 1, 1}}, 96);
        CellMask all(g.ncells());
        for (int c = 0; c < g.ncells(); ++c) all.set(c);
        ComplexField f(g);
        for (int c = 0; c < g.ncells(); ++c) {
            const Vec3 p = g.center(c);
            f.v[c] = std::sin(3 * p.x) * std::cos(2 * p.y) * p.z;
        }
        set_threads(1);
        const double t_ser = time_best_of(3, [&] { gradient_serial(f, all); });
        set_threads(nthreads);
        const double t_omp = time_best_of(3, [&] { gradient_omp(f, all); });
        std::printf("  gradient          %7d cells        serial %8.2f ms   omp %8.2f ms   speedup %.2fx\n",
                    g.ncells(), t_ser, t_omp, t_ser / t_omp);
    }

    // volume quadrature of the relative-data integrand
    {
        const Grid g = build_grid(Box{{0, 0, 0}, {1, 1, 1.25}}, 40);
        CellMask omega(g.ncells());
        for (int c = 0; c < g.ncells(); ++c)
            if (g.center(c).z > 0.25) omega.set(c);
        SurfacePatch sigma = make_rect_patch(2, -1, 8, 2, g.dims()[0] - 3, 2, g.dims()[1] - 3);
        AugmentedDomain dom = augment_domain(g, omega, sigma, 0.25);

        InclusionShape ball1 = make_ball({0.5, 0.5, 0.75}, 0.2);
        InclusionShape ball2 = make_ball({0.5, 0.5, 0.75}, 0.24);
        rasterize_inclusion(ball1, g, omega, 0.05);
        rasterize_inclusion(ball2, g, omega, 0.05);
        const MediumField m1 = build_medium(dom, BackgroundSpec{}, InclusionParams{},
                                            ball1.mask, MediumBounds{});
        const MediumField m2 = build_medium(dom, BackgroundSpec{}, InclusionParams{},
                                            ball2.mask, MediumBounds{});
        GreenField G1, G2;
        G1.pole = {0.4, 0.5, 0.1};
        G2.pole = {0.6, 0.5, 0.1};
        G1.values = ComplexField(g);
        G2.values = ComplexField(g);
        for (int c = 0; c < g.ncells(); ++c) {
            const Vec3 p = g.center(c);
            G1.values.v[c] = cdouble{1.0 / (1.0 + (p - G1.pole).norm()), 0.01 * p.x};
            G2.values.v[c] = cdouble{1.0 / (1.0 + (p - G2.pole).norm()), 0.01 * p.y};
        }
        set_threads(1);
        const double t_ser =
            time_best_of(3, [&] { s_volume_serial(G1, G2, m1, m2, dom); });
        set_threads(nthreads);
        const double t_omp = time_best_of(3, [&] { s_volume_omp(G1, G2, m1, m2, dom); });
        std::printf("  s_volume          %7d cells        serial %8.2f ms   omp %8.2f ms   speedup %.2fx\n",
                    g.ncells(), t_ser, t_omp, t_ser / t_omp);
    }

    return 0;
}
