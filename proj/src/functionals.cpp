#include "incdet/functionals.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "incdet/parallel.hpp"

namespace incdet {

ConfigPair::ConfigPair(const AugmentedDomain& dom, const MediumField& m1, const MediumField& m2,
                       SolverOptions opts)
    : dom_(&dom), m1_(&m1), m2_(&m2), opts_(opts), ws1_(dom, m1, opts), ws2_(dom, m2, opts) {}

const CellMask& ConfigPair::omega_d_mask() {
    if (!omega_d_) {
        const bool empty1 = m1_->chi_d().empty();
        const bool empty2 = m2_->chi_d().empty();
        if (empty1 && empty2) {
            omega_d_ = CellMask(dom_->grid.ncells());
        } else {
            omega_d_ = omega_d(dom_->grid, m1_->chi_d(), m2_->chi_d(), dom_->omega);
        }
    }
    return *omega_d_;
}

const GreenField& ConfigPair::green1(const Vec3& y) {
    const int cell = dom_->grid.nearest_cell(y);
    auto it = cache1_.find(cell);
    if (it == cache1_.end()) it = cache1_.emplace(cell, green_direct(ws1_, y)).first;
    return it->second;
}

const GreenField& ConfigPair::green2(const Vec3& z) {
    const int cell = dom_->grid.nearest_cell(z);
    auto it = cache2_.find(cell);
    if (it == cache2_.end()) it = cache2_.emplace(cell, green_direct(ws2_, z)).first;
    return it->second;
}

const DiscreteOperator& ConfigPair::forward1() {
    if (!fwd1_)
        fwd1_ = std::make_unique<DiscreteOperator>(dom_->grid, dom_->omega, *m1_,
                                                   BoundarySpec{}, opts_);
    return *fwd1_;
}

const DiscreteOperator& ConfigPair::forward2() {
    if (!fwd2_)
        fwd2_ = std::make_unique<DiscreteOperator>(dom_->grid, dom_->omega, *m2_,
                                                   BoundarySpec{}, opts_);
    return *fwd2_;
}

const TraceNormModel& ConfigPair::norm_model() {
    if (!norm_) norm_ = std::make_unique<TraceNormModel>(dom_->sigma, dom_->grid.face_area());
    return *norm_;
}

double ConfigPair::aperture() {
    if (!aperture_) {
        const auto basis = bump_basis(dom_->sigma, dom_->grid);
        const auto set1 = CauchyDataSet::build(forward1(), dom_->sigma, basis, norm_model());
        const auto set2 = CauchyDataSet::build(forward2(), dom_->sigma, basis, norm_model());
        aperture_ = cauchy_aperture(set1, set2);
    }
    return *aperture_;
}

namespace {

void validate_pole_in_d0(const GreenField& G, const AugmentedDomain& dom, const char* who) {
    const int cell = dom.grid.nearest_cell(G.pole);
    if (!dom.d0[cell])
        throw ValidationError(std::string(who) + ": pole must lie in the attached box");
}

}  // namespace

cdouble s_boundary(const GreenField& G1, const GreenField& G2, const MediumField& m1,
                   const MediumField& m2, const AugmentedDomain& dom) {
    validate_pole_in_d0(G1, dom, "s_boundary");
    validate_pole_in_d0(G2, dom, "s_boundary");
    const Grid& g = dom.grid;
    const double h = g.h();
    const SurfacePatch& sigma = dom.sigma;
    const int out_dir = sigma.dir();

    cdouble sum{0.0, 0.0};
    for (int f = 0; f < sigma.nfaces(); ++f) {
        const int ca = g.lin(sigma.cell(f));  // body side
        const int cb = g.neighbor(ca, out_dir);
        if (cb < 0 || !dom.d0[cb]) continue;  // Dirichlet rim: traces vanish
        const double sf1 = m1.face_sigma_normal(ca, cb, sigma.axis);
        const double sf2 = m2.face_sigma_normal(ca, cb, sigma.axis);
        const cdouble flux1 = sf1 * (G1.values.v[cb] - G1.values.v[ca]) / h;
        const cdouble flux2 = sf2 * (G2.values.v[cb] - G2.values.v[ca]) / h;
        const cdouble tr1 = 0.5 * (G1.values.v[ca] + G1.values.v[cb]);
        const cdouble tr2 = 0.5 * (G2.values.v[ca] + G2.values.v[cb]);
        sum += flux1 * tr2 - flux2 * tr1;
    }
    return sum * g.face_area();
}

namespace {

struct VolumeQuadContext {
    const Grid* g;
    const AugmentedDomain* dom;
    const MediumField* m1;
    const MediumField* m2;
    const GreenField* G1;
    const GreenField* G2;
    Index3 iy, iz;  // pole cells; a 2-cell halo around each is excluded
};

bool in_pole_halo(const Index3& a, const Index3& b) {
    return std::abs(a.i - b.i) <= 2 && std::abs(a.j - b.j) <= 2 && std::abs(a.k - b.k) <= 2;
}

cdouble volume_cell_term(const VolumeQuadContext& ctx, int c) {
    const Grid& g = *ctx.g;
    if (!ctx.dom->omega[c]) return {0.0, 0.0};
    const bool c1 = ctx.m1->chi_d()[c];
    const bool c2 = ctx.m2->chi_d()[c];
    const Mat3 ds = ctx.m1->effective_sigma(c) - ctx.m2->effective_sigma(c);
    const double dq = ctx.m2->effective_q(c) - ctx.m1->effective_q(c);
    const bool sig_differs = c1 != c2 || ds.max_abs() > 0.0;
    if (!sig_differs && dq == 0.0) return {0.0, 0.0};

    const Index3 ic = g.unlin(c);
    if (in_pole_halo(ic, ctx.iy) || in_pole_halo(ic, ctx.iz)) return {0.0, 0.0};

    cdouble term{0.0, 0.0};
    if (sig_differs) {
        const ComplexVec3 g1 =
            gradient_in_region(ctx.G1->values, ctx.dom->omega0, ctx.m1->chi_d(), c);
        const ComplexVec3 g2 =
            gradient_in_region(ctx.G2->values, ctx.dom->omega0, ctx.m2->chi_d(), c);
        term += apply(ds, g1).dot_bilinear(g2);
    }
    if (dq != 0.0) term += dq * ctx.G1->values.v[c] * ctx.G2->values.v[c];
    return term;
}

}  // namespace

cdouble s_volume_serial(const GreenField& G1, const GreenField& G2, const MediumField& m1,
                        const MediumField& m2, const AugmentedDomain& dom) {
    const Grid& g = dom.grid;
    VolumeQuadContext ctx{&g, &dom, &m1, &m2, &G1, &G2,
                          g.unlin(g.nearest_cell(G1.pole)), g.unlin(g.nearest_cell(G2.pole))};
    cdouble sum{0.0, 0.0};
    for (int c = 0; c < g.ncells(); ++c) sum += volume_cell_term(ctx, c);
    return sum * g.cell_volume();
}

cdouble s_volume_omp(const GreenField& G1, const GreenField& G2, const MediumField& m1,
                     const MediumField& m2, const AugmentedDomain& dom) {
    const Grid& g = dom.grid;
    VolumeQuadContext ctx{&g, &dom, &m1, &m2, &G1, &G2,
                          g.unlin(g.nearest_cell(G1.pole)), g.unlin(g.nearest_cell(G2.pole))};
    const int n = g.ncells();
    const int nt = threads();
    std::vector<cdouble> partial(nt, cdouble{0.0, 0.0});
#pragma omp parallel num_threads(nt)
    {
#ifdef _OPENMP
        const int tid = omp_get_thread_num();
#else
        const int tid = 0;
#endif
#pragma omp for schedule(static)
        for (int c = 0; c < n; ++c) partial[tid] += volume_cell_term(ctx, c);
    }
    cdouble sum{0.0, 0.0};
    for (const cdouble& p : partial) sum += p;  // fixed combination order
    return sum * g.cell_volume();
}

cdouble s_volume(const GreenField& G1, const GreenField& G2, const MediumField& m1,
                 const MediumField& m2, const AugmentedDomain& dom) {
    return threads() > 1 ? s_volume_omp(G1, G2, m1, m2, dom)
                         : s_volume_serial(G1, G2, m1, m2, dom);
}

SplitS f_split(ConfigPair& pair, const Vec3& y, const Vec3& z) {
    const AugmentedDomain& dom = pair.dom();
    const Grid& g = dom.grid;
    const CellMask& od = pair.omega_d_mask();
    const int cy = g.nearest_cell(y);
    const int cz = g.nearest_cell(z);
    if (pair.m1().chi_d()[cy] || pair.m2().chi_d()[cy] || pair.m1().chi_d()[cz] ||
        pair.m2().chi_d()[cz])
        throw ValidationError("f_eval: pole inside an inclusion");
    if ((!od.cells.empty() && (od[cy] || od[cz])))
        throw ValidationError("f_eval: pole inside the unreachable set");

    const GreenField& G1 = pair.green1(y);
    const GreenField& G2 = pair.green2(z);

    // The pole cell and its 2-cell halo are dropped from the quadratures:
    // the discrete delta contaminates the kernel values there.
    const Index3 iy = g.unlin(g.nearest_cell(y));
    const Index3 iz = g.unlin(g.nearest_cell(z));
    auto in_halo = [](const Index3& a, const Index3& b) {
        return std::abs(a.i - b.i) <= 2 && std::abs(a.j - b.j) <= 2 && std::abs(a.k - b.k) <= 2;
    };

    auto quadrature = [&](const MediumField& med) {
        cdouble s{0.0, 0.0};
        const CellMask& chi = med.chi_d();
        for (int c = 0; c < g.ncells(); ++c) {
            if (!chi[c]) continue;
            const Index3 ic = g.unlin(c);
            if (in_halo(ic, iy) || in_halo(ic, iz)) continue;
            const ComplexVec3 g1 = gradient_in_region(G1.values, dom.omega0, pair.m1().chi_d(), c);
            const ComplexVec3 g2 = gradient_in_region(G2.values, dom.omega0, pair.m2().chi_d(), c);
            const Mat3 weighted = med.tensor_a(c) * (med.a_d(c) - med.a_b(c));
            s += apply(weighted, g1).dot_bilinear(g2);
            s -= (med.q_d(c) - med.q_b(c)) * G1.values.v[c] * G2.values.v[c];
        }
        return s * g.cell_volume();
    };

    SplitS out;
    out.s1 = quadrature(pair.m1());
    out.s2 = quadrature(pair.m2());
    return out;
}

cdouble f_eval(ConfigPair& pair, const Vec3& y, const Vec3& z) {
    return f_split(pair, y, z).f();
}

std::vector<Vec3> PoleGrid::poles() const {
    std::vector<Vec3> out;
    for (int i = 0; i < counts[0]; ++i)
        for (int j = 0; j < counts[1]; ++j)
            for (int k = 0; k < counts[2]; ++k)
                out.push_back({box.lo.x + (i + 0.5) * box.extent(0) / counts[0],
                               box.lo.y + (j + 0.5) * box.extent(1) / counts[1],
                               box.lo.z + (k + 0.5) * box.extent(2) / counts[2]});
    return out;
}

MisfitResult misfit(ConfigPair& pair, const PoleGrid& dy, const PoleGrid& dz) {
    const AugmentedDomain& dom = pair.dom();
    const Grid& g = dom.grid;

    // The two source regions must be disjoint.
    const bool overlap = dy.box.lo.x < dz.box.hi.x && dz.box.lo.x < dy.box.hi.x &&
                         dy.box.lo.y < dz.box.hi.y && dz.box.lo.y < dy.box.hi.y &&
                         dy.box.lo.z < dz.box.hi.z && dz.box.lo.z < dy.box.hi.z;
    if (overlap) throw ValidationError("misfit: pole grids overlap");

    MisfitResult res;
    res.poles_y = dy.poles();
    res.poles_z = dz.poles();
    for (const Vec3& p : res.poles_y)
        if (!dom.d0[g.nearest_cell(p)])
            throw ValidationError("misfit: source pole outside the attached box");
    for (const Vec3& p : res.poles_z)
        if (!dom.d0[g.nearest_cell(p)])
            throw ValidationError("misfit: source pole outside the attached box");

    const int ny = static_cast<int>(res.poles_y.size());
    const int nz = static_cast<int>(res.poles_z.size());
    std::vector<const GreenField*> gy(ny), gz(nz);
    for (int i = 0; i < ny; ++i) gy[i] = &pair.green1(res.poles_y[i]);
    for (int j = 0; j < nz; ++j) gz[j] = &pair.green2(res.poles_z[j]);

    res.S.resize(ny, nz);
    const int total = ny * nz;
#pragma omp parallel for schedule(static) if (threads() > 1)
    for (int t = 0; t < total; ++t) {
        const int i = t / nz, j = t % nz;
        res.S(i, j) = s_boundary(*gy[i], *gz[j], pair.m1(), pair.m2(), dom);
    }

    const double w = dy.weight() * dz.weight();
    double value = 0.0;
    for (int i = 0; i < ny; ++i)
        for (int j = 0; j < nz; ++j) value += std::norm(res.S(i, j)) * w;
    res.value = value;
    return res;
}

ProbeResult probe_scan(ConfigPair& pair, const Vec3& O, const Vec3& nu,
                       std::vector<double> h_values) {
    if (h_values.empty()) throw ValidationError("probe_scan: empty h list");
    std::sort(h_values.begin(), h_values.end(), std::greater<>());
    for (size_t i = 0; i + 1 < h_values.size(); ++i)
        if (h_values[i] <= h_values[i + 1])
            throw ValidationError("probe_scan: h values must be strictly decreasing");
    if (h_values.back() <= 0.0) throw ValidationError("probe_scan: h values must be positive");

    const Vec3 n = nu.normalized();
    ProbeResult res;
    res.point = O;
    res.normal = n;

    // Poles snap to cell centers, so successive h values can land in one
    // cell; keep one sample per pole cell and report the effective offset
    // (the projection of the snapped pole onto the probe direction).
    const Grid& g = pair.dom().grid;
    double scale = 0.0;
    int last_cell = -1;
    for (double h : h_values) {
        const Vec3 y = O + n * h;
        const int cell = g.nearest_cell(y);
        if (cell == last_cell) continue;
        last_cell = cell;
        const double h_eff = (g.center(cell) - O).dot(n);
        if (h_eff <= 0.0) continue;
        const cdouble f = f_eval(pair, y, y);
        res.h.push_back(h_eff);
        res.f.push_back(f);
        scale = std::max(scale, std::abs(f));
    }
    if (res.h.empty()) throw ValidationError("probe_scan: no usable pole cells");
    for (size_t i = 0; i + 1 < res.h.size(); ++i)
        if (res.h[i] <= res.h[i + 1])
            throw ValidationError("probe_scan: snapped offsets are not decreasing");

    if (scale <= 1e-10) {
        res.degenerate = true;
        return res;
    }

    // Fit over the smallest decade of h.
    const double hmin = res.h.back();
    std::vector<double> lx, ly;
    for (size_t i = 0; i < res.h.size(); ++i) {
        if (res.h[i] <= 10.0 * hmin && std::abs(res.f[i]) > 0.0) {
            lx.push_back(std::log(res.h[i]));
            ly.push_back(std::log(std::abs(res.f[i])));
        }
    }
    if (lx.size() < 3) throw ValidationError("probe_scan: too few h values in the fit decade");
    const LineFit fit = fit_line(lx, ly);
    res.slope = fit.slope;
    res.fit_r2 = fit.r2;
    return res;
}

LogModulusFit fit_log_modulus(const std::vector<double>& dh, const std::vector<double>& s) {
    if (dh.size() != s.size() || dh.size() < 3)
        throw ValidationError("fit_log_modulus: need at least 3 rows");
    LogModulusFit best;
    for (int k = 1; k <= 10; ++k) {
        const double eta = 0.1 * k;
        std::vector<double> x;
        x.reserve(s.size());
        for (double v : s) {
            const double vv = std::min(std::max(v, 1e-300), 0.999999);
            x.push_back(std::pow(std::abs(std::log(vv)), -eta));
        }
        const double c = correlation(dh, x);
        if (c > best.corr) {
            best.corr = c;
            best.eta = eta;
        }
    }
    return best;
}

}  // namespace incdet
