#include "incdet/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "incdet/io.hpp"
#include "incdet/parallel.hpp"

namespace incdet {

namespace {

std::string annotation(const Scene& s) { return "config=" + s.cfg.hash; }

void write_metadata(const Scene& s, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
    const std::string path = s.cfg.out_dir + "/run_meta.txt";
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path);
    out << "command = " << command << "\n";
    out << "config_hash = " << s.cfg.hash << "\n";
    out << "resolution = " << s.cfg.resolution << "\n";
    out << "h = " << format_double(s.grid.h()) << "\n";
    out << "threads = " << s.cfg.threads << "\n";
    out << "residual_tol = " << format_double(s.cfg.solver.residual_tol) << "\n";
    out << "pivot_threshold = " << format_double(s.cfg.solver.pivot_threshold) << "\n";
    for (const auto& [k, v] : extra) out << k << " = " << v << "\n";
}

}  // namespace

std::unique_ptr<Scene> Scene::build(const RunConfig& cfg) {
    set_threads(cfg.threads);
    auto s = std::make_unique<Scene>();
    s->cfg = cfg;

    const double h = cfg.omega_box.max_extent() / cfg.resolution;
    const int depth = static_cast<int>(std::lround(cfg.r0 / h));
    if (depth < 3 || std::abs(depth * h - cfg.r0) > 1e-9)
        throw ValidationError("grid: r0 must be a multiple of h spanning at least 3 cells");

    Box grid_box = cfg.omega_box;
    grid_box.lo.z -= cfg.r0;
    const int grid_res = static_cast<int>(std::lround(grid_box.max_extent() / h));
    s->grid = build_grid(grid_box, grid_res);

    const Grid& g = s->grid;
    s->omega = CellMask(g.ncells());
    for (int c = 0; c < g.ncells(); ++c)
        if (cfg.omega_box.contains(g.center(c))) s->omega.set(c);

    const int m = cfg.sigma_margin;
    if (2 * m + 2 >= g.dims()[0] || 2 * m + 2 >= g.dims()[1])
        throw ValidationError("sigma: margin leaves no measurement faces");
    s->sigma = make_rect_patch(2, -1, depth, m, g.dims()[0] - 1 - m, m, g.dims()[1] - 1 - m);

    s->dom = augment_domain(g, s->omega, s->sigma, cfg.r0);

    s->shape1 = cfg.inclusion1.make();
    s->shape2 = cfg.inclusion2.make();
    rasterize_inclusion(s->shape1, g, s->omega, cfg.delta0);
    rasterize_inclusion(s->shape2, g, s->omega, cfg.delta0);

    auto make_medium = [&](const MediumSpec& spec, const CellMask& chi) {
        BackgroundSpec bg{spec.a_b.make(), spec.q_b.make(), constant_tensor(spec.A)};
        InclusionParams inc{spec.a_D.make(), spec.q_D.make()};
        return build_medium(s->dom, bg, inc, chi, spec.bounds);
    };
    s->med1 = make_medium(cfg.medium1, s->shape1.mask);
    s->med2 = make_medium(cfg.medium2, s->shape2.mask);
    s->pair = std::make_unique<ConfigPair>(s->dom, s->med1, s->med2, cfg.solver);

    if (cfg.poles_auto) {
        const SurfacePatch& foot = s->dom.sigma0;
        int a0 = foot.cols.front()[0], a1 = a0, b0 = foot.cols.front()[1], b1 = b0;
        for (const auto& ab : foot.cols) {
            a0 = std::min(a0, ab[0]);
            a1 = std::max(a1, ab[0]);
            b0 = std::min(b0, ab[1]);
            b1 = std::max(b1, ab[1]);
        }
        const double x_lo = grid_box.lo.x + a0 * h + 3 * h;
        const double x_hi = grid_box.lo.x + (a1 + 1) * h - 3 * h;
        const double y_lo = grid_box.lo.y + b0 * h + 3 * h;
        const double y_hi = grid_box.lo.y + (b1 + 1) * h - 3 * h;
        const double x_mid = 0.5 * (x_lo + x_hi);
        const double z_sig = cfg.omega_box.lo.z;
        const double z_lo = z_sig - cfg.r0 + 2.5 * h;
        const double z_hi = z_sig - 0.5 * h;
        if (x_mid - 0.5 * h - x_lo < h || z_hi - z_lo < h)
            throw ValidationError("poles: grid too small for automatic source placement");
        s->poles_y.box = Box{{x_lo, y_lo, z_lo}, {x_mid - 0.5 * h, y_hi, z_hi}};
        s->poles_z.box = Box{{x_mid + 0.5 * h, y_lo, z_lo}, {x_hi, y_hi, z_hi}};
        s->poles_y.counts = {4, 4, 2};
        s->poles_z.counts = {4, 4, 2};
    } else {
        s->poles_y = cfg.poles_y;
        s->poles_z = cfg.poles_z;
    }
    return s;
}

Vec3 Scene::probe_point() const {
    if (!cfg.probe.auto_point) return cfg.probe.point;
    if (shape1.empty())
        throw ValidationError("probe: automatic point needs a closed-form inclusion1");
    return shape1.boundary_point({0, 0, -1});
}

Vec3 Scene::probe_normal() const {
    if (!cfg.probe.auto_point) return cfg.probe.normal.normalized();
    return shape1.analytic_normal(probe_point());
}

std::vector<double> Scene::probe_h_values() const {
    const double h = grid.h();
    double hmin = cfg.probe.h_min > 0 ? cfg.probe.h_min : 3.0 * h;
    double hmax = cfg.probe.h_max;
    if (hmax <= 0) {
        // march down to 3h above the impedance face
        const Vec3 O = probe_point();
        hmax = O.z - (cfg.omega_box.lo.z - cfg.r0) - 3.0 * h;
    }
    if (hmax <= hmin) throw ValidationError("probe: empty h range");
    const int n = std::max(3, cfg.probe.h_count);
    std::vector<double> hs(n);
    for (int i = 0; i < n; ++i)
        hs[i] = hmax * std::pow(hmin / hmax, static_cast<double>(i) / (n - 1));
    return hs;
}

void cmd_forward(Scene& s) {
    const auto basis = bump_basis(s.dom.sigma, s.grid);
    const ComplexField u = solve_dirichlet(s.pair->forward1(), s.dom.sigma, basis[0]);
    const CauchyPair cp = cauchy_pair(u, s.med1, s.dom.omega, s.dom.sigma);

    write_complex_field(s.cfg.out_dir + "/forward_u", u, "u", annotation(s));
    CsvWriter csv(s.cfg.out_dir + "/cauchy.csv",
                  {"face_a", "face_b", "trace_re", "trace_im", "flux_re", "flux_im"},
                  annotation(s));
    for (int f = 0; f < s.dom.sigma.nfaces(); ++f) {
        csv.row({static_cast<double>(s.dom.sigma.cols[f][0]),
                 static_cast<double>(s.dom.sigma.cols[f][1]), cp.trace[f].real(),
                 cp.trace[f].imag(), cp.flux[f].real(), cp.flux[f].imag()});
    }
    write_metadata(s, "forward",
                   {{"solver_residual",
                     format_double(s.pair->forward1().last_stats().rel_residual)}});
}

void cmd_green(Scene& s) {
    const auto poles = s.poles_y.poles();
    const Vec3 y = poles.front();
    const GreenField G = green_direct(s.pair->ws1(), y);
    write_complex_field(s.cfg.out_dir + "/green", G.values, "green", annotation(s));

    // reciprocity over three well-separated poles
    const auto zs = s.poles_z.poles();
    const std::vector<Vec3> sym_poles{poles.front(), poles.back(), zs.back()};
    const double asym = check_symmetry(s.pair->ws1(), sym_poles);
    write_metadata(s, "green",
                   {{"pole", format_double(y.x) + " " + format_double(y.y) + " " +
                                 format_double(y.z)},
                    {"max_relative_asymmetry", format_double(asym)},
                    {"solver_residual",
                     format_double(s.pair->ws1().op().last_stats().rel_residual)}});
}

void cmd_fundsol_check(Scene& s) {
    const LayeredKernel kernel =
        LayeredKernel::make(s.cfg.fundsol_a_plus, s.cfg.fundsol_a_minus, s.cfg.fundsol_A0);
    const Vec3 pole{0.0, 0.0, 0.2};
    const std::vector<std::array<double, 2>> probes{{0.05, 0.0}, {0.1, 0.0}, {0.1, 0.1},
                                                    {0.2, 0.05}};
    const TransmissionMismatch tm = transmission_check(kernel, pole, probes);

    // Whole-space surrogate on a centered box: Dirichlet data from the kernel
    // itself, then residual exponent fits of G - H.
    Box box{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};
    const Grid g = build_grid(box, s.cfg.resolution);
    CellMask all(g.ncells());
    for (int c = 0; c < g.ncells(); ++c) all.set(c);
    const double ap = kernel.a_plus, am = kernel.a_minus;
    const Mat3 A0 = kernel.A0;
    BackgroundSpec bg{[ap, am](const Vec3& p) { return p.z > 0 ? ap : am; },
                      constant_field(0.0), constant_tensor(A0)};
    InclusionParams inc{[ap, am](const Vec3& p) { return (p.z > 0 ? ap : am) + 1.0; },
                        constant_field(0.0)};
    MediumBounds bounds;
    bounds.gamma_bar = std::max(4.0, 2.0 * (ap + am + 1.0));
    bounds.lambda_bar = std::max(8.0, 4.0 * bounds.gamma_bar);
    const MediumField med =
        build_medium(g, all, CellMask(g.ncells()), bg, inc, CellMask(g.ncells()), bounds);
    const DiscreteOperator op(g, all, med, BoundarySpec{}, s.cfg.solver);
    const GreenField G = green_with_boundary_data(
        op, pole, [&](const Vec3& p) { return cdouble{layered_H(p, pole, kernel), 0.0}; });

    const double rmin = 3.0 * g.h();
    const double rmax = 0.45;
    const LineFit vfit =
        fit_residual_exponent(G, all, kernel, rmin, rmax, ResidualQuantity::Value);
    const LineFit gfit =
        fit_residual_exponent(G, all, kernel, rmin, rmax, ResidualQuantity::Gradient);

    CsvWriter csv(s.cfg.out_dir + "/fundsol.csv",
                  {"quantity", "slope", "r2", "value_mismatch", "flux_mismatch"},
                  annotation(s));
    csv.row_mixed({"residual_value", format_double(vfit.slope), format_double(vfit.r2),
                   format_double(tm.value_rel), format_double(tm.flux_rel)});
    csv.row_mixed({"residual_gradient", format_double(gfit.slope), format_double(gfit.r2),
                   format_double(tm.value_rel), format_double(tm.flux_rel)});
    write_metadata(s, "fundsol-check",
                   {{"transmission_value_mismatch", format_double(tm.value_rel)},
                    {"transmission_flux_mismatch", format_double(tm.flux_rel)},
                    {"residual_value_slope", format_double(vfit.slope)},
                    {"residual_gradient_slope", format_double(gfit.slope)}});
}

void cmd_misfit(Scene& s) {
    const MisfitResult res = misfit(*s.pair, s.poles_y, s.poles_z);
    CsvWriter csv(s.cfg.out_dir + "/s_matrix.csv", {"iy", "iz", "re_s", "im_s", "abs_s"},
                  annotation(s));
    for (int i = 0; i < res.S.rows(); ++i)
        for (int j = 0; j < res.S.cols(); ++j)
            csv.row({static_cast<double>(i), static_cast<double>(j), res.S(i, j).real(),
                     res.S(i, j).imag(), std::abs(res.S(i, j))});
    write_metadata(s, "misfit", {{"misfit", format_double(res.value)}});
}

void cmd_aperture(Scene& s) {
    const auto basis = bump_basis(s.dom.sigma, s.grid);
    const auto set1 =
        CauchyDataSet::build(s.pair->forward1(), s.dom.sigma, basis, s.pair->norm_model());
    const auto set2 =
        CauchyDataSet::build(s.pair->forward2(), s.dom.sigma, basis, s.pair->norm_model());
    const ApertureResult res = subspace_aperture(set1.columns, set2.columns);
    const double value = cauchy_aperture(set1, set2);

    CsvWriter csv(s.cfg.out_dir + "/aperture.csv", {"aperture", "d_ab", "d_ba"}, annotation(s));
    csv.row({value, res.d_ab, res.d_ba});
    write_metadata(s, "aperture", {{"aperture", format_double(value)}});
}

void cmd_probe(Scene& s) {
    const ProbeResult res = probe_scan(*s.pair, s.probe_point(), s.probe_normal(),
                                       s.probe_h_values());
    CsvWriter csv(s.cfg.out_dir + "/probe.csv", {"h", "re_f", "im_f", "abs_f"}, annotation(s));
    for (size_t i = 0; i < res.h.size(); ++i)
        csv.row({res.h[i], res.f[i].real(), res.f[i].imag(), std::abs(res.f[i])});
    emit_probe_plotdata(s.cfg.out_dir + "/probe_plot.csv", res, annotation(s));
    write_metadata(s, "probe",
                   {{"degenerate", res.degenerate ? "1" : "0"},
                    {"slope", format_double(res.slope)},
                    {"fit_r2", format_double(res.fit_r2)}});
}

SweepResult stability_sweep(Scene& s) {
    if (s.shape1.empty()) throw ValidationError("sweep: inclusion1 must be nonempty");
    SweepResult out;
    std::vector<double> dh_fit, misfit_fit_col, aperture_fit_col;

    int trial = 0;
    for (double factor : s.cfg.sweep_factors) {
        InclusionShape member = s.shape1.dilated(factor);
        rasterize_inclusion(member, s.grid, s.omega, s.cfg.delta0);
        const MediumSpec& spec = s.cfg.medium1;
        BackgroundSpec bg{spec.a_b.make(), spec.q_b.make(), constant_tensor(spec.A)};
        InclusionParams inc{spec.a_D.make(), spec.q_D.make()};
        const MediumField med_k = build_medium(s.dom, bg, inc, member.mask, spec.bounds);
        ConfigPair pair_k(s.dom, s.med1, med_k, s.cfg.solver);

        SweepRow row;
        row.trial = trial++;
        const bool identical = member.mask == s.shape1.mask;
        row.d_h = identical ? 0.0 : hausdorff_distance(s.grid, s.shape1.mask, member.mask);
        row.d_mu = identical ? 0.0
                             : modified_distance(s.grid, s.shape1.mask, member.mask, s.omega);
        row.misfit = misfit(pair_k, s.poles_y, s.poles_z).value;
        row.aperture = pair_k.aperture();
        out.rows.push_back(row);

        if (row.d_h > 0 && row.misfit > 0 && row.aperture > 0) {
            dh_fit.push_back(row.d_h);
            misfit_fit_col.push_back(row.misfit);
            aperture_fit_col.push_back(row.aperture);
        }
    }
    if (dh_fit.size() >= 3) {
        out.misfit_fit = fit_log_modulus(dh_fit, misfit_fit_col);
        out.aperture_fit = fit_log_modulus(dh_fit, aperture_fit_col);
    }
    return out;
}

void cmd_sweep(Scene& s) {
    const SweepResult res = stability_sweep(s);
    CsvWriter csv(s.cfg.out_dir + "/sweep.csv",
                  {"trial", "d_h", "d_mu", "misfit", "aperture", "eta_fit", "corr"},
                  annotation(s));
    for (const auto& r : res.rows)
        csv.row({static_cast<double>(r.trial), r.d_h, r.d_mu, r.misfit, r.aperture,
                 res.misfit_fit.eta, res.misfit_fit.corr});
    emit_sweep_plotdata(s.cfg.out_dir + "/sweep_plot.csv", res, annotation(s));
    write_metadata(s, "sweep",
                   {{"eta_misfit", format_double(res.misfit_fit.eta)},
                    {"corr_misfit", format_double(res.misfit_fit.corr)},
                    {"eta_aperture", format_double(res.aperture_fit.eta)},
                    {"corr_aperture", format_double(res.aperture_fit.corr)}});
}

void cmd_verify_all(Scene& s) {
    struct Check {
        std::string name;
        bool ok;
        std::string detail;
    };
    std::vector<Check> checks;
    auto add = [&](const std::string& name, bool ok, const std::string& detail) {
        checks.push_back({name, ok, detail});
        std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << ": " << detail << "\n";
    };

    const double sym1 = s.pair->ws1().op().symmetry_defect();
    const double sym2 = s.pair->ws2().op().symmetry_defect();
    add("operator_symmetry", sym1 <= 1e-12 && sym2 <= 1e-12,
        format_double(std::max(sym1, sym2)));

    bool identical = s.med1.chi_d() == s.med2.chi_d();
    if (identical) {
        for (int c = 0; c < s.grid.ncells() && identical; ++c) {
            if (!s.dom.omega0[c]) continue;
            if ((s.med1.effective_sigma(c) - s.med2.effective_sigma(c)).max_abs() != 0.0 ||
                s.med1.effective_q(c) != s.med2.effective_q(c))
                identical = false;
        }
    }

    const MisfitResult mres = misfit(*s.pair, s.poles_y, s.poles_z);
    add("misfit_nonnegative", mres.value >= 0.0, format_double(mres.value));

    const auto ys = s.poles_y.poles();
    const auto zs = s.poles_z.poles();
    const cdouble f_far = f_eval(*s.pair, ys.front(), zs.front());
    const double aperture = s.pair->aperture();

    if (identical) {
        add("identical_pair_misfit_zero", mres.value <= 1e-12, format_double(mres.value));
        add("identical_pair_f_zero", std::abs(f_far) <= 1e-10, format_double(std::abs(f_far)));
        add("identical_pair_aperture_zero", aperture <= 1e-8, format_double(aperture));
    } else {
        const GreenField& G1 = s.pair->green1(ys.front());
        const GreenField& G2 = s.pair->green2(zs.front());
        const cdouble sb = s_boundary(G1, G2, s.med1, s.med2, s.dom);
        const cdouble sv = s_volume(G1, G2, s.med1, s.med2, s.dom);
        const double rel = std::abs(sb - sv) / std::max(std::abs(sv), 1e-14);
        add("boundary_volume_identity", rel <= 5e-2, format_double(rel));
        add("aperture_in_range", aperture >= 0.0 && aperture <= 1.0, format_double(aperture));
    }

    write_metadata(s, "verify-all",
                   {{"identical_pair", identical ? "1" : "0"},
                    {"misfit", format_double(mres.value)},
                    {"aperture", format_double(aperture)}});

    for (const auto& c : checks)
        if (!c.ok)
            throw NumericalError("verify-all: check '" + c.name + "' failed (" + c.detail + ")");
}

void emit_probe_plotdata(const std::string& path, const ProbeResult& probe,
                         const std::string& annotation) {
    if (probe.h.empty()) throw ValidationError("emit_plotdata: empty probe table");
    CsvWriter csv(path, {"log10_h", "log10_abs_f"}, annotation);
    for (size_t i = 0; i < probe.h.size(); ++i) {
        const double af = std::abs(probe.f[i]);
        csv.row({std::log10(probe.h[i]), af > 0 ? std::log10(af) : -300.0});
    }
}

void emit_sweep_plotdata(const std::string& path, const SweepResult& sweep,
                         const std::string& annotation) {
    if (sweep.rows.empty()) throw ValidationError("emit_plotdata: empty sweep table");
    const double eta = sweep.misfit_fit.eta > 0 ? sweep.misfit_fit.eta : 0.5;
    CsvWriter csv(path, {"abscissa_misfit", "d_h"}, annotation);
    for (const auto& r : sweep.rows) {
        const double m = std::min(std::max(r.misfit, 1e-300), 0.999999);
        csv.row({std::pow(std::abs(std::log(m)), -eta), r.d_h});
    }
}

int run_command(const std::string& command, const RunConfig& cfg) {
    try {
        static const std::vector<std::string> known{"forward",  "green", "fundsol-check",
                                                    "misfit",   "aperture", "probe",
                                                    "sweep",    "verify-all"};
        if (std::find(known.begin(), known.end(), command) == known.end())
            throw ValidationError("unknown command '" + command + "'");

        std::filesystem::create_directories(cfg.out_dir);
        auto scene = Scene::build(cfg);

        if (command == "forward") cmd_forward(*scene);
        else if (command == "green") cmd_green(*scene);
        else if (command == "fundsol-check") cmd_fundsol_check(*scene);
        else if (command == "misfit") cmd_misfit(*scene);
        else if (command == "aperture") cmd_aperture(*scene);
        else if (command == "probe") cmd_probe(*scene);
        else if (command == "sweep") cmd_sweep(*scene);
        else if (command == "verify-all") cmd_verify_all(*scene);
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace incdet
