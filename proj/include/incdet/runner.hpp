#ifndef INCDET_RUNNER_HPP
#define INCDET_RUNNER_HPP

#include <memory>
#include <string>

#include "incdet/config.hpp"

namespace incdet {

// Everything a command needs, built once from a configuration.
struct Scene {
    RunConfig cfg;
    Grid grid;
    CellMask omega;
    SurfacePatch sigma;
    AugmentedDomain dom;
    InclusionShape shape1, shape2;
    MediumField med1, med2;
    std::unique_ptr<ConfigPair> pair;

    PoleGrid poles_y, poles_z;  // resolved (auto placement applied)

    static std::unique_ptr<Scene> build(const RunConfig& cfg);

    // Probe point/normal/h-list resolved from the config and inclusion1.
    Vec3 probe_point() const;
    Vec3 probe_normal() const;
    std::vector<double> probe_h_values() const;
};

struct SweepRow {
    int trial = 0;
    double d_h = 0.0;
    double d_mu = 0.0;
    double misfit = 0.0;
    double aperture = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    LogModulusFit misfit_fit;
    LogModulusFit aperture_fit;
};

// Shrinking dilation family of inclusion1; one row per member.
SweepResult stability_sweep(Scene& s);

// Plot-ready tables: log-log columns for the probe, the transformed abscissa
// |log J|^{-eta} for the sweep. Empty tables are rejected.
void emit_probe_plotdata(const std::string& path, const ProbeResult& probe,
                         const std::string& annotation);
void emit_sweep_plotdata(const std::string& path, const SweepResult& sweep,
                         const std::string& annotation);

// Runs one CLI command; returns the process exit status:
// 0 success, 2 validation failure, 3 numerical failure.
int run_command(const std::string& command, const RunConfig& cfg);

// Exposed for tests: command bodies that throw on failure.
void cmd_forward(Scene& s);
void cmd_green(Scene& s);
void cmd_fundsol_check(Scene& s);
void cmd_misfit(Scene& s);
void cmd_aperture(Scene& s);
void cmd_probe(Scene& s);
void cmd_sweep(Scene& s);
void cmd_verify_all(Scene& s);

}  // namespace incdet

#endif  // INCDET_RUNNER_HPP
