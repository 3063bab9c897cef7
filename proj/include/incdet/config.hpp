#ifndef INCDET_CONFIG_HPP
#define INCDET_CONFIG_HPP

#include <string>
#include <vector>

#include "incdet/functionals.hpp"
#include "incdet/medium.hpp"
#include "incdet/shapes.hpp"

namespace incdet {

// Closed-form scalar coefficient: constant, affine, or a sinusoidal bump.
struct ScalarSpec {
    enum class Kind { Constant, Affine, Sine } kind = Kind::Constant;
    double c0 = 1.0;
    Vec3 coef{};   // affine gradient / sine frequencies
    double amp = 0.0;

    ScalarField make() const;
};

struct MediumSpec {
    ScalarSpec a_b;  // defaults to 1
    ScalarSpec a_D;  // defaults to 2
    ScalarSpec q_b;  // defaults to 0
    ScalarSpec q_D;  // defaults to 0
    Mat3 A = Mat3::identity();
    MediumBounds bounds;
};

struct InclusionSpec {
    ShapeKind kind = ShapeKind::None;
    Vec3 center{0.5, 0.5, 0.5};
    double radius = 0.2;
    Vec3 semi_axes{0.2, 0.2, 0.2};
    std::string table_file;

    InclusionShape make() const;
};

struct ProbeSpec {
    bool auto_point = true;
    Vec3 point{};
    Vec3 normal{};
    double h_min = 0.0;  // 0: derived from the grid
    double h_max = 0.0;
    int h_count = 12;
};

struct RunConfig {
    Box omega_box{{0, 0, 0}, {1, 1, 1}};
    int resolution = 24;
    double r0 = 0.25;
    int sigma_margin = 2;
    double delta0 = 0.08;

    MediumSpec medium1, medium2;
    InclusionSpec inclusion1, inclusion2;

    bool poles_auto = true;
    PoleGrid poles_y, poles_z;

    ProbeSpec probe;
    std::vector<double> sweep_factors{1.5, 1.4, 1.3, 1.2, 1.1, 1.05};

    double fundsol_a_plus = 2.0;
    double fundsol_a_minus = 1.0;
    Mat3 fundsol_A0 = Mat3::identity();

    SolverOptions solver;
    std::string out_dir = "out";
    int threads = 1;

    std::string hash;  // FNV-1a of the raw config text
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// The default configuration serialized in the config syntax (also serves as
// the schema reference written by `incdet example-config`).
std::string example_config_text();

}  // namespace incdet

#endif  // INCDET_CONFIG_HPP
