#include "incdet/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "incdet/io.hpp"

namespace incdet {

ScalarField ScalarSpec::make() const {
    switch (kind) {
        case Kind::Constant:
            return constant_field(c0);
        case Kind::Affine: {
            const double b = c0;
            const Vec3 g = coef;
            return [b, g](const Vec3& p) { return b + g.dot(p); };
        }
        case Kind::Sine: {
            const double b = c0, a = amp;
            const Vec3 k = coef;
            return [b, a, k](const Vec3& p) {
                return b + a * std::sin(kPi * k.x * p.x) * std::sin(kPi * k.y * p.y) *
                               std::sin(kPi * k.z * p.z);
            };
        }
    }
    return constant_field(c0);
}

InclusionShape InclusionSpec::make() const {
    switch (kind) {
        case ShapeKind::None:
            return make_empty();
        case ShapeKind::Ball:
            return make_ball(center, radius);
        case ShapeKind::Ellipsoid:
            return make_ellipsoid(center, semi_axes);
        case ShapeKind::LevelSetTable: {
            const StructuredGridFile f = read_structured_grid(table_file);
            return make_level_set(f.values);
        }
    }
    return make_empty();
}

namespace {

struct Entry {
    std::string value;
    int line;
};

using Sections = std::map<std::string, std::map<std::string, Entry>>;

Sections tokenize(const std::string& text) {
    Sections out;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config line " + std::to_string(lineno) +
                                      ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
        out[section][key] = Entry{value, lineno};
    }
    return out;
}

class SectionReader {
public:
    SectionReader(const Sections& s, std::string name) : secs_(s), name_(std::move(name)) {}

    bool has(const std::string& key) const {
        const auto it = secs_.find(name_);
        return it != secs_.end() && it->second.count(key) > 0;
    }

    std::string raw(const std::string& key) const {
        return secs_.at(name_).at(key).value;
    }

    template <typename T>
    T number(const std::string& key, T fallback) const {
        if (!has(key)) return fallback;
        std::istringstream s(raw(key));
        T v;
        if (!(s >> v)) fail(key, "not a number");
        return v;
    }

    Vec3 vec3(const std::string& key, const Vec3& fallback) const {
        if (!has(key)) return fallback;
        std::istringstream s(raw(key));
        Vec3 v;
        if (!(s >> v.x >> v.y >> v.z)) fail(key, "expected three numbers");
        return v;
    }

    std::vector<double> numbers(const std::string& key) const {
        std::vector<double> v;
        if (!has(key)) return v;
        std::istringstream s(raw(key));
        double x;
        while (s >> x) v.push_back(x);
        return v;
    }

    Mat3 mat3(const std::string& key, const Mat3& fallback) const {
        if (!has(key)) return fallback;
        if (raw(key) == "identity") return Mat3::identity();
        const auto v = numbers(key);
        Mat3 A;
        if (v.size() == 3) {
            A = Mat3::diag(v[0], v[1], v[2]);
        } else if (v.size() == 9) {
            for (int i = 0; i < 9; ++i) A.m[i] = v[i];
        } else {
            fail(key, "expected 'identity', 3 diagonal entries, or 9 entries");
        }
        return A;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& why) const {
        const auto& e = secs_.at(name_).at(key);
        throw ValidationError("config line " + std::to_string(e.line) + ", key '" + name_ +
                              "." + key + "': " + why);
    }

private:
    const Sections& secs_;
    std::string name_;
};

ScalarSpec scalar_spec(const SectionReader& sec, const std::string& key,
                       const ScalarSpec& fallback) {
    if (!sec.has(key)) return fallback;
    std::istringstream s(sec.raw(key));
    std::string head;
    s >> head;
    ScalarSpec spec;
    if (head == "affine") {
        spec.kind = ScalarSpec::Kind::Affine;
        if (!(s >> spec.c0 >> spec.coef.x >> spec.coef.y >> spec.coef.z))
            sec.fail(key, "affine needs: c0 gx gy gz");
    } else if (head == "sine") {
        spec.kind = ScalarSpec::Kind::Sine;
        if (!(s >> spec.c0 >> spec.amp >> spec.coef.x >> spec.coef.y >> spec.coef.z))
            sec.fail(key, "sine needs: base amp kx ky kz");
    } else {
        spec.kind = ScalarSpec::Kind::Constant;
        std::istringstream c(head);
        if (!(c >> spec.c0)) sec.fail(key, "not a number or field spec");
    }
    return spec;
}

void read_medium(const SectionReader& sec, MediumSpec& m) {
    m.a_b = scalar_spec(sec, "a_b", m.a_b);
    m.a_D = scalar_spec(sec, "a_D", m.a_D);
    m.q_b = scalar_spec(sec, "q_b", m.q_b);
    m.q_D = scalar_spec(sec, "q_D", m.q_D);
    m.A = sec.mat3("A", m.A);
    m.bounds.gamma_bar = sec.number("gamma_bar", m.bounds.gamma_bar);
    m.bounds.eta0 = sec.number("eta0", m.bounds.eta0);
    m.bounds.lambda_bar = sec.number("lambda_bar", m.bounds.lambda_bar);
}

void read_inclusion(const SectionReader& sec, InclusionSpec& inc) {
    if (sec.has("kind")) {
        const std::string k = sec.raw("kind");
        if (k == "none")
            inc.kind = ShapeKind::None;
        else if (k == "ball")
            inc.kind = ShapeKind::Ball;
        else if (k == "ellipsoid")
            inc.kind = ShapeKind::Ellipsoid;
        else if (k == "table")
            inc.kind = ShapeKind::LevelSetTable;
        else
            sec.fail("kind", "unknown shape kind '" + k + "'");
    }
    inc.center = sec.vec3("center", inc.center);
    inc.radius = sec.number("radius", inc.radius);
    inc.semi_axes = sec.vec3("semi_axes", inc.semi_axes);
    if (sec.has("file")) inc.table_file = sec.raw("file");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    const Sections secs = tokenize(text);
    RunConfig cfg;
    cfg.hash = fnv1a_hex(text);

    {
        SectionReader g(secs, "grid");
        cfg.omega_box.lo = g.vec3("box_min", cfg.omega_box.lo);
        cfg.omega_box.hi = g.vec3("box_max", cfg.omega_box.hi);
        cfg.resolution = g.number("resolution", cfg.resolution);
        cfg.r0 = g.number("r0", cfg.r0);
    }
    {
        SectionReader s(secs, "sigma");
        cfg.sigma_margin = s.number("margin", cfg.sigma_margin);
    }
    {
        SectionReader d(secs, "domain");
        cfg.delta0 = d.number("delta0", cfg.delta0);
    }
    read_medium(SectionReader(secs, "medium1"), cfg.medium1);
    cfg.medium2 = cfg.medium1;  // trial medium defaults to the true one
    read_medium(SectionReader(secs, "medium2"), cfg.medium2);
    read_inclusion(SectionReader(secs, "inclusion1"), cfg.inclusion1);
    read_inclusion(SectionReader(secs, "inclusion2"), cfg.inclusion2);

    {
        SectionReader p(secs, "poles");
        if (p.has("dy_min") || p.has("dy_max") || p.has("dz_min") || p.has("dz_max")) {
            cfg.poles_auto = false;
            cfg.poles_y.box.lo = p.vec3("dy_min", {});
            cfg.poles_y.box.hi = p.vec3("dy_max", {});
            cfg.poles_z.box.lo = p.vec3("dz_min", {});
            cfg.poles_z.box.hi = p.vec3("dz_max", {});
            const Vec3 cy = p.vec3("dy_counts", {4, 4, 2});
            const Vec3 cz = p.vec3("dz_counts", {4, 4, 2});
            cfg.poles_y.counts = {static_cast<int>(cy.x), static_cast<int>(cy.y),
                                  static_cast<int>(cy.z)};
            cfg.poles_z.counts = {static_cast<int>(cz.x), static_cast<int>(cz.y),
                                  static_cast<int>(cz.z)};
        }
    }
    {
        SectionReader p(secs, "probe");
        if (p.has("point")) {
            cfg.probe.auto_point = false;
            cfg.probe.point = p.vec3("point", {});
            cfg.probe.normal = p.vec3("normal", {0, 0, -1});
        }
        cfg.probe.h_min = p.number("h_min", cfg.probe.h_min);
        cfg.probe.h_max = p.number("h_max", cfg.probe.h_max);
        cfg.probe.h_count = p.number("h_count", cfg.probe.h_count);
    }
    {
        SectionReader s(secs, "sweep");
        const auto f = s.numbers("factors");
        if (!f.empty()) cfg.sweep_factors = f;
    }
    {
        SectionReader f(secs, "fundsol");
        cfg.fundsol_a_plus = f.number("a_plus", cfg.fundsol_a_plus);
        cfg.fundsol_a_minus = f.number("a_minus", cfg.fundsol_a_minus);
        cfg.fundsol_A0 = f.mat3("A0", cfg.fundsol_A0);
    }
    {
        SectionReader s(secs, "solver");
        cfg.solver.direct_max_unknowns =
            s.number("direct_max_unknowns", cfg.solver.direct_max_unknowns);
        cfg.solver.residual_tol = s.number("residual_tol", cfg.solver.residual_tol);
        cfg.solver.pivot_threshold = s.number("pivot_threshold", cfg.solver.pivot_threshold);
        cfg.solver.max_iterations = s.number("max_iterations", cfg.solver.max_iterations);
    }
    {
        SectionReader o(secs, "output");
        if (o.has("dir")) cfg.out_dir = o.raw("dir");
        cfg.threads = o.number("threads", cfg.threads);
    }

    // Validation beyond per-key syntax.
    if (cfg.resolution < 8) throw ValidationError("config: grid.resolution must be >= 8");
    if (cfg.r0 <= 0) throw ValidationError("config: grid.r0 must be positive");
    if (cfg.sigma_margin < 1) throw ValidationError("config: sigma.margin must be >= 1");
    for (size_t i = 0; i + 1 < cfg.sweep_factors.size(); ++i)
        if (cfg.sweep_factors[i] <= cfg.sweep_factors[i + 1])
            throw ValidationError("config: sweep.factors must be strictly decreasing");
    if (!cfg.sweep_factors.empty() && cfg.sweep_factors.back() < 1.0)
        throw ValidationError("config: sweep.factors must stay >= 1 (family shrinks to the base)");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string example_config_text() {
    return R"(# incdet run configuration (key = value, grouped in [sections]; '#' comments)

[grid]
box_min = 0 0 0          # body box
box_max = 1 1 1
resolution = 24          # cells along the longest grid extent
r0 = 0.25                # depth of the attached source box (multiple of h)

[sigma]
margin = 2               # measurement patch: bottom side minus this cell margin

[domain]
delta0 = 0.08            # required stand-off of inclusions from the boundary

[medium1]                # true configuration
a_b = 1.0                # scalars: constant | affine c0 gx gy gz | sine base amp kx ky kz
a_D = 2.0
q_b = 0.0
q_D = 0.5
A = identity             # 'identity' | 3 diagonal entries | 9 row-major entries
gamma_bar = 4.0
eta0 = 0.5
lambda_bar = 8.0

[inclusion1]
kind = ball              # none | ball | ellipsoid | table
center = 0.5 0.5 0.5
radius = 0.2

[medium2]                # trial configuration (defaults to medium1)

[inclusion2]
kind = none

[poles]                  # omit to place the two source grids automatically
# dy_min = ... ; dy_max = ... ; dy_counts = 4 4 2
# dz_min = ... ; dz_max = ... ; dz_counts = 4 4 2

[probe]
# point = 0.5 0.5 0.3    # omit for the automatic choice on inclusion1
# normal = 0 0 -1
h_count = 12

[sweep]
factors = 1.5 1.4 1.3 1.2 1.1 1.05

[fundsol]
a_plus = 2.0
a_minus = 1.0
A0 = identity

[solver]
direct_max_unknowns = 40000
residual_tol = 1e-9
pivot_threshold = 1e-13

[output]
dir = out
threads = 1
)";
}

}  // namespace incdet
