#include "incdet/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace incdet {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

void write_structured_grid(const std::string& path, const Grid& g,
                           const std::vector<double>& values, const std::string& field_name,
                           const std::string& annotation) {
    if (static_cast<int>(values.size()) != g.ncells())
        throw ValidationError("write_structured_grid: value count does not match grid");
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file " + path);
    out << "dims: " << g.dims()[0] << " " << g.dims()[1] << " " << g.dims()[2] << "\n";
    out << "origin: " << format_double(g.box().lo.x) << " " << format_double(g.box().lo.y)
        << " " << format_double(g.box().lo.z) << "\n";
    out << "spacing: " << format_double(g.h()) << "\n";
    out << "field: " << field_name;
    if (!annotation.empty()) out << " " << annotation;
    out << "\n";
    for (double v : values) out << format_double(v) << "\n";
}

StructuredGridFile read_structured_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open input file " + path);
    StructuredGridFile f;
    std::string line, tag;
    {
        std::getline(in, line);
        std::istringstream s(line);
        s >> tag >> f.dims[0] >> f.dims[1] >> f.dims[2];
        if (tag != "dims:" || !s) throw ValidationError(path + ": bad dims line");
    }
    {
        std::getline(in, line);
        std::istringstream s(line);
        s >> tag >> f.origin.x >> f.origin.y >> f.origin.z;
        if (tag != "origin:" || !s) throw ValidationError(path + ": bad origin line");
    }
    {
        std::getline(in, line);
        std::istringstream s(line);
        s >> tag >> f.spacing;
        if (tag != "spacing:" || !s) throw ValidationError(path + ": bad spacing line");
    }
    {
        std::getline(in, line);
        std::istringstream s(line);
        s >> tag >> f.field_name;
        if (tag != "field:") throw ValidationError(path + ": bad field line");
    }
    const int n = f.dims[0] * f.dims[1] * f.dims[2];
    f.values.reserve(n);
    double v;
    while (in >> v) f.values.push_back(v);
    if (static_cast<int>(f.values.size()) != n)
        throw ValidationError(path + ": value count does not match dims");
    return f;
}

void write_mask(const std::string& path, const Grid& g, const CellMask& mask,
                const std::string& field_name, const std::string& annotation) {
    std::vector<double> v(g.ncells());
    for (int c = 0; c < g.ncells(); ++c) v[c] = mask[c] ? 1.0 : 0.0;
    write_structured_grid(path, g, v, field_name, annotation);
}

void write_complex_field(const std::string& path_base, const ComplexField& f,
                         const std::string& field_name, const std::string& annotation) {
    const Grid& g = *f.grid;
    std::vector<double> re(g.ncells()), im(g.ncells());
    for (int c = 0; c < g.ncells(); ++c) {
        re[c] = f.v[c].real();
        im[c] = f.v[c].imag();
    }
    write_structured_grid(path_base + "_re.grid", g, re, field_name + "_re", annotation);
    write_structured_grid(path_base + "_im.grid", g, im, field_name + "_im", annotation);
}

struct CsvWriter::Impl {
    std::ofstream out;
    size_t ncols;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns,
                     const std::string& annotation)
    : impl_(new Impl) {
    impl_->out.open(path);
    if (!impl_->out) throw ValidationError("cannot open output file " + path);
    impl_->ncols = columns.size();
    if (!annotation.empty()) impl_->out << "# " << annotation << "\n";
    for (size_t i = 0; i < columns.size(); ++i)
        impl_->out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != impl_->ncols) throw ValidationError("csv: column count mismatch");
    for (size_t i = 0; i < values.size(); ++i)
        impl_->out << format_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    if (values.size() != impl_->ncols) throw ValidationError("csv: column count mismatch");
    for (size_t i = 0; i < values.size(); ++i)
        impl_->out << values[i] << (i + 1 < values.size() ? "," : "\n");
}

}  // namespace incdet
