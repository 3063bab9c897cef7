#ifndef INCDET_IO_HPP
#define INCDET_IO_HPP

#include <string>
#include <vector>

#include "incdet/solver.hpp"

namespace incdet {

// Structured-grid text format: a 4-line header (dims, origin, spacing, field
// name with optional key=value annotations) followed by one scalar per cell
// in row-major order (the k index varies fastest). All numbers use full
// double precision so repeated runs are byte-identical.
void write_structured_grid(const std::string& path, const Grid& g,
                           const std::vector<double>& values, const std::string& field_name,
                           const std::string& annotation = "");

struct StructuredGridFile {
    std::array<int, 3> dims;
    Vec3 origin;
    double spacing;
    std::string field_name;
    std::vector<double> values;
};

StructuredGridFile read_structured_grid(const std::string& path);

void write_mask(const std::string& path, const Grid& g, const CellMask& mask,
                const std::string& field_name, const std::string& annotation = "");

// Complex fields dump as a pair of scalar files (suffixes _re / _im).
void write_complex_field(const std::string& path_base, const ComplexField& f,
                         const std::string& field_name, const std::string& annotation = "");

// CSV with one comment line carrying annotations (config hash), then a header
// row; values are written with full precision and '.' decimal separator.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns,
              const std::string& annotation = "");
    ~CsvWriter();

    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::string format_double(double v);

// FNV-1a 64-bit hash of a string, hex-encoded; used as the config hash.
std::string fnv1a_hex(const std::string& data);

}  // namespace incdet

#endif  // INCDET_IO_HPP
