#ifndef INCDET_NUMERICS_HPP
#define INCDET_NUMERICS_HPP

#include <vector>

#include "incdet/core.hpp"

namespace incdet {

// Least-squares line fit y = slope * x + intercept with Pearson r^2.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int n = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Pearson correlation coefficient.
double correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace incdet

#endif  // INCDET_NUMERICS_HPP
