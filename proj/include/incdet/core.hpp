#ifndef INCDET_CORE_HPP
#define INCDET_CORE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace incdet {

using cdouble = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

// Validation failures (bad config, violated preconditions). CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures (solver breakdown, eigenvalue regime). CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        if (n == 0.0) throw ValidationError("cannot normalize zero vector");
        return *this / n;
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Symmetric 3x3 tensor, row-major storage.
struct Mat3 {
    std::array<double, 9> m{};

    static Mat3 identity() {
        Mat3 r;
        r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return r;
    }
    static Mat3 diag(double a, double b, double c) {
        Mat3 r;
        r.m = {a, 0, 0, 0, b, 0, 0, 0, c};
        return r;
    }

    double& operator()(int i, int j) { return m[3 * i + j]; }
    double operator()(int i, int j) const { return m[3 * i + j]; }

    Mat3 operator*(double s) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] * s;
        return r;
    }
    Mat3 operator-(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
        return r;
    }
    Mat3 operator+(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
        return r;
    }

    Vec3 apply(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    double max_abs() const {
        double a = 0.0;
        for (double v : m) a = std::max(a, std::abs(v));
        return a;
    }

    double max_asym() const {
        double a = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                a = std::max(a, std::abs((*this)(i, j) - (*this)(j, i)));
        return a;
    }
};

struct ComplexVec3 {
    cdouble x{0.0, 0.0}, y{0.0, 0.0}, z{0.0, 0.0};

    cdouble& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    cdouble operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    // Bilinear (unconjugated) dot product; the Green identities pair fields
    // without conjugation.
    cdouble dot_bilinear(const ComplexVec3& o) const { return x * o.x + y * o.y + z * o.z; }
};

inline ComplexVec3 apply(const Mat3& A, const ComplexVec3& v) {
    ComplexVec3 r;
    for (int i = 0; i < 3; ++i) {
        cdouble s{0.0, 0.0};
        for (int j = 0; j < 3; ++j) s += A(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

}  // namespace incdet

#endif  // INCDET_CORE_HPP
