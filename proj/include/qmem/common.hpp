#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmem {

using cplx = std::complex<double>;

// Invalid argument or grid that violates a precondition.
struct GridError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed or unusable input data (CSV schema, unresolvable fringes, ...).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Integration blew up or a fit could not proceed.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration (missing key, bad value).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_ln2 = 1.3862943611198906;   // 2 ln 2
inline constexpr double four_ln2 = 2.772588722239781;   // 4 ln 2
inline constexpr double k_boltzmann = 1.380649e-23;     // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double speed_of_light = 2.99792458e8;  // m/s

// Trapezoidal integral over uniformly spaced samples.
inline double trapz(std::span<const double> y, double dx) {
    if (y.size() < 2) return 0.0;
    double s = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) s += y[i];
    return s * dx;
}

// Trapezoidal integral over a non-uniform abscissa.
inline double trapz(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return s;
}

inline std::vector<double> linspace(double a, double b, int n) {
    if (n < 2) throw GridError("linspace: need at least 2 points");
    std::vector<double> v(static_cast<std::size_t>(n));
    const double step = (b - a) / (n - 1);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + step * i;
    v.back() = b;
    return v;
}

// Vertex of the parabola through (x0,y0), (x1,y1), (x2,y2). Falls back to
// the middle point when the three are collinear.
std::pair<double, double> parabolic_vertex(double x0, double y0, double x1, double y1,
                                           double x2, double y2);

}  // namespace qmem
