#pragma once

#include <cmath>
#include <vector>

namespace oracle {

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Real SN3D spherical harmonics in ACN order, built on std::assoc_legendre
// (which omits the Condon-Shortley phase, as ambiX does).
inline std::vector<double> sn3d(double azimuth, double elevation, int order) {
    std::vector<double> out;
    const double s = std::sin(elevation);
    for (int l = 0; l <= order; ++l)
        for (int m = -l; m <= l; ++m) {
            const int am = std::abs(m);
            const double norm = std::sqrt((m == 0 ? 1.0 : 2.0) * factorial(l - am) / factorial(l + am));
            const double p = std::assoc_legendre(static_cast<unsigned>(l), static_cast<unsigned>(am), s);
            const double trig = m >= 0 ? std::cos(am * azimuth) : std::sin(am * azimuth);
            out.push_back(norm * p * trig);
        }
    return out;
}

}  // namespace oracle
