#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "caos/grid.hpp"

namespace testing {

inline constexpr double pi = std::numbers::pi;

inline caos::OceanField sample(const caos::Grid& g, caos::BcTag tag, double (*f)(double, double)) {
    return caos::OceanField::from_function(g, tag, f);
}

inline double sinsin(double y, double z) { return std::sin(pi * y) * std::sin(pi * z); }
inline double coscos(double y, double z) { return std::cos(pi * y) * std::cos(pi * z); }

/// Random combination of low modes: cosines (even ghosts) for tracers,
/// sines (zero boundary, odd ghosts) for streamfunction-like fields.
inline caos::OceanField random_smooth(const caos::Grid& g, bool dirichlet, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double c[4][4];
    for (auto& row : c)
        for (double& x : row) x = u(gen);
    caos::OceanField f(g, dirichlet ? caos::BcTag::streamfunction : caos::BcTag::temperature);
    for (int i = 0; i <= g.ny; ++i)
        for (int j = 0; j <= g.nz; ++j) {
            double v = 0.0;
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) {
                    const double y = g.y(i), z = g.z(j);
                    v += c[k][l] * (dirichlet ? std::sin((k + 1) * pi * y) * std::sin((l + 1) * pi * z)
                                              : std::cos(k * pi * y) * std::cos(l * pi * z));
                }
            f.at(i, j) = v;
        }
    if (dirichlet) {
        for (int i = 0; i <= g.ny; ++i) f.at(i, 0) = f.at(i, g.nz) = 0.0;
        for (int j = 0; j <= g.nz; ++j) f.at(0, j) = f.at(g.ny, j) = 0.0;
        caos::fill_dirichlet_ghosts(f);
    } else {
        caos::fill_neumann_ghosts(f);
    }
    return f;
}

/// Trapezoid-weighted sum of f (times `times` pointwise if given).
inline double weighted_sum(const caos::OceanField& f, const caos::OceanField* times = nullptr) {
    const caos::Grid& g = f.grid();
    double s = 0.0;
    for (int i = 0; i <= g.ny; ++i)
        for (int j = 0; j <= g.nz; ++j) s += g.wy(i) * g.wz(j) * f(i, j) * (times ? (*times)(i, j) : 1.0);
    return s;
}

inline double order(double coarse_err, double fine_err) { return std::log2(coarse_err / fine_err); }

}  // namespace testing
