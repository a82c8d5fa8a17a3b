#pragma once

#include "sbl/geometry.hpp"

#include <Eigen/Dense>

#include <map>
#include <string>

namespace sbl {

/// Closed forms for the revolution torus T_R (profile circle of radius 1 at
/// distance R > 1 from the axis), used as exact cross-validation oracles.
struct TorusOracle {
    double R = 0.0;
    double area = 0.0;       // 4 pi^2 R
    double h2 = 0.0;         // pi^2 R^2 / sqrt(R^2 - 1)
    Eigen::Matrix3d a_t;     // pi^2 R diag(3, 3, 2)
    Eigen::Matrix3d a_h;     // diagonal, see torus_closed_forms
    double q_coeff = 0.0;    // pi^4 R^3 ((4R^2-3)/sqrt(R^2-1) - 4R)
    double reilly = 0.0;     // R / (2 sqrt(R^2 - 1))
    Eigen::Matrix3d q_matrix() const; // q_coeff * diag(1, 1, -2)
};

TorusOracle torus_closed_forms(double R);

/// Round sphere S^m of radius r in R^{m+1}, m >= 2, in hyperspherical
/// coordinates (all polar axes non-periodic, azimuthal axis periodic).
ImmersedChart make_sphere(int m, double radius);

/// Revolution torus T_R in R^3, both axes periodic.
ImmersedChart make_torus(double R);

/// Clifford torus (cos u, sin u, cos v, sin v)/sqrt(2) in R^4; lies
/// minimally in the unit 3-sphere.
ImmersedChart make_clifford_torus();

/// Axis-aligned ellipsoid with semi-axes (a, b, c) in R^3.
ImmersedChart make_ellipsoid(double a, double b, double c);

/// Catalog dispatch by name: sphere(m, r), torus(R), clifford,
/// ellipsoid(a, b, c). Throws BadParameter for unknown kinds or bad values.
ImmersedChart make_shape(const std::string& kind, const std::map<std::string, double>& params);

} // namespace sbl
