#pragma once

#include "sbl/geometry.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

namespace sbl {

/// One quadrature rule per chart axis: composite trapezoid on periodic axes
/// (spectrally accurate for smooth periodic integrands), Gauss-Legendre on
/// non-periodic axes (open nodes, so chart-boundary singularities such as
/// sphere poles are never evaluated).
struct AxisRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    bool periodic = false;
};

struct QuadratureGrid {
    std::vector<AxisRule> axes;

    static QuadratureGrid make(const ImmersedChart& chart, const std::vector<int>& points_per_axis);
    static QuadratureGrid make(const ImmersedChart& chart, int points_every_axis);

    std::size_t total_points() const;
    /// Decodes a flat row-major index into the parameter point and the
    /// product weight.
    void unpack(std::size_t flat, Eigen::VectorXd& u, double& weight) const;
    std::vector<int> points_per_axis() const;
};

/// Gauss-Legendre nodes/weights on [a, b].
void gauss_legendre(int count, double a, double b,
                    std::vector<double>& nodes, std::vector<double>& weights);

/// Every global integral the bounds need, assembled in one pass.
struct IntegralSet {
    int intrinsic_dim = 0; // n
    int ambient_dim = 0;   // m + 1
    double vol = 0.0;      // integral of dV
    double h2 = 0.0;       // integral of |H|^2 dV
    Eigen::MatrixXd a_h;   // integral of H H^T dV
    Eigen::MatrixXd a_t;   // integral of P dV
    Eigen::MatrixXd a_c;   // integral of sym(psi H^T) dV
    Eigen::MatrixXd a_p;   // integral of psi psi^T dV
    Eigen::VectorXd centroid;         // integral of psi dV
    double minkowski_residual = 0.0;  // integral of (1 + <H, psi>) dV
};

/// Sum of weights * f(sample) * area_element over the grid, reduced in a
/// fixed pairwise order (bit-reproducible for any worker count).
double integrate_scalar_field(const ImmersedChart& chart, const QuadratureGrid& grid,
                              const std::function<double(const GeometrySample&)>& f);

/// Volume only (first derivatives per point); used by the convergence guard.
double volume_only(const ImmersedChart& chart, const QuadratureGrid& grid);

/// Assembles the full IntegralSet. Throws NonConvergent when doubling the
/// grid moves the volume by more than 1e-6 relative.
IntegralSet assemble_integrals(const ImmersedChart& chart, const QuadratureGrid& grid);

/// Translates the chart so its center of gravity sits at the origin.
ImmersedChart recenter_chart(const ImmersedChart& chart, const IntegralSet& integrals);

} // namespace sbl
