#pragma once

#include "sbl/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <string>

namespace sbl {

/// Triangle mesh in R^d (d = 3 or 4 for the catalog) with the discrete
/// Laplace-Beltrami operators attached: cotangent stiffness and barycentric
/// lumped mass. Cotangent weights depend only on edge lengths, so meshes
/// embedded in R^4 are handled identically.
struct TriMesh {
    Eigen::MatrixXd vertices;  // V x d
    Eigen::MatrixXi triangles; // F x 3
    Eigen::SparseMatrix<double> stiffness; // per-edge cotangent weights
    Eigen::VectorXd lumped_mass;           // per-vertex barycentric masses

    double total_area() const { return lumped_mass.sum(); }
    int euler_characteristic() const;
    bool closed() const;    // every edge shared by exactly two triangles
    bool connected() const;
};

/// Builds the operators and validates triangle quality.
TriMesh make_tri_mesh(Eigen::MatrixXd vertices, Eigen::MatrixXi triangles);

/// Samples a 2-dimensional chart on an nu x nv grid, identifies seam
/// vertices on periodic axes and welds coincident vertices (chart
/// singularities such as sphere poles collapse to single vertices).
TriMesh triangulate_chart(const ImmersedChart& chart, int nu, int nv);

/// Smallest nonzero eigenvalue of stiffness x = lambda mass x on a closed
/// connected mesh. Dense solve below 3000 vertices, otherwise shift-invert
/// power iteration with the constant mode deflated.
double first_eigenvalue(const TriMesh& mesh);

/// ASCII OFF, triangle faces only, 3-D vertices written with 17 significant
/// digits (lossless round-trip).
TriMesh load_off(const std::string& path);
void save_off(const TriMesh& mesh, const std::string& path);

} // namespace sbl
