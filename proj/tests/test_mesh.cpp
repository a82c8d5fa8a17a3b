#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sbl/bounds.hpp"
#include "sbl/errors.hpp"
#include "sbl/mesh.hpp"
#include "sbl/shapes.hpp"
#include "test_support.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace sbl;
using sbl::testing::rel_err;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("torus grid: counts, Euler characteristic 0, closed") {
    const TriMesh mesh = triangulate_chart(make_torus(std::sqrt(2.0)), 64, 32);
    CHECK(mesh.vertices.rows() == 64 * 32);
    CHECK(mesh.triangles.rows() == 2 * 64 * 32);
    CHECK(mesh.euler_characteristic() == 0);
    CHECK(mesh.closed());
    CHECK(mesh.connected());
}

TEST_CASE("sphere grid: poles collapse, Euler characteristic 2") {
    const TriMesh mesh = triangulate_chart(make_sphere(2, 1.0), 64, 32);
    CHECK(mesh.vertices.rows() == 62 * 32 + 2);
    CHECK(mesh.euler_characteristic() == 2);
    CHECK(mesh.closed());
}

TEST_CASE("Clifford torus meshes identically in R^4") {
    const TriMesh mesh = triangulate_chart(make_clifford_torus(), 32, 32);
    CHECK(mesh.vertices.cols() == 4);
    CHECK(mesh.vertices.rows() == 32 * 32);
    CHECK(mesh.euler_characteristic() == 0);
    CHECK(mesh.closed());
}

TEST_CASE("lumped mass sums to the total triangle area") {
    const TriMesh mesh = triangulate_chart(make_torus(1.3), 48, 24);
    double area = 0.0;
    for (int f = 0; f < mesh.triangles.rows(); ++f) {
        const Eigen::VectorXd a = mesh.vertices.row(mesh.triangles(f, 0));
        const Eigen::VectorXd b = mesh.vertices.row(mesh.triangles(f, 1));
        const Eigen::VectorXd c = mesh.vertices.row(mesh.triangles(f, 2));
        // simple cross-product area; mesh is embedded in R^3
        const Eigen::Vector3d u = (b - a).head(3), v = (c - a).head(3);
        area += 0.5 * u.cross(v).norm();
    }
    CHECK(rel_err(mesh.total_area(), area) < 1e-12);
}

TEST_CASE("constant vectors are in the stiffness kernel") {
    const TriMesh mesh = triangulate_chart(make_torus(1.6), 32, 16);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.vertices.rows());
    CHECK((mesh.stiffness * ones).norm() < 1e-10 * mesh.stiffness.norm());
}

TEST_CASE("sphere eigenvalue: dense path on a small mesh") {
    const TriMesh mesh = triangulate_chart(make_sphere(2, 1.0), 48, 24); // 1106 vertices
    REQUIRE(mesh.vertices.rows() < 3000);
    CHECK(rel_err(first_eigenvalue(mesh), 2.0) < 0.02);
}

TEST_CASE("sphere eigenvalue: iterative path at 128x64") {
    const TriMesh mesh = triangulate_chart(make_sphere(2, 1.0), 128, 64); // 8066 vertices
    REQUIRE(mesh.vertices.rows() >= 3000);
    CHECK(rel_err(first_eigenvalue(mesh), 2.0) < 0.02);
}

TEST_CASE("Clifford eigenvalue matches the flat-torus spectrum") {
    const TriMesh mesh = triangulate_chart(make_clifford_torus(), 64, 64); // 4096 vertices
    CHECK(rel_err(first_eigenvalue(mesh), 2.0) < 0.02);
}

TEST_CASE("radius scaling: lambda_1 of a radius-2 sphere is 1/2") {
    const TriMesh mesh = triangulate_chart(make_sphere(2, 2.0), 48, 24);
    CHECK(rel_err(first_eigenvalue(mesh), 0.5) < 0.02);
}

TEST_CASE("refinement stabilizes lambda_1") {
    const ImmersedChart sphere = make_sphere(2, 1.0);
    const double coarse = first_eigenvalue(triangulate_chart(sphere, 48, 24));
    const double medium = first_eigenvalue(triangulate_chart(sphere, 72, 36));
    const double fine = first_eigenvalue(triangulate_chart(sphere, 96, 48));
    CHECK(rel_err(coarse, medium) < 0.01);
    CHECK(rel_err(medium, fine) < 0.005);
}

TEST_CASE("rigid motions leave lambda_1 unchanged") {
    std::mt19937_64 rng(77);
    const ImmersedChart torus = make_torus(1.5);
    const ImmersedChart moved =
        translated(rotated(torus, sbl::testing::random_orthogonal(3, rng)),
                   Eigen::Vector3d(3.0, -1.0, 2.0));
    const double base = first_eigenvalue(triangulate_chart(torus, 48, 24));
    const double image = first_eigenvalue(triangulate_chart(moved, 48, 24));
    CHECK(rel_err(base, image) < 1e-10);
}

TEST_CASE("eigenvalue preconditions") {
    // two disjoint tori: not connected
    const TriMesh a = triangulate_chart(make_torus(1.5), 16, 8);
    const TriMesh b = triangulate_chart(translated(make_torus(1.5), Eigen::Vector3d(10, 0, 0)), 16, 8);
    Eigen::MatrixXd vertices(a.vertices.rows() + b.vertices.rows(), 3);
    vertices << a.vertices, b.vertices;
    Eigen::MatrixXi triangles(a.triangles.rows() + b.triangles.rows(), 3);
    triangles << a.triangles, (b.triangles.array() + static_cast<int>(a.vertices.rows())).matrix();
    const TriMesh disjoint = make_tri_mesh(vertices, triangles);
    CHECK_THROWS_AS((void)first_eigenvalue(disjoint), BadParameter);

    // one triangle: not closed
    Eigen::MatrixXd tri_v(3, 3);
    tri_v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    Eigen::MatrixXi tri_f(1, 3);
    tri_f << 0, 1, 2;
    CHECK_THROWS_AS((void)first_eigenvalue(make_tri_mesh(tri_v, tri_f)), BadParameter);
}

TEST_CASE("degenerate triangles are rejected") {
    Eigen::MatrixXd vertices(3, 3);
    vertices << 0, 0, 0, 1, 0, 0, 2, 0, 0; // collinear
    Eigen::MatrixXi triangles(1, 3);
    triangles << 0, 1, 2;
    CHECK_THROWS_AS((void)make_tri_mesh(vertices, triangles), DegenerateTriangle);
}

TEST_CASE("OFF round-trip preserves vertices and connectivity") {
    const TriMesh mesh = triangulate_chart(make_torus(std::sqrt(2.0)), 24, 12);
    const auto path = temp_file("sbl_roundtrip.off");
    save_off(mesh, path.string());
    const TriMesh loaded = load_off(path.string());
    REQUIRE(loaded.vertices.rows() == mesh.vertices.rows());
    REQUIRE(loaded.triangles.rows() == mesh.triangles.rows());
    CHECK((loaded.vertices - mesh.vertices).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((loaded.triangles - mesh.triangles).cwiseAbs().maxCoeff() == 0);
    std::filesystem::remove(path);
}

TEST_CASE("OFF parser reports the offending line") {
    const auto truncated = temp_file("sbl_truncated.off");
    {
        std::ofstream out(truncated);
        out << "OFF\n4 2 0\n0 0 0\n1 0 0\n";
    }
    try {
        (void)load_off(truncated.string());
        FAIL("expected ParseError");
    } catch (const ParseError& error) {
        CHECK(std::string(error.what()).find("line 4") != std::string::npos);
    }
    std::filesystem::remove(truncated);

    const auto quad = temp_file("sbl_quad.off");
    {
        std::ofstream out(quad);
        out << "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n";
    }
    CHECK_THROWS_AS((void)load_off(quad.string()), NonTriangleFace);
    std::filesystem::remove(quad);

    CHECK_THROWS_AS((void)load_off("/nonexistent/path.off"), IoError);
}

TEST_CASE("OFF writer refuses non-3D meshes") {
    const TriMesh mesh = triangulate_chart(make_clifford_torus(), 16, 16);
    CHECK_THROWS_AS(save_off(mesh, temp_file("sbl_r4.off").string()), IoError);
}

TEST_CASE("triangulation validates its inputs") {
    CHECK_THROWS_AS((void)triangulate_chart(make_torus(1.5), 4, 32), BadParameter);
    CHECK_THROWS_AS((void)triangulate_chart(make_sphere(3, 1.0), 16, 16), BadParameter);
}

TEST_CASE("every emitted bound dominates the mesh eigenvalue") {
    std::mt19937_64 rng(2024);
    for (const auto& entry : sbl::testing::catalog(96, 72)) {
        CAPTURE(entry.name);
        const IntegralSet I = sbl::testing::assemble(entry);
        const double lambda = first_eigenvalue(triangulate_chart(entry.chart, 48, 24));
        const QForm q = q_matrix(I);

        auto dominates = [&](double bound) { return lambda <= bound * 1.02; };
        CHECK(dominates(reilly_bound(I)));
        CHECK(dominates(best_pr1(I).value));
        CHECK(dominates(best_pr2(I).value));
        for (int trial = 0; trial < 50; ++trial) {
            const Eigen::VectorXd v = sbl::testing::random_unit(I.ambient_dim, rng);
            CHECK(dominates(pr1_bound(I, v)));
            CHECK(dominates(pr2_bound(I, v)));
            if (q(v) < -q.tau) CHECK(dominates(limit_bound(I, v)));
        }
    }
}
