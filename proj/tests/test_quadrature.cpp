#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sbl/errors.hpp"
#include "sbl/quadrature.hpp"
#include "sbl/shapes.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sbl;
using sbl::testing::rel_err;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("axis rules: weights positive, periodic weights sum to the axis length") {
    for (const auto& entry : sbl::testing::catalog()) {
        const QuadratureGrid grid = QuadratureGrid::make(entry.chart, 37);
        for (std::size_t axis = 0; axis < grid.axes.size(); ++axis) {
            double sum = 0.0;
            for (double w : grid.axes[axis].weights) {
                CHECK(w > 0.0);
                sum += w;
            }
            CHECK(sum == doctest::Approx(entry.chart.span(static_cast<int>(axis))).epsilon(1e-12));
        }
    }
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
    std::vector<double> nodes, weights;
    gauss_legendre(8, -1.0, 3.0, nodes, weights);
    // x^15 over [-1, 3]: (3^16 - 1) / 16
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) sum += weights[k] * std::pow(nodes[k], 15);
    CHECK(rel_err(sum, (std::pow(3.0, 16) - 1.0) / 16.0) < 1e-13);
}

TEST_CASE("surface areas: torus 4 pi^2 R, sphere 4 pi r^2") {
    const double R = std::sqrt(2.0);
    const ImmersedChart torus = make_torus(R);
    const double area = integrate_scalar_field(
        torus, QuadratureGrid::make(torus, 128), [](const GeometrySample&) { return 1.0; });
    CHECK(rel_err(area, 4.0 * kPi * kPi * R) < 1e-9);

    const ImmersedChart sphere = make_sphere(2, 1.0);
    const double sphere_area = integrate_scalar_field(
        sphere, QuadratureGrid::make(sphere, 96), [](const GeometrySample&) { return 1.0; });
    CHECK(rel_err(sphere_area, 4.0 * kPi) < 1e-11);
}

TEST_CASE("profile-circle integral formulas behind the torus closed forms") {
    // int_0^{2pi} cos^2(u)/(R + cos u) du = 2 pi R (R/sqrt(R^2-1) - 1)
    // int_0^{2pi} cos^4(u)/(R + cos u) du = pi R (2R^2 (R/sqrt(R^2-1) - 1) - 1)
    auto periodic_integral = [](auto f) {
        const int n = 512;
        double sum = 0.0;
        for (int k = 0; k < n; ++k) sum += f(2.0 * kPi * k / n);
        return sum * 2.0 * kPi / n;
    };
    for (double R : {1.05, std::sqrt(2.0), 2.0}) {
        CAPTURE(R);
        const double ratio = R / std::sqrt(R * R - 1.0) - 1.0;
        const double quad2 =
            periodic_integral([R](double u) { return std::pow(std::cos(u), 2) / (R + std::cos(u)); });
        const double quad4 =
            periodic_integral([R](double u) { return std::pow(std::cos(u), 4) / (R + std::cos(u)); });
        CHECK(rel_err(quad2, 2.0 * kPi * R * ratio) < 1e-12);
        CHECK(rel_err(quad4, kPi * R * (2.0 * R * R * ratio - 1.0)) < 1e-12);
    }
}

TEST_CASE("Willmore energy of the sqrt(2) torus is 2 pi^2") {
    const ImmersedChart torus = make_torus(std::sqrt(2.0));
    const double energy = integrate_scalar_field(
        torus, QuadratureGrid::make(torus, 128),
        [](const GeometrySample& s) { return s.mean_curvature.squaredNorm(); });
    CHECK(rel_err(energy, 2.0 * kPi * kPi) < 1e-11);
}

TEST_CASE("assembled integrals reproduce the torus closed forms") {
    const double R = std::sqrt(2.0);
    const ImmersedChart torus = make_torus(R);
    const IntegralSet I = assemble_integrals(torus, QuadratureGrid::make(torus, 128));
    CHECK(rel_err(I.vol, 4.0 * kPi * kPi * R) < 1e-10);
    CHECK(rel_err(I.h2, 2.0 * kPi * kPi) < 1e-10);
    const Eigen::Matrix3d a_t_oracle =
        std::sqrt(2.0) * kPi * kPi * Eigen::Vector3d(3.0, 3.0, 2.0).asDiagonal();
    CHECK((I.a_t - a_t_oracle).norm() / a_t_oracle.norm() < 1e-10);
}

TEST_CASE("sphere integral matrices are the forced multiples of the identity") {
    const ImmersedChart sphere = make_sphere(2, 1.0);
    const IntegralSet I = assemble_integrals(sphere, QuadratureGrid::make(sphere, 96));
    CHECK((I.a_h - (4.0 * kPi / 3.0) * Eigen::Matrix3d::Identity()).norm() < 1e-9);
    CHECK((I.a_t - (8.0 * kPi / 3.0) * Eigen::Matrix3d::Identity()).norm() < 1e-9);
}

TEST_CASE("IntegralSet identities hold on every catalog shape") {
    for (const auto& entry : sbl::testing::catalog()) {
        CAPTURE(entry.name);
        const IntegralSet I = sbl::testing::assemble(entry);
        CHECK(rel_err(I.a_h.trace(), I.h2) < 1e-10);
        CHECK(rel_err(I.a_t.trace(), I.intrinsic_dim * I.vol) < 1e-10);
        const Eigen::MatrixXd at_over_n = I.a_t / I.intrinsic_dim;
        CHECK((I.a_c + at_over_n).norm() / at_over_n.norm() < 1e-8);
        CHECK(std::abs(I.minkowski_residual) / I.vol < 1e-8);
    }
}

TEST_CASE("trapezoid reaches spectral accuracy by 32 nodes on the torus") {
    const ImmersedChart torus = make_torus(std::sqrt(2.0));
    const double v32 = volume_only(torus, QuadratureGrid::make(torus, 32));
    const double v64 = volume_only(torus, QuadratureGrid::make(torus, 64));
    CHECK(rel_err(v32, v64) < 1e-10);
}

TEST_CASE("integrals transform covariantly under rigid motions") {
    std::mt19937_64 rng(123);
    const ImmersedChart torus = make_torus(1.4);
    const Eigen::MatrixXd rotation = sbl::testing::random_orthogonal(3, rng);
    const ImmersedChart moved = rotated(torus, rotation);

    const IntegralSet base = assemble_integrals(torus, QuadratureGrid::make(torus, 96));
    const IntegralSet image = assemble_integrals(moved, QuadratureGrid::make(moved, 96));
    CHECK(rel_err(image.vol, base.vol) < 1e-9);
    CHECK(rel_err(image.h2, base.h2) < 1e-9);
    CHECK((image.a_h - rotation * base.a_h * rotation.transpose()).norm() / base.a_h.norm() < 1e-9);
    CHECK((image.a_t - rotation * base.a_t * rotation.transpose()).norm() / base.a_t.norm() < 1e-9);
}

TEST_CASE("recenter kills the centroid and keeps curvature integrals") {
    const ImmersedChart torus = make_torus(std::sqrt(2.0));
    const ImmersedChart shifted = translated(torus, Eigen::Vector3d(5.0, 0.0, 0.0));
    const QuadratureGrid grid = QuadratureGrid::make(shifted, 96);
    const IntegralSet before = assemble_integrals(shifted, grid);
    CHECK(before.centroid.norm() > 1.0); // clearly off origin

    const ImmersedChart centered = recenter_chart(shifted, before);
    const IntegralSet after = assemble_integrals(centered, grid);
    CHECK(after.centroid.norm() <= 1e-10 * after.vol);
    CHECK(rel_err(after.vol, before.vol) < 1e-10);
    CHECK(rel_err(after.h2, before.h2) < 1e-10);
    CHECK((after.a_h - before.a_h).norm() / before.a_h.norm() < 1e-10);
    CHECK((after.a_t - before.a_t).norm() / before.a_t.norm() < 1e-10);

    // recenter of a centered chart is the identity
    const IntegralSet base = assemble_integrals(torus, grid);
    const ImmersedChart recentered = recenter_chart(torus, base);
    CHECK((recentered.eval(Eigen::Vector2d(0.3, 0.8)) - torus.eval(Eigen::Vector2d(0.3, 0.8))).norm() <
          1e-12);
}

TEST_CASE("under-resolved charts are rejected as non-convergent") {
    ImmersedChart wiggly = make_torus(2.0);
    auto base_eval = wiggly.eval;
    wiggly.eval = [base_eval](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        Eigen::VectorXd p = base_eval(u);
        p(2) += 0.3 * std::sin(17.0 * u(0)) * std::cos(13.0 * u(1));
        return p;
    };
    wiggly.jacobian = nullptr;
    wiggly.hessian = nullptr;
    CHECK_THROWS_AS((void)assemble_integrals(wiggly, QuadratureGrid::make(wiggly, 8)), NonConvergent);
}

TEST_CASE("grid construction rejects silly resolutions") {
    const ImmersedChart torus = make_torus(2.0);
    CHECK_THROWS_AS((void)QuadratureGrid::make(torus, 3), BadParameter);
    CHECK_THROWS_AS((void)QuadratureGrid::make(torus, 5000), BadParameter);
    CHECK_THROWS_AS((void)QuadratureGrid::make(torus, std::vector<int>{16}), BadParameter);
}

TEST_CASE("repeated assembly is bit-identical") {
    // in-process determinism; the cross-process SBL_THREADS sweep lives in
    // the CLI determinism test
    const ImmersedChart torus = make_torus(std::sqrt(17.0) / 4.0);
    const QuadratureGrid grid = QuadratureGrid::make(torus, 64);
    const IntegralSet a = assemble_integrals(torus, grid);
    const IntegralSet b = assemble_integrals(torus, grid);
    CHECK(a.vol == b.vol);
    CHECK(a.h2 == b.h2);
    CHECK((a.a_h - b.a_h).norm() == 0.0);
}
