#include "sbl/shapes.hpp"

#include "sbl/errors.hpp"

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace sbl {

namespace {

constexpr double kPi = std::numbers::pi;

// Every catalog shape is a product of elementary angle factors per ambient
// component, which makes analytic first and second partials mechanical.
enum class Factor { One, Sin, Cos, RadiusPlusCos };

double factor_value(Factor f, double t, int deriv, double R) {
    switch (f) {
        case Factor::One:
            return deriv == 0 ? 1.0 : 0.0;
        case Factor::Sin:
            return deriv == 0 ? std::sin(t) : (deriv == 1 ? std::cos(t) : -std::sin(t));
        case Factor::Cos:
            return deriv == 0 ? std::cos(t) : (deriv == 1 ? -std::sin(t) : -std::cos(t));
        case Factor::RadiusPlusCos:
            return deriv == 0 ? R + std::cos(t) : (deriv == 1 ? -std::sin(t) : -std::cos(t));
    }
    return 0.0;
}

struct TrigProduct {
    std::vector<double> amplitudes;            // one per ambient component
    std::vector<std::vector<Factor>> factors;  // [component][axis]
    double R = 0.0;

    double component(int k, const Eigen::VectorXd& u, int da, int db) const {
        // da, db: axes differentiated once each (-1 = none); da == db means twice
        double value = amplitudes[static_cast<std::size_t>(k)];
        const auto& row = factors[static_cast<std::size_t>(k)];
        for (int j = 0; j < static_cast<int>(row.size()); ++j) {
            int deriv = (j == da) + (j == db);
            value *= factor_value(row[static_cast<std::size_t>(j)], u(j), deriv, R);
        }
        return value;
    }
};

ImmersedChart chart_from_product(TrigProduct product, int intrinsic_dim, int ambient_dim,
                                 std::vector<std::array<double, 2>> domain,
                                 std::vector<char> periodic) {
    ImmersedChart chart;
    chart.intrinsic_dim = intrinsic_dim;
    chart.ambient_dim = ambient_dim;
    chart.domain = std::move(domain);
    chart.periodic = std::move(periodic);
    chart.eval = [product, ambient_dim](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        Eigen::VectorXd x(ambient_dim);
        for (int k = 0; k < ambient_dim; ++k) x(k) = product.component(k, u, -1, -1);
        return x;
    };
    chart.jacobian = [product, ambient_dim, intrinsic_dim](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
        Eigen::MatrixXd jac(ambient_dim, intrinsic_dim);
        for (int a = 0; a < intrinsic_dim; ++a)
            for (int k = 0; k < ambient_dim; ++k) jac(k, a) = product.component(k, u, a, -1);
        return jac;
    };
    chart.hessian = [product, ambient_dim, intrinsic_dim](const Eigen::VectorXd& u) -> SecondPartials {
        SecondPartials d2;
        d2.dim = intrinsic_dim;
        d2.packed.resize(static_cast<std::size_t>(SecondPartials::packed_size(intrinsic_dim)));
        for (int a = 0; a < intrinsic_dim; ++a)
            for (int b = 0; b <= a; ++b) {
                Eigen::VectorXd vec(ambient_dim);
                for (int k = 0; k < ambient_dim; ++k) vec(k) = product.component(k, u, a, b);
                d2.at(a, b) = vec;
            }
        return d2;
    };
    return chart;
}

} // namespace

Eigen::Matrix3d TorusOracle::q_matrix() const {
    Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
    q(0, 0) = q_coeff;
    q(1, 1) = q_coeff;
    q(2, 2) = -2.0 * q_coeff;
    return q;
}

TorusOracle torus_closed_forms(double R) {
    if (!(R > 1.0)) throw BadParameter("torus radius R must exceed 1");
    const double root = std::sqrt(R * R - 1.0);
    TorusOracle oracle;
    oracle.R = R;
    oracle.area = 4.0 * kPi * kPi * R;
    oracle.h2 = kPi * kPi * R * R / root;
    oracle.a_t = kPi * kPi * R * Eigen::Vector3d(3.0, 3.0, 2.0).asDiagonal();
    const double planar = 0.5 * kPi * kPi * R * R * R * (R / root - 1.0);
    const double axial = kPi * kPi * R * R * (R - root);
    oracle.a_h = Eigen::Vector3d(planar, planar, axial).asDiagonal();
    oracle.q_coeff = std::pow(kPi, 4) * R * R * R * ((4.0 * R * R - 3.0) / root - 4.0 * R);
    oracle.reilly = R / (2.0 * root);
    return oracle;
}

ImmersedChart make_sphere(int m, double radius) {
    if (m < 2) throw BadParameter("sphere dimension m must be at least 2");
    if (m > 6) throw BadParameter("sphere dimension m capped at 6 (tensor grids explode beyond)");
    if (!(radius > 0.0)) throw BadParameter("sphere radius must be positive");

    const int n = m;
    TrigProduct product;
    product.amplitudes.assign(static_cast<std::size_t>(n + 1), radius);
    product.factors.resize(static_cast<std::size_t>(n + 1));
    if (m == 2) {
        // geographic convention: (sin t cos p, sin t sin p, cos t), pole at e_3
        product.factors = {
            {Factor::Sin, Factor::Cos},
            {Factor::Sin, Factor::Sin},
            {Factor::Cos, Factor::One},
        };
    } else {
        // hyperspherical, pole kept in the last ambient slot:
        // standard component c_k = sin(t_0)..sin(t_{k-1}) cos(t_k) (azimuth
        // pair closes with sin) written into ambient slot n - k
        for (int k = 0; k <= n; ++k) {
            std::vector<Factor> row(static_cast<std::size_t>(n), Factor::One);
            const int cut = std::min(k, n - 1);
            for (int j = 0; j < cut; ++j) row[static_cast<std::size_t>(j)] = Factor::Sin;
            if (k < n) row[static_cast<std::size_t>(k)] = Factor::Cos;
            else row[static_cast<std::size_t>(n - 1)] = Factor::Sin;
            product.factors[static_cast<std::size_t>(n - k)] = std::move(row);
        }
    }

    std::vector<std::array<double, 2>> domain(static_cast<std::size_t>(n), {0.0, kPi});
    domain.back() = {0.0, 2.0 * kPi};
    std::vector<char> periodic(static_cast<std::size_t>(n), 0);
    periodic.back() = 1;
    return chart_from_product(std::move(product), n, n + 1, std::move(domain), std::move(periodic));
}

ImmersedChart make_torus(double R) {
    if (!(R > 1.0)) throw BadParameter("torus radius R must exceed 1");
    TrigProduct product;
    product.R = R;
    product.amplitudes = {1.0, 1.0, 1.0};
    product.factors = {
        {Factor::RadiusPlusCos, Factor::Cos}, // (R + cos u) cos v
        {Factor::RadiusPlusCos, Factor::Sin}, // (R + cos u) sin v
        {Factor::Sin, Factor::One},           // sin u
    };
    std::vector<std::array<double, 2>> domain = {{0.0, 2.0 * kPi}, {0.0, 2.0 * kPi}};
    return chart_from_product(std::move(product), 2, 3, std::move(domain), {1, 1});
}

ImmersedChart make_clifford_torus() {
    const double amp = 1.0 / std::sqrt(2.0);
    TrigProduct product;
    product.amplitudes = {amp, amp, amp, amp};
    product.factors = {
        {Factor::Cos, Factor::One},
        {Factor::Sin, Factor::One},
        {Factor::One, Factor::Cos},
        {Factor::One, Factor::Sin},
    };
    std::vector<std::array<double, 2>> domain = {{0.0, 2.0 * kPi}, {0.0, 2.0 * kPi}};
    return chart_from_product(std::move(product), 2, 4, std::move(domain), {1, 1});
}

ImmersedChart make_ellipsoid(double a, double b, double c) {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        throw BadParameter("ellipsoid semi-axes must be positive");
    TrigProduct product;
    product.amplitudes = {a, b, c};
    product.factors = {
        {Factor::Sin, Factor::Cos},
        {Factor::Sin, Factor::Sin},
        {Factor::Cos, Factor::One},
    };
    std::vector<std::array<double, 2>> domain = {{0.0, kPi}, {0.0, 2.0 * kPi}};
    return chart_from_product(std::move(product), 2, 3, std::move(domain), {0, 1});
}

ImmersedChart make_shape(const std::string& kind, const std::map<std::string, double>& params) {
    auto get = [&](const std::string& key, double fallback, bool required) -> double {
        auto it = params.find(key);
        if (it != params.end()) return it->second;
        if (required) throw BadParameter("missing parameter '" + key + "' for shape " + kind);
        return fallback;
    };
    if (kind == "sphere") {
        const double m = get("m", 2.0, false);
        if (m != std::floor(m)) throw BadParameter("sphere dimension m must be an integer");
        return make_sphere(static_cast<int>(m), get("r", 1.0, false));
    }
    if (kind == "torus") return make_torus(get("R", 0.0, true));
    if (kind == "clifford") return make_clifford_torus();
    if (kind == "ellipsoid")
        return make_ellipsoid(get("a", 0.0, true), get("b", 0.0, true), get("c", 0.0, true));
    throw BadParameter("unknown shape kind '" + kind + "'");
}

} // namespace sbl
