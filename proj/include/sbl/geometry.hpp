#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

namespace sbl {

/// Packed symmetric array of second partial derivatives: one ambient vector
/// per unordered index pair (i, j), j <= i.
struct SecondPartials {
    int dim = 0;
    std::vector<Eigen::VectorXd> packed;

    static int packed_size(int n) { return n * (n + 1) / 2; }
    static int index(int i, int j) {
        if (j > i) std::swap(i, j);
        return i * (i + 1) / 2 + j;
    }

    const Eigen::VectorXd& operator()(int i, int j) const { return packed[static_cast<std::size_t>(index(i, j))]; }
    Eigen::VectorXd& at(int i, int j) { return packed[static_cast<std::size_t>(index(i, j))]; }
};

/// A smooth parametrization psi : [a_1,b_1] x ... x [a_n,b_n] -> R^{m+1}
/// of a compact n-dimensional submanifold, n >= 2.
///
/// `jacobian` and `hessian` are optional analytic derivative callbacks; when
/// absent, central finite differences with step fd_step_rel * span are used.
/// For finite differences, `eval` must be evaluable in a small neighborhood
/// of the closed domain box (periodic formulas naturally are).
struct ImmersedChart {
    using EvalFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
    using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
    using HessianFn = std::function<SecondPartials(const Eigen::VectorXd&)>;

    int ambient_dim = 0;   // m + 1
    int intrinsic_dim = 0; // n
    std::vector<std::array<double, 2>> domain;
    std::vector<char> periodic;
    EvalFn eval;
    JacobianFn jacobian; // may be empty
    HessianFn hessian;   // may be empty
    double fd_step_rel = 1e-5;

    double span(int axis) const { return domain[static_cast<std::size_t>(axis)][1] - domain[static_cast<std::size_t>(axis)][0]; }
    bool contains(const Eigen::VectorXd& u, double slack_rel = 1e-12) const;

    /// Copy with derivative callbacks stripped, forcing finite differences.
    ImmersedChart finite_difference_variant(double fd_rel) const;
};

/// Pointwise first/second fundamental data at one parameter point.
struct GeometrySample {
    Eigen::VectorXd position;       // psi(u)
    Eigen::MatrixXd frame;          // (m+1) x n tangent partials
    Eigen::MatrixXd metric;         // n x n Gram matrix
    Eigen::MatrixXd inv_metric;     // n x n
    double area_element = 0.0;      // sqrt(det metric)
    SecondPartials second_partials;
    Eigen::VectorXd mean_curvature; // normal-valued, (1/n) g^{ij} (psi_ij)^perp
    Eigen::MatrixXd projector;      // (m+1) x (m+1) orthogonal projector onto T_p M
};

/// Evaluates the full pointwise geometry at u.
/// Throws OutOfDomain when u is outside the box and DegenerateImmersion when
/// the tangent vectors fail the immersion condition.
GeometrySample eval_frame(const ImmersedChart& chart, const Eigen::VectorXd& u);

/// Light path: only the area element (first derivatives), for volume scans.
double area_element_at(const ImmersedChart& chart, const Eigen::VectorXd& u);

inline const Eigen::VectorXd& mean_curvature_vector(const GeometrySample& s) { return s.mean_curvature; }
inline const Eigen::MatrixXd& tangent_projector(const GeometrySample& s) { return s.projector; }

/// Orthogonal projection of an ambient vector onto the tangent space.
Eigen::VectorXd tangential_component(const GeometrySample& s, const Eigen::VectorXd& w);

/// Chart translated by `offset` (curvature data unchanged).
ImmersedChart translated(const ImmersedChart& chart, const Eigen::VectorXd& offset);

/// Chart mapped through an orthogonal matrix (rigid rotation of the image).
ImmersedChart rotated(const ImmersedChart& chart, const Eigen::MatrixXd& orthogonal);

} // namespace sbl
