#pragma once

#include "sbl/quadrature.hpp"

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

namespace sbl {

/// The symmetric form Q = n vol A_H - h2 A_T on R^{m+1}. Its sign at a
/// direction decides whether the b (Q < 0) or b-tilde (Q > 0) family beats
/// the Reilly bound; Q is traceless and never definite.
struct QForm {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd eigenvalues;  // ascending
    Eigen::MatrixXd eigenvectors; // orthonormal columns, matching order
    std::array<int, 3> inertia{0, 0, 0}; // (negative, zero, positive) with threshold tau
    double tau = 0.0;   // zero threshold: 1e-9 * scale
    double scale = 0.0; // n vol |A_H|_F + h2 |A_T|_F, the pre-cancellation magnitude

    double operator()(const Eigen::VectorXd& v) const { return v.dot(matrix * v); }
    double norm() const { return matrix.norm(); }
    bool is_zero() const { return norm() <= tau; }
};

/// B(psi) = n h2 / vol.
double reilly_bound(const IntegralSet& integrals);

/// b(psi, v) = n (h2 + v.A_H v) / (vol + v.A_T v / n); reduces to the Reilly
/// bound at v = 0.
double pr1_bound(const IntegralSet& integrals, const Eigen::VectorXd& v);

/// b~(psi, v) = n (h2 - v.A_H v) / (vol - v.A_T v / n) for unit v.
/// Throws NotUnit when |v| differs from 1 by more than 1e-12 and
/// NonPositiveDenominator when the integrals are inconsistent.
double pr2_bound(const IntegralSet& integrals, const Eigen::VectorXd& v);

QForm q_matrix(const IntegralSet& integrals);
inline double q_eval(const QForm& q, const Eigen::VectorXd& v) { return q(v); }

/// lim_{t->inf} b(psi, t v) = n^2 (v.A_H v)/(v.A_T v); an upper bound for
/// lambda_1 whenever Q(v) < 0. Throws TangentiallyDegenerate when v.A_T v
/// vanishes against |A_T|.
double limit_bound(const IntegralSet& integrals, const Eigen::VectorXd& v);

/// Samples t -> b(psi, t v); strictly decreasing iff Q(v) < 0, increasing
/// iff Q(v) > 0, constant iff Q(v) = 0.
std::vector<std::pair<double, double>> ray_profile(const IntegralSet& integrals,
                                                   const Eigen::VectorXd& v,
                                                   std::span<const double> t_values);

/// Exact algebraic identities tying the bound gaps to Q(v):
///   first  = (B - b(v))  vol (vol + v.A_T v / n) + Q(v)
///   second = (B - b~(v)) vol (vol - v.A_T v / n) - Q(v)   (unit v only)
/// Both vanish up to roundoff; the second is NaN for non-unit v.
std::pair<double, double> gap_identities(const IntegralSet& integrals, const Eigen::VectorXd& v);

struct BestPr1 {
    double value = 0.0;
    Eigen::VectorXd direction; // zero vector when the optimum is B itself
    bool attained = false;     // true iff value == B (optimum at v = 0)
    bool restricted_pencil = false; // A_T near-singular fallback engaged
    Eigen::MatrixXd eigenspace;     // basis of the optimal pencil eigenspace
};

/// min over all rays of the PR1 family: min(B, n^2 rho_min) where rho_min is
/// the smallest eigenvalue of the pencil (A_H, A_T), solved by Cholesky
/// reduction. Falls back to the pencil restricted to range(A_T) when A_T is
/// nearly singular (submanifold inside a hyperplane).
BestPr1 best_pr1(const IntegralSet& integrals);

struct BestPr2 {
    double value = 0.0;
    Eigen::VectorXd direction; // unit witness
    Eigen::MatrixXd eigenspace;
    int iterations = 0;
};

/// Global minimum of b~ over the unit sphere via bisection on
/// phi(mu) = (n h2 - mu vol) - lambda_max(n A_H - (mu/n) A_T), which is
/// strictly decreasing with the minimum ratio as its unique root.
BestPr2 best_pr2(const IntegralSet& integrals);

/// Equality diagnostic for the b~ family at a unit direction v: the witness
/// equation is Delta psi + lambda_1 psi = rho v for a mean-zero rho, with
/// psi recentered. Returns the L^2 norm of the component of
/// Delta psi + lambda_1 psi orthogonal to v, relative to the size of
/// Delta psi and lambda_1 psi themselves. Near zero iff equality is
/// (numerically) attained; lambda_1 comes from the mesh estimate.
double pr2_equality_residual(const IntegralSet& integrals, const Eigen::VectorXd& v,
                             double lambda1);

/// Surface measure of the unit sphere S^m.
double sphere_volume(int m);

/// Integral over S^m of the quadratic form F (trace formula, exact):
/// trace(F)/(m+1) * vol(S^m).
double average_quadratic(const Eigen::MatrixXd& form);

/// Integral over the equatorial subsphere S^{m-1} orthogonal to `axis`:
/// (trace(F) - axis.F axis)/m * vol(S^{m-1}).
double average_quadratic(const Eigen::MatrixXd& form, const Eigen::VectorXd& axis);

/// Deterministic, roughly uniform unit directions: Fibonacci lattice on S^2,
/// Halton-driven Gaussian normalization in other dimensions.
std::vector<Eigen::VectorXd> sphere_directions(int ambient_dim, int count);

} // namespace sbl
