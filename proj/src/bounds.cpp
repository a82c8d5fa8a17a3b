#include "sbl/bounds.hpp"

#include "sbl/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>

namespace sbl {

namespace {

constexpr double kPi = std::numbers::pi;

double q_scale(const IntegralSet& I) {
    return I.intrinsic_dim * I.vol * I.a_h.norm() + I.h2 * I.a_t.norm();
}

// Sign-fix an eigenvector: first coordinate above noise becomes positive.
Eigen::VectorXd canonical_direction(const Eigen::VectorXd& v) {
    const double floor = 1e-12 * v.norm();
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > floor) return v(i) > 0.0 ? v : Eigen::VectorXd(-v);
    }
    return v;
}

} // namespace

double reilly_bound(const IntegralSet& I) {
    if (!(I.vol > 0.0)) throw BadParameter("Reilly bound requires positive volume");
    return I.intrinsic_dim * I.h2 / I.vol;
}

double pr1_bound(const IntegralSet& I, const Eigen::VectorXd& v) {
    const double n = I.intrinsic_dim;
    const double numerator = n * (I.h2 + v.dot(I.a_h * v));
    const double denominator = I.vol + v.dot(I.a_t * v) / n;
    return numerator / denominator;
}

double pr2_bound(const IntegralSet& I, const Eigen::VectorXd& v) {
    if (std::abs(v.norm() - 1.0) > 1e-12)
        throw NotUnit("pr2_bound requires a unit direction");
    const double n = I.intrinsic_dim;
    const double denominator = I.vol - v.dot(I.a_t * v) / n;
    if (!(denominator > 0.0))
        throw NonPositiveDenominator("vol - v.A_T v / n must stay positive for a valid IntegralSet");
    return n * (I.h2 - v.dot(I.a_h * v)) / denominator;
}

QForm q_matrix(const IntegralSet& I) {
    QForm q;
    q.matrix = I.intrinsic_dim * I.vol * I.a_h - I.h2 * I.a_t;
    q.scale = q_scale(I);
    q.tau = 1e-9 * q.scale;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q.matrix);
    q.eigenvalues = solver.eigenvalues();
    q.eigenvectors = solver.eigenvectors();
    for (int i = 0; i < q.eigenvalues.size(); ++i) {
        if (q.eigenvalues(i) < -q.tau) ++q.inertia[0];
        else if (q.eigenvalues(i) > q.tau) ++q.inertia[2];
        else ++q.inertia[1];
    }
    return q;
}

double limit_bound(const IntegralSet& I, const Eigen::VectorXd& v) {
    const double tangential = v.dot(I.a_t * v);
    if (tangential <= 1e-10 * I.a_t.norm() * v.squaredNorm())
        throw TangentiallyDegenerate("v.A_T v vanishes: direction orthogonal to the submanifold's spread");
    const double n = I.intrinsic_dim;
    return n * n * v.dot(I.a_h * v) / tangential;
}

std::vector<std::pair<double, double>> ray_profile(const IntegralSet& I,
                                                   const Eigen::VectorXd& v,
                                                   std::span<const double> t_values) {
    if (v.norm() == 0.0) throw BadParameter("ray_profile requires a nonzero direction");
    std::vector<std::pair<double, double>> profile;
    profile.reserve(t_values.size());
    for (double t : t_values) profile.emplace_back(t, pr1_bound(I, t * v));
    return profile;
}

std::pair<double, double> gap_identities(const IntegralSet& I, const Eigen::VectorXd& v) {
    const double n = I.intrinsic_dim;
    const double b_reilly = reilly_bound(I);
    const double tangential = v.dot(I.a_t * v) / n;
    const double q_value = n * I.vol * v.dot(I.a_h * v) - I.h2 * v.dot(I.a_t * v);

    const double first =
        (b_reilly - pr1_bound(I, v)) * I.vol * (I.vol + tangential) + q_value;

    double second = std::numeric_limits<double>::quiet_NaN();
    if (std::abs(v.norm() - 1.0) <= 1e-12) {
        second = (b_reilly - pr2_bound(I, v)) * I.vol * (I.vol - tangential) - q_value;
    }
    return {first, second};
}

BestPr1 best_pr1(const IntegralSet& I) {
    const double n = I.intrinsic_dim;
    const int ma = I.ambient_dim;
    const double b_reilly = reilly_bound(I);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> at_eigen(I.a_t);
    const double at_floor = 1e-10 * I.a_t.trace();

    BestPr1 best;
    Eigen::VectorXd rho_values;
    Eigen::MatrixXd rho_vectors;

    if (at_eigen.eigenvalues()(0) > at_floor) {
        // Cholesky reduction of the pencil (A_H, A_T) to a standard problem
        Eigen::LLT<Eigen::MatrixXd> llt(I.a_t);
        if (llt.info() != Eigen::Success)
            throw TangentiallyDegenerate("A_T is not positive definite");
        const Eigen::MatrixXd l = llt.matrixL();
        const Eigen::MatrixXd reduced =
            l.triangularView<Eigen::Lower>().solve(
                Eigen::MatrixXd(l.triangularView<Eigen::Lower>()
                                    .solve(I.a_h)
                                    .transpose()))
                .transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (reduced + reduced.transpose()));
        rho_values = solver.eigenvalues();
        rho_vectors.resize(ma, ma);
        for (int i = 0; i < ma; ++i) {
            Eigen::VectorXd v = l.transpose().triangularView<Eigen::Upper>().solve(
                Eigen::VectorXd(solver.eigenvectors().col(i)));
            rho_vectors.col(i) = v.normalized();
        }
    } else {
        // submanifold effectively inside a hyperplane: restrict the pencil
        // to the span of A_T
        best.restricted_pencil = true;
        int rank = 0;
        for (int i = 0; i < ma; ++i)
            if (at_eigen.eigenvalues()(i) > at_floor) ++rank;
        if (rank == 0) throw TangentiallyDegenerate("A_T vanishes entirely");
        const Eigen::MatrixXd basis = at_eigen.eigenvectors().rightCols(rank);
        const Eigen::MatrixXd ah_r = basis.transpose() * I.a_h * basis;
        const Eigen::MatrixXd at_r = basis.transpose() * I.a_t * basis;
        Eigen::LLT<Eigen::MatrixXd> llt(at_r);
        if (llt.info() != Eigen::Success)
            throw TangentiallyDegenerate("restricted pencil still degenerate");
        const Eigen::MatrixXd l = llt.matrixL();
        const Eigen::MatrixXd reduced =
            l.triangularView<Eigen::Lower>().solve(
                Eigen::MatrixXd(l.triangularView<Eigen::Lower>()
                                    .solve(ah_r)
                                    .transpose()))
                .transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (reduced + reduced.transpose()));
        rho_values = solver.eigenvalues();
        rho_vectors.resize(ma, rank);
        for (int i = 0; i < rank; ++i) {
            Eigen::VectorXd y = l.transpose().triangularView<Eigen::Upper>().solve(
                Eigen::VectorXd(solver.eigenvectors().col(i)));
            rho_vectors.col(i) = (basis * y).normalized();
        }
    }

    const double limit_value = n * n * rho_values(0);
    const double tie_tol = 1e-9 * std::max(1.0, b_reilly);
    if (limit_value < b_reilly - tie_tol) {
        best.value = limit_value;
        // collect the full eigenspace of the extreme pencil eigenvalue
        const double gap_tol = 1e-9 * std::max(std::abs(rho_values(0)), rho_values.cwiseAbs().maxCoeff());
        int multiplicity = 1;
        while (multiplicity < rho_values.size() &&
               rho_values(multiplicity) - rho_values(0) <= gap_tol)
            ++multiplicity;
        best.eigenspace = rho_vectors.leftCols(multiplicity);
        best.direction = canonical_direction(best.eigenspace.col(0));
        best.attained = false;
    } else {
        best.value = b_reilly;
        best.direction = Eigen::VectorXd::Zero(ma);
        best.eigenspace = Eigen::MatrixXd(ma, 0);
        best.attained = true;
    }
    return best;
}

BestPr2 best_pr2(const IntegralSet& I) {
    const double n = I.intrinsic_dim;
    const int ma = I.ambient_dim;

    // phi(mu) = (n h2 - mu vol) - lambda_max(n A_H - (mu/n) A_T): pointwise
    // minimum over unit v of N(v) - mu D(v), strictly decreasing in mu.
    auto phi = [&](double mu, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>* solver_out) {
        const Eigen::MatrixXd shifted = n * I.a_h - (mu / n) * I.a_t;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(shifted);
        if (solver_out != nullptr) *solver_out = solver;
        return (n * I.h2 - mu * I.vol) - solver.eigenvalues()(ma - 1);
    };

    double lo = 0.0;
    double hi = n * I.h2 / (I.vol * (1.0 - 1.0 / n));
    const double phi_lo = phi(lo, nullptr);
    const double phi_hi = phi(hi, nullptr);
    if (!(phi_lo >= 0.0) || !(phi_hi < 0.0))
        throw BisectionFailure("phi does not change sign over the bracket; IntegralSet is inconsistent");

    BestPr2 best;
    for (best.iterations = 0; best.iterations < 60; ++best.iterations) {
        const double mid = 0.5 * (lo + hi);
        if (phi(mid, nullptr) >= 0.0) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-12) break;
    }

    const double mu = 0.5 * (lo + hi);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    phi(mu, &solver);
    const Eigen::VectorXd& spectrum = solver.eigenvalues();
    const double gap_tol =
        1e-9 * std::max(std::abs(spectrum(ma - 1)), spectrum.cwiseAbs().maxCoeff());
    int multiplicity = 1;
    while (multiplicity < ma &&
           spectrum(ma - 1) - spectrum(ma - 1 - multiplicity) <= gap_tol)
        ++multiplicity;
    best.eigenspace = solver.eigenvectors().rightCols(multiplicity).rowwise().reverse();
    best.direction = canonical_direction(best.eigenspace.col(0)).normalized();
    best.value = pr2_bound(I, best.direction);
    return best;
}

double pr2_equality_residual(const IntegralSet& I, const Eigen::VectorXd& v, double lambda1) {
    if (std::abs(v.norm() - 1.0) > 1e-12)
        throw NotUnit("equality residual requires a unit direction");
    const double n = I.intrinsic_dim;
    // w = Delta psi + lambda psi = n H + lambda (psi - centroid/vol); the
    // second moment of w collapses to a matrix expression in the assembled
    // integrals (centroid terms use integral(H) = 0)
    const Eigen::MatrixXd a_p_centered =
        I.a_p - I.centroid * I.centroid.transpose() / I.vol;
    const Eigen::MatrixXd second_moment =
        n * n * I.a_h + lambda1 * lambda1 * a_p_centered + 2.0 * n * lambda1 * I.a_c;
    const double total = second_moment.trace();
    const double along_v = v.dot(second_moment * v);
    const double scale = n * n * I.h2 + lambda1 * lambda1 * a_p_centered.trace();
    return std::sqrt(std::max(total - along_v, 0.0) / std::max(scale, 1e-300));
}

double sphere_volume(int m) {
    if (m < 0) throw BadParameter("sphere dimension must be non-negative");
    return 2.0 * std::pow(kPi, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
}

double average_quadratic(const Eigen::MatrixXd& form) {
    const int m = static_cast<int>(form.rows()) - 1;
    return form.trace() / (m + 1) * sphere_volume(m);
}

double average_quadratic(const Eigen::MatrixXd& form, const Eigen::VectorXd& axis) {
    if (std::abs(axis.norm() - 1.0) > 1e-12)
        throw NotUnit("averaging axis must be a unit vector");
    const int m = static_cast<int>(form.rows()) - 1;
    return (form.trace() - axis.dot(form * axis)) / m * sphere_volume(m - 1);
}

std::vector<Eigen::VectorXd> sphere_directions(int ambient_dim, int count) {
    if (ambient_dim < 2) throw BadParameter("sphere directions need ambient dimension >= 2");
    std::vector<Eigen::VectorXd> directions;
    directions.reserve(static_cast<std::size_t>(count));

    if (ambient_dim == 3) {
        // Fibonacci lattice
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - (2.0 * i + 1.0) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = 2.0 * kPi * std::fmod(i / golden, 1.0);
            Eigen::Vector3d v(r * std::cos(phi), r * std::sin(phi), z);
            directions.emplace_back(v.normalized());
        }
        return directions;
    }

    // Halton points pushed through Box-Muller, then normalized: deterministic
    // low-discrepancy directions in any dimension.
    static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    auto halton = [](int index, int base) {
        double f = 1.0, r = 0.0;
        while (index > 0) {
            f /= base;
            r += f * (index % base);
            index /= base;
        }
        return r;
    };
    const int pairs = (ambient_dim + 1) / 2;
    for (int i = 1; i <= count; ++i) {
        Eigen::VectorXd v(ambient_dim);
        for (int p = 0; p < pairs; ++p) {
            const double u1 = std::max(halton(i, primes[2 * p]), 1e-16);
            const double u2 = halton(i, primes[2 * p + 1]);
            const double radius = std::sqrt(-2.0 * std::log(u1));
            const double g0 = radius * std::cos(2.0 * kPi * u2);
            const double g1 = radius * std::sin(2.0 * kPi * u2);
            v(2 * p) = g0;
            if (2 * p + 1 < ambient_dim) v(2 * p + 1) = g1;
        }
        if (v.norm() < 1e-12) v.setOnes();
        directions.emplace_back(v.normalized());
    }
    return directions;
}

} // namespace sbl
