#include "sbl/geometry.hpp"

#include "sbl/errors.hpp"

#include <cmath>
#include <sstream>

namespace sbl {

namespace {

Eigen::MatrixXd fd_jacobian(const ImmersedChart& chart, const Eigen::VectorXd& u) {
    const int n = chart.intrinsic_dim;
    const int ma = chart.ambient_dim;
    Eigen::MatrixXd jac(ma, n);
    Eigen::VectorXd up = u, um = u;
    for (int i = 0; i < n; ++i) {
        const double h = chart.fd_step_rel * chart.span(i);
        up(i) = u(i) + h;
        um(i) = u(i) - h;
        jac.col(i) = (chart.eval(up) - chart.eval(um)) / (2.0 * h);
        up(i) = u(i);
        um(i) = u(i);
    }
    return jac;
}

SecondPartials fd_hessian(const ImmersedChart& chart, const Eigen::VectorXd& u) {
    const int n = chart.intrinsic_dim;
    SecondPartials d2;
    d2.dim = n;
    d2.packed.resize(static_cast<std::size_t>(SecondPartials::packed_size(n)));
    const Eigen::VectorXd center = chart.eval(u);
    Eigen::VectorXd q = u;
    for (int i = 0; i < n; ++i) {
        const double hi = chart.fd_step_rel * chart.span(i);
        q(i) = u(i) + hi;
        Eigen::VectorXd fp = chart.eval(q);
        q(i) = u(i) - hi;
        Eigen::VectorXd fm = chart.eval(q);
        q(i) = u(i);
        d2.at(i, i) = (fp - 2.0 * center + fm) / (hi * hi);
        for (int j = 0; j < i; ++j) {
            const double hj = chart.fd_step_rel * chart.span(j);
            q(i) = u(i) + hi; q(j) = u(j) + hj;
            Eigen::VectorXd fpp = chart.eval(q);
            q(j) = u(j) - hj;
            Eigen::VectorXd fpm = chart.eval(q);
            q(i) = u(i) - hi;
            Eigen::VectorXd fmm = chart.eval(q);
            q(j) = u(j) + hj;
            Eigen::VectorXd fmp = chart.eval(q);
            q(i) = u(i); q(j) = u(j);
            d2.at(i, j) = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
        }
    }
    return d2;
}

// Immersion test: the tangent vectors must be linearly independent. det G
// is compared against 1e-14 times the product of the squared tangent
// lengths (Hadamard bound), so the check is invariant under anisotropic
// scaling and only trips on genuine angle collapse or vanishing tangents.
void check_immersion(const Eigen::MatrixXd& metric, double det, int n) {
    double hadamard = 1.0;
    for (int i = 0; i < n; ++i) hadamard *= metric(i, i);
    if (!(det > 1e-14 * hadamard)) {
        std::ostringstream msg;
        msg << "det(G) = " << det << " below immersion floor " << 1e-14 * hadamard;
        throw DegenerateImmersion(msg.str());
    }
}

} // namespace

bool ImmersedChart::contains(const Eigen::VectorXd& u, double slack_rel) const {
    if (u.size() != intrinsic_dim) return false;
    for (int i = 0; i < intrinsic_dim; ++i) {
        const double slack = slack_rel * span(i);
        if (u(i) < domain[static_cast<std::size_t>(i)][0] - slack ||
            u(i) > domain[static_cast<std::size_t>(i)][1] + slack)
            return false;
    }
    return true;
}

ImmersedChart ImmersedChart::finite_difference_variant(double fd_rel) const {
    ImmersedChart copy = *this;
    copy.jacobian = nullptr;
    copy.hessian = nullptr;
    copy.fd_step_rel = fd_rel;
    return copy;
}

GeometrySample eval_frame(const ImmersedChart& chart, const Eigen::VectorXd& u) {
    if (!chart.contains(u)) throw OutOfDomain("parameter point outside the chart box");

    GeometrySample s;
    s.position = chart.eval(u);
    s.frame = chart.jacobian ? chart.jacobian(u) : fd_jacobian(chart, u);
    s.second_partials = chart.hessian ? chart.hessian(u) : fd_hessian(chart, u);

    const int n = chart.intrinsic_dim;
    s.metric = s.frame.transpose() * s.frame;
    const double det = s.metric.determinant();
    check_immersion(s.metric, det, n);
    s.inv_metric = s.metric.inverse();
    s.area_element = std::sqrt(det);

    // P = E G^{-1} E^T, then H = (1/n) g^{ij} (psi_ij)^perp
    s.projector = s.frame * s.inv_metric * s.frame.transpose();
    Eigen::VectorXd trace_vec = Eigen::VectorXd::Zero(chart.ambient_dim);
    for (int i = 0; i < n; ++i) {
        trace_vec += s.inv_metric(i, i) * s.second_partials(i, i);
        for (int j = 0; j < i; ++j)
            trace_vec += 2.0 * s.inv_metric(i, j) * s.second_partials(i, j);
    }
    s.mean_curvature = (trace_vec - s.projector * trace_vec) / n;
    return s;
}

double area_element_at(const ImmersedChart& chart, const Eigen::VectorXd& u) {
    if (!chart.contains(u)) throw OutOfDomain("parameter point outside the chart box");
    const Eigen::MatrixXd frame = chart.jacobian ? chart.jacobian(u) : fd_jacobian(chart, u);
    const Eigen::MatrixXd metric = frame.transpose() * frame;
    const double det = metric.determinant();
    check_immersion(metric, det, chart.intrinsic_dim);
    return std::sqrt(det);
}

Eigen::VectorXd tangential_component(const GeometrySample& s, const Eigen::VectorXd& w) {
    return s.projector * w;
}

ImmersedChart translated(const ImmersedChart& chart, const Eigen::VectorXd& offset) {
    ImmersedChart moved = chart;
    auto eval = chart.eval;
    moved.eval = [eval, offset](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        return eval(u) + offset;
    };
    // first/second derivatives are unchanged by a translation
    return moved;
}

ImmersedChart rotated(const ImmersedChart& chart, const Eigen::MatrixXd& orthogonal) {
    ImmersedChart moved = chart;
    auto eval = chart.eval;
    moved.eval = [eval, orthogonal](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        return orthogonal * eval(u);
    };
    if (chart.jacobian) {
        auto jac = chart.jacobian;
        moved.jacobian = [jac, orthogonal](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
            return orthogonal * jac(u);
        };
    }
    if (chart.hessian) {
        auto hess = chart.hessian;
        moved.hessian = [hess, orthogonal](const Eigen::VectorXd& u) -> SecondPartials {
            SecondPartials d2 = hess(u);
            for (auto& vec : d2.packed) vec = orthogonal * vec;
            return d2;
        };
    }
    return moved;
}

} // namespace sbl
