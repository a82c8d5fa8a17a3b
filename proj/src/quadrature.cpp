#include "sbl/quadrature.hpp"

#include "sbl/errors.hpp"
#include "sbl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sbl {

void gauss_legendre(int count, double a, double b,
                    std::vector<double>& nodes, std::vector<double>& weights) {
    if (count < 1) throw BadParameter("Gauss-Legendre rule needs at least one node");
    nodes.assign(static_cast<std::size_t>(count), 0.0);
    weights.assign(static_cast<std::size_t>(count), 0.0);

    const int half = (count + 1) / 2;
    for (int k = 0; k < half; ++k) {
        // Chebyshev-based initial guess, then Newton on P_count.
        double x = std::cos(std::numbers::pi * (k + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= count; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = count * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[static_cast<std::size_t>(k)] = x;
        weights[static_cast<std::size_t>(k)] = w;
        nodes[static_cast<std::size_t>(count - 1 - k)] = -x;
        weights[static_cast<std::size_t>(count - 1 - k)] = w;
    }

    const double mid = 0.5 * (a + b);
    const double halfspan = 0.5 * (b - a);
    for (int k = 0; k < count; ++k) {
        nodes[static_cast<std::size_t>(k)] = mid - halfspan * nodes[static_cast<std::size_t>(k)];
        weights[static_cast<std::size_t>(k)] *= halfspan;
    }
    // map above reverses order; keep nodes ascending
    std::reverse(nodes.begin(), nodes.end());
    std::reverse(weights.begin(), weights.end());
}

QuadratureGrid QuadratureGrid::make(const ImmersedChart& chart, const std::vector<int>& points_per_axis) {
    if (static_cast<int>(points_per_axis.size()) != chart.intrinsic_dim)
        throw BadParameter("points_per_axis size must match the chart dimension");
    QuadratureGrid grid;
    grid.axes.resize(points_per_axis.size());
    for (int i = 0; i < chart.intrinsic_dim; ++i) {
        const int count = points_per_axis[static_cast<std::size_t>(i)];
        if (count < 4 || count > 4096) throw BadParameter("grid resolution must be in [4, 4096]");
        AxisRule& axis = grid.axes[static_cast<std::size_t>(i)];
        const double a = chart.domain[static_cast<std::size_t>(i)][0];
        const double b = chart.domain[static_cast<std::size_t>(i)][1];
        if (chart.periodic[static_cast<std::size_t>(i)]) {
            axis.periodic = true;
            const double h = (b - a) / count;
            axis.nodes.resize(static_cast<std::size_t>(count));
            axis.weights.assign(static_cast<std::size_t>(count), h);
            for (int k = 0; k < count; ++k) axis.nodes[static_cast<std::size_t>(k)] = a + k * h;
        } else {
            axis.periodic = false;
            gauss_legendre(count, a, b, axis.nodes, axis.weights);
        }
    }
    return grid;
}

QuadratureGrid QuadratureGrid::make(const ImmersedChart& chart, int points_every_axis) {
    return make(chart, std::vector<int>(static_cast<std::size_t>(chart.intrinsic_dim), points_every_axis));
}

std::size_t QuadratureGrid::total_points() const {
    std::size_t total = 1;
    for (const auto& axis : axes) total *= axis.nodes.size();
    return total;
}

void QuadratureGrid::unpack(std::size_t flat, Eigen::VectorXd& u, double& weight) const {
    const int n = static_cast<int>(axes.size());
    u.resize(n);
    weight = 1.0;
    for (int i = n - 1; i >= 0; --i) {
        const auto& axis = axes[static_cast<std::size_t>(i)];
        const std::size_t count = axis.nodes.size();
        const std::size_t k = flat % count;
        flat /= count;
        u(i) = axis.nodes[k];
        weight *= axis.weights[k];
    }
}

std::vector<int> QuadratureGrid::points_per_axis() const {
    std::vector<int> counts;
    counts.reserve(axes.size());
    for (const auto& axis : axes) counts.push_back(static_cast<int>(axis.nodes.size()));
    return counts;
}

double integrate_scalar_field(const ImmersedChart& chart, const QuadratureGrid& grid,
                              const std::function<double(const GeometrySample&)>& f) {
    for (const auto& axis : grid.axes)
        if (axis.nodes.size() < 4) throw BadParameter("grid resolution must be at least 4 per axis");
    auto totals = deterministic_accumulate(
        grid.total_points(), 1, [&](std::size_t flat, double* out) {
            Eigen::VectorXd u;
            double w = 0.0;
            grid.unpack(flat, u, w);
            const GeometrySample s = eval_frame(chart, u);
            out[0] = w * f(s) * s.area_element;
        });
    return totals[0];
}

double volume_only(const ImmersedChart& chart, const QuadratureGrid& grid) {
    auto totals = deterministic_accumulate(
        grid.total_points(), 1, [&](std::size_t flat, double* out) {
            Eigen::VectorXd u;
            double w = 0.0;
            grid.unpack(flat, u, w);
            out[0] = w * area_element_at(chart, u);
        });
    return totals[0];
}

IntegralSet assemble_integrals(const ImmersedChart& chart, const QuadratureGrid& grid) {
    const int ma = chart.ambient_dim;
    const int n = chart.intrinsic_dim;
    const int sym = ma * (ma + 1) / 2; // packed upper triangle
    // layout: vol, h2, minkowski, centroid[ma], A_H[sym], A_T[sym], A_C[sym], A_P[sym]
    const std::size_t components = static_cast<std::size_t>(3 + ma + 4 * sym);

    auto totals = deterministic_accumulate(
        grid.total_points(), components, [&](std::size_t flat, double* out) {
            Eigen::VectorXd u;
            double w = 0.0;
            grid.unpack(flat, u, w);
            const GeometrySample s = eval_frame(chart, u);
            const double dv = w * s.area_element;
            const Eigen::VectorXd& h = s.mean_curvature;
            const Eigen::VectorXd& p = s.position;

            std::size_t k = 0;
            out[k++] = dv;
            out[k++] = dv * h.squaredNorm();
            out[k++] = dv * (1.0 + h.dot(p));
            for (int i = 0; i < ma; ++i) out[k++] = dv * p(i);
            for (int i = 0; i < ma; ++i)
                for (int j = 0; j <= i; ++j) out[k++] = dv * h(i) * h(j);
            for (int i = 0; i < ma; ++i)
                for (int j = 0; j <= i; ++j) out[k++] = dv * s.projector(i, j);
            for (int i = 0; i < ma; ++i)
                for (int j = 0; j <= i; ++j) out[k++] = dv * 0.5 * (p(i) * h(j) + p(j) * h(i));
            for (int i = 0; i < ma; ++i)
                for (int j = 0; j <= i; ++j) out[k++] = dv * p(i) * p(j);
        });

    IntegralSet set;
    set.intrinsic_dim = n;
    set.ambient_dim = ma;
    std::size_t k = 0;
    set.vol = totals[k++];
    set.h2 = totals[k++];
    set.minkowski_residual = totals[k++];
    set.centroid.resize(ma);
    for (int i = 0; i < ma; ++i) set.centroid(i) = totals[k++];
    auto unpack_sym = [&](Eigen::MatrixXd& matrix) {
        matrix.resize(ma, ma);
        for (int i = 0; i < ma; ++i)
            for (int j = 0; j <= i; ++j) {
                matrix(i, j) = totals[k];
                matrix(j, i) = totals[k];
                ++k;
            }
    };
    unpack_sym(set.a_h);
    unpack_sym(set.a_t);
    unpack_sym(set.a_c);
    unpack_sym(set.a_p);

    // One grid doubling as a convergence guard against under-resolved charts.
    std::vector<int> doubled = grid.points_per_axis();
    for (int& c : doubled) c = std::min(2 * c, 4096);
    const double vol2 = volume_only(chart, QuadratureGrid::make(chart, doubled));
    if (std::abs(vol2 - set.vol) > 1e-6 * std::abs(vol2))
        throw NonConvergent("volume changed by more than 1e-6 rel under grid doubling");
    return set;
}

ImmersedChart recenter_chart(const ImmersedChart& chart, const IntegralSet& integrals) {
    if (!(integrals.vol > 0.0)) throw BadParameter("recenter requires positive volume");
    return translated(chart, Eigen::VectorXd(-integrals.centroid / integrals.vol));
}

} // namespace sbl
