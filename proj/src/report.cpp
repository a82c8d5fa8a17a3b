#include "sbl/report.hpp"

#include "sbl/errors.hpp"
#include "sbl/shapes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <unistd.h>

namespace sbl {

namespace {

std::string json_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size() + 8);
    for (char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string json_vector(const Eigen::VectorXd& v) {
    std::string out = "[";
    for (int i = 0; i < v.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_number(v(i));
    }
    return out + "]";
}

std::string json_matrix(const Eigen::MatrixXd& m) {
    std::string out = "[";
    for (int r = 0; r < m.rows(); ++r) {
        if (r > 0) out += ", ";
        out += json_vector(m.row(r));
    }
    return out + "]";
}

// fixed-point with truncation (not rounding) — matches the reference
// decimal expansions used in the comparison table
std::string fixed_truncated(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals + 3, value);
    std::string s(buf);
    const auto dot = s.find('.');
    return s.substr(0, dot + 1 + static_cast<std::size_t>(decimals));
}

std::string pad_right(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

} // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "null";
    char buf[64];
    auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

BoundReport compute_bound_report(const std::string& shape,
                                 const std::map<std::string, double>& params,
                                 const ReportOptions& options) {
    return compute_bound_report(make_shape(shape, params), shape, params, options);
}

BoundReport compute_bound_report(const ImmersedChart& chart, const std::string& shape_label,
                                 const std::map<std::string, double>& params,
                                 const ReportOptions& options) {
    BoundReport report;
    report.shape = shape_label;
    report.params = params;
    report.grid = options.grid;
    if (static_cast<int>(report.grid.size()) == 1)
        report.grid.assign(static_cast<std::size_t>(chart.intrinsic_dim), report.grid[0]);

    const QuadratureGrid grid = QuadratureGrid::make(chart, report.grid);
    report.integrals = assemble_integrals(chart, grid);
    const IntegralSet& I = report.integrals;

    report.reilly = reilly_bound(I);
    report.q = q_matrix(I);
    report.best1 = best_pr1(I);
    report.best2 = best_pr2(I);

    report.minkowski_residual_rel = std::abs(I.minkowski_residual) / I.vol;
    const Eigen::MatrixXd at_over_n = I.a_t / I.intrinsic_dim;
    report.ac_residual_rel = (I.a_c + at_over_n).norm() / at_over_n.norm();

    std::vector<Eigen::VectorXd> gap_directions = options.directions;
    for (int i = 0; i < I.ambient_dim; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(I.ambient_dim);
        e(i) = 1.0;
        gap_directions.push_back(e);
    }
    report.gap_residual_max = 0.0;
    for (const auto& v : gap_directions) {
        if (v.norm() == 0.0) continue;
        const auto [first, second] = gap_identities(I, v.normalized());
        report.gap_residual_max =
            std::max({report.gap_residual_max, std::abs(first), std::abs(second)});
    }
    report.gap_residual_max /= std::max(report.q.scale, 1e-300);

    if (options.mesh_resolution) {
        const auto [mu, mv] = *options.mesh_resolution;
        report.mesh_lambda1 = first_eigenvalue(triangulate_chart(chart, mu, mv));
    }

    for (const auto& v : options.directions) {
        DirectionEntry entry;
        entry.direction = v;
        entry.q = report.q(v);
        entry.pr1 = pr1_bound(I, v);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        entry.pr2 = v.norm() > 0.0 ? pr2_bound(I, v.normalized()) : nan;
        entry.pr2_equality_residual =
            (report.mesh_lambda1 && v.norm() > 0.0)
                ? pr2_equality_residual(I, v.normalized(), *report.mesh_lambda1)
                : nan;
        report.directions.push_back(std::move(entry));
    }

    if (report.best1.restricted_pencil)
        report.warnings.push_back(
            "A_T is nearly singular (submanifold inside a hyperplane); "
            "best_pr1 optimized over the span of A_T");
    if (shape_label == "torus" && report.q.is_zero())
        report.warnings.push_back(
            "Q vanishes within tolerance (R^2 = 9/8 regime): every bound in both "
            "families coincides with the Reilly bound " + format_number(report.reilly) +
            "; the smaller value sqrt(2)/2 = 0.7071... sometimes quoted for this torus "
            "does not follow from these bounds");
    if (report.mesh_lambda1) {
        const double lambda = *report.mesh_lambda1;
        double least = std::min({report.reilly, report.best1.value, report.best2.value});
        for (const auto& entry : report.directions)
            least = std::min({least, entry.pr1, std::isnan(entry.pr2) ? least : entry.pr2});
        if (lambda > least * 1.02)
            report.warnings.push_back("mesh lambda_1 " + format_number(lambda) +
                                      " exceeds the smallest recorded bound " +
                                      format_number(least) + " beyond the 2% slack");
    }
    return report;
}

std::string report_to_json(const BoundReport& report) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"shape\": \"" << json_escape(report.shape) << "\",\n";
    out << "  \"params\": {";
    bool first = true;
    for (const auto& [key, value] : report.params) {
        if (!first) out << ", ";
        first = false;
        out << "\"" << json_escape(key) << "\": " << format_number(value);
    }
    out << "},\n";
    out << "  \"grid\": [";
    for (std::size_t i = 0; i < report.grid.size(); ++i)
        out << (i ? ", " : "") << report.grid[i];
    out << "],\n";
    out << "  \"reilly\": " << format_number(report.reilly) << ",\n";
    out << "  \"best_pr1\": {\"value\": " << format_number(report.best1.value)
        << ", \"direction\": " << json_vector(report.best1.direction)
        << ", \"attained\": " << (report.best1.attained ? "true" : "false") << "},\n";
    out << "  \"best_pr2\": {\"value\": " << format_number(report.best2.value)
        << ", \"direction\": " << json_vector(report.best2.direction) << "},\n";
    out << "  \"q\": {\"matrix\": " << json_matrix(report.q.matrix)
        << ", \"eigenvalues\": " << json_vector(report.q.eigenvalues)
        << ", \"inertia\": [" << report.q.inertia[0] << ", " << report.q.inertia[1]
        << ", " << report.q.inertia[2] << "]"
        << ", \"trace_residual\": " << format_number(std::abs(report.q.matrix.trace())) << "},\n";
    out << "  \"identities\": {\"minkowski_residual\": " << format_number(report.minkowski_residual_rel)
        << ", \"ac_identity_residual\": " << format_number(report.ac_residual_rel)
        << ", \"gap_residual_max\": " << format_number(report.gap_residual_max) << "},\n";
    out << "  \"mesh_lambda1\": "
        << (report.mesh_lambda1 ? format_number(*report.mesh_lambda1) : std::string("null")) << ",\n";
    out << "  \"directions\": [";
    for (std::size_t i = 0; i < report.directions.size(); ++i) {
        const auto& entry = report.directions[i];
        out << (i ? ", " : "") << "{\"direction\": " << json_vector(entry.direction)
            << ", \"q\": " << format_number(entry.q) << ", \"pr1\": " << format_number(entry.pr1)
            << ", \"pr2\": " << format_number(entry.pr2)
            << ", \"pr2_equality_residual\": " << format_number(entry.pr2_equality_residual)
            << "}";
    }
    out << "],\n";
    out << "  \"warnings\": [";
    for (std::size_t i = 0; i < report.warnings.size(); ++i)
        out << (i ? ", " : "") << "\"" << json_escape(report.warnings[i]) << "\"";
    out << "]\n}\n";
    return out.str();
}

std::string report_to_csv(const BoundReport& report) {
    std::ostringstream header, row;
    header << "shape,reilly,best_pr1,best_pr1_attained,best_pr2,mesh_lambda1,"
              "q_neg,q_zero,q_pos,minkowski_residual,ac_identity_residual,gap_residual_max";
    row << report.shape << ',' << format_number(report.reilly) << ','
        << format_number(report.best1.value) << ',' << (report.best1.attained ? 1 : 0) << ','
        << format_number(report.best2.value) << ','
        << (report.mesh_lambda1 ? format_number(*report.mesh_lambda1) : std::string()) << ','
        << report.q.inertia[0] << ',' << report.q.inertia[1] << ',' << report.q.inertia[2] << ','
        << format_number(report.minkowski_residual_rel) << ','
        << format_number(report.ac_residual_rel) << ','
        << format_number(report.gap_residual_max);
    for (int i = 0; i < report.best1.direction.size(); ++i) {
        header << ",best_pr1_dir_" << i;
        row << ',' << format_number(report.best1.direction(i));
    }
    for (int i = 0; i < report.best2.direction.size(); ++i) {
        header << ",best_pr2_dir_" << i;
        row << ',' << format_number(report.best2.direction(i));
    }
    return header.str() + "\n" + row.str() + "\n";
}

std::string scan_csv(const IntegralSet& integrals, int sample_count) {
    if (sample_count < 1) throw BadParameter("scan needs a positive sample count");
    std::ostringstream out;
    for (int i = 0; i < integrals.ambient_dim; ++i) out << "v" << (i + 1) << ',';
    out << "q,pr1,pr2\n";
    for (const auto& v : sphere_directions(integrals.ambient_dim, sample_count)) {
        const double q = integrals.intrinsic_dim * integrals.vol * v.dot(integrals.a_h * v) -
                         integrals.h2 * v.dot(integrals.a_t * v);
        for (int i = 0; i < v.size(); ++i) out << format_number(v(i)) << ',';
        out << format_number(q) << ',' << format_number(pr1_bound(integrals, v)) << ','
            << format_number(pr2_bound(integrals, v)) << '\n';
    }
    return out.str();
}

std::string torus_table(const std::vector<int>& grid, std::pair<int, int> mesh_resolution) {
    struct Row {
        const char* label;
        double radius;
    };
    const Row rows[] = {
        {"sqrt(2)", std::sqrt(2.0)},
        {"sqrt(17)/4", std::sqrt(17.0) / 4.0},
        {"3/(2*sqrt(2))", 3.0 / (2.0 * std::sqrt(2.0))},
    };

    std::ostringstream out;
    out << pad_right("R", 15) << pad_right("reilly", 12) << pad_right("best_pr1", 12)
        << pad_right("best_pr2", 12) << pad_right("mesh_lambda1", 14) << "regime\n";
    for (const auto& row : rows) {
        ReportOptions options;
        options.grid = grid;
        options.mesh_resolution = mesh_resolution;
        const BoundReport report =
            compute_bound_report("torus", {{"R", row.radius}}, options);

        std::string regime;
        if (report.q.is_zero()) regime = "Q = 0 within tolerance";
        else if (report.q.matrix(0, 0) < 0.0) regime = "Q indefinite, negative on v3^2 < 1/3";
        else regime = "Q indefinite, negative on v3^2 > 1/3";

        out << pad_right(row.label, 15) << pad_right(fixed_truncated(report.reilly, 6), 12)
            << pad_right(fixed_truncated(report.best1.value, 6), 12)
            << pad_right(fixed_truncated(report.best2.value, 6), 12)
            << pad_right(fixed_truncated(*report.mesh_lambda1, 6), 14) << regime << '\n';
    }
    return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path temp = target;
    temp += ".tmp-" + std::to_string(::getpid());
    {
        std::ofstream out(temp);
        if (!out) throw IoError("cannot open '" + temp.string() + "' for writing");
        out << content;
        if (!out) throw IoError("write to '" + temp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        fs::remove(temp);
        throw IoError("rename to '" + path + "' failed: " + ec.message());
    }
}

} // namespace sbl
