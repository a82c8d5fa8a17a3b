// sbl: compute and direction-optimize extrinsic upper bounds on the first
// Laplace eigenvalue of compact submanifolds of Euclidean space, plus an
// independent discrete-Laplacian estimate of lambda_1.

#include "sbl/bounds.hpp"
#include "sbl/errors.hpp"
#include "sbl/mesh.hpp"
#include "sbl/quadrature.hpp"
#include "sbl/report.hpp"
#include "sbl/shapes.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct CliOptions {
    std::string shape = "torus";
    std::string params_text;
    std::string grid_text = "256x256";
    std::vector<std::string> direction_texts;
    int sphere_scan = 1000;
    std::string mesh_text;
    std::string off_path;
    std::string out_path;
    std::string format = "json";
};

std::map<std::string, double> parse_params(const std::string& text) {
    std::map<std::string, double> params;
    if (text.empty()) return params;
    std::istringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--param", "expected k=v[,k=v...], got '" + item + "'");
        const std::string key = item.substr(0, eq);
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(item.substr(eq + 1), &used);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--param", "bad numeric value in '" + item + "'");
        }
        if (used != item.size() - eq - 1)
            throw CLI::ValidationError("--param", "bad numeric value in '" + item + "'");
        params[key] = value;
    }
    return params;
}

std::vector<int> parse_grid(const std::string& text) {
    std::vector<int> counts;
    std::istringstream stream(text);
    std::string item;
    while (std::getline(stream, item, 'x')) {
        try {
            counts.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--grid", "expected NxN, got '" + text + "'");
        }
    }
    if (counts.empty()) throw CLI::ValidationError("--grid", "expected NxN");
    for (int c : counts)
        if (c < 4 || c > 4096)
            throw CLI::ValidationError("--grid", "resolution must be in [4, 4096]");
    return counts;
}

std::pair<int, int> parse_mesh(const std::string& text) {
    const auto counts = parse_grid(text);
    if (counts.size() == 1) return {counts[0], counts[0]};
    if (counts.size() != 2) throw CLI::ValidationError("--mesh", "expected NxN");
    return {counts[0], counts[1]};
}

Eigen::VectorXd parse_direction(const std::string& text) {
    std::vector<double> values;
    std::istringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--direction", "expected x,y,z");
        }
    }
    Eigen::VectorXd v(static_cast<int>(values.size()));
    for (int i = 0; i < v.size(); ++i) v(i) = values[static_cast<std::size_t>(i)];
    return v;
}

void deliver(const CliOptions& options, const std::string& content) {
    if (options.out_path.empty()) {
        std::cout << content;
    } else {
        sbl::write_file_atomic(options.out_path, content);
    }
}

int run_bounds(const CliOptions& options) {
    sbl::ReportOptions report_options;
    report_options.grid = parse_grid(options.grid_text);
    for (const auto& text : options.direction_texts)
        report_options.directions.push_back(parse_direction(text));
    if (!options.mesh_text.empty()) report_options.mesh_resolution = parse_mesh(options.mesh_text);

    const sbl::BoundReport report =
        sbl::compute_bound_report(options.shape, parse_params(options.params_text), report_options);
    deliver(options, options.format == "csv" ? sbl::report_to_csv(report)
                                             : sbl::report_to_json(report));
    return 0;
}

int run_scan(const CliOptions& options) {
    const sbl::ImmersedChart chart =
        sbl::make_shape(options.shape, parse_params(options.params_text));
    const sbl::QuadratureGrid grid = sbl::QuadratureGrid::make(chart, parse_grid(options.grid_text));
    const sbl::IntegralSet integrals = sbl::assemble_integrals(chart, grid);
    deliver(options, sbl::scan_csv(integrals, options.sphere_scan));
    return 0;
}

int run_paper_table(const CliOptions& options) {
    const auto mesh = options.mesh_text.empty() ? std::pair<int, int>{128, 64}
                                                : parse_mesh(options.mesh_text);
    deliver(options, sbl::torus_table(parse_grid(options.grid_text), mesh));
    return 0;
}

int run_mesh_lambda1(const CliOptions& options) {
    std::ostringstream out;
    if (!options.off_path.empty()) {
        const sbl::TriMesh mesh = sbl::load_off(options.off_path);
        out << "{\"off\": \"" << options.off_path
            << "\", \"vertices\": " << mesh.vertices.rows()
            << ", \"lambda1\": " << sbl::format_number(sbl::first_eigenvalue(mesh)) << "}\n";
    } else {
        const auto [mu, mv] = options.mesh_text.empty() ? std::pair<int, int>{128, 64}
                                                        : parse_mesh(options.mesh_text);
        const sbl::ImmersedChart chart =
            sbl::make_shape(options.shape, parse_params(options.params_text));
        const sbl::TriMesh mesh = sbl::triangulate_chart(chart, mu, mv);
        out << "{\"shape\": \"" << options.shape << "\", \"mesh\": [" << mu << ", " << mv
            << "], \"vertices\": " << mesh.vertices.rows()
            << ", \"lambda1\": " << sbl::format_number(sbl::first_eigenvalue(mesh)) << "}\n";
    }
    deliver(options, out.str());
    return 0;
}

int run_qform(const CliOptions& options) {
    const sbl::ImmersedChart chart =
        sbl::make_shape(options.shape, parse_params(options.params_text));
    const sbl::QuadratureGrid grid = sbl::QuadratureGrid::make(chart, parse_grid(options.grid_text));
    const sbl::QForm q = sbl::q_matrix(sbl::assemble_integrals(chart, grid));

    std::ostringstream out;
    out << "Q matrix:\n";
    for (int r = 0; r < q.matrix.rows(); ++r) {
        out << " ";
        for (int c = 0; c < q.matrix.cols(); ++c)
            out << ' ' << sbl::format_number(q.matrix(r, c));
        out << '\n';
    }
    out << "eigenvalues:";
    for (int i = 0; i < q.eigenvalues.size(); ++i)
        out << ' ' << sbl::format_number(q.eigenvalues(i));
    out << "\ninertia: (" << q.inertia[0] << ", " << q.inertia[1] << ", " << q.inertia[2]
        << ")\ntrace residual: " << sbl::format_number(std::abs(q.matrix.trace()))
        << "\nzero threshold: " << sbl::format_number(q.tau) << '\n';
    deliver(options, out.str());
    return 0;
}

void emit_error_object(const std::string& name, const std::string& message) {
    std::cerr << "{\"error\": {\"name\": \"" << name << "\", \"message\": \"" << message
              << "\"}}\n";
}

} // namespace

int main(int argc, char** argv) {
    CliOptions options;
    CLI::App app{"extrinsic upper bounds on the first Laplace eigenvalue of compact submanifolds"};
    app.set_config("--config");
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* cmd) {
        cmd->fallthrough(); // parent-level flags (--config) remain reachable
        cmd->add_option("--shape", options.shape, "catalog shape: sphere | torus | clifford | ellipsoid");
        cmd->add_option("--param", options.params_text, "shape parameters, k=v[,k=v...]");
        cmd->add_option("--grid", options.grid_text, "quadrature resolution, NxN");
        cmd->add_option("--out", options.out_path, "output path (written atomically); stdout when absent");
        cmd->add_option("--format", options.format, "json | csv")
            ->check(CLI::IsMember({"json", "csv"}));
        return cmd;
    };

    CLI::App* bounds = add_common(app.add_subcommand("bounds", "full bound report for one shape"));
    bounds->add_option("--direction", options.direction_texts, "ambient direction x,y,z (repeatable)");
    bounds->add_option("--mesh", options.mesh_text, "also estimate lambda_1 on an NxN mesh");

    CLI::App* scan = add_common(app.add_subcommand("scan", "CSV of Q, pr1, pr2 over a sphere sample"));
    scan->add_option("--sphere-scan", options.sphere_scan, "number of sample directions")
        ->check(CLI::PositiveNumber);

    CLI::App* table = add_common(
        app.add_subcommand("paper-table", "comparison table for the three reference tori"));
    table->add_option("--mesh", options.mesh_text, "mesh resolution for the lambda_1 column");

    CLI::App* mesh_cmd = add_common(
        app.add_subcommand("mesh-lambda1", "discrete Laplace-Beltrami estimate of lambda_1"));
    mesh_cmd->add_option("--mesh", options.mesh_text, "mesh resolution NxN");
    mesh_cmd->add_option("--off", options.off_path, "triangle mesh in OFF format");

    CLI::App* qform = add_common(app.add_subcommand("qform", "print the Q matrix and its inertia"));
    (void)qform;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error_object("UsageError", e.what());
        return 2;
    }

    try {
        if (app.got_subcommand("bounds")) return run_bounds(options);
        if (app.got_subcommand("scan")) return run_scan(options);
        if (app.got_subcommand("paper-table")) return run_paper_table(options);
        if (app.got_subcommand("mesh-lambda1")) return run_mesh_lambda1(options);
        if (app.got_subcommand("qform")) return run_qform(options);
        emit_error_object("UsageError", "no command selected");
        return 2;
    } catch (const CLI::ValidationError& e) {
        emit_error_object("UsageError", e.what());
        return 2;
    } catch (const sbl::Error& e) {
        emit_error_object(e.name(), e.what());
        return 3;
    } catch (const std::exception& e) {
        emit_error_object("InternalError", e.what());
        return 3;
    }
}
