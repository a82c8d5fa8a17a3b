#pragma once

#include "sbl/bounds.hpp"
#include "sbl/mesh.hpp"
#include "sbl/quadrature.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sbl {

/// Per-direction bound values recorded in a report.
struct DirectionEntry {
    Eigen::VectorXd direction;
    double q = 0.0;   // Q(v)
    double pr1 = 0.0; // b(psi, v)
    double pr2 = 0.0; // b~(psi, v / |v|)
    // witness-equation residual for b~ equality, available once the mesh
    // lambda_1 estimate exists (NaN -> serialized as null otherwise)
    double pr2_equality_residual = 0.0;
};

struct BoundReport {
    std::string shape;
    std::map<std::string, double> params;
    std::vector<int> grid;
    IntegralSet integrals;
    double reilly = 0.0;
    BestPr1 best1;
    BestPr2 best2;
    QForm q;
    std::vector<DirectionEntry> directions;
    double minkowski_residual_rel = 0.0; // |integral(1 + <H, psi>)| / vol
    double ac_residual_rel = 0.0;        // |A_C + A_T/n| / |A_T/n|
    double gap_residual_max = 0.0;       // max |gap identity| / q scale
    std::optional<double> mesh_lambda1;
    std::vector<std::string> warnings;
};

struct ReportOptions {
    std::vector<int> grid{256, 256};
    std::vector<Eigen::VectorXd> directions; // extra user directions
    std::optional<std::pair<int, int>> mesh_resolution; // enables the lambda_1 estimate
};

BoundReport compute_bound_report(const std::string& shape,
                                 const std::map<std::string, double>& params,
                                 const ReportOptions& options);
BoundReport compute_bound_report(const ImmersedChart& chart, const std::string& shape_label,
                                 const std::map<std::string, double>& params,
                                 const ReportOptions& options);

/// Shortest decimal form that parses back to the exact double (to_chars).
std::string format_number(double value);

/// Fixed-key JSON rendering of a report (byte-deterministic).
std::string report_to_json(const BoundReport& report);

/// Single-row CSV rendering ('.' decimal separator, header row).
std::string report_to_csv(const BoundReport& report);

/// CSV of (direction, Q(v), b, b~) over a deterministic sphere sample.
std::string scan_csv(const IntegralSet& integrals, int sample_count);

/// Comparison table for the three reference tori (Reilly vs optimized
/// bounds vs mesh lambda_1, with the Q-regime label per torus).
std::string torus_table(const std::vector<int>& grid, std::pair<int, int> mesh_resolution);

/// Writes content via a temp file + rename in the target directory.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace sbl
