#include "sbl/mesh.hpp"

#include "sbl/errors.hpp"
#include "sbl/parallel.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace sbl {

namespace {

double triangle_area(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    const double la = (b - c).norm();
    const double lb = (c - a).norm();
    const double lc = (a - b).norm();
    // numerically stable Heron (Kahan ordering)
    std::array<double, 3> l{la, lb, lc};
    std::sort(l.begin(), l.end());
    const double s0 = l[2] + (l[1] + l[0]);
    const double s1 = l[0] - (l[2] - l[1]);
    const double s2 = l[0] + (l[2] - l[1]);
    const double s3 = l[2] + (l[1] - l[0]);
    const double squared = s0 * s1 * s2 * s3;
    return 0.25 * std::sqrt(std::max(squared, 0.0));
}

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int count) : parent(static_cast<std::size_t>(count)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(a)] = b;
    }
};

std::map<std::pair<int, int>, int> edge_use_counts(const Eigen::MatrixXi& triangles) {
    std::map<std::pair<int, int>, int> counts;
    for (int f = 0; f < triangles.rows(); ++f) {
        for (int e = 0; e < 3; ++e) {
            int a = triangles(f, e);
            int b = triangles(f, (e + 1) % 3);
            if (a > b) std::swap(a, b);
            ++counts[{a, b}];
        }
    }
    return counts;
}

} // namespace

int TriMesh::euler_characteristic() const {
    const auto edges = edge_use_counts(triangles);
    return static_cast<int>(vertices.rows()) - static_cast<int>(edges.size()) +
           static_cast<int>(triangles.rows());
}

bool TriMesh::closed() const {
    for (const auto& [edge, count] : edge_use_counts(triangles))
        if (count != 2) return false;
    return true;
}

bool TriMesh::connected() const {
    if (vertices.rows() == 0) return false;
    DisjointSet ds(static_cast<int>(vertices.rows()));
    for (int f = 0; f < triangles.rows(); ++f) {
        ds.unite(triangles(f, 0), triangles(f, 1));
        ds.unite(triangles(f, 0), triangles(f, 2));
    }
    const int root = ds.find(0);
    for (int v = 1; v < vertices.rows(); ++v)
        if (ds.find(v) != root) return false;
    return true;
}

TriMesh make_tri_mesh(Eigen::MatrixXd vertices, Eigen::MatrixXi triangles) {
    TriMesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.triangles = std::move(triangles);
    const int nv = static_cast<int>(mesh.vertices.rows());
    const int nf = static_cast<int>(mesh.triangles.rows());
    if (nv < 3 || nf < 1) throw BadParameter("mesh needs at least one triangle");
    for (int f = 0; f < nf; ++f)
        for (int e = 0; e < 3; ++e)
            if (mesh.triangles(f, e) < 0 || mesh.triangles(f, e) >= nv)
                throw BadParameter("triangle index out of range");

    const double scale = (mesh.vertices.colwise().maxCoeff() - mesh.vertices.colwise().minCoeff()).norm();

    // per-triangle cotangent data computed in parallel, accumulated in fixed
    // triangle order so assembly is reproducible
    struct TriangleOps {
        double area;
        std::array<double, 3> half_cot; // weight for the edge opposite each corner
    };
    std::vector<TriangleOps> ops(static_cast<std::size_t>(nf));
    std::vector<char> degenerate(static_cast<std::size_t>(nf), 0);
    parallel_for(static_cast<std::size_t>(nf), [&](std::size_t f) {
        const Eigen::VectorXd a = mesh.vertices.row(mesh.triangles(static_cast<int>(f), 0));
        const Eigen::VectorXd b = mesh.vertices.row(mesh.triangles(static_cast<int>(f), 1));
        const Eigen::VectorXd c = mesh.vertices.row(mesh.triangles(static_cast<int>(f), 2));
        const double area = triangle_area(a, b, c);
        if (area <= 1e-14 * scale * scale) {
            degenerate[f] = 1;
            return;
        }
        const double l0 = (b - c).squaredNorm(); // opposite corner 0
        const double l1 = (c - a).squaredNorm();
        const double l2 = (a - b).squaredNorm();
        ops[f].area = area;
        ops[f].half_cot = {(l1 + l2 - l0) / (8.0 * area),
                           (l2 + l0 - l1) / (8.0 * area),
                           (l0 + l1 - l2) / (8.0 * area)};
    });
    for (int f = 0; f < nf; ++f)
        if (degenerate[static_cast<std::size_t>(f)])
            throw DegenerateTriangle("triangle " + std::to_string(f) + " has (near) zero area");

    mesh.lumped_mass = Eigen::VectorXd::Zero(nv);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(nf) * 12);
    for (int f = 0; f < nf; ++f) {
        const auto& op = ops[static_cast<std::size_t>(f)];
        for (int corner = 0; corner < 3; ++corner) {
            const int a = mesh.triangles(f, (corner + 1) % 3);
            const int b = mesh.triangles(f, (corner + 2) % 3);
            const double w = op.half_cot[static_cast<std::size_t>(corner)];
            triplets.emplace_back(a, a, w);
            triplets.emplace_back(b, b, w);
            triplets.emplace_back(a, b, -w);
            triplets.emplace_back(b, a, -w);
            mesh.lumped_mass(mesh.triangles(f, corner)) += op.area / 3.0;
        }
    }
    mesh.stiffness.resize(nv, nv);
    mesh.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    return mesh;
}

TriMesh triangulate_chart(const ImmersedChart& chart, int nu, int nv) {
    if (chart.intrinsic_dim != 2) throw BadParameter("triangulation needs a 2-dimensional chart");
    if (nu < 8 || nv < 8) throw BadParameter("mesh resolution must be at least 8 per axis");

    const bool per_u = chart.periodic[0] != 0;
    const bool per_v = chart.periodic[1] != 0;
    const int rows = nu;
    const int cols = nv;
    auto node = [&](int axis, int k, int count) {
        const double a = chart.domain[static_cast<std::size_t>(axis)][0];
        const double s = chart.span(axis);
        const bool periodic = chart.periodic[static_cast<std::size_t>(axis)] != 0;
        return a + s * (periodic ? static_cast<double>(k) / count
                                 : static_cast<double>(k) / (count - 1));
    };

    Eigen::MatrixXd grid_points(rows * cols, chart.ambient_dim);
    parallel_for(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), [&](std::size_t id) {
        const int iu = static_cast<int>(id) / cols;
        const int iv = static_cast<int>(id) % cols;
        Eigen::Vector2d u(node(0, iu, rows), node(1, iv, cols));
        grid_points.row(static_cast<int>(id)) = chart.eval(u);
    });

    // weld coincident grid points (periodic seams are handled by index
    // wrap-around; welding catches pole collapses and near-identical images)
    const double bbox =
        (grid_points.colwise().maxCoeff() - grid_points.colwise().minCoeff()).norm();
    const double weld_tol = 1e-9 * std::max(bbox, 1e-300);
    std::unordered_map<std::uint64_t, std::vector<int>> cells;
    auto cell_key = [&](const Eigen::VectorXd& p, int dx, int dy, int dz) {
        // hash the first three coordinates; extra coordinates only enter the
        // exact distance check
        const auto qx = static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(p(0) / weld_tol)) + dx);
        const auto qy = static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(p(1) / weld_tol)) + dy);
        const auto qz = static_cast<std::uint64_t>(p.size() > 2 ? static_cast<std::int64_t>(std::floor(p(2) / weld_tol)) + dz : 0);
        return (qx * 73856093ULL) ^ (qy * 19349663ULL) ^ (qz * 83492791ULL);
    };

    std::vector<int> weld(static_cast<std::size_t>(rows * cols), -1);
    std::vector<int> kept;
    for (int id = 0; id < rows * cols; ++id) {
        const Eigen::VectorXd p = grid_points.row(id);
        int found = -1;
        for (int dx = -1; dx <= 1 && found < 0; ++dx)
            for (int dy = -1; dy <= 1 && found < 0; ++dy)
                for (int dz = -1; dz <= 1 && found < 0; ++dz) {
                    auto it = cells.find(cell_key(p, dx, dy, dz));
                    if (it == cells.end()) continue;
                    for (int candidate : it->second) {
                        if ((grid_points.row(kept[static_cast<std::size_t>(candidate)]) - p.transpose()).norm() <= weld_tol) {
                            found = candidate;
                            break;
                        }
                    }
                }
        if (found >= 0) {
            weld[static_cast<std::size_t>(id)] = found;
        } else {
            const int fresh = static_cast<int>(kept.size());
            kept.push_back(id);
            weld[static_cast<std::size_t>(id)] = fresh;
            cells[cell_key(p, 0, 0, 0)].push_back(fresh);
        }
    }

    Eigen::MatrixXd vertices(static_cast<int>(kept.size()), chart.ambient_dim);
    for (int v = 0; v < static_cast<int>(kept.size()); ++v)
        vertices.row(v) = grid_points.row(kept[static_cast<std::size_t>(v)]);

    const int cell_rows = per_u ? rows : rows - 1;
    const int cell_cols = per_v ? cols : cols - 1;
    std::vector<std::array<int, 3>> faces;
    faces.reserve(static_cast<std::size_t>(cell_rows) * static_cast<std::size_t>(cell_cols) * 2);
    auto welded = [&](int iu, int iv) { return weld[static_cast<std::size_t>((iu % rows) * cols + (iv % cols))]; };
    for (int iu = 0; iu < cell_rows; ++iu) {
        for (int iv = 0; iv < cell_cols; ++iv) {
            const int v00 = welded(iu, iv);
            const int v10 = welded(iu + 1, iv);
            const int v01 = welded(iu, iv + 1);
            const int v11 = welded(iu + 1, iv + 1);
            for (const auto& tri : {std::array<int, 3>{v00, v10, v11}, std::array<int, 3>{v00, v11, v01}}) {
                if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue; // collapsed at a weld
                faces.push_back(tri);
            }
        }
    }
    if (faces.empty()) throw DegenerateTriangle("chart triangulation produced no valid triangles");

    Eigen::MatrixXi triangles(static_cast<int>(faces.size()), 3);
    for (int f = 0; f < static_cast<int>(faces.size()); ++f)
        for (int e = 0; e < 3; ++e) triangles(f, e) = faces[static_cast<std::size_t>(f)][static_cast<std::size_t>(e)];
    return make_tri_mesh(std::move(vertices), std::move(triangles));
}

double first_eigenvalue(const TriMesh& mesh) {
    if (!mesh.connected()) throw BadParameter("first_eigenvalue needs a connected mesh");
    if (!mesh.closed()) throw BadParameter("first_eigenvalue needs a closed mesh");
    const int nv = static_cast<int>(mesh.vertices.rows());

    if (nv < 3000) {
        Eigen::MatrixXd stiffness = Eigen::MatrixXd(mesh.stiffness);
        Eigen::MatrixXd mass = mesh.lumped_mass.asDiagonal();
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(stiffness, mass);
        if (solver.info() != Eigen::Success) throw SolverFailure("dense generalized eigensolve failed");
        return solver.eigenvalues()(1); // kernel is exactly the constants
    }

    // blocked shift-invert power iteration on (S + c M)^{-1} M with the
    // constant mode deflated in the M-inner product; the block plus
    // Rayleigh-Ritz resolves multiple eigenvalues (sphere lambda_1 has
    // multiplicity three)
    const double shift = std::max(1e-6 * mesh.stiffness.diagonal().sum() / mesh.lumped_mass.sum(), 1e-12);
    Eigen::SparseMatrix<double> shifted = mesh.stiffness;
    for (int v = 0; v < nv; ++v) shifted.coeffRef(v, v) += shift * mesh.lumped_mass(v);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(shifted);
    if (factor.info() != Eigen::Success) throw SolverFailure("LDLT factorization of the shifted stiffness failed");

    const Eigen::VectorXd& m = mesh.lumped_mass;
    const double m_total = m.sum();
    const int block = 8;

    Eigen::MatrixXd basis(nv, block);
    for (int j = 0; j < block; ++j)
        for (int v = 0; v < nv; ++v) basis(v, j) = std::sin(0.7 * v + 1.3 * j + 1.0);

    auto orthonormalize = [&](Eigen::MatrixXd& x) {
        for (int j = 0; j < block; ++j) {
            x.col(j).array() -= m.dot(x.col(j)) / m_total; // deflate constants
            for (int k = 0; k < j; ++k)
                x.col(j) -= x.col(k).dot(m.cwiseProduct(x.col(j))) * x.col(k);
            const double norm = std::sqrt(x.col(j).dot(m.cwiseProduct(x.col(j))));
            if (!(norm > 1e-300)) throw SolverFailure("iteration block collapsed");
            x.col(j) /= norm;
        }
    };
    orthonormalize(basis);

    double theta = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 500; ++iter) {
        Eigen::MatrixXd next(nv, block);
        for (int j = 0; j < block; ++j)
            next.col(j) = factor.solve(Eigen::VectorXd(m.cwiseProduct(basis.col(j))));
        orthonormalize(next);

        // Rayleigh-Ritz on the block
        const Eigen::MatrixXd small = next.transpose() * (mesh.stiffness * next);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(0.5 * (small + small.transpose()));
        basis = next * ritz.eigenvectors();
        theta = ritz.eigenvalues()(0);

        const Eigen::VectorXd x = basis.col(0);
        const Eigen::VectorXd r = mesh.stiffness * x - theta * m.cwiseProduct(x);
        residual = std::sqrt((r.array().square() / m.array()).sum());
        if (residual <= 1e-10 * std::max(theta, 1e-30)) return theta;
    }
    std::ostringstream msg;
    msg << "inverse iteration stalled: residual " << residual << " at theta " << theta;
    throw SolverFailure(msg.str());
}

TriMesh load_off(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");

    int line_number = 0;
    auto next_line = [&](std::string& line) {
        while (std::getline(in, line)) {
            ++line_number;
            const auto first = line.find_first_not_of(" \t\r\n");
            if (first == std::string::npos) continue;  // blank
            if (line[first] == '#') continue;          // comment
            return true;
        }
        return false;
    };
    auto fail = [&](const std::string& what) -> ParseError {
        return ParseError(what + " (line " + std::to_string(line_number) + ")");
    };

    std::string line;
    if (!next_line(line)) throw fail("empty OFF file");
    {
        std::istringstream head(line);
        std::string magic;
        head >> magic;
        if (magic != "OFF") throw fail("expected OFF header");
    }
    if (!next_line(line)) throw fail("missing counts line");
    long nv = 0, nf = 0, ne = 0;
    {
        std::istringstream counts(line);
        if (!(counts >> nv >> nf >> ne) || nv < 0 || nf < 0)
            throw fail("malformed counts line");
    }

    Eigen::MatrixXd vertices(nv, 3);
    for (long v = 0; v < nv; ++v) {
        if (!next_line(line)) throw fail("unexpected end of file in vertex block");
        std::istringstream fields(line);
        double x = 0.0, y = 0.0, z = 0.0;
        if (!(fields >> x >> y >> z)) throw fail("malformed vertex line");
        std::string extra;
        if (fields >> extra) throw fail("trailing tokens on vertex line");
        vertices.row(v) << x, y, z;
    }

    Eigen::MatrixXi triangles(nf, 3);
    for (long f = 0; f < nf; ++f) {
        if (!next_line(line)) throw fail("unexpected end of file in face block");
        std::istringstream fields(line);
        long degree = 0;
        if (!(fields >> degree)) throw fail("malformed face line");
        if (degree != 3)
            throw NonTriangleFace("face of degree " + std::to_string(degree) +
                                  " (line " + std::to_string(line_number) + ")");
        long a = 0, b = 0, c = 0;
        if (!(fields >> a >> b >> c)) throw fail("malformed face line");
        if (a < 0 || b < 0 || c < 0 || a >= nv || b >= nv || c >= nv)
            throw fail("face index out of range");
        triangles.row(f) << static_cast<int>(a), static_cast<int>(b), static_cast<int>(c);
    }
    return make_tri_mesh(std::move(vertices), std::move(triangles));
}

void save_off(const TriMesh& mesh, const std::string& path) {
    if (mesh.vertices.cols() != 3)
        throw IoError("OFF output supports 3-D vertices only");
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "OFF\n" << mesh.vertices.rows() << ' ' << mesh.triangles.rows() << " 0\n";
    char buffer[96];
    for (int v = 0; v < mesh.vertices.rows(); ++v) {
        std::snprintf(buffer, sizeof(buffer), "%.17g %.17g %.17g\n",
                      mesh.vertices(v, 0), mesh.vertices(v, 1), mesh.vertices(v, 2));
        out << buffer;
    }
    for (int f = 0; f < mesh.triangles.rows(); ++f)
        out << "3 " << mesh.triangles(f, 0) << ' ' << mesh.triangles(f, 1) << ' '
            << mesh.triangles(f, 2) << '\n';
    if (!out) throw IoError("write to '" + path + "' failed");
}

} // namespace sbl
