#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "schema_check.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout
    std::string errors; // stderr
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunResult run_cli(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    const fs::path out = fs::temp_directory_path() / ("sbl_cli_out_" + std::to_string(++counter));
    const fs::path err = fs::temp_directory_path() / ("sbl_cli_err_" + std::to_string(counter));
    const std::string command = env + (env.empty() ? "" : " ") + "\"" SBL_CLI_PATH "\" " + args +
                                " > " + out.string() + " 2> " + err.string();
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.output = slurp(out);
    result.errors = slurp(err);
    fs::remove(out);
    fs::remove(err);
    return result;
}

nlohmann::json load_schema() {
    std::ifstream in(SBL_SCHEMA_PATH);
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

} // namespace

TEST_CASE("bounds: sphere report is schema-valid with every bound at 2") {
    const RunResult run =
        run_cli("bounds --shape sphere --param m=2,r=1 --grid 96x96");
    REQUIRE(run.exit_code == 0);
    const nlohmann::json report = nlohmann::json::parse(run.output);
    CHECK(sbl::testing::schema_errors(report, load_schema()).empty());
    CHECK(report["reilly"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(report["best_pr1"]["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(report["best_pr2"]["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(report["q"]["inertia"] == nlohmann::json::array({0, 3, 0}));
}

TEST_CASE("bounds: output lands atomically at --out") {
    const fs::path out = fs::temp_directory_path() / "sbl_cli_bounds.json";
    const RunResult run = run_cli("bounds --shape torus --param R=1.5 --grid 64x64 --out " +
                                  out.string());
    REQUIRE(run.exit_code == 0);
    CHECK(run.output.empty());
    const nlohmann::json report = nlohmann::json::parse(slurp(out));
    CHECK(report["shape"] == "torus");
    fs::remove(out);
}

TEST_CASE("usage errors exit 2 with a machine-readable object") {
    const RunResult unknown_flag = run_cli("bounds --no-such-flag");
    CHECK(unknown_flag.exit_code == 2);
    CHECK(nlohmann::json::parse(unknown_flag.errors)["error"]["name"] == "UsageError");

    const RunResult no_command = run_cli("");
    CHECK(no_command.exit_code == 2);

    const RunResult bad_grid = run_cli("bounds --shape torus --param R=1.5 --grid 2x2");
    CHECK(bad_grid.exit_code == 2);
}

TEST_CASE("numerical errors exit 3 with the module error name") {
    const RunResult bad_radius = run_cli("bounds --shape torus --param R=0.5");
    CHECK(bad_radius.exit_code == 3);
    CHECK(nlohmann::json::parse(bad_radius.errors)["error"]["name"] == "BadParameter");
}

TEST_CASE("scan emits one CSV row per sampled direction") {
    const RunResult run =
        run_cli("scan --shape torus --param R=1.4142135623730951 --grid 64x64 --sphere-scan 25");
    REQUIRE(run.exit_code == 0);
    std::istringstream lines(run.output);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "v1,v2,v3,q,pr1,pr2");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 25);
}

TEST_CASE("qform prints the inertia of the sqrt(2) torus") {
    const RunResult run =
        run_cli("qform --shape torus --param R=1.4142135623730951 --grid 64x64");
    REQUIRE(run.exit_code == 0);
    CHECK(run.output.find("inertia: (2, 0, 1)") != std::string::npos);
    CHECK(run.output.find("eigenvalues:") != std::string::npos);
}

TEST_CASE("mesh-lambda1 works from a shape and from an OFF file") {
    const RunResult from_shape =
        run_cli("mesh-lambda1 --shape sphere --param m=2,r=1 --mesh 48x24");
    REQUIRE(from_shape.exit_code == 0);
    const double lambda = nlohmann::json::parse(from_shape.output)["lambda1"].get<double>();
    CHECK(lambda == doctest::Approx(2.0).epsilon(0.02));

    // save a mesh via the library's tool chain and reload it through --off
    const fs::path off = fs::temp_directory_path() / "sbl_cli_sphere.off";
    {
        const RunResult save_run = run_cli(
            "mesh-lambda1 --shape sphere --param m=2,r=1 --mesh 48x24"); // warm path only
        (void)save_run;
    }
    // write OFF through the CLI-independent route
    // (test_mesh covers save_off; here we only need a valid file)
    {
        std::ofstream out(off);
        out << "OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
            << "3 0 2 1\n3 0 1 3\n3 1 2 3\n3 0 3 2\n"; // tetrahedron
    }
    const RunResult from_off = run_cli("mesh-lambda1 --off " + off.string());
    REQUIRE(from_off.exit_code == 0);
    CHECK(nlohmann::json::parse(from_off.output)["lambda1"].get<double>() > 0.0);
    fs::remove(off);
}

TEST_CASE("config file supplies defaults that flags override") {
    const fs::path config = fs::temp_directory_path() / "sbl_cli_config.ini";
    {
        std::ofstream out(config);
        out << "[bounds]\nshape=sphere\nparam=\"m=2,r=1\"\ngrid=64x64\n";
    }
    const RunResult run = run_cli("bounds --config " + config.string());
    REQUIRE(run.exit_code == 0);
    const nlohmann::json report = nlohmann::json::parse(run.output);
    CHECK(report["shape"] == "sphere");
    CHECK(report["grid"] == nlohmann::json::array({64, 64}));

    const RunResult overridden =
        run_cli("bounds --config " + config.string() + " --grid 48x48");
    REQUIRE(overridden.exit_code == 0);
    CHECK(nlohmann::json::parse(overridden.output)["grid"] == nlohmann::json::array({48, 48}));
    fs::remove(config);
}

TEST_CASE("paper-table bytes are identical across thread counts") {
    const fs::path a = fs::temp_directory_path() / "sbl_table_1.txt";
    const fs::path b = fs::temp_directory_path() / "sbl_table_4.txt";
    const fs::path c = fs::temp_directory_path() / "sbl_table_8.txt";
    // lighter grid/mesh than the acceptance run; determinism is the point here
    const std::string args = "paper-table --grid 96x96 --mesh 48x24 --out ";
    REQUIRE(run_cli(args + a.string(), "SBL_THREADS=1").exit_code == 0);
    REQUIRE(run_cli(args + b.string(), "SBL_THREADS=4").exit_code == 0);
    REQUIRE(run_cli(args + c.string(), "SBL_THREADS=8").exit_code == 0);
    const std::string table = slurp(a);
    CHECK(!table.empty());
    CHECK(table == slurp(b));
    CHECK(table == slurp(c));
    fs::remove(a);
    fs::remove(b);
    fs::remove(c);
}
