// SPDX-License-Identifier: MIT
//
// End-to-end tests of the command-line binary: the reference convergence
// command and its row count, byte-identical reruns (including across worker
// counts), exit-code contract (0 success / 1 error / 2 assertion failure),
// check-mesh on valid and broken files, config-file parity, and selftest.
//
// The binary path and a scratch directory come from compile definitions.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const std::string cli = WG_CLI_PATH;
const fs::path tmpdir = WG_TEST_TMPDIR;

struct RunResult {
    int exit_code = -1;
    std::string out;  ///< stdout + stderr combined
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs the CLI with the given argument string; captures combined output.
RunResult run_cli(const std::string& args, const std::string& envs = "") {
    fs::create_directories(tmpdir);
    const fs::path log = tmpdir / "cli_log.txt";
    const std::string cmd = envs + (envs.empty() ? "" : " ") + "'" + cli + "' " + args + " > '" +
                            log.string() + "' 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(log);
    return r;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("cli: reference convergence study writes 18 data rows", "[cli]") {
    const fs::path csv = tmpdir / "t1.csv";
    auto r = run_cli("convergence --case 2d --k 0 --lambda 1,1e3,1e6 --levels 2..7 --out '" +
                     csv.string() + "'");
    REQUIRE(r.exit_code == 0);
    const std::string text = slurp(csv);
    REQUIRE(count_lines(text) == 19);  // header + 6 levels x 3 lambdas
    REQUIRE(text.rfind("case,k,lambda,level,dofs,err_u,rate_u,err_sigma,rate_sigma,"
                       "err_gradu,rate_gradu\n",
                       0) == 0);
    // Rates are empty exactly on the first row of each lambda group.
    std::stringstream ss(text);
    std::string line;
    std::getline(ss, line);
    int row = 0;
    while (std::getline(ss, line)) {
        const bool first_of_group = row % 6 == 0;
        REQUIRE((line.find(",,") != std::string::npos) == first_of_group);
        ++row;
    }
}

TEST_CASE("cli: identical configuration produces identical bytes", "[cli]") {
    const fs::path a = tmpdir / "det_a.csv";
    const fs::path b = tmpdir / "det_b.csv";
    const fs::path c = tmpdir / "det_c.csv";
    const std::string base = "convergence --case 2d --k 1 --lambda 1,1e3 --levels 2..4 --out '";
    REQUIRE(run_cli(base + a.string() + "'").exit_code == 0);
    REQUIRE(run_cli(base + b.string() + "'").exit_code == 0);
    REQUIRE(run_cli(base + c.string() + "' --jobs 2", "WG_ELAST_JOBS=3").exit_code == 0);
    const std::string ta = slurp(a);
    REQUIRE(!ta.empty());
    REQUIRE(ta == slurp(b));
    REQUIRE(ta == slurp(c));  // worker count must not change the bytes
}

TEST_CASE("cli: config file reproduces the flag run", "[cli]") {
    const fs::path flagged = tmpdir / "flag.csv";
    const fs::path configured = tmpdir / "conf.csv";
    REQUIRE(run_cli("convergence --case 2d --k 0 --lambda 1,1e3 --levels 2,3 --out '" +
                    flagged.string() + "'")
                .exit_code == 0);
    // Unquoted comma lists: the config parser hands them over as multiple
    // items, which the options must glue back together.
    const fs::path cfg = tmpdir / "study.toml";
    write_file(cfg, "[convergence]\ncase = \"2d\"\nk = 0\nlambda = 1,1e3\nlevels = 2,3\n"
                    "out = \"" +
                        configured.string() + "\"\n");
    REQUIRE(run_cli("--config '" + cfg.string() + "' convergence").exit_code == 0);
    const std::string got = slurp(configured);
    REQUIRE(!got.empty());
    REQUIRE(slurp(flagged) == got);
}

TEST_CASE("cli: usage errors exit 1 and print the synopsis", "[cli]") {
    auto no_sub = run_cli("");
    REQUIRE(no_sub.exit_code == 1);
    REQUIRE(no_sub.out.find("Usage:") != std::string::npos);

    auto bad_sub = run_cli("frobnicate");
    REQUIRE(bad_sub.exit_code == 1);
    REQUIRE(bad_sub.out.find("Usage:") != std::string::npos);

    auto missing = run_cli("check-mesh");
    REQUIRE(missing.exit_code == 1);
    REQUIRE(missing.out.find("Usage:") != std::string::npos);

    auto help = run_cli("--help");
    REQUIRE(help.exit_code == 0);
    REQUIRE(help.out.find("convergence") != std::string::npos);
}

TEST_CASE("cli: runtime errors exit 1", "[cli]") {
    auto budget = run_cli("convergence --case 2d --k 0 --lambda 1 --levels 2 --dof-budget 10");
    REQUIRE(budget.exit_code == 1);
    REQUIRE(budget.out.find("budget") != std::string::npos);

    auto missing_file = run_cli("check-mesh --file '" + (tmpdir / "no_such.wgmesh").string() + "'");
    REQUIRE(missing_file.exit_code == 1);

    auto bad_level = run_cli("convergence --case 2d --levels 9..2");
    REQUIRE(bad_level.exit_code == 1);

    auto bad_lambda = run_cli("convergence --case 2d --lambda -3 --levels 2");
    REQUIRE(bad_lambda.exit_code == 1);
}

TEST_CASE("cli: check-mesh reports regularity for a valid file", "[cli]") {
    const fs::path good = tmpdir / "good.wgmesh";
    write_file(good,
               "wgmesh 2 4 2 4\n"
               "v 0 0\nv 1 0\nv 1 1\nv 0 1\n"
               "c 0 1 2\nc 0 2 3\n"
               "b 0 1 D\nb 1 2 D\nb 2 3 N\nb 0 3 D\n");
    auto r = run_cli("check-mesh --file '" + good.string() + "'");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("mesh is valid") != std::string::npos);
    REQUIRE(r.out.find("1 Neumann") != std::string::npos);

    const fs::path bad = tmpdir / "bad.wgmesh";
    write_file(bad,
               "wgmesh 2 4 2 4\n"
               "v 0 0\nv 1 0\nv 1 1\nv 0 1\n"
               "c 0 1 2\nc 0 2 9\n"  // vertex 9 does not exist
               "b 0 1 D\nb 1 2 D\nb 2 3 N\nb 0 3 D\n");
    auto rb = run_cli("check-mesh --file '" + bad.string() + "'");
    REQUIRE(rb.exit_code == 1);
    REQUIRE(rb.out.find("error") != std::string::npos);
}

TEST_CASE("cli: solve prints diagnostics and enforces --assert", "[cli]") {
    auto ok = run_cli("solve --case 2d --level 3 --k 1 --lambda 1e3 --assert");
    REQUIRE(ok.exit_code == 0);
    REQUIRE(ok.out.find("definite             yes") != std::string::npos);
    REQUIRE(ok.out.find("err_u") != std::string::npos);

    // k=0 in 2D at coarse levels has rates far below the design values, so
    // the rate assertion must trip.
    auto trip = run_cli("convergence --case 2d --k 0 --lambda 1 --levels 2..3 --assert --out '" +
                        (tmpdir / "trip.csv").string() + "'");
    REQUIRE(trip.exit_code == 2);
    REQUIRE(trip.out.find("assertion failed") != std::string::npos);
}

TEST_CASE("cli: selftest passes and reports counts", "[cli]") {
    auto r = run_cli("selftest");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out.find("0 failed") != std::string::npos);
    REQUIRE(r.out.find("[PASS]") != std::string::npos);
    REQUIRE(r.out.find("[FAIL]") == std::string::npos);
}
