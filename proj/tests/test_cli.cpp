#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("slowbond_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path file(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream(p) << content;
        return p;
    }
};

struct RunResult {
    int exit_code;
    std::string output;
};

RunResult run_cli(const TempDir& dir, const std::string& args) {
    const fs::path log = dir.path / "cli.log";
    const std::string cmd =
        std::string(SB_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    std::ifstream in(log);
    std::ostringstream buf;
    buf << in.rdbuf();
    return {WEXITSTATUS(raw), buf.str()};
}

const char* kValidateOk = R"(
[regime]
beta = 2

[battery]
fn = h even_gauss:g=1.000000;left=1.000000;right=0.500000

[validate]
suites = membership
max_k = 1
)";

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    TempDir dir;
    CHECK(run_cli(dir, "").exit_code == 2);
    CHECK(run_cli(dir, "validate").exit_code == 2);  // --config is required
    CHECK(run_cli(dir, "frobnicate --config x").exit_code == 2);

    const auto r = run_cli(dir, "validate --config /nonexistent.ini");
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("/nonexistent.ini") != std::string::npos);
}

TEST_CASE("help is available and exits cleanly") {
    TempDir dir;
    const auto r = run_cli(dir, "--help");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("validate") != std::string::npos);
    CHECK(r.output.find("simulate") != std::string::npos);
}

TEST_CASE("validate exits 0 on a passing battery and 1 on a failing one") {
    TempDir dir;
    const auto ok = dir.file("ok.ini", kValidateOk);
    const auto out = (dir.path / "out").string();
    const auto r = run_cli(dir, "validate --config " + ok.string() + " --out " + out);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("PASS membership h") != std::string::npos);
    CHECK(fs::exists(dir.path / "out" / "validate_report.csv"));

    const auto bad = dir.file("bad.ini", R"(
[regime]
beta = 2

[battery]
fn = odd hermite_gauss:g=1.000000;c=0.000000,1.000000

[validate]
suites = membership
max_k = 0
)");
    const auto rf = run_cli(dir, "validate --config " + bad.string() + " --out " + out);
    CHECK(rf.exit_code == 1);
    CHECK(rf.output.find("FAIL") != std::string::npos);
}

TEST_CASE("regime flag overrides the config") {
    TempDir dir;
    const auto bad = dir.file("odd.ini", R"(
[regime]
beta = 2

[battery]
fn = odd hermite_gauss:g=1.000000;c=0.000000,1.000000

[validate]
suites = membership
max_k = 0
)");
    const auto out = (dir.path / "out").string();
    const auto r = run_cli(
        dir, "validate --config " + bad.string() + " --out " + out + " --regime line --beta 0.5");
    CHECK(r.exit_code == 0);
}

TEST_CASE("simulate honours seed and workers flags and stays deterministic") {
    TempDir dir;
    const auto cfg = dir.file("sim.ini", R"(
[lattice]
n = 4
L = 12
beta = 1
alpha = 1
rho = 0.5
T = 0.2
sample_times = 0,0.2
replicas = 40
seed = 5

[battery]
fn = h hermite_gauss:g=1.000000;c=1.000000
)");
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    const std::string base = "simulate --config " + cfg.string() + " --out ";
    CHECK(run_cli(dir, base + (dir.path / "a").string()).exit_code == 0);
    CHECK(run_cli(dir, base + (dir.path / "b").string() + " --workers 3").exit_code == 0);
    CHECK(slurp(dir.path / "a" / "samples.csv") == slurp(dir.path / "b" / "samples.csv"));
    CHECK(run_cli(dir, base + (dir.path / "c").string() + " --seed 77").exit_code == 0);
    CHECK(slurp(dir.path / "a" / "samples.csv") != slurp(dir.path / "c" / "samples.csv"));
}

TEST_CASE("evolve then report pipeline") {
    TempDir dir;
    const auto cfg = dir.file("e.ini", R"(
[regime]
beta = 0.5

[evolve]
fn = h hermite_gauss:g=1.000000;c=1.000000
t = 0.1
grid_points = 9
)");
    const auto r =
        run_cli(dir, "evolve --config " + cfg.string() + " --out " + (dir.path / "out").string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(dir.path / "out" / "evolve.csv"));
    CHECK(fs::exists(dir.path / "out" / "manifest.txt"));
}
