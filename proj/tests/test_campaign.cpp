#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/campaign.hpp"
#include "core/semigroups.hpp"
#include "doctest.h"

using namespace sb;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("slowbond_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    fs::path file(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream(p) << content;
        return p;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kSimulateConfig = R"(
[lattice]
n = 4
L = 12
beta = 1
alpha = 1
rho = 0.5
T = 0.2
sample_times = 0,0.2
replicas = 50
seed = 9

[battery]
fn = h hermite_gauss:g=1.000000;c=1.000000
)";

}  // namespace

TEST_CASE("validate command accepts a conforming battery") {
    TempDir dir;
    const auto cfg = dir.file("v.ini", R"(
[regime]
beta = 2

[battery]
fn = h even_gauss:g=1.000000;left=1.000000;right=0.500000,-0.100000

[validate]
suites = membership,laplacian
max_k = 1
)");
    CampaignOptions opts{cfg.string(), (dir.path / "out").string()};
    CHECK(run_validate(opts) == CampaignStatus::Ok);
    const std::string report = slurp(dir.path / "out" / "validate_report.csv");
    CHECK(report.find("membership,h,neumann") != std::string::npos);
    CHECK(report.find(",0\n") == std::string::npos);  // no failing rows
    CHECK(slurp(dir.path / "out" / "manifest.txt").find("command = validate") !=
          std::string::npos);
}

TEST_CASE("validate command flags a function outside the class") {
    TempDir dir;
    const auto cfg = dir.file("v.ini", R"(
[regime]
beta = 2

[battery]
fn = odd hermite_gauss:g=1.000000;c=0.000000,1.000000

[validate]
suites = membership
max_k = 0
)");
    CampaignOptions opts{cfg.string(), (dir.path / "out").string()};
    CHECK(run_validate(opts) == CampaignStatus::SuiteFailed);
}

TEST_CASE("validate command rejects an empty battery and unknown keys") {
    TempDir dir;
    CampaignOptions opts;
    opts.out_dir = (dir.path / "out").string();

    opts.config_path = dir.file("empty.ini", "[regime]\nbeta = 2\n").string();
    CHECK_THROWS_AS(run_validate(opts), Error);

    opts.config_path =
        dir.file("unknown.ini", "[regime]\nbeta = 2\nsurprise = 1\n[battery]\nfn = h zero\n")
            .string();
    try {
        run_validate(opts);
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(std::string(e.what()).find("surprise") != std::string::npos);
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
}

TEST_CASE("regime overrides replace the config regime") {
    TempDir dir;
    const auto cfg = dir.file("v.ini", R"(
[regime]
beta = 2

[battery]
fn = odd hermite_gauss:g=1.000000;c=0.000000,1.000000

[validate]
suites = membership
max_k = 0
)");
    CampaignOptions opts{cfg.string(), (dir.path / "out").string()};
    // x e^{-x^2} fails Neumann but is a perfectly good line-class function
    opts.regime_override = "line";
    CHECK(run_validate(opts) == CampaignStatus::Ok);
}

TEST_CASE("evolve command writes the semigroup image as CSV") {
    TempDir dir;
    const auto cfg = dir.file("e.ini", R"(
[regime]
beta = 0.5

[evolve]
fn = h hermite_gauss:g=1.000000;c=1.000000
t = 0.25
grid_min = -1
grid_max = 1
grid_points = 5
)");
    CampaignOptions opts{cfg.string(), (dir.path / "out").string()};
    CHECK(run_evolve(opts) == CampaignStatus::Ok);
    std::ifstream in(dir.path / "out" / "evolve.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,one_sided,k,value");
    int rows = 0;
    bool checked_mid = false;
    std::string line;
    auto H = TestFunction::hermite_gaussian({1.0});
    while (std::getline(in, line)) {
        ++rows;
        if (line.rfind("0,right", 0) == 0) {
            const double v = std::stod(line.substr(line.rfind(',') + 1));
            CHECK(v == doctest::Approx(semigroup_eval(Regime::line(0.5), 0.25, H, 0.0))
                           .epsilon(1e-9));
            checked_mid = true;
        }
    }
    // 4 off-origin grid points plus both one-sided origin values (the grid's
    // own zero folds into the origin pair)
    CHECK(rows == 6);
    CHECK(checked_mid);
}

TEST_CASE("simulate command is deterministic and honours the seed override") {
    TempDir dir;
    const auto cfg = dir.file("s.ini", kSimulateConfig);
    CampaignOptions opts{cfg.string(), (dir.path / "a").string()};
    CHECK(run_simulate(opts) == CampaignStatus::Ok);
    opts.out_dir = (dir.path / "b").string();
    CHECK(run_simulate(opts) == CampaignStatus::Ok);
    CHECK(slurp(dir.path / "a" / "samples.csv") == slurp(dir.path / "b" / "samples.csv"));

    opts.out_dir = (dir.path / "c").string();
    opts.has_seed_override = true;
    opts.seed_override = 1234;
    CHECK(run_simulate(opts) == CampaignStatus::Ok);
    CHECK(slurp(dir.path / "a" / "samples.csv") != slurp(dir.path / "c" / "samples.csv"));
    CHECK(slurp(dir.path / "c" / "manifest.txt").find("seed = 1234") != std::string::npos);
}

TEST_CASE("simulate command enforces the lattice-width invariant") {
    TempDir dir;
    std::string narrow = kSimulateConfig;
    narrow.replace(narrow.find("L = 12"), 6, "L = 11");
    CampaignOptions opts{dir.file("s.ini", narrow).string(), (dir.path / "out").string()};
    try {
        run_simulate(opts);
        FAIL("expected an invalid-argument error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("3n") != std::string::npos);
    }
}

TEST_CASE("compare command lists missing sample files") {
    TempDir dir;
    const auto cfg = dir.file("c.ini", R"(
[compare]
rho = 0.5
times = 0.2
h = h hermite_gauss:g=1.000000;c=1.000000
entry = line 0.5 1 /nonexistent/a.csv
entry = robin 1 1 /nonexistent/b.csv
)");
    CampaignOptions opts{cfg.string(), (dir.path / "out").string()};
    try {
        run_compare(opts);
        FAIL("expected a data error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DataError);
        CHECK(std::string(e.what()).find("/nonexistent/a.csv") != std::string::npos);
        CHECK(std::string(e.what()).find("/nonexistent/b.csv") != std::string::npos);
    }
}

TEST_CASE("simulate then compare round-trips through the file formats") {
    TempDir dir;
    CampaignOptions sim{dir.file("s.ini", kSimulateConfig).string(), (dir.path / "sim").string()};
    REQUIRE(run_simulate(sim) == CampaignStatus::Ok);

    const std::string samples = (dir.path / "sim" / "samples.csv").string();
    const auto cfg = dir.file("c.ini",
                              "[compare]\nrho = 0.5\ntimes = 0.2\n"
                              "h = h hermite_gauss:g=1.000000;c=1.000000\n"
                              "entry = robin 1 1 " + samples + "\n");
    CampaignOptions cmp{cfg.string(), (dir.path / "out").string()};
    const CampaignStatus status = run_compare(cmp);
    CHECK((status == CampaignStatus::Ok || status == CampaignStatus::SuiteFailed));
    const std::string table = slurp(dir.path / "out" / "compare_table.csv");
    CHECK(table.find("regime,t,oracle,empirical,std_error,z") != std::string::npos);
    CHECK(table.find("robin,0.2") != std::string::npos);

    const auto rep = dir.file("r.ini", "[report]\ntable = " +
                                           (dir.path / "out" / "compare_table.csv").string() + "\n");
    CampaignOptions report{rep.string(), (dir.path / "rep").string()};
    CHECK(run_report(report) == status);
}

TEST_CASE("report command rejects a foreign table") {
    TempDir dir;
    dir.file("table.csv", "not,the,expected,header\n");
    const auto cfg =
        dir.file("r.ini", "[report]\ntable = " + (dir.path / "table.csv").string() + "\n");
    CampaignOptions opts{cfg.string(), (dir.path / "out").string()};
    CHECK_THROWS_AS(run_report(opts), Error);
}

TEST_CASE("unknown campaign commands are rejected") {
    CampaignOptions opts;
    CHECK_THROWS_AS(run_campaign("frobnicate", opts), Error);
}
