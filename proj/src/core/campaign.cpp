#include "campaign.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "semigroups.hpp"
#include "stats.hpp"

namespace sb {

namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "slowbond 1.0.0";

struct BatteryEntry {
    std::string id;
    TestFunctionPtr fn;
};

Regime regime_from_config(const Config& cfg, const CampaignOptions& opts) {
    double beta = cfg.get_double_or("regime", "beta", 0.5);
    double alpha = cfg.get_double_or("regime", "alpha", 1.0);
    if (opts.beta_override) beta = *opts.beta_override;
    if (opts.alpha_override) alpha = *opts.alpha_override;
    if (opts.regime_override) {
        const std::string& r = *opts.regime_override;
        if (r == "line") return Regime::line(beta < 1.0 ? beta : 0.5);
        if (r == "robin") return Regime::robin(alpha);
        if (r == "neumann") return Regime::neumann(beta > 1.0 ? beta : 2.0);
        throw Error(ErrorCode::InvalidArgument, "unknown regime name: " + r);
    }
    return Regime::from_beta(beta, alpha);
}

std::vector<BatteryEntry> battery_from_config(const Config& cfg, const std::string& section) {
    std::vector<BatteryEntry> battery;
    for (const std::string& line : cfg.get_all(section, "fn")) {
        const auto space = line.find(' ');
        if (space == std::string::npos)
            throw Error(ErrorCode::ParseError, "battery entry needs '<id> <descriptor>': " + line);
        battery.push_back(
            {line.substr(0, space), parse_family_descriptor(line.substr(space + 1))});
    }
    return battery;
}

void write_manifest(const fs::path& out_dir, const std::string& command, const Config& cfg,
                    std::uint64_t seed, int workers, double wall_seconds) {
    std::ofstream os(out_dir / "manifest.txt");
    if (!os) throw Error(ErrorCode::IoError, "cannot write manifest in " + out_dir.string());
    os << "command = " << command << "\n"
       << "version = " << kVersion << "\n"
       << "config_hash = " << cfg.content_hash() << "\n"
       << "seed = " << seed << "\n"
       << "workers = " << workers << "\n"
       << "wall_seconds = " << wall_seconds << "\n"
       << "config_begin\n"
       << cfg.raw_text() << "config_end\n";
}

struct SuiteRow {
    std::string suite, function, detail;
    double statistic;
    bool pass;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string regime_name(const Regime& r) {
    switch (r.kind) {
        case RegimeKind::Line: return "line";
        case RegimeKind::Robin: return "robin";
        case RegimeKind::Neumann: return "neumann";
    }
    return "?";
}

}  // namespace

CampaignStatus run_validate(const CampaignOptions& opts) {
    Stopwatch watch;
    const Config cfg = Config::parse_file(opts.config_path);
    cfg.check_schema({{"regime", {"beta", "alpha"}},
                      {"battery", {"fn"}},
                      {"validate", {"times", "tol", "max_k", "suites", "eps", "trunc"}}});
    const Regime regime = regime_from_config(cfg, opts);
    const auto battery = battery_from_config(cfg, "battery");
    if (battery.empty())
        throw Error(ErrorCode::InvalidArgument, "validate: battery must not be empty");

    const double tol = cfg.get_double_or("validate", "tol", 1e-6);
    const int max_k = cfg.get_int_or("validate", "max_k", 2);
    std::vector<double> times = {0.01, 0.1, 1.0};
    if (cfg.has_key("validate", "times")) times = cfg.get_double_list("validate", "times");
    std::string suites = cfg.get_or("validate", "suites",
                                    "membership,laplacian,semigroup,generator,continuity,gradnorm");
    const auto enabled = [&](const std::string& name) {
        return suites.find(name) != std::string::npos;
    };

    std::vector<SuiteRow> rows;
    for (const auto& [id, fn] : battery) {
        if (enabled("membership")) {
            const auto rep = validate_membership(fn, regime, max_k, tol);
            for (const auto& e : rep.entries)
                rows.push_back({"membership", id, "order_k=" + std::to_string(e.order_index),
                                e.residual, e.pass});
        }
        if (enabled("laplacian")) {
            const auto rep = validate_membership(laplace_beta(fn), regime, std::max(0, max_k - 1), tol);
            for (const auto& e : rep.entries)
                rows.push_back({"laplacian", id, "order_k=" + std::to_string(e.order_index),
                                e.residual, e.pass});
        }
        if (enabled("semigroup")) {
            for (double t : times) {
                const auto rep = validate_membership(semigroup_image(regime, t, fn), regime, max_k, tol);
                for (const auto& e : rep.entries)
                    rows.push_back({"semigroup", id,
                                    "t=" + std::to_string(t) + ",order_k=" + std::to_string(e.order_index),
                                    e.residual, e.pass});
            }
        }
        if (enabled("generator")) {
            const double eps = cfg.get_double_or("validate", "eps", 1e-2);
            const std::vector<SeminormIndex> idx = {{0, 0}, {0, 2}, {1, 0}};
            const double r1 = generator_residual(regime, 0.1, eps, fn, idx);
            const double r2 = generator_residual(regime, 0.1, eps / 2.0, fn, idx);
            const double ratio = r2 > 0.0 ? r1 / r2 : 2.0;
            rows.push_back({"generator", id, "residual_ratio", ratio, ratio >= 1.7 && ratio <= 2.3});
        }
        if (enabled("continuity")) {
            const int trunc = cfg.get_int_or("validate", "trunc", 3);
            const double m1 = continuity_modulus(regime, fn, 0.1, 0.1 + 0.04, trunc);
            const double m2 = continuity_modulus(regime, fn, 0.1, 0.1 + 0.02, trunc);
            const double ratio = m2 > 0.0 ? m1 / m2 : 2.0;
            rows.push_back({"continuity", id, "modulus_ratio", ratio, ratio >= 1.5 && ratio <= 2.5});
        }
        if (enabled("gradnorm")) {
            std::vector<double> coarse, fine;
            for (int i = 0; i <= 4; ++i) coarse.push_back(0.05 + 0.1 * i);
            for (int i = 0; i <= 8; ++i) fine.push_back(0.05 + 0.05 * i);
            const auto jump = [](const std::vector<double>& v) {
                double m = 0.0;
                for (std::size_t i = 1; i < v.size(); ++i) m = std::max(m, std::abs(v[i] - v[i - 1]));
                return m;
            };
            const double jc = jump(gradnorm_curve(regime, fn, coarse));
            const double jf = jump(gradnorm_curve(regime, fn, fine));
            rows.push_back({"gradnorm", id, "jump_ratio", jc / std::max(jf, 1e-300),
                            jf <= 0.65 * jc || jc < 1e-12});
        }
    }

    fs::create_directories(opts.out_dir);
    std::ofstream os(fs::path(opts.out_dir) / "validate_report.csv");
    os << "suite,function,regime,detail,statistic,pass\n";
    bool all_pass = true;
    for (const SuiteRow& r : rows) {
        os << r.suite << ',' << r.function << ',' << regime_name(regime) << ',' << r.detail << ','
           << r.statistic << ',' << (r.pass ? "1" : "0") << '\n';
        if (!r.pass) all_pass = false;
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.suite << " " << r.function << " " << r.detail
                  << " statistic=" << r.statistic << "\n";
    }
    write_manifest(opts.out_dir, "validate", cfg,
                   opts.has_seed_override ? opts.seed_override : 0, opts.workers, watch.seconds());
    return all_pass ? CampaignStatus::Ok : CampaignStatus::SuiteFailed;
}

CampaignStatus run_evolve(const CampaignOptions& opts) {
    Stopwatch watch;
    const Config cfg = Config::parse_file(opts.config_path);
    cfg.check_schema({{"regime", {"beta", "alpha"}},
                      {"evolve", {"fn", "t", "k", "grid_min", "grid_max", "grid_points"}}});
    const Regime regime = regime_from_config(cfg, opts);
    const auto entries = cfg.get_all("evolve", "fn");
    if (entries.size() != 1)
        throw Error(ErrorCode::InvalidArgument, "evolve: exactly one fn entry required");
    const auto space = entries[0].find(' ');
    const std::string id = entries[0].substr(0, space);
    const TestFunctionPtr fn = parse_family_descriptor(entries[0].substr(space + 1));
    const double t = cfg.get_double("evolve", "t");
    const int k = cfg.get_int_or("evolve", "k", 0);
    const double g0 = cfg.get_double_or("evolve", "grid_min", -3.0);
    const double g1 = cfg.get_double_or("evolve", "grid_max", 3.0);
    const int np = cfg.get_int_or("evolve", "grid_points", 61);
    std::vector<double> grid;
    for (int i = 0; i < np; ++i) grid.push_back(g0 + (g1 - g0) * i / std::max(1, np - 1));

    const auto values = semigroup_apply(regime, t, fn, grid, k);
    fs::create_directories(opts.out_dir);
    std::ofstream os(fs::path(opts.out_dir) / "evolve.csv");
    os.precision(17);
    os << "x,one_sided,k,value\n";
    for (const auto& v : values)
        os << v.x << ',' << (v.one_sided == Side::Right ? "right" : "left") << ',' << v.k << ','
           << v.value << '\n';
    write_manifest(opts.out_dir, "evolve", cfg, 0, opts.workers, watch.seconds());
    return CampaignStatus::Ok;
}

CampaignStatus run_simulate(const CampaignOptions& opts) {
    Stopwatch watch;
    const Config cfg = Config::parse_file(opts.config_path);
    cfg.check_schema({{"lattice",
                       {"n", "L", "beta", "alpha", "rho", "T", "sample_times", "replicas", "seed"}},
                      {"battery", {"fn"}}});
    LatticeConfig lattice;
    lattice.n = cfg.get_int("lattice", "n");
    lattice.L = cfg.get_int("lattice", "L");
    lattice.beta = cfg.get_double("lattice", "beta");
    lattice.alpha = cfg.get_double_or("lattice", "alpha", 1.0);
    lattice.rho = cfg.get_double("lattice", "rho");
    lattice.horizon = cfg.get_double("lattice", "T");
    lattice.sample_times = cfg.get_double_list("lattice", "sample_times");
    lattice.seed = cfg.get_u64_or("lattice", "seed", 0);
    if (opts.has_seed_override) lattice.seed = opts.seed_override;
    const int replicas = cfg.get_int("lattice", "replicas");
    lattice.validate();
    if (lattice.L < 3 * lattice.n)
        throw Error(ErrorCode::InvalidArgument, "simulate: require L >= 3n (test-function truncation)");

    const auto battery = battery_from_config(cfg, "battery");
    std::vector<TestFunctionPtr> fns;
    std::vector<std::string> ids;
    for (const auto& [id, fn] : battery) {
        ids.push_back(id);
        fns.push_back(fn);
    }

    fs::create_directories(opts.out_dir);
    if (replicas > 0) {
        const FieldSamples samples = run_field_campaign(lattice, fns, ids, replicas, opts.workers);
        std::ofstream os(fs::path(opts.out_dir) / "samples.csv");
        if (!os) throw Error(ErrorCode::IoError, "cannot write " + opts.out_dir + "/samples.csv");
        samples.write_csv(os);
    }
    write_manifest(opts.out_dir, "simulate", cfg, lattice.seed, opts.workers, watch.seconds());
    return CampaignStatus::Ok;
}

CampaignStatus run_compare(const CampaignOptions& opts) {
    Stopwatch watch;
    const Config cfg = Config::parse_file(opts.config_path);
    cfg.check_schema({{"compare", {"rho", "times", "h", "entry"}}});
    const double rho = cfg.get_double("compare", "rho");
    const std::vector<double> times = cfg.get_double_list("compare", "times");
    const std::string hline = cfg.get("compare", "h");
    const auto hspace = hline.find(' ');
    if (hspace == std::string::npos)
        throw Error(ErrorCode::ParseError, "compare: h needs '<id> <descriptor>'");
    const std::string h_id = hline.substr(0, hspace);
    const TestFunctionPtr H = parse_family_descriptor(hline.substr(hspace + 1));

    std::vector<std::string> labels;
    std::vector<Regime> regimes;
    std::vector<FieldSamples> stores;
    std::vector<std::string> missing;
    for (const std::string& entry : cfg.get_all("compare", "entry")) {
        std::istringstream is(entry);
        std::string label, path;
        double beta, alpha;
        if (!(is >> label >> beta >> alpha >> path))
            throw Error(ErrorCode::ParseError,
                        "compare: entry needs '<label> <beta> <alpha> <path>': " + entry);
        if (!fs::exists(path)) {
            missing.push_back(path);
            continue;
        }
        std::ifstream in(path);
        stores.push_back(FieldSamples::read_csv(in));
        labels.push_back(label);
        regimes.push_back(Regime::from_beta(beta, alpha));
    }
    if (!missing.empty()) {
        std::string msg = "compare: missing sample files:";
        for (const auto& m : missing) msg += " " + m;
        throw Error(ErrorCode::DataError, msg);
    }
    if (stores.empty()) throw Error(ErrorCode::DataError, "compare: no sample entries given");

    std::vector<const FieldSamples*> ptrs;
    for (const auto& s : stores) ptrs.push_back(&s);
    const OUParams params{rho, regimes.front()};
    const auto report =
        phase_transition_table(labels, regimes, ptrs, h_id, H, params, times);

    fs::create_directories(opts.out_dir);
    std::ofstream os(fs::path(opts.out_dir) / "compare_table.csv");
    os.precision(12);
    os << "regime,t,oracle,empirical,std_error,z\n";
    bool all_within = true;
    for (const auto& r : report.rows) {
        os << r.regime_label << ',' << r.t << ',' << r.oracle << ',' << r.empirical << ','
           << r.std_error << ',' << r.z << '\n';
        if (std::abs(r.z) > 3.0) all_within = false;
    }
    std::ofstream sum(fs::path(opts.out_dir) / "summary.txt");
    sum << "test=phase_transition separated=" << (report.separated ? 1 : 0)
        << " inconclusive=" << (report.inconclusive ? 1 : 0) << "\n";
    for (const auto& r : report.rows)
        sum << "test=covariance regime=" << r.regime_label << " t=" << r.t
            << " statistic=" << r.empirical << " target=" << r.oracle
            << " std_error=" << r.std_error << " z=" << r.z
            << " pass=" << (std::abs(r.z) <= 3.0 ? 1 : 0) << "\n";
    write_manifest(opts.out_dir, "compare", cfg, 0, opts.workers, watch.seconds());
    return all_within ? CampaignStatus::Ok : CampaignStatus::SuiteFailed;
}

CampaignStatus run_report(const CampaignOptions& opts) {
    Stopwatch watch;
    const Config cfg = Config::parse_file(opts.config_path);
    cfg.check_schema({{"report", {"table"}}});
    const std::string table = cfg.get("report", "table");
    fs::create_directories(opts.out_dir);
    std::ifstream in(table);
    if (!in) throw Error(ErrorCode::DataError, "report: cannot open table " + table);
    std::string line;
    std::getline(in, line);
    if (line != "regime,t,oracle,empirical,std_error,z")
        throw Error(ErrorCode::ParseError, "report: unexpected table header in " + table);
    std::cout << "regime        t        oracle      empirical   std_error   z\n";
    bool all_within = true;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string regime, field;
        std::getline(ls, regime, ',');
        double vals[5];
        for (double& v : vals) {
            if (!std::getline(ls, field, ','))
                throw Error(ErrorCode::ParseError,
                            "report: bad column count at row " + std::to_string(lineno));
            v = std::stod(field);
        }
        if (std::abs(vals[4]) > 3.0) all_within = false;
        std::printf("%-12s %8.4f %11.5g %11.5g %11.5g %7.2f\n", regime.c_str(), vals[0], vals[1],
                    vals[2], vals[3], vals[4]);
    }
    write_manifest(opts.out_dir, "report", cfg, 0, opts.workers, watch.seconds());
    return all_within ? CampaignStatus::Ok : CampaignStatus::SuiteFailed;
}

CampaignStatus run_campaign(const std::string& command, const CampaignOptions& opts) {
    if (command == "validate") return run_validate(opts);
    if (command == "evolve") return run_evolve(opts);
    if (command == "simulate") return run_simulate(opts);
    if (command == "compare") return run_compare(opts);
    if (command == "report") return run_report(opts);
    throw Error(ErrorCode::InvalidArgument, "unknown command: " + command);
}

}  // namespace sb
