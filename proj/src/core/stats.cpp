#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>

namespace sb {

namespace {

double integrate_pairing_shells(const Integrand& f, const QuadratureConfig& cfg) {
    double width = 8.0;
    double total = integrate(f, 0.0, width, cfg) + integrate(f, -width, 0.0, cfg);
    double edge = width;
    while (width < 2048.0) {
        const double shell =
            integrate(f, edge, edge + width, cfg) + integrate(f, -edge - width, -edge, cfg);
        total += shell;
        edge += width;
        width *= 2.0;
        if (std::abs(shell) <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) return total;
    }
    throw AccuracyError("pairing integral does not decay", total, 0.0);
}

double jackknife_se_of_mean(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    double total = 0.0;
    for (double x : v) total += x;
    const double mean = total / n;
    double ss = 0.0;
    for (double x : v) {
        const double loo = (total - x) / (n - 1);  // leave-one-out mean
        ss += (loo - mean) * (loo - mean);
    }
    return std::sqrt((n - 1.0) / n * ss);
}

double jackknife_se_of_variance(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    double total = 0.0, total_sq = 0.0;
    for (double x : v) {
        total += x;
        total_sq += x * x;
    }
    std::vector<double> loo(n);
    for (int i = 0; i < n; ++i) {
        const double s = total - v[i], ss = total_sq - v[i] * v[i];
        const double m = s / (n - 1);
        loo[i] = (ss - (n - 1) * m * m) / (n - 2);
    }
    double mloo = 0.0;
    for (double x : loo) mloo += x;
    mloo /= n;
    double acc = 0.0;
    for (double x : loo) acc += (x - mloo) * (x - mloo);
    return std::sqrt((n - 1.0) / n * acc);
}

}  // namespace

CovEstimate summarize(const std::vector<double>& values) {
    if (values.size() < 2) throw Error(ErrorCode::DataError, "summarize: need at least 2 replicas");
    const int n = static_cast<int>(values.size());
    double mean = 0.0;
    for (double x : values) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : values) var += (x - mean) * (x - mean);
    var /= (n - 1);
    return {mean, var, jackknife_se_of_mean(values), n};
}

FieldSamples::FieldSamples(std::vector<double> times, std::vector<std::string> function_ids,
                           int replicas)
    : times_(std::move(times)),
      function_ids_(std::move(function_ids)),
      replicas_(replicas),
      values_(static_cast<std::size_t>(replicas) * times_.size() * function_ids_.size(), 0.0) {}

double& FieldSamples::at(int replica, int time_index, int fn_index) {
    return values_[(static_cast<std::size_t>(replica) * times_.size() + time_index) *
                       function_ids_.size() +
                   fn_index];
}

double FieldSamples::at(int replica, int time_index, int fn_index) const {
    return values_[(static_cast<std::size_t>(replica) * times_.size() + time_index) *
                       function_ids_.size() +
                   fn_index];
}

int FieldSamples::time_index(double t) const {
    for (std::size_t i = 0; i < times_.size(); ++i)
        if (std::abs(times_[i] - t) <= 1e-12 * std::max(1.0, std::abs(t)))
            return static_cast<int>(i);
    throw Error(ErrorCode::DataError, "FieldSamples: no sample at time " + std::to_string(t));
}

int FieldSamples::fn_index(const std::string& id) const {
    for (std::size_t i = 0; i < function_ids_.size(); ++i)
        if (function_ids_[i] == id) return static_cast<int>(i);
    throw Error(ErrorCode::DataError, "FieldSamples: unknown function id " + id);
}

void FieldSamples::write_csv(std::ostream& os) const {
    os << "replica,t,function_id,value\n";
    os.precision(17);
    for (int r = 0; r < replicas_; ++r)
        for (std::size_t ti = 0; ti < times_.size(); ++ti)
            for (std::size_t fi = 0; fi < function_ids_.size(); ++fi)
                os << r << ',' << times_[ti] << ',' << function_ids_[fi] << ','
                   << at(r, static_cast<int>(ti), static_cast<int>(fi)) << '\n';
}

FieldSamples FieldSamples::read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "replica,t,function_id,value")
        throw Error(ErrorCode::ParseError, "sample file: bad or missing header row");
    std::vector<double> times;
    std::vector<std::string> ids;
    struct Row {
        int replica;
        int ti, fi;
        double value;
    };
    std::vector<Row> rows;
    int max_replica = -1;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string c0, c1, c2, c3, extra;
        if (!std::getline(ls, c0, ',') || !std::getline(ls, c1, ',') ||
            !std::getline(ls, c2, ',') || !std::getline(ls, c3, ',') || std::getline(ls, extra, ','))
            throw Error(ErrorCode::ParseError,
                        "sample file: bad column count at row " + std::to_string(lineno));
        Row row;
        try {
            row.replica = std::stoi(c0);
            const double t = std::stod(c1);
            row.value = std::stod(c3);
            auto it = std::find_if(times.begin(), times.end(),
                                   [&](double x) { return std::abs(x - t) <= 1e-15; });
            if (it == times.end()) {
                times.push_back(t);
                row.ti = static_cast<int>(times.size()) - 1;
            } else {
                row.ti = static_cast<int>(it - times.begin());
            }
            auto fit = std::find(ids.begin(), ids.end(), c2);
            if (fit == ids.end()) {
                ids.push_back(c2);
                row.fi = static_cast<int>(ids.size()) - 1;
            } else {
                row.fi = static_cast<int>(fit - ids.begin());
            }
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError,
                        "sample file: malformed value at row " + std::to_string(lineno));
        }
        max_replica = std::max(max_replica, row.replica);
        rows.push_back(row);
    }
    FieldSamples out(times, ids, max_replica + 1);
    for (const Row& r : rows) out.at(r.replica, r.ti, r.fi) = r.value;
    return out;
}

std::vector<double> FieldSamples::slice(int time_index, int fn_index) const {
    std::vector<double> out(replicas_);
    for (int r = 0; r < replicas_; ++r) out[r] = at(r, time_index, fn_index);
    return out;
}

FieldSamples run_field_campaign(const LatticeConfig& config,
                                const std::vector<TestFunctionPtr>& battery,
                                const std::vector<std::string>& ids, int replicas, int workers) {
    if (battery.size() != ids.size())
        throw Error(ErrorCode::InvalidArgument, "run_field_campaign: battery/id size mismatch");
    std::vector<double> times = config.sample_times;
    if (times.empty()) times.push_back(0.0);
    std::vector<std::vector<double>> h_values;
    h_values.reserve(battery.size());
    for (const auto& H : battery) h_values.push_back(ExclusionProcess::lattice_values(*H, config));

    FieldSamples samples(times, ids, replicas);
    const auto run_range = [&](int r0, int r1) {
        for (int r = r0; r < r1; ++r) {
            ExclusionProcess proc(config, static_cast<std::uint64_t>(r));
            for (std::size_t ti = 0; ti < times.size(); ++ti) {
                proc.step_to(times[ti]);
                for (std::size_t fi = 0; fi < battery.size(); ++fi)
                    samples.at(r, static_cast<int>(ti), static_cast<int>(fi)) =
                        proc.fluctuation(h_values[fi]);
            }
        }
    };
    workers = std::max(1, workers);
    if (workers == 1 || replicas < 2 * workers) {
        run_range(0, replicas);
    } else {
        std::vector<std::future<void>> futures;
        const int chunk = (replicas + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const int r0 = w * chunk, r1 = std::min(replicas, (w + 1) * chunk);
            if (r0 >= r1) break;
            futures.push_back(std::async(std::launch::async, run_range, r0, r1));
        }
        for (auto& f : futures) f.get();
    }
    return samples;
}

double ou_covariance_oracle(const OUParams& params, const TestFunctionPtr& H,
                            const TestFunctionPtr& G, double t, bool include_atom,
                            const QuadratureConfig& cfg) {
    const auto integrand = [&](double u) {
        const Side side = u >= 0.0 ? Side::Right : Side::Left;
        return semigroup_eval(params.regime, t, H, u, 0, side, cfg) * G->eval(u, 0, side);
    };
    double pairing = integrate_pairing_shells(integrand, cfg);
    if (include_atom && params.regime.is_robin()) {
        const double a = params.regime.alpha;
        pairing += semigroup_eval(params.regime, t, H, 0.0, 0, Side::Right, cfg) *
                   G->eval(0.0, 0, Side::Right) / (a * a);
    }
    return params.chi() * pairing;
}

double static_variance_exact(const TestFunction& H, const LatticeConfig& config) {
    const std::vector<double> hv = ExclusionProcess::lattice_values(H, config);
    double sum_sq = 0.0;
    for (double v : hv) sum_sq += v * v;
    return config.rho * (1.0 - config.rho) * sum_sq / config.n;
}

CovEstimate empirical_covariance(const FieldSamples& samples, const std::string& h_id,
                                 const std::string& g_id, double t) {
    if (samples.replicas() < 2)
        throw Error(ErrorCode::DataError, "empirical_covariance: need at least 2 replicas");
    const int ti = samples.time_index(t);
    const int t0 = samples.time_index(0.0);
    const int hi = samples.fn_index(h_id);
    const int gi = samples.fn_index(g_id);
    std::vector<double> products(samples.replicas());
    for (int r = 0; r < samples.replicas(); ++r)
        products[r] = samples.at(r, ti, hi) * samples.at(r, t0, gi);
    return summarize(products);
}

DynkinReport dynkin_martingale_test(const FieldSamples& samples, const std::string& h_id,
                                    const std::string& laplace_id, double t,
                                    double variance_target) {
    const int hi = samples.fn_index(h_id);
    const int li = samples.fn_index(laplace_id);
    const int t0 = samples.time_index(0.0);
    const int tend = samples.time_index(t);
    // grid indices from 0 to t in sample order
    std::vector<int> grid;
    for (std::size_t i = 0; i < samples.times().size(); ++i)
        if (samples.times()[i] <= t + 1e-12) grid.push_back(static_cast<int>(i));
    std::sort(grid.begin(), grid.end(),
              [&](int a, int b) { return samples.times()[a] < samples.times()[b]; });
    if (grid.size() < 3)
        throw Error(ErrorCode::DataError, "dynkin test: need at least 3 sample times up to t");

    const auto trapezoid = [&](int r, int stride) {
        double acc = 0.0;
        std::size_t prev = 0;
        for (std::size_t i = stride; i < grid.size(); i += stride) {
            const double dt = samples.times()[grid[i]] - samples.times()[grid[prev]];
            acc += 0.5 * dt * (samples.at(r, grid[i], li) + samples.at(r, grid[prev], li));
            prev = i;
        }
        // close the interval if the stride skipped the last point
        if (prev != grid.size() - 1) {
            const std::size_t last = grid.size() - 1;
            const double dt = samples.times()[grid[last]] - samples.times()[grid[prev]];
            acc += 0.5 * dt * (samples.at(r, grid[last], li) + samples.at(r, grid[prev], li));
        }
        return acc;
    };

    std::vector<double> mart(samples.replicas());
    double riemann = 0.0;
    for (int r = 0; r < samples.replicas(); ++r) {
        const double integral = trapezoid(r, 1);
        const double coarse = trapezoid(r, 2);
        riemann += std::abs(integral - coarse) / 3.0;  // Richardson for trapezoid
        mart[r] = samples.at(r, tend, hi) - samples.at(r, t0, hi) - integral;
    }
    riemann /= samples.replicas();

    const CovEstimate drift = summarize(mart);
    if (riemann > 0.5 * 3.0 * drift.std_error)
        throw Error(ErrorCode::DataError,
                    "dynkin test: sample grid too coarse for the compensator integral");
    DynkinReport report;
    report.t = t;
    report.drift = drift;
    report.variance = drift.variance;
    report.variance_std_error = jackknife_se_of_variance(mart);
    report.variance_target = variance_target;
    report.riemann_error = riemann;
    report.drift_pass = std::abs(drift.mean) <= 3.0 * drift.std_error;
    report.variance_ratio = variance_target != 0.0 ? drift.variance / variance_target : 0.0;
    return report;
}

ExponentialMartingaleReport exponential_martingale_test(const FieldSamples& samples,
                                                        const std::vector<double>& times,
                                                        const std::vector<std::string>& image_ids,
                                                        const std::vector<double>& det_exponent) {
    if (times.size() != image_ids.size() || times.size() != det_exponent.size())
        throw Error(ErrorCode::InvalidArgument, "exponential martingale test: size mismatch");
    ExponentialMartingaleReport report;
    report.times = times;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const int ti = samples.time_index(times[j]);
        const int fi = samples.fn_index(image_ids[j]);
        const double factor = std::exp(det_exponent[j]);
        std::vector<double> re(samples.replicas()), im(samples.replicas());
        for (int r = 0; r < samples.replicas(); ++r) {
            const double y = samples.at(r, ti, fi);
            re[r] = factor * std::cos(y);
            im[r] = factor * std::sin(y);
        }
        const CovEstimate cre = summarize(re), cim = summarize(im);
        report.mean.emplace_back(cre.mean, cim.mean);
        report.std_error_re.push_back(cre.std_error);
        report.std_error_im.push_back(cim.std_error);
    }
    double max_dev = 0.0, max_sig = 0.0;
    for (std::size_t j = 1; j < times.size(); ++j) {
        const double dre = report.mean[j].real() - report.mean[0].real();
        const double dim = report.mean[j].imag() - report.mean[0].imag();
        const double sre =
            std::hypot(report.std_error_re[j], report.std_error_re[0]);
        const double sim =
            std::hypot(report.std_error_im[j], report.std_error_im[0]);
        max_dev = std::max(max_dev, std::max(std::abs(dre), std::abs(dim)));
        max_sig = std::max(max_sig, std::max(std::abs(dre) / sre, std::abs(dim) / sim));
    }
    report.max_deviation = max_dev;
    report.deviation_sigmas = max_sig;
    report.pass = max_sig <= 3.0;
    return report;
}

PhaseTransitionReport phase_transition_table(
    const std::vector<std::string>& regime_labels, const std::vector<Regime>& regimes,
    const std::vector<const FieldSamples*>& samples_per_regime, const std::string& h_id,
    const TestFunctionPtr& H, const OUParams& params, const std::vector<double>& times,
    const QuadratureConfig& cfg) {
    PhaseTransitionReport report;
    report.separated = false;
    report.inconclusive = regimes.size() < 3;
    std::vector<std::vector<double>> oracle(regimes.size()), se(regimes.size());
    for (std::size_t g = 0; g < regimes.size(); ++g) {
        for (double t : times) {
            OUParams p{params.rho, regimes[g]};
            const double orc = ou_covariance_oracle(p, H, H, t, false, cfg);
            const CovEstimate est = empirical_covariance(*samples_per_regime[g], h_id, h_id, t);
            oracle[g].push_back(orc);
            se[g].push_back(est.std_error);
            const double z = est.std_error > 0.0 ? (est.mean - orc) / est.std_error : 0.0;
            report.rows.push_back({regime_labels[g], t, orc, est.mean, est.std_error, z});
        }
    }
    if (regimes.size() >= 3) {
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            bool all = true;
            for (std::size_t a = 0; a < regimes.size() && all; ++a)
                for (std::size_t b = a + 1; b < regimes.size() && all; ++b) {
                    const double gap = std::abs(oracle[a][ti] - oracle[b][ti]);
                    const double comb = std::hypot(se[a][ti], se[b][ti]);
                    if (!(comb > 0.0) || gap <= 5.0 * comb) all = false;
                }
            if (all) {
                report.separated = true;
                break;
            }
        }
        report.inconclusive = !report.separated;
    }
    return report;
}

}  // namespace sb
