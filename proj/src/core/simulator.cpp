#include "simulator.hpp"

#include <cmath>

namespace sb {

void LatticeConfig::validate() const {
    if (!(rho > 0.0 && rho < 1.0) && rho != 0.0 && rho != 1.0)
        throw Error(ErrorCode::InvalidArgument, "LatticeConfig: rho must lie in [0,1]");
    if (n < 1 || L < 2) throw Error(ErrorCode::InvalidArgument, "LatticeConfig: need n >= 1, L >= 2");
    if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "LatticeConfig: alpha must be > 0");
    if (!(beta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "LatticeConfig: beta must be >= 0");
    for (double t : sample_times)
        if (t < 0.0 || t > horizon)
            throw Error(ErrorCode::InvalidArgument,
                        "LatticeConfig: sample times must lie in [0, horizon]");
}

ExclusionProcess::ExclusionProcess(const LatticeConfig& config, std::uint64_t replica)
    : cfg_(config), occ_(config.num_sites()), time_(0.0), rng_(CounterRng(config.seed).split(replica)) {
    cfg_.validate();
    for (auto& site : occ_) site = rng_.next_bernoulli(cfg_.rho) ? 1 : 0;
    const double p_slow = cfg_.slow_rate() / cfg_.total_rate();
    slow_threshold_ = static_cast<std::uint64_t>(p_slow * 0x1.0p64);
}

void ExclusionProcess::step_to(double t_target) {
    if (t_target < time_)
        throw Error(ErrorCode::OrderingError, "step_to: target time precedes current time");
    const std::uint64_t events = rng_.next_poisson(cfg_.total_rate() * (t_target - time_));
    const int slow = cfg_.slow_bond_index();
    const std::uint64_t normal_bonds = static_cast<std::uint64_t>(cfg_.num_bonds() - 1);
    std::uint8_t* occ = occ_.data();
    for (std::uint64_t e = 0; e < events; ++e) {
        int bond;
        if (rng_.next_u64() < slow_threshold_) {
            bond = slow;
        } else {
            const int idx = static_cast<int>(rng_.next_below(normal_bonds));
            bond = idx >= slow ? idx + 1 : idx;
        }
        const std::uint8_t a = occ[bond], b = occ[bond + 1];
        occ[bond] = b;
        occ[bond + 1] = a;
    }
    time_ = t_target;
}

int ExclusionProcess::particle_count() const {
    int count = 0;
    for (std::uint8_t site : occ_) count += site;
    return count;
}

double ExclusionProcess::fluctuation(const std::vector<double>& h_values) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < occ_.size(); ++i)
        sum += h_values[i] * (static_cast<double>(occ_[i]) - cfg_.rho);
    return sum / std::sqrt(static_cast<double>(cfg_.n));
}

std::vector<double> ExclusionProcess::lattice_values(const TestFunction& H,
                                                     const LatticeConfig& config) {
    std::vector<double> values(config.num_sites());
    for (int i = 0; i < config.num_sites(); ++i) {
        const double x = static_cast<double>(i - config.L) / config.n;
        values[i] = H.eval(x);  // right-continuous at the origin
    }
    return values;
}

SmallCtmc::SmallCtmc(int num_sites, std::vector<std::pair<int, double>> bonds)
    : num_sites_(num_sites), bonds_(std::move(bonds)), total_rate_(0.0) {
    if (num_sites < 1 || num_sites > 12)
        throw Error(ErrorCode::InvalidArgument, "SmallCtmc: state-space cap is 12 sites");
    for (const auto& [site, rate] : bonds_) {
        if (site < 0 || site + 1 >= num_sites_ || rate < 0.0)
            throw Error(ErrorCode::InvalidArgument, "SmallCtmc: bad bond");
        total_rate_ += rate;
    }
}

std::vector<double> SmallCtmc::evolve(const std::vector<double>& f, double t) const {
    const std::size_t nstates = std::size_t{1} << num_sites_;
    if (f.size() != nstates) throw Error(ErrorCode::InvalidArgument, "SmallCtmc: bad vector size");
    if (t == 0.0 || total_rate_ == 0.0) return f;

    // uniformization: e^{Qt} f = e^{-Lt} sum_m (Lt)^m/m! P^m f, P = I + Q/L
    const double lt = total_rate_ * t;
    const int mmax = static_cast<int>(lt + 12.0 * std::sqrt(lt) + 40.0);
    std::vector<double> v = f, acc(nstates, 0.0), next(nstates);
    double log_weight = -lt;  // log of e^{-Lt} (Lt)^m / m!
    for (int m = 0; m <= mmax; ++m) {
        const double w = std::exp(log_weight);
        for (std::size_t s = 0; s < nstates; ++s) acc[s] += w * v[s];
        log_weight += std::log(lt) - std::log(static_cast<double>(m + 1));
        // next = P v
        for (std::size_t s = 0; s < nstates; ++s) {
            double out = v[s];
            for (const auto& [site, rate] : bonds_) {
                const std::uint32_t mask = 3u << site;
                const std::uint32_t pair = (static_cast<std::uint32_t>(s) & mask) >> site;
                if (pair == 1u || pair == 2u) {
                    const std::uint32_t swapped = static_cast<std::uint32_t>(s) ^ mask;
                    out += rate / total_rate_ * (v[swapped] - v[s]);
                }
            }
            next[s] = out;
        }
        v.swap(next);
    }
    return acc;
}

double SmallCtmc::stationary_covariance(const Observable& f, const Observable& g, double t,
                                        double rho) const {
    const std::size_t nstates = std::size_t{1} << num_sites_;
    std::vector<double> fv(nstates);
    for (std::size_t s = 0; s < nstates; ++s) fv[s] = f(static_cast<std::uint32_t>(s));
    const std::vector<double> ft = evolve(fv, t);
    double expectation = 0.0;
    for (std::size_t s = 0; s < nstates; ++s) {
        double pi = 1.0;
        for (int site = 0; site < num_sites_; ++site)
            pi *= ((s >> site) & 1u) ? rho : 1.0 - rho;
        expectation += pi * g(static_cast<std::uint32_t>(s)) * ft[s];
    }
    return expectation;
}

}  // namespace sb
