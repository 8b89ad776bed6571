#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "testfn.hpp"

namespace sb {

/// Scaled slow-bond exclusion geometry: sites -L..L-1, bonds {x, x+1} for
/// -L <= x <= L-2, the slow bond at {-1, 0}. Time is macroscopic: normal
/// bonds swap at rate n^2, the slow bond at alpha * n^{2-beta}
/// (beta = +inf means rate zero).
struct LatticeConfig {
    int n = 1;
    int L = 3;
    double beta = 0.0;  // +inf allowed
    double alpha = 1.0;
    double rho = 0.5;
    double horizon = 1.0;
    std::vector<double> sample_times;
    std::uint64_t seed = 0;

    int num_sites() const { return 2 * L; }
    int num_bonds() const { return 2 * L - 1; }
    int slow_bond_index() const { return L - 1; }  // array index of bond {-1,0}
    double slow_rate() const {
        if (std::isinf(beta)) return 0.0;
        return alpha * std::pow(static_cast<double>(n), 2.0 - beta);
    }
    double total_rate() const {
        return static_cast<double>(n) * n * (num_bonds() - 1) + slow_rate();
    }
    void validate() const;
};

/// One trajectory of the exclusion CTMC. The jump chain is driven by a
/// counter-based stream split per replica; the number of events in a window
/// is Poisson(total_rate * dt) and the bond choices are iid, so states at the
/// requested sample times are exact.
class ExclusionProcess {
public:
    ExclusionProcess(const LatticeConfig& config, std::uint64_t replica);

    void step_to(double t_target);

    double time() const { return time_; }
    const std::vector<std::uint8_t>& occupation() const { return occ_; }
    int particle_count() const;

    /// Y_t^n(H) = (1/sqrt n) sum_x H(x/n) (eta(x) - rho), with H values
    /// precomputed per lattice (see lattice_values).
    double fluctuation(const std::vector<double>& h_values) const;

    static std::vector<double> lattice_values(const TestFunction& H, const LatticeConfig& config);

private:
    const LatticeConfig cfg_;
    std::vector<std::uint8_t> occ_;
    double time_;
    CounterRng rng_;
    std::uint64_t slow_threshold_;  // slow-bond share of one uint64 draw
};

/// Exact stationary two-time covariance oracle for chains of at most 12
/// sites: E[f(eta_t) g(eta_0)] under the Bernoulli(rho) product measure, by
/// uniformized matrix exponential of the full 2^S-state generator.
class SmallCtmc {
public:
    /// bonds[i] = {site, rate} meaning bond {site, site+1} (0-based sites).
    SmallCtmc(int num_sites, std::vector<std::pair<int, double>> bonds);

    using Observable = std::function<double(std::uint32_t state)>;

    /// e^{Qt} f as a state vector.
    std::vector<double> evolve(const std::vector<double>& f, double t) const;

    double stationary_covariance(const Observable& f, const Observable& g, double t,
                                 double rho) const;

    static double occupation(std::uint32_t state, int site) { return (state >> site) & 1u; }

    int num_sites() const { return num_sites_; }

private:
    int num_sites_;
    std::vector<std::pair<int, double>> bonds_;
    double total_rate_;
};

}  // namespace sb
