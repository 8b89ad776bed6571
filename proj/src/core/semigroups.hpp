#pragma once

#include <vector>

#include "testfn.hpp"

namespace sb {

enum class RobinRoute { Direct, Reduction };

/// k-th space derivative of the whole-line heat semigroup (phi_t * H)(x),
/// with the kernel derivative carried by the polynomial recurrence.
double apply_line(double t, const TestFunction& H, double x, int k = 0,
                  const QuadratureConfig& cfg = {});

/// k-th space derivative of the Neumann semigroup
/// int_0^inf [phi_t(x-y) + phi_t(x+y)] H(y sign(x)) dy.
/// At x = 0 the side selector picks the 0+ or 0- limit.
double apply_neumann(double t, const TestFunction& H, double x, int k = 0,
                     Side at_zero = Side::Right, const QuadratureConfig& cfg = {});

/// k-th space derivative of the absorbing half-line semigroup
/// int_0^inf [phi_t(x-y) - phi_t(x+y)] v0(y) dy, x >= 0.
double apply_dirichlet(double t, const std::function<double(double)>& v0, double x, int k = 0,
                       const QuadratureConfig& cfg = {});

/// k-th space derivative of the Robin semigroup T_t^alpha H at x (0+/- at the
/// origin). Reduction route: even part by whole-line evolution, odd part
/// recovered from the Dirichlet image of v0 = 2*alpha*H_odd - H_odd'; the
/// exponential z-integral is folded into an erfcx kernel and derivatives
/// follow the recursion u^(m) = 2*alpha*u^(m-1) - v^(m-1). Direct route:
/// the explicit double-integral formula (k = 0 only), used as the
/// cross-check.
double apply_robin(double t, const TestFunction& H, double x, double alpha, int k = 0,
                   Side at_zero = Side::Right, RobinRoute route = RobinRoute::Reduction,
                   const QuadratureConfig& cfg = {});

/// Regime dispatch. t = 0 returns H's own derivatives. If H carries
/// semigroup provenance in the same regime, times compose instead of nesting
/// quadratures.
double semigroup_eval(const Regime& regime, double t, const TestFunctionPtr& H, double x, int k = 0,
                      Side at_zero = Side::Right, const QuadratureConfig& cfg = {});

struct SampledValue {
    double x;
    Side one_sided;
    int k;
    double value;
};

/// Values of d^k T_t H on a grid, plus the two one-sided values at the origin.
std::vector<SampledValue> semigroup_apply(const Regime& regime, double t, const TestFunctionPtr& H,
                                          const std::vector<double>& grid, int k = 0,
                                          const QuadratureConfig& cfg = {});

/// T_t H as a TestFunction whose branches evaluate through the semigroup;
/// carries provenance so that further applications compose in time.
TestFunctionPtr semigroup_image(const Regime& regime, double t, const TestFunctionPtr& H,
                                const QuadratureConfig& cfg = {});

/// Robin-class battery member: the image T_s^alpha of a seed function,
/// guaranteed to satisfy the beta=1 boundary coupling at every order.
TestFunctionPtr make_robin_smoothed(const TestFunctionPtr& seed, double alpha, double s,
                                    const QuadratureConfig& cfg = {});

/// max over the given seminorm indices of the weighted sup-distance between
/// (T_{t+eps} H - T_t H)/eps and Delta_beta T_t H on an evaluation grid.
double generator_residual(const Regime& regime, double t, double eps, const TestFunctionPtr& H,
                          const std::vector<SeminormIndex>& indices,
                          const QuadratureConfig& cfg = {});

/// d(T_t H, T_s H) in the truncated Frechet metric.
double continuity_modulus(const Regime& regime, const TestFunctionPtr& H, double t, double s,
                          int trunc = 4, const QuadratureConfig& cfg = {});

/// f(t) = || grad_beta T_t H ||^2_{2,beta} per time; the beta=1 norm carries
/// the atom alpha^{-2} (d/dx T_t H (0+))^2.
std::vector<double> gradnorm_curve(const Regime& regime, const TestFunctionPtr& H,
                                   const std::vector<double>& times,
                                   const QuadratureConfig& cfg = {});

/// Parse a serialized family descriptor (the family_tag grammar) back into a
/// TestFunction. Understands hermite_gauss, even_gauss, branch_gauss, zero
/// and robin_smoothed records.
TestFunctionPtr parse_family_descriptor(const std::string& descriptor);

}  // namespace sb
