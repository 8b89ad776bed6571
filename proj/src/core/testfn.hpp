#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kernels.hpp"

namespace sb {

enum class RegimeKind { Line, Robin, Neumann };

/// Which of the three hydrodynamic regimes governs operators and semigroups:
/// Line for beta in [0,1), Robin (parameter alpha) at beta = 1, Neumann for
/// beta > 1 (beta = +inf is the same Neumann class).
struct Regime {
    RegimeKind kind;
    double beta;
    double alpha;  // Robin parameter; also the atom weight of the beta=1 L2 norm

    static Regime line(double beta = 0.5);
    static Regime robin(double alpha);
    static Regime neumann(double beta = 2.0);
    static Regime from_beta(double beta, double alpha);

    bool is_line() const { return kind == RegimeKind::Line; }
    bool is_robin() const { return kind == RegimeKind::Robin; }
    bool is_neumann() const { return kind == RegimeKind::Neumann; }
};

enum class Side { Left, Right };

class TestFunction;
using TestFunctionPtr = std::shared_ptr<const TestFunction>;

/// Provenance of a function obtained as T_s^regime applied to a seed.
/// Lets later semigroup applications compose times instead of nesting
/// quadratures.
struct SemigroupProvenance {
    Regime regime;
    double s;
    TestFunctionPtr seed;
};

/// Branch evaluator: value of the k-th derivative at x. The left branch is
/// queried only for x <= 0, the right branch only for x >= 0.
using BranchFn = std::function<double(double x, int k)>;

/// Candidate element of S_beta(R): smooth on each half-line, possible jump at
/// the origin, value at 0 taken from the right branch. Immutable after
/// construction.
class TestFunction {
public:
    TestFunction(BranchFn left, BranchFn right, int max_order, std::string family_tag);

    /// k-th one-sided derivative at x; at x = 0 the side selector picks 0+ or
    /// 0- (default right, the value convention of the space).
    double eval(double x, int k = 0, Side at_zero = Side::Right) const;

    int max_order() const { return max_order_; }
    const std::string& family_tag() const { return family_tag_; }

    const std::optional<SemigroupProvenance>& provenance() const { return provenance_; }
    void set_provenance(SemigroupProvenance p) { provenance_ = std::move(p); }

    // -- built-in families ---------------------------------------------------

    /// p(x) * exp(-g x^2), same polynomial on both branches (Line battery).
    static TestFunctionPtr hermite_gaussian(std::vector<double> coeffs, double gauss = 1.0);

    /// Branchwise f(x^2) with f(r) = p(r) e^{-r g}: per-branch even functions,
    /// so every odd one-sided derivative at 0 vanishes (Neumann battery).
    static TestFunctionPtr neumann_family(std::vector<double> left_coeffs,
                                          std::vector<double> right_coeffs, double gauss = 1.0);

    /// Generic two-branch polynomial-times-Gaussian function (may jump at 0).
    static TestFunctionPtr poly_gauss(std::vector<double> left_coeffs,
                                      std::vector<double> right_coeffs, double gauss = 1.0);

    static TestFunctionPtr zero(int max_order = 8);

    /// a*H + b*G with branchwise evaluation; max_order is the minimum of the two.
    static TestFunctionPtr linear_combination(double a, const TestFunctionPtr& H, double b,
                                              const TestFunctionPtr& G);

private:
    BranchFn left_;
    BranchFn right_;
    int max_order_;
    std::string family_tag_;
    std::optional<SemigroupProvenance> provenance_;
};

struct SeminormIndex {
    int k = 0;  // derivative order
    int l = 0;  // polynomial weight order
};

struct SeminormConfig {
    double inner_radius = 1e-6;
    double initial_radius = 6.0;
    double max_radius = 200.0;
    double tail_cutoff = 1e-12;    // stop extending once edge value < cutoff * max
    int points_per_unit = 12;      // uniform grid density on [1, R]
    int geometric_points = 40;     // grid points on [inner_radius, 1]
    double refine_tol = 1e-13;     // golden-section bracket width
};

/// sup over u != 0 of |(1 + |u|^l) d^k H(u)|, on a geometric-plus-uniform grid
/// with golden-section refinement around local maxima. Throws
/// Error(DivergentSeminorm) when the weighted value keeps growing out to the
/// maximum truncation radius.
double seminorm(const TestFunction& H, SeminormIndex idx, const SeminormConfig& cfg = {});

/// d(H,G) = sum_{k,l=1}^{trunc} 2^{-(k+l)} ||H - G||_{k,l}. If tail_bound is
/// non-null it receives 2 * 2^{-trunc} * (largest seminorm seen).
double metric(const TestFunctionPtr& H, const TestFunctionPtr& G, int trunc = 6,
              double* tail_bound = nullptr, const SeminormConfig& cfg = {});

/// sqrt( int H^2 du + alpha^{-2} 1_{beta=1} H(0+)^2 ).
double l2beta_norm(const TestFunction& H, const Regime& regime, const QuadratureConfig& cfg = {});

/// First derivative with the 0+ convention at the origin; drops one order.
TestFunctionPtr grad_beta(const TestFunctionPtr& H);

/// Second derivative with the 0+ convention at the origin; drops two orders.
TestFunctionPtr laplace_beta(const TestFunctionPtr& H);

struct MembershipEntry {
    int order_index;  // the k of the boundary condition at order 2k+1
    double residual;
    double scale;
    bool pass;
};

struct MembershipReport {
    Regime regime;
    double tol;
    std::vector<MembershipEntry> entries;
    bool passed;
};

/// Regime-dependent boundary-condition check at the origin. Neumann: odd
/// one-sided derivatives up to order 2*max_k+1 vanish. Robin: the two
/// equalities coupling d^{2k+1}H(0+/-) to alpha times the jump of d^{2k}H.
/// Line: seminorm finiteness only. Residuals are relative to
/// max(1, ||H||_{2k+1,0}); failures are report entries, never exceptions.
MembershipReport validate_membership(const TestFunctionPtr& H, const Regime& regime, int max_k,
                                     double tol);

}  // namespace sb
