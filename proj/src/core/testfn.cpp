#include "testfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sb {

namespace {

std::string join_coeffs(const std::vector<double>& c) {
    std::ostringstream os;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) os << ',';
        os << c[i];
    }
    return os.str();
}

// Polynomial-times-Gaussian branch p(x) e^{-g x^2} with all derivative
// polynomials precomputed: d/dx [q e^{-g x^2}] = (q' - 2g x q) e^{-g x^2}.
class PolyGaussBranch {
public:
    PolyGaussBranch(std::vector<double> coeffs, double gauss, int max_order) : gauss_(gauss) {
        polys_.reserve(static_cast<std::size_t>(max_order) + 1);
        polys_.push_back(std::move(coeffs));
        if (polys_.front().empty()) polys_.front().push_back(0.0);
        for (int k = 0; k < max_order; ++k) {
            const std::vector<double>& q = polys_.back();
            std::vector<double> next(q.size() + 1, 0.0);
            for (std::size_t j = 1; j < q.size(); ++j)
                next[j - 1] += static_cast<double>(j) * q[j];
            for (std::size_t j = 0; j < q.size(); ++j) next[j + 1] -= 2.0 * gauss_ * q[j];
            polys_.push_back(std::move(next));
        }
    }

    double operator()(double x, int k) const {
        const std::vector<double>& q = polys_.at(static_cast<std::size_t>(k));
        double p = 0.0;
        for (std::size_t j = q.size(); j-- > 0;) p = p * x + q[j];
        return p * std::exp(-gauss_ * x * x);
    }

private:
    double gauss_;
    std::vector<std::vector<double>> polys_;
};

// Expand f(r) = p(r) e^{-g r} composed with r = x^2 into a polynomial in x
// times e^{-g x^2}: p(x^2) has only even powers.
std::vector<double> even_compose(const std::vector<double>& p) {
    std::vector<double> out(p.size() * 2 - (p.empty() ? 0 : 1), 0.0);
    if (p.empty()) return {0.0};
    out.assign(2 * p.size() - 1, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) out[2 * j] = p[j];
    return out;
}

constexpr double kGolden = 0.61803398874989485;

// Golden-section maximization of a unimodal bracket [a, b].
template <typename F>
double golden_max(const F& f, double a, double b, double tol) {
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol && b - a > 1e-15 * (std::abs(a) + std::abs(b))) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        }
    }
    return std::max(f1, f2);
}

}  // namespace

Regime Regime::line(double beta) {
    if (!(beta >= 0.0 && beta < 1.0))
        throw Error(ErrorCode::InvalidArgument, "Regime::line: beta must lie in [0,1)");
    return {RegimeKind::Line, beta, 1.0};
}

Regime Regime::robin(double alpha) {
    if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "Regime::robin: alpha must be > 0");
    return {RegimeKind::Robin, 1.0, alpha};
}

Regime Regime::neumann(double beta) {
    if (!(beta > 1.0))  // +inf allowed
        throw Error(ErrorCode::InvalidArgument, "Regime::neumann: beta must be > 1");
    return {RegimeKind::Neumann, beta, 1.0};
}

Regime Regime::from_beta(double beta, double alpha) {
    if (beta < 1.0) return line(beta);
    if (beta == 1.0) return robin(alpha);
    return neumann(beta);
}

TestFunction::TestFunction(BranchFn left, BranchFn right, int max_order, std::string family_tag)
    : left_(std::move(left)),
      right_(std::move(right)),
      max_order_(max_order),
      family_tag_(std::move(family_tag)) {
    if (max_order_ < 0)
        throw Error(ErrorCode::InvalidArgument, "TestFunction: max_order must be >= 0");
}

double TestFunction::eval(double x, int k, Side at_zero) const {
    if (k < 0 || k > max_order_)
        throw Error(ErrorCode::OrderUnsupported, "TestFunction::eval: derivative order " +
                                                     std::to_string(k) + " exceeds max_order " +
                                                     std::to_string(max_order_));
    if (x > 0.0) return right_(x, k);
    if (x < 0.0) return left_(x, k);
    return at_zero == Side::Right ? right_(0.0, k) : left_(0.0, k);
}

TestFunctionPtr TestFunction::hermite_gaussian(std::vector<double> coeffs, double gauss) {
    if (coeffs.empty() || !(gauss > 0.0))
        throw Error(ErrorCode::InvalidArgument, "hermite_gaussian: bad parameters");
    const int kmax = 8;
    auto branch = std::make_shared<PolyGaussBranch>(coeffs, gauss, kmax);
    std::string tag = "hermite_gauss:g=" + std::to_string(gauss) + ";c=" + join_coeffs(coeffs);
    auto fn = [branch](double x, int k) { return (*branch)(x, k); };
    return std::make_shared<TestFunction>(fn, fn, kmax, std::move(tag));
}

TestFunctionPtr TestFunction::neumann_family(std::vector<double> left_coeffs,
                                             std::vector<double> right_coeffs, double gauss) {
    if (left_coeffs.empty() || right_coeffs.empty() || !(gauss > 0.0))
        throw Error(ErrorCode::InvalidArgument, "neumann_family: bad parameters");
    std::string tag = "even_gauss:g=" + std::to_string(gauss) + ";left=" + join_coeffs(left_coeffs) +
                      ";right=" + join_coeffs(right_coeffs);
    auto fn = poly_gauss(even_compose(left_coeffs), even_compose(right_coeffs), gauss);
    return std::make_shared<TestFunction>(
        [fn](double x, int k) { return fn->eval(x, k, Side::Left); },
        [fn](double x, int k) { return fn->eval(x, k, Side::Right); }, fn->max_order(),
        std::move(tag));
}

TestFunctionPtr TestFunction::poly_gauss(std::vector<double> left_coeffs,
                                         std::vector<double> right_coeffs, double gauss) {
    if (left_coeffs.empty() || right_coeffs.empty() || !(gauss > 0.0))
        throw Error(ErrorCode::InvalidArgument, "poly_gauss: bad parameters");
    const int kmax = 8;
    auto lb = std::make_shared<PolyGaussBranch>(left_coeffs, gauss, kmax);
    auto rb = std::make_shared<PolyGaussBranch>(right_coeffs, gauss, kmax);
    std::string tag = "branch_gauss:g=" + std::to_string(gauss) + ";left=" +
                      join_coeffs(left_coeffs) + ";right=" + join_coeffs(right_coeffs);
    return std::make_shared<TestFunction>([lb](double x, int k) { return (*lb)(x, k); },
                                          [rb](double x, int k) { return (*rb)(x, k); }, kmax,
                                          std::move(tag));
}

TestFunctionPtr TestFunction::zero(int max_order) {
    auto fn = [](double, int) { return 0.0; };
    return std::make_shared<TestFunction>(fn, fn, max_order, "zero");
}

TestFunctionPtr TestFunction::linear_combination(double a, const TestFunctionPtr& H, double b,
                                                 const TestFunctionPtr& G) {
    if (!H || !G) throw Error(ErrorCode::InvalidArgument, "linear_combination: null operand");
    const int kmax = std::min(H->max_order(), G->max_order());
    auto left = [a, H, b, G](double x, int k) {
        return a * H->eval(x, k, Side::Left) + b * G->eval(x, k, Side::Left);
    };
    auto right = [a, H, b, G](double x, int k) {
        return a * H->eval(x, k, Side::Right) + b * G->eval(x, k, Side::Right);
    };
    return std::make_shared<TestFunction>(left, right, kmax,
                                          "lincomb(" + H->family_tag() + "," + G->family_tag() + ")");
}

double seminorm(const TestFunction& H, SeminormIndex idx, const SeminormConfig& cfg) {
    if (idx.k < 0 || idx.l < 0)
        throw Error(ErrorCode::InvalidArgument, "seminorm: indices must be non-negative");
    if (idx.k > H.max_order())
        throw Error(ErrorCode::OrderUnsupported, "seminorm: derivative order exceeds max_order");

    const auto weighted = [&](double u) {
        return std::abs((1.0 + std::pow(std::abs(u), idx.l)) * H.eval(u, idx.k));
    };

    double radius = cfg.initial_radius;
    int stalled_doublings = 0;
    for (;;) {
        std::vector<double> grid;
        // geometric part near the origin, both signs
        const double lg0 = std::log(cfg.inner_radius), lg1 = std::log(1.0);
        for (int i = 0; i <= cfg.geometric_points; ++i) {
            const double r = std::exp(lg0 + (lg1 - lg0) * i / cfg.geometric_points);
            grid.push_back(r);
            grid.push_back(-r);
        }
        const int nuni = std::max(2, static_cast<int>((radius - 1.0) * cfg.points_per_unit));
        for (int i = 1; i <= nuni; ++i) {
            const double r = 1.0 + (radius - 1.0) * i / nuni;
            grid.push_back(r);
            grid.push_back(-r);
        }
        std::sort(grid.begin(), grid.end());

        std::vector<double> vals(grid.size());
        double best = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            vals[i] = weighted(grid[i]);
            best = std::max(best, vals[i]);
        }
        // refine around interior local maxima
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            if (vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] && vals[i] > 0.25 * best) {
                if (grid[i - 1] < 0.0 && grid[i + 1] > 0.0) continue;  // do not bracket the jump
                best = std::max(best, golden_max(weighted, grid[i - 1], grid[i + 1], cfg.refine_tol));
            }
        }
        const double edge = std::max(weighted(radius), weighted(-radius));
        if (edge <= cfg.tail_cutoff * std::max(best, 1e-300)) return best;
        // bounded but non-decaying (l = 0 and a flat tail): the sup has
        // stopped growing, so further doubling cannot change it
        double annulus = 0.0, inner = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (std::abs(grid[i]) > 0.5 * radius)
                annulus = std::max(annulus, vals[i]);
            else
                inner = std::max(inner, vals[i]);
        }
        if (annulus <= inner * (1.0 + 1e-12)) {
            if (++stalled_doublings >= 3) return best;
        } else {
            stalled_doublings = 0;
        }
        if (radius >= cfg.max_radius)
            throw Error(ErrorCode::DivergentSeminorm,
                        "seminorm: weighted value does not decay out to radius " +
                            std::to_string(radius));
        radius *= 2.0;
    }
}

double metric(const TestFunctionPtr& H, const TestFunctionPtr& G, int trunc, double* tail_bound,
              const SeminormConfig& cfg) {
    if (trunc < 1) throw Error(ErrorCode::InvalidArgument, "metric: trunc must be >= 1");
    if (std::min(H->max_order(), G->max_order()) < trunc)
        throw Error(ErrorCode::OrderUnsupported, "metric: trunc exceeds shared max_order");
    TestFunctionPtr diff = TestFunction::linear_combination(1.0, H, -1.0, G);
    double sum = 0.0, max_sem = 0.0;
    for (int k = 1; k <= trunc; ++k) {
        for (int l = 1; l <= trunc; ++l) {
            const double s = seminorm(*diff, {k, l}, cfg);
            max_sem = std::max(max_sem, s);
            sum += std::ldexp(s, -(k + l));
        }
    }
    if (tail_bound) *tail_bound = 2.0 * std::ldexp(max_sem, -trunc);
    return sum;
}

double l2beta_norm(const TestFunction& H, const Regime& regime, const QuadratureConfig& cfg) {
    const auto sq = [&](double u) {
        const double v = H.eval(u);
        return v * v;
    };
    double total = 0.0;
    double radius = 8.0;
    double prev_shell = std::numeric_limits<double>::infinity();
    total = integrate(sq, 0.0, radius, cfg) + integrate(sq, -radius, 0.0, cfg);
    for (;;) {
        const double shell = integrate(sq, radius, 2.0 * radius, cfg) +
                             integrate(sq, -2.0 * radius, -radius, cfg);
        total += shell;
        if (shell <= std::max(cfg.abs_tol, cfg.rel_tol * total)) break;
        if (radius > 4096.0 && shell >= prev_shell)
            throw Error(ErrorCode::DivergentNorm, "l2beta_norm: integral does not converge");
        prev_shell = shell;
        radius *= 2.0;
    }
    if (regime.is_robin()) {
        const double h0 = H.eval(0.0, 0, Side::Right);
        total += h0 * h0 / (regime.alpha * regime.alpha);
    }
    return std::sqrt(total);
}

TestFunctionPtr grad_beta(const TestFunctionPtr& H) {
    if (H->max_order() < 1)
        throw Error(ErrorCode::OrderUnsupported, "grad_beta: needs max_order >= 1");
    auto left = [H](double x, int k) { return H->eval(x, k + 1, Side::Left); };
    auto right = [H](double x, int k) { return H->eval(x, k + 1, Side::Right); };
    return std::make_shared<TestFunction>(left, right, H->max_order() - 1,
                                          "grad(" + H->family_tag() + ")");
}

TestFunctionPtr laplace_beta(const TestFunctionPtr& H) {
    if (H->max_order() < 2)
        throw Error(ErrorCode::OrderUnsupported, "laplace_beta: needs max_order >= 2");
    auto left = [H](double x, int k) { return H->eval(x, k + 2, Side::Left); };
    auto right = [H](double x, int k) { return H->eval(x, k + 2, Side::Right); };
    return std::make_shared<TestFunction>(left, right, H->max_order() - 2,
                                          "laplace(" + H->family_tag() + ")");
}

MembershipReport validate_membership(const TestFunctionPtr& H, const Regime& regime, int max_k,
                                     double tol) {
    if (2 * max_k + 1 > H->max_order())
        throw Error(ErrorCode::OrderUnsupported,
                    "validate_membership: 2*max_k+1 exceeds max_order");
    MembershipReport report{regime, tol, {}, true};
    for (int k = 0; k <= max_k; ++k) {
        const int odd = 2 * k + 1;
        double residual = 0.0;
        double scale = 1.0;
        if (regime.is_line()) {
            // Schwartz regime: only seminorm finiteness is required.
            try {
                for (int l = 0; l <= 4; l += 2) scale = std::max(scale, seminorm(*H, {odd, l}));
                residual = 0.0;
            } catch (const Error&) {
                residual = std::numeric_limits<double>::infinity();
            }
        } else {
            const double dp = H->eval(0.0, odd, Side::Right);
            const double dm = H->eval(0.0, odd, Side::Left);
            scale = std::max(1.0, seminorm(*H, {odd, 0}));
            if (regime.is_neumann()) {
                residual = std::max(std::abs(dp), std::abs(dm));
            } else {
                const double jump =
                    H->eval(0.0, odd - 1, Side::Right) - H->eval(0.0, odd - 1, Side::Left);
                residual = std::max(std::abs(dp - dm), std::abs(dp - regime.alpha * jump));
            }
        }
        const bool pass = residual <= tol * scale;
        report.entries.push_back({k, residual, scale, pass});
        report.passed = report.passed && pass;
    }
    return report;
}

}  // namespace sb
