#include "semigroups.hpp"

#include <cmath>
#include <sstream>

namespace sb {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Scaled complementary error function erfcx(z) = exp(z^2) erfc(z), z >= 0.
double erfcx(double z) {
    if (z < 25.0) return std::exp(z * z) * std::erfc(z);
    // asymptotic series, relative error < 1e-16 for z >= 25
    const double iz2 = 1.0 / (2.0 * z * z);
    double sum = 1.0, term = 1.0;
    for (int m = 1; m <= 6; ++m) {
        term *= -(2.0 * m - 1.0) * iz2;
        sum += term;
    }
    return sum / (z * std::sqrt(kPi));
}

double kernel_window(double t, int k, const QuadratureConfig& cfg) {
    return (cfg.truncation_sigmas + k) * std::sqrt(2.0 * t);
}

// Integrate f over [a, a+8], then doubling shells until the contribution is
// below tolerance. Used where the integrand's decay scale is not known a
// priori (battery functions decay at least like Gaussians).
double integrate_decaying(const Integrand& f, double a, const QuadratureConfig& cfg) {
    double width = 8.0;
    double total = integrate(f, a, a + width, cfg);
    double edge = a + width;
    while (width < 4096.0) {
        const double shell = integrate(f, edge, edge + width, cfg);
        total += shell;
        edge += width;
        width *= 2.0;
        if (std::abs(shell) <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total))) return total;
    }
    throw AccuracyError("integrate_decaying: integrand does not decay", total, 0.0);
}

// Whole-line convolution int f(y) d^k phi_t(x-y) dy for a possibly kinked-at-0
// integrand, truncated to the kernel window and split at the origin.
double line_convolution(double t, const std::function<double(double)>& f, double x, int k,
                        const QuadratureConfig& cfg) {
    const double w = kernel_window(t, k, cfg);
    const double a = x - w, b = x + w;
    const auto g = [&](double y) { return f(y) * heat_kernel_deriv(t, x - y, k); };
    if (a < 0.0 && b > 0.0) return integrate(g, a, 0.0, cfg) + integrate(g, 0.0, b, cfg);
    return integrate(g, a, b, cfg);
}

double branch_value(const TestFunction& H, double y, int k, Side side_at_zero) {
    return H.eval(y, k, side_at_zero);
}

// Odd/even parts of H restricted to y > 0, with one-sided values at 0.
double even_part(const TestFunction& H, double y, int m = 0) {
    const double plus = H.eval(std::abs(y), m, Side::Right);
    const double minus = H.eval(-std::abs(y), m, Side::Left);
    const double at_y = (m % 2 == 0) ? 0.5 * (plus + minus) : 0.5 * (plus - minus);
    // value of the m-th derivative of g_even at |y|; extend evenly for y < 0
    if (y >= 0.0) return at_y;
    return (m % 2 == 0) ? at_y : -at_y;
}

double odd_part(const TestFunction& H, double y, int m = 0) {
    // m-th derivative of g_odd at y > 0 (0 means the 0+ limit)
    const double plus = H.eval(y, m, Side::Right);
    const double minus = H.eval(-y, m, Side::Left);
    return (m % 2 == 0) ? 0.5 * (plus - minus) : 0.5 * (plus + minus);
}

struct RobinPieces {
    double t;
    double alpha;
    const TestFunction* H;
    const QuadratureConfig* cfg;

    double v0(double y, int m = 0) const {
        return 2.0 * alpha * odd_part(*H, y, m) - odd_part(*H, y, m + 1);
    }

    // m-th derivative of the Dirichlet image of v0 at z >= 0
    double v(double z, int m) const {
        const double w = kernel_window(t, m, *cfg);
        const auto g = [&](double y) {
            return (heat_kernel_deriv(t, z - y, m) - heat_kernel_deriv(t, z + y, m)) * v0(y);
        };
        return integrate(g, 0.0, z + w, *cfg);
    }

    // Exponential recovery kernel: e^{2 alpha x} int_x^inf e^{-2 alpha z}
    // [phi_t(z - y) - phi_t(z + y)] dz, written through erfcx so that the
    // Gaussian and exponential factors never overflow.
    double recovery_kernel(double x, double y) const {
        const auto term = [&](double c) {
            const double z = (x - c + 4.0 * alpha * t) / (2.0 * std::sqrt(t));
            if (z >= 0.0)
                return 0.5 * erfcx(z) * std::exp(-(x - c) * (x - c) / (4.0 * t));
            return 0.5 * std::erfc(z) * std::exp(2.0 * alpha * (x - c) + 4.0 * alpha * alpha * t);
        };
        return term(y) - term(-y);
    }

    // u = T~_t^alpha H_odd on the half line, with u' = 2 alpha u - v.
    double u(double x, int m) const {
        if (m == 0)
            return integrate_decaying([&](double y) { return v0(y) * recovery_kernel(x, y); }, 0.0,
                                      *cfg);
        return 2.0 * alpha * u(x, m - 1) - v(x, m - 1);
    }
};

TestFunctionPtr resolve_provenance(const Regime& regime, double& t, TestFunctionPtr H) {
    while (H->provenance()) {
        const SemigroupProvenance& p = *H->provenance();
        const bool same = p.regime.kind == regime.kind &&
                          (regime.kind != RegimeKind::Robin || p.regime.alpha == regime.alpha);
        if (!same) break;
        t += p.s;
        H = p.seed;
    }
    return H;
}

std::vector<double> parse_number_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw Error(ErrorCode::ParseError, "empty coefficient list");
    return out;
}

// key=value fields separated by ';', with parenthesized values allowed
std::vector<std::pair<std::string, std::string>> parse_fields(const std::string& body) {
    std::vector<std::pair<std::string, std::string>> fields;
    std::size_t i = 0;
    while (i < body.size()) {
        std::size_t eq = body.find('=', i);
        if (eq == std::string::npos)
            throw Error(ErrorCode::ParseError, "descriptor field without '=': " + body.substr(i));
        std::string key = body.substr(i, eq - i);
        std::size_t j = eq + 1;
        int depth = 0;
        while (j < body.size() && (depth > 0 || body[j] != ';')) {
            if (body[j] == '(') ++depth;
            if (body[j] == ')') --depth;
            ++j;
        }
        fields.emplace_back(key, body.substr(eq + 1, j - eq - 1));
        i = (j < body.size()) ? j + 1 : j;
    }
    return fields;
}

}  // namespace

double apply_line(double t, const TestFunction& H, double x, int k, const QuadratureConfig& cfg) {
    if (!(t > 0.0)) throw Error(ErrorCode::DomainError, "apply_line: t must be positive");
    return line_convolution(
        t, [&](double y) { return y >= 0.0 ? H.eval(y, 0, Side::Right) : H.eval(y, 0, Side::Left); },
        x, k, cfg);
}

double apply_neumann(double t, const TestFunction& H, double x, int k, Side at_zero,
                     const QuadratureConfig& cfg) {
    if (!(t > 0.0)) throw Error(ErrorCode::DomainError, "apply_neumann: t must be positive");
    const double s = (x > 0.0 || (x == 0.0 && at_zero == Side::Right)) ? 1.0 : -1.0;
    const double ax = std::abs(x);
    const double w = kernel_window(t, k, cfg);
    const auto g = [&](double y) {
        const double hval = s > 0.0 ? H.eval(y, 0, Side::Right) : H.eval(-y, 0, Side::Left);
        return (heat_kernel_deriv(t, x - s * y, k) + heat_kernel_deriv(t, x + s * y, k)) * hval;
    };
    // y runs over the same half-line as x; kernels are centered at y = |x|
    return integrate(g, 0.0, ax + w, cfg);
}

double apply_dirichlet(double t, const std::function<double(double)>& v0, double x, int k,
                       const QuadratureConfig& cfg) {
    if (!(t > 0.0)) throw Error(ErrorCode::DomainError, "apply_dirichlet: t must be positive");
    if (x < 0.0) throw Error(ErrorCode::DomainError, "apply_dirichlet: x must be >= 0");
    const double w = kernel_window(t, k, cfg);
    const auto g = [&](double y) {
        return (heat_kernel_deriv(t, x - y, k) - heat_kernel_deriv(t, x + y, k)) * v0(y);
    };
    return integrate(g, 0.0, x + w, cfg);
}

double apply_robin(double t, const TestFunction& H, double x, double alpha, int k, Side at_zero,
                   RobinRoute route, const QuadratureConfig& cfg) {
    if (!(t > 0.0)) throw Error(ErrorCode::DomainError, "apply_robin: t must be positive");
    if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "apply_robin: alpha must be > 0");
    const double s = (x > 0.0 || (x == 0.0 && at_zero == Side::Right)) ? 1.0 : -1.0;
    const double ax = std::abs(x);

    const double even_term =
        line_convolution(t, [&](double y) { return even_part(H, y); }, x, k, cfg);

    if (route == RobinRoute::Reduction) {
        RobinPieces rp{t, alpha, &H, &cfg};
        const double um = rp.u(ax, k);
        const double sign = (s > 0.0) ? 1.0 : ((k % 2 == 0) ? -1.0 : 1.0);
        return even_term + sign * um;
    }

    // Direct route: the printed double-integral formula (value only).
    if (k != 0)
        throw Error(ErrorCode::OrderUnsupported, "apply_robin: direct route supports k = 0 only");
    const double w = kernel_window(t, 0, cfg);
    const auto inner = [&](double z) {
        const auto f = [&](double y) {
            const double go = odd_part(H, y, 0);
            return ((z - y + 4.0 * alpha * t) / (2.0 * t) * heat_kernel(t, z - y) +
                    (z + y - 4.0 * alpha * t) / (2.0 * t) * heat_kernel(t, z + y)) *
                   go;
        };
        return integrate(f, 0.0, z + w, cfg);
    };
    // fold e^{2 alpha |x|} into the integrand to keep magnitudes bounded
    const double odd_term = integrate_decaying(
        [&](double z) { return std::exp(-2.0 * alpha * (z - ax)) * inner(z); }, ax, cfg);
    return even_term + s * odd_term;
}

double semigroup_eval(const Regime& regime, double t, const TestFunctionPtr& H, double x, int k,
                      Side at_zero, const QuadratureConfig& cfg) {
    if (t < 0.0) throw Error(ErrorCode::DomainError, "semigroup_eval: t must be >= 0");
    double teff = t;
    TestFunctionPtr base = resolve_provenance(regime, teff, H);
    if (teff == 0.0) return base->eval(x, k, at_zero);
    switch (regime.kind) {
        case RegimeKind::Line:
            return apply_line(teff, *base, x, k, cfg);
        case RegimeKind::Neumann:
            return apply_neumann(teff, *base, x, k, at_zero, cfg);
        case RegimeKind::Robin:
            return apply_robin(teff, *base, x, regime.alpha, k, at_zero, RobinRoute::Reduction, cfg);
    }
    throw Error(ErrorCode::InvalidArgument, "semigroup_eval: bad regime");
}

std::vector<SampledValue> semigroup_apply(const Regime& regime, double t, const TestFunctionPtr& H,
                                          const std::vector<double>& grid, int k,
                                          const QuadratureConfig& cfg) {
    std::vector<SampledValue> out;
    out.reserve(grid.size() + 2);
    out.push_back({0.0, Side::Left, k, semigroup_eval(regime, t, H, 0.0, k, Side::Left, cfg)});
    out.push_back({0.0, Side::Right, k, semigroup_eval(regime, t, H, 0.0, k, Side::Right, cfg)});
    for (double x : grid)
        if (x != 0.0)
            out.push_back({x, x > 0.0 ? Side::Right : Side::Left, k,
                           semigroup_eval(regime, t, H, x, k, Side::Right, cfg)});
    return out;
}

TestFunctionPtr semigroup_image(const Regime& regime, double t, const TestFunctionPtr& H,
                                const QuadratureConfig& cfg) {
    if (t == 0.0) return H;
    std::ostringstream tag;
    tag << "semigroup_image:kind=" << static_cast<int>(regime.kind) << ";t=" << t << ";seed=("
        << H->family_tag() << ")";
    auto left = [regime, t, H, cfg](double x, int k) {
        return semigroup_eval(regime, t, H, x, k, Side::Left, cfg);
    };
    auto right = [regime, t, H, cfg](double x, int k) {
        return semigroup_eval(regime, t, H, x, k, Side::Right, cfg);
    };
    auto fn = std::make_shared<TestFunction>(left, right, 8, tag.str());
    fn->set_provenance({regime, t, H});
    return fn;
}

TestFunctionPtr make_robin_smoothed(const TestFunctionPtr& seed, double alpha, double s,
                                    const QuadratureConfig& cfg) {
    if (!(s > 0.0))
        throw Error(ErrorCode::InvalidArgument, "make_robin_smoothed: s must be positive");
    TestFunctionPtr img = semigroup_image(Regime::robin(alpha), s, seed, cfg);
    std::ostringstream tag;
    tag << "robin_smoothed:alpha=" << alpha << ";s=" << s << ";seed=(" << seed->family_tag() << ")";
    auto fn = std::make_shared<TestFunction>(
        [img](double x, int k) { return img->eval(x, k, Side::Left); },
        [img](double x, int k) { return img->eval(x, k, Side::Right); }, img->max_order(),
        tag.str());
    fn->set_provenance(*img->provenance());
    return fn;
}

double generator_residual(const Regime& regime, double t, double eps, const TestFunctionPtr& H,
                          const std::vector<SeminormIndex>& indices, const QuadratureConfig& cfg) {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "generator_residual: eps must be > 0");
    static const std::vector<double> abscissae = {0.001, 0.01, 0.05, 0.1, 0.25, 0.5,
                                                  0.75,  1.0,  1.5,  2.0,  3.0,  4.0};
    double worst = 0.0;
    const auto residual_at = [&](double x, Side side, int k) {
        const double a = semigroup_eval(regime, t + eps, H, x, k, side, cfg);
        const double b = semigroup_eval(regime, t, H, x, k, side, cfg);
        const double c = semigroup_eval(regime, t, H, x, k + 2, side, cfg);
        return std::abs((a - b) / eps - c);
    };
    for (const SeminormIndex& idx : indices) {
        for (double r : abscissae) {
            for (double sgn : {-1.0, 1.0}) {
                const double x = sgn * r;
                const double w = 1.0 + std::pow(std::abs(x), idx.l);
                worst = std::max(worst, w * residual_at(x, Side::Right, idx.k));
            }
        }
        worst = std::max(worst, residual_at(0.0, Side::Right, idx.k));
        worst = std::max(worst, residual_at(0.0, Side::Left, idx.k));
    }
    return worst;
}

double continuity_modulus(const Regime& regime, const TestFunctionPtr& H, double t, double s,
                          int trunc, const QuadratureConfig& cfg) {
    if (t == s) return 0.0;
    return metric(semigroup_image(regime, t, H, cfg), semigroup_image(regime, s, H, cfg), trunc);
}

std::vector<double> gradnorm_curve(const Regime& regime, const TestFunctionPtr& H,
                                   const std::vector<double>& times, const QuadratureConfig& cfg) {
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) {
        const auto dsq = [&](double x) {
            const double d = semigroup_eval(regime, t, H, x, 1, x >= 0.0 ? Side::Right : Side::Left,
                                            cfg);
            return d * d;
        };
        double val = integrate_decaying(dsq, 0.0, cfg) +
                     integrate_decaying([&](double x) { return dsq(-x); }, 0.0, cfg);
        if (regime.is_robin()) {
            const double d0 = semigroup_eval(regime, t, H, 0.0, 1, Side::Right, cfg);
            val += d0 * d0 / (regime.alpha * regime.alpha);
        }
        out.push_back(val);
    }
    return out;
}

TestFunctionPtr parse_family_descriptor(const std::string& descriptor) {
    const std::size_t colon = descriptor.find(':');
    const std::string tag = descriptor.substr(0, colon);
    if (tag == "zero") return TestFunction::zero();
    if (colon == std::string::npos)
        throw Error(ErrorCode::ParseError, "family descriptor without parameters: " + descriptor);
    const auto fields = parse_fields(descriptor.substr(colon + 1));
    const auto field = [&](const std::string& key) -> const std::string& {
        for (const auto& [k, v] : fields)
            if (k == key) return v;
        throw Error(ErrorCode::ParseError, "family descriptor missing key '" + key + "': " + descriptor);
    };
    if (tag == "hermite_gauss")
        return TestFunction::hermite_gaussian(parse_number_list(field("c")), std::stod(field("g")));
    if (tag == "even_gauss")
        return TestFunction::neumann_family(parse_number_list(field("left")),
                                            parse_number_list(field("right")),
                                            std::stod(field("g")));
    if (tag == "branch_gauss")
        return TestFunction::poly_gauss(parse_number_list(field("left")),
                                        parse_number_list(field("right")), std::stod(field("g")));
    if (tag == "robin_smoothed") {
        std::string seed_desc = field("seed");
        if (seed_desc.size() >= 2 && seed_desc.front() == '(' && seed_desc.back() == ')')
            seed_desc = seed_desc.substr(1, seed_desc.size() - 2);
        return make_robin_smoothed(parse_family_descriptor(seed_desc), std::stod(field("alpha")),
                                   std::stod(field("s")));
    }
    throw Error(ErrorCode::ParseError, "unknown family descriptor: " + descriptor);
}

}  // namespace sb
