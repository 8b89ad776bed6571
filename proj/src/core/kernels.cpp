#include "kernels.hpp"

#include <cmath>
#include <limits>

namespace sb {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Kronrod 15-point nodes/weights on [-1,1] and the embedded Gauss 7 weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
    double kronrod;
    double error;
};

PanelResult gauss_kronrod(const Integrand& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kXgk[i]);
        fv[14 - i] = f(c + h * kXgk[i]);
    }
    fv[7] = f(c);
    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        resk += kWgk[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1) resg += kWg[i / 2] * (fv[i] + fv[14 - i]);
    }
    resk *= h;
    resg *= h;
    return {resk, std::abs(resk - resg)};
}

struct Panel {
    double a, b;
    double value, error;
    int depth;
};

}  // namespace

double heat_kernel(double t, double x) {
    if (!(t > 0.0)) throw Error(ErrorCode::DomainError, "heat_kernel: t must be positive");
    return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * kPi * t);
}

std::vector<double> kernel_deriv_polynomial(double t, int n) {
    if (!(t > 0.0)) throw Error(ErrorCode::DomainError, "kernel_deriv_polynomial: t must be positive");
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "kernel_deriv_polynomial: n must be >= 0");
    std::vector<double> q{1.0};
    const double inv2t = 1.0 / (2.0 * t);
    for (int m = 0; m < n; ++m) {
        // q_{m+1} = q_m' - (x/(2t)) q_m
        std::vector<double> next(q.size() + 1, 0.0);
        for (std::size_t j = 1; j < q.size(); ++j) next[j - 1] += static_cast<double>(j) * q[j];
        for (std::size_t j = 0; j < q.size(); ++j) next[j + 1] -= inv2t * q[j];
        q = std::move(next);
    }
    return q;
}

double heat_kernel_deriv(double t, double x, int n) {
    if (n == 0) return heat_kernel(t, x);
    const std::vector<double> q = kernel_deriv_polynomial(t, n);
    double p = 0.0;
    for (std::size_t j = q.size(); j-- > 0;) p = p * x + q[j];
    return p * heat_kernel(t, x);
}

double integrate(const Integrand& f, double a, double b, const QuadratureConfig& cfg) {
    if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0))
        throw Error(ErrorCode::InvalidArgument, "integrate: tolerances must be positive");
    if (a == b) return 0.0;

    std::vector<Panel> active;
    PanelResult first = gauss_kronrod(f, a, b);
    active.push_back({a, b, first.kronrod, first.error, 0});

    for (;;) {
        double total = 0.0, err = 0.0;
        for (const Panel& p : active) {
            total += p.value;
            err += p.error;
        }
        const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total));
        if (err <= tol) return total;

        // split the worst panel
        std::size_t worst = 0;
        for (std::size_t i = 1; i < active.size(); ++i)
            if (active[i].error > active[worst].error) worst = i;
        Panel p = active[worst];
        if (p.depth >= cfg.max_refinement_depth)
            throw AccuracyError("integrate: max refinement depth exceeded", total, err);
        const double mid = 0.5 * (p.a + p.b);
        PanelResult left = gauss_kronrod(f, p.a, mid);
        PanelResult right = gauss_kronrod(f, mid, p.b);
        active[worst] = {p.a, mid, left.kronrod, left.error, p.depth + 1};
        active.push_back({mid, p.b, right.kronrod, right.error, p.depth + 1});
    }
}

double integrate_line(const Integrand& f, double center, double radius, const QuadratureConfig& cfg) {
    return integrate(f, center - radius, center + radius, cfg);
}

double integrate_halfline(const Integrand& f, double a, double radius, const QuadratureConfig& cfg) {
    return integrate(f, a, a + radius, cfg);
}

}  // namespace sb
