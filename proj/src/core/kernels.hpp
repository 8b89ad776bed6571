#pragma once

#include <functional>
#include <vector>

#include "errors.hpp"

namespace sb {

/// Gaussian heat kernel phi_t(x) = exp(-x^2/(4t)) / sqrt(4*pi*t).
double heat_kernel(double t, double x);

/// n-th space derivative of the heat kernel, computed as q_n(x; t) * phi_t(x)
/// where q_0 = 1 and q_{n+1} = q_n' - (x/(2t)) q_n. deg q_n = n.
double heat_kernel_deriv(double t, double x, int n);

/// Coefficients (ascending powers of x) of q_n for a given t.
std::vector<double> kernel_deriv_polynomial(double t, int n);

struct QuadratureConfig {
    double abs_tol = 1e-11;
    double rel_tol = 1e-10;
    double truncation_sigmas = 10.0;  // integration radius in units of sqrt(2t)
    int max_refinement_depth = 40;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (G7/K15) integration on [a, b].
/// Panels are bisected until the local error estimate is below
/// max(abs_tol, rel_tol * |running total|) shared across panels.
/// Throws AccuracyError (carrying the best estimate) if max_refinement_depth
/// is exceeded anywhere.
double integrate(const Integrand& f, double a, double b, const QuadratureConfig& cfg = {});

/// Integral over the whole line, truncated to [center - radius, center + radius].
double integrate_line(const Integrand& f, double center, double radius,
                      const QuadratureConfig& cfg = {});

/// Integral over [a, +inf), truncated at a + radius.
double integrate_halfline(const Integrand& f, double a, double radius,
                          const QuadratureConfig& cfg = {});

}  // namespace sb
