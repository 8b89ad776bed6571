#include <cmath>

#include "core/kernels.hpp"
#include "doctest.h"

using namespace sb;

namespace {

// Independent oracle via the Fourier representation
//   d^n/dx^n phi_t(x) = (1/pi) int_0^inf k^n e^{-k^2 t} cos(kx + n pi/2) dk.
double fourier_kernel_deriv(double t, double x, int n) {
    QuadratureConfig cfg;
    const double kmax = 12.0 / std::sqrt(t);
    return integrate(
               [&](double k) {
                   return std::pow(k, n) * std::exp(-k * k * t) *
                          std::cos(k * x + n * M_PI_2);
               },
               0.0, kmax, cfg) /
           M_PI;
}

}  // namespace

TEST_CASE("heat kernel closed-form values") {
    CHECK(heat_kernel(1.0, 0.0) == doctest::Approx(1.0 / std::sqrt(4.0 * M_PI)).epsilon(1e-14));
    CHECK(heat_kernel(1.0, 2.5) == doctest::Approx(heat_kernel(1.0, -2.5)).epsilon(1e-15));
    CHECK(heat_kernel(0.25, 1.0) ==
          doctest::Approx(std::exp(-1.0) / std::sqrt(M_PI)).epsilon(1e-14));
    CHECK_THROWS_AS(heat_kernel(0.0, 1.0), Error);
    CHECK_THROWS_AS(heat_kernel(-1.0, 1.0), Error);
}

TEST_CASE("kernel normalizes to one under quadrature") {
    QuadratureConfig cfg;
    const double total = integrate_line([](double x) { return heat_kernel(1.0, x); }, 0.0,
                                        cfg.truncation_sigmas * std::sqrt(2.0), cfg);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("derivative polynomial recurrence basics") {
    // q_0 = 1, q_1 = -x/(2t), q_2 = -1/(2t) + x^2/(4t^2)
    auto q1 = kernel_deriv_polynomial(1.0, 1);
    REQUIRE(q1.size() == 2);
    CHECK(q1[0] == 0.0);
    CHECK(q1[1] == doctest::Approx(-0.5));
    auto q2 = kernel_deriv_polynomial(1.0, 2);
    REQUIRE(q2.size() == 3);
    CHECK(q2[0] == doctest::Approx(-0.5));
    CHECK(q2[2] == doctest::Approx(0.25));

    CHECK(heat_kernel_deriv(1.0, 0.0, 1) == 0.0);
    CHECK(heat_kernel_deriv(1.0, 0.0, 2) ==
          doctest::Approx(-0.5 * heat_kernel(1.0, 0.0)).epsilon(1e-14));
    CHECK_THROWS_AS(heat_kernel_deriv(0.0, 0.0, 1), Error);
}

TEST_CASE("recurrence matches the Fourier-transform oracle up to order six") {
    for (double t : {0.3, 1.0}) {
        for (int n = 1; n <= 6; ++n) {
            double scale = 0.0;
            for (double x = -5.0; x <= 5.0; x += 0.5)
                scale = std::max(scale, std::abs(heat_kernel_deriv(t, x, n)));
            for (double x = -5.0; x <= 5.0; x += 0.5) {
                const double exact = heat_kernel_deriv(t, x, n);
                const double approx = fourier_kernel_deriv(t, x, n);
                CHECK(std::abs(exact - approx) / scale <= 1e-10);
            }
        }
    }
}

TEST_CASE("Chapman-Kolmogorov at kernel level") {
    QuadratureConfig cfg;
    for (double t : {0.1, 0.5, 1.0}) {
        for (double s : {0.1, 0.5, 1.0}) {
            for (double xz : {0.0, 0.7, -1.3}) {
                const double conv = integrate_line(
                    [&](double y) { return heat_kernel(t, xz - y) * heat_kernel(s, y); }, 0.0,
                    std::abs(xz) + cfg.truncation_sigmas * std::sqrt(2.0 * (t + s)), cfg);
                CHECK(conv == doctest::Approx(heat_kernel(t + s, xz)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("adaptive quadrature battery") {
    QuadratureConfig cfg;
    SUBCASE("gaussian integral closed form") {
        const double val =
            integrate_line([](double x) { return std::exp(-2.0 * x * x); }, 0.0, 10.0, cfg);
        CHECK(val == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-12));
    }
    SUBCASE("zero integrand") {
        CHECK(integrate([](double) { return 0.0; }, -3.0, 7.0, cfg) == 0.0);
    }
    SUBCASE("empty interval") {
        CHECK(integrate([](double x) { return x * x; }, 2.0, 2.0, cfg) == 0.0);
    }
    SUBCASE("halving tolerances stays within previous error") {
        const auto f = [](double x) { return std::cos(5.0 * x) * std::exp(-x * x); };
        QuadratureConfig loose;
        loose.abs_tol = 1e-6;
        loose.rel_tol = 1e-6;
        QuadratureConfig tight = loose;
        tight.abs_tol /= 2.0;
        tight.rel_tol /= 2.0;
        const double a = integrate(f, -6.0, 6.0, loose);
        const double b = integrate(f, -6.0, 6.0, tight);
        CHECK(std::abs(a - b) <= 1e-6);
    }
    SUBCASE("refinement cap reports best estimate") {
        QuadratureConfig shallow;
        shallow.abs_tol = 1e-15;
        shallow.rel_tol = 1e-15;
        shallow.max_refinement_depth = 2;
        const auto f = [](double x) { return std::cos(40.0 * x * x); };
        CHECK_THROWS_AS(integrate(f, 0.0, 5.0, shallow), AccuracyError);
        try {
            integrate(f, 0.0, 5.0, shallow);
        } catch (const AccuracyError& e) {
            CHECK(std::isfinite(e.best_estimate()));
            CHECK(e.error_estimate() > 0.0);
        }
    }
    SUBCASE("invalid tolerances rejected") {
        QuadratureConfig bad;
        bad.abs_tol = 0.0;
        CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, bad), Error);
    }
}
