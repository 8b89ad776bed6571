#include <cmath>

#include "core/testfn.hpp"
#include "doctest.h"

using namespace sb;

namespace {

// Brute-force seminorm oracle: dense uniform grid plus local parabolic
// refinement, independent of the production grid/golden-section path.
double seminorm_oracle(const TestFunction& H, int k, int l) {
    double best = 0.0;
    const double h = 1e-4;
    for (double s : {-1.0, 1.0}) {
        for (double r = 1e-6; r <= 8.0; r += h) {
            const double u = s * r;
            best = std::max(best, std::abs((1.0 + std::pow(std::abs(u), l)) * H.eval(u, k)));
        }
    }
    return best;
}

// One-sided first derivative by Richardson-extrapolated forward differences.
double one_sided_fd(const TestFunction& H, double x, int k, Side side, double h0) {
    const double s = side == Side::Right ? 1.0 : -1.0;
    const auto fwd = [&](double h) {
        return s *
               (-3.0 * H.eval(x, k, side) + 4.0 * H.eval(x + s * h, k, side) -
                H.eval(x + s * 2.0 * h, k, side)) /
               (2.0 * h);
    };
    const double a = fwd(h0), b = fwd(h0 / 2.0);
    return (4.0 * b - a) / 3.0;
}

}  // namespace

TEST_CASE("regime classification follows the beta ranges") {
    CHECK(Regime::from_beta(0.0, 1.0).is_line());
    CHECK(Regime::from_beta(0.99, 1.0).is_line());
    CHECK(Regime::from_beta(1.0, 2.0).is_robin());
    CHECK(Regime::from_beta(1.0, 2.0).alpha == 2.0);
    CHECK(Regime::from_beta(2.0, 1.0).is_neumann());
    CHECK(Regime::from_beta(std::numeric_limits<double>::infinity(), 1.0).is_neumann());
    CHECK_THROWS_AS(Regime::robin(0.0), Error);
    CHECK_THROWS_AS(Regime::line(1.0), Error);
}

TEST_CASE("gaussian family evaluation and derivatives") {
    auto H = TestFunction::hermite_gaussian({1.0});  // e^{-x^2}
    CHECK(H->eval(0.0, 0) == doctest::Approx(1.0));
    CHECK(H->eval(0.0, 1) == doctest::Approx(0.0));
    CHECK(H->eval(0.0, 2) == doctest::Approx(-2.0));  // H'' = (4x^2-2)e^{-x^2}
    CHECK(H->eval(1.5, 2) == doctest::Approx((4.0 * 2.25 - 2.0) * std::exp(-2.25)).epsilon(1e-13));
    CHECK_THROWS_AS(H->eval(0.0, H->max_order() + 1), Error);
}

TEST_CASE("one-sided derivatives agree with Richardson finite differences") {
    auto smooth = TestFunction::hermite_gaussian({0.3, 1.0, -0.5});
    auto jumpy = TestFunction::poly_gauss({-1.0, 2.0}, {1.0, 0.0, 1.5});
    for (const auto& H : {smooth, jumpy}) {
        for (int k = 0; k <= 3; ++k) {  // checks derivative orders 1..4
            for (Side side : {Side::Left, Side::Right}) {
                const double fd = one_sided_fd(*H, 0.0, k, side, 1e-4);
                const double exact = H->eval(0.0, k + 1, side);
                const double scale = std::max(1.0, std::abs(exact));
                CHECK(std::abs(fd - exact) / scale <= 1e-6);
            }
        }
    }
}

TEST_CASE("value at the origin is right-continuous") {
    auto jumpy = TestFunction::poly_gauss({5.0}, {7.0});
    CHECK(jumpy->eval(0.0) == doctest::Approx(7.0));
    CHECK(jumpy->eval(0.0, 0, Side::Left) == doctest::Approx(5.0));
}

TEST_CASE("seminorm closed-form and oracle values") {
    auto H = TestFunction::hermite_gaussian({1.0});
    // the weight is 1 + |u|^l, so l = 0 contributes a factor 2 off the origin
    CHECK(seminorm(*H, {0, 0}) == doctest::Approx(2.0).epsilon(1e-9));
    // (1+x^2)e^{-x^2} is maximized at the origin
    CHECK(seminorm(*H, {0, 2}) == doctest::Approx(1.0).epsilon(1e-9));
    // |H'| = 2|x|e^{-x^2} peaks at x = 1/sqrt(2)
    CHECK(seminorm(*H, {1, 0}) ==
          doctest::Approx(2.0 * std::sqrt(2.0) * std::exp(-0.5)).epsilon(1e-9));
    // cross-check a non-closed-form index against the brute-force oracle
    CHECK(seminorm(*H, {1, 1}) == doctest::Approx(seminorm_oracle(*H, 1, 1)).epsilon(1e-7));
    CHECK(seminorm(*H, {3, 4}) == doctest::Approx(seminorm_oracle(*H, 3, 4)).epsilon(1e-7));
}

TEST_CASE("divergent seminorm is detected") {
    // constant function: (1+|u|^2) * 1 grows without bound
    auto flat = std::make_shared<TestFunction>([](double, int k) { return k == 0 ? 1.0 : 0.0; },
                                               [](double, int k) { return k == 0 ? 1.0 : 0.0; }, 4,
                                               "flat");
    CHECK_THROWS_AS(seminorm(*flat, {0, 2}), Error);
    CHECK(seminorm(*flat, {0, 0}) == doctest::Approx(2.0));
}

TEST_CASE("metric identity, symmetry, triangle inequality") {
    auto H = TestFunction::hermite_gaussian({1.0});
    auto G = TestFunction::hermite_gaussian({0.0, 1.0});  // x e^{-x^2}
    auto F = TestFunction::hermite_gaussian({0.5, -0.3, 0.2});
    CHECK(metric(H, H, 4) == doctest::Approx(0.0));
    CHECK(metric(H, G, 4) == doctest::Approx(metric(G, H, 4)).epsilon(1e-10));
    CHECK(metric(H, F, 4) <= metric(H, G, 4) + metric(G, F, 4) + 1e-10);
}

TEST_CASE("single-term metric against the seminorm oracle") {
    auto H = TestFunction::hermite_gaussian({1.0});
    auto zero = TestFunction::zero();
    CHECK(metric(H, zero, 1) == doctest::Approx(0.25 * seminorm_oracle(*H, 1, 1)).epsilon(1e-7));
}

TEST_CASE("metric is monotone in the truncation and reports a tail bound") {
    auto H = TestFunction::hermite_gaussian({1.0});
    auto zero = TestFunction::zero();
    double prev = 0.0;
    for (int trunc = 1; trunc <= 5; ++trunc) {
        double tail = 0.0;
        const double d = metric(H, zero, trunc, &tail);
        CHECK(d >= prev - 1e-14);
        CHECK(tail >= 0.0);
        prev = d;
    }
}

TEST_CASE("L2-beta norm with and without the Robin atom") {
    auto H = TestFunction::hermite_gaussian({1.0});
    const double plain = std::sqrt(std::sqrt(M_PI / 2.0));  // (int e^{-2x^2})^{1/2}
    CHECK(l2beta_norm(*H, Regime::line()) == doctest::Approx(plain).epsilon(1e-10));
    CHECK(l2beta_norm(*H, Regime::robin(1.0)) ==
          doctest::Approx(std::sqrt(std::sqrt(M_PI / 2.0) + 1.0)).epsilon(1e-10));
    CHECK(l2beta_norm(*H, Regime::neumann()) == doctest::Approx(plain).epsilon(1e-10));
    CHECK(l2beta_norm(*TestFunction::zero(), Regime::robin(2.0)) == doctest::Approx(0.0));
}

TEST_CASE("gradient and Laplacian operators") {
    auto H = TestFunction::hermite_gaussian({1.0});
    auto dH = grad_beta(H);
    CHECK(dH->eval(0.0) == doctest::Approx(0.0));
    CHECK(dH->eval(0.75) == doctest::Approx(-1.5 * std::exp(-0.5625)).epsilon(1e-13));
    CHECK(dH->max_order() == H->max_order() - 1);

    auto lap = laplace_beta(H);
    auto ddH = grad_beta(dH);
    for (double x = -3.0; x <= 3.0; x += 0.37)
        CHECK(std::abs(lap->eval(x) - ddH->eval(x)) <= 1e-10);
    CHECK(lap->eval(1.0) == doctest::Approx((4.0 - 2.0) * std::exp(-1.0)).epsilon(1e-13));

    auto low = grad_beta(grad_beta(grad_beta(H)));
    CHECK_THROWS_AS(laplace_beta(grad_beta(grad_beta(grad_beta(grad_beta(low))))), Error);
}

TEST_CASE("gradient at a jump uses the right-branch convention") {
    auto jumpy = TestFunction::poly_gauss({1.0, -1.0}, {1.0, 2.0});
    auto dj = grad_beta(jumpy);
    CHECK(dj->eval(0.0) == doctest::Approx(jumpy->eval(0.0, 1, Side::Right)));
    CHECK(dj->eval(0.0) == doctest::Approx(2.0));  // d/dx[(1+2x)e^{-x^2}] at 0+
}

TEST_CASE("membership validators per regime") {
    auto even = TestFunction::hermite_gaussian({1.0});
    auto odd = TestFunction::hermite_gaussian({0.0, 1.0});

    SUBCASE("even gaussian passes Neumann at all orders") {
        auto report = validate_membership(even, Regime::neumann(), 2, 1e-8);
        CHECK(report.passed);
        CHECK(report.entries.size() == 3);
    }
    SUBCASE("x e^{-x^2} fails Neumann at k=0") {
        auto report = validate_membership(odd, Regime::neumann(), 1, 1e-8);
        CHECK_FALSE(report.passed);
        CHECK_FALSE(report.entries[0].pass);
        CHECK(report.entries[0].residual == doctest::Approx(1.0));  // H'(0) = 1
    }
    SUBCASE("zero function passes Robin for any alpha") {
        CHECK(validate_membership(TestFunction::zero(), Regime::robin(0.7), 2, 1e-8).passed);
        CHECK(validate_membership(TestFunction::zero(), Regime::robin(3.0), 2, 1e-8).passed);
    }
    SUBCASE("Schwartz functions pass the Line finiteness check") {
        CHECK(validate_membership(even, Regime::line(), 2, 1e-8).passed);
        CHECK(validate_membership(odd, Regime::line(), 2, 1e-8).passed);
    }
    SUBCASE("max_k above the derivative budget is rejected") {
        CHECK_THROWS_AS(validate_membership(even, Regime::neumann(), 5, 1e-8), Error);
    }
}

TEST_CASE("Neumann family members pass the validator by construction") {
    auto H = TestFunction::neumann_family({1.0}, {1.0});  // f(r)=e^{-r} -> e^{-x^2}
    CHECK(H->eval(1.3) == doctest::Approx(std::exp(-1.69)).epsilon(1e-13));
    CHECK(validate_membership(H, Regime::neumann(), 2, 1e-10).passed);

    auto mixed = TestFunction::neumann_family({1.0, -0.4}, {2.0, 1.0, 0.25});
    CHECK(validate_membership(mixed, Regime::neumann(), 2, 1e-10).passed);
    // jump at the origin is allowed in the Neumann class
    CHECK(mixed->eval(0.0, 0, Side::Right) != doctest::Approx(mixed->eval(0.0, 0, Side::Left)));
}

TEST_CASE("Laplacian preserves the Neumann class (inc1, shifted orders)") {
    auto H = TestFunction::neumann_family({1.0, 0.5}, {1.0, -0.2});
    REQUIRE(validate_membership(H, Regime::neumann(), 3, 1e-9).passed);
    CHECK(validate_membership(laplace_beta(H), Regime::neumann(), 2, 1e-9).passed);
}

TEST_CASE("built-in families have finite seminorms up to (6,6)") {
    std::vector<TestFunctionPtr> battery = {
        TestFunction::hermite_gaussian({1.0}),
        TestFunction::hermite_gaussian({0.0, 1.0}),
        TestFunction::neumann_family({1.0, -0.4}, {0.5}),
        TestFunction::poly_gauss({1.0, 1.0}, {-0.5, 0.0, 1.0}),
    };
    for (const auto& H : battery)
        for (int k = 0; k <= 6; k += 3)
            for (int l = 0; l <= 6; l += 3) CHECK(std::isfinite(seminorm(*H, {k, l})));
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(TestFunction::hermite_gaussian({}), Error);
    CHECK_THROWS_AS(TestFunction::hermite_gaussian({1.0}, -1.0), Error);
    CHECK_THROWS_AS(TestFunction::poly_gauss({}, {1.0}), Error);
}
