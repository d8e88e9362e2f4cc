#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qdx/bessel.hpp"
#include "qdx/quadrature.hpp"

using namespace qdx;

TEST_CASE("smooth integrands") {
    auto r = integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::fabs(r.value - 2.0) <= std::max(r.error_estimate, 1e-12));

    auto g = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
    CHECK(g.value == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("narrow peak needs adaptivity and keeps its certificate honest") {
    double eps = 1e-4;
    auto f = [eps](double x) { return eps / (x * x + eps * eps); };
    // integral over [-1, 1] = 2 atan(1/eps)
    QuadratureOptions opt;
    opt.rel_tol = 1e-9;
    auto r = integrate(f, -1.0, 1.0, opt);
    double want = 2.0 * std::atan(1.0 / eps);
    CHECK(std::fabs(r.value - want) <= 10.0 * r.error_estimate + 1e-12 * want);
    CHECK(r.value == doctest::Approx(want).epsilon(1e-9));
    CHECK(r.panels > 10);
}

TEST_CASE("budget exhaustion throws") {
    QuadratureOptions opt;
    opt.rel_tol = 1e-14;
    opt.max_panels = 8;
    auto f = [](double x) { return 1e-6 / (x * x + 1e-12); };
    CHECK_THROWS_AS(integrate(f, -1.0, 1.0, opt), GridTooCoarse);
}

TEST_CASE("bessel array against std::cyl_bessel_j") {
    for (double x : {0.5, 2.0, 20.0, 150.0}) {
        auto j = bessel_j_array(x, 40);
        for (int m = 0; m <= 40; ++m) {
            double want = std::cyl_bessel_j(static_cast<double>(m), x);
            CHECK(std::fabs(j[static_cast<std::size_t>(m)] - want) < 1e-12);
        }
    }
    // normalization identity at large argument
    auto j = bessel_j_array(4000.0, 4400);
    double s = j[0];
    for (int m = 2; m <= 4400; m += 2) s += 2.0 * j[static_cast<std::size_t>(m)];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    // J_0(2)
    CHECK(bessel_j_array(2.0, 0)[0] == doctest::Approx(0.22389077914123567).epsilon(1e-13));
}
