#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "qdx/tracemap.hpp"
#include "qdx/transfer.hpp"
#include "support/oracles.hpp"

using namespace qdx;
using cplx = std::complex<double>;

namespace {

// propagate (u(1), u(0)) through the difference equation u(n+1) = (z-V(n))u(n) - u(n-1)
std::pair<cplx, cplx> propagate(std::int64_t n, cplx z, const PotentialSpec& spec, cplx u1,
                                cplx u0) {
    if (n == 0) return {u1, u0};
    if (n > 0) {
        cplx um1 = u0, uc = u1;  // u(0), u(1)
        for (std::int64_t m = 1; m <= n; ++m) {
            cplx un = (z - potential_value(spec, m)) * uc - um1;
            um1 = uc;
            uc = un;
        }
        return {uc, um1};  // (u(n+1), u(n))
    }
    cplx uc = u0, up = u1;  // u(0), u(1)
    for (std::int64_t m = 0; m >= n + 1; --m) {
        cplx um = (z - potential_value(spec, m)) * uc - up;  // u(m-1)
        up = uc;
        uc = um;
    }
    return {up, uc};  // (u(n+1), u(n))
}

cplx apply_scale(cplx v, std::int64_t e) { return v * std::ldexp(1.0, static_cast<int>(e)); }

}  // namespace

TEST_CASE("transfer matrix base cases") {
    auto spec = PotentialSpec::fibonacci(8.0, 0.0);
    TransferMatrix id = transfer_matrix(0, {0.3, 0.1}, spec);
    CHECK(id.a == cplx(1.0));
    CHECK(id.d == cplx(1.0));
    CHECK(id.b == cplx(0.0));
    CHECK(id.c == cplx(0.0));

    // free potential at z = 0: powers of the rotation [[0,-1],[1,0]], norm 1
    auto free_spec = PotentialSpec::free_potential();
    for (std::int64_t n : {1, 2, 3, 7, 40}) {
        TransferMatrix m = transfer_matrix(n, {0.0, 0.0}, free_spec);
        CHECK(m.log_norm() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::abs(m.det_mantissa() - 1.0) < 1e-12);
    }
}

TEST_CASE("transfer matrix propagates solutions on both sides") {
    auto spec = PotentialSpec::fibonacci(8.0, 0.3);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> un(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        cplx z{6.0 * un(rng), 0.2 * std::fabs(un(rng))};
        cplx u1{un(rng), un(rng)}, u0{un(rng), un(rng)};
        for (std::int64_t n : {1LL, 2LL, 5LL, 17LL, -1LL, -2LL, -9LL, -23LL}) {
            TransferMatrix phi = transfer_matrix(n, z, spec);
            auto [want_top, want_bot] = propagate(n, z, spec, u1, u0);
            cplx top = apply_scale(phi.a * u1 + phi.b * u0, phi.scale_exponent);
            cplx bot = apply_scale(phi.c * u1 + phi.d * u0, phi.scale_exponent);
            double scale = std::max(1.0, std::max(std::abs(want_top), std::abs(want_bot)));
            CHECK(std::abs(top - want_top) / scale < 1e-10);
            CHECK(std::abs(bot - want_bot) / scale < 1e-10);
        }
    }
}

TEST_CASE("determinant stays at one where float products can certify it") {
    auto spec = PotentialSpec::fibonacci(8.0, 0.0);
    // free case: isometries, det exact to rounding over 1e5 factors
    auto free_spec = PotentialSpec::free_potential();
    TransferMatrix m = transfer_matrix(100000, {0.7, 0.0}, free_spec);
    CHECK(std::abs(apply_scale(m.det_mantissa(), 2 * m.scale_exponent) - 1.0) < 1e-10);

    // fibonacci on-spectrum: certify against a 240-bit product where double
    // cancellation would swamp the drift
    std::vector<double> site_values(2001, 0.0);
    for (std::int64_t n = 1; n <= 2000; ++n)
        site_values[static_cast<std::size_t>(n)] = potential_value(spec, n);
    cplx z{-0.24264068711928521, 0.0};  // a level-2 trace root
    TransferMatrix p = transfer_matrix(2000, z, spec);
    auto hp = oracles::transfer_product<240>(2000, z, site_values);
    auto det = hp.det();
    CHECK(static_cast<double>(det.re) == doctest::Approx(1.0).epsilon(1e-20));
    CHECK(static_cast<double>(sqrt(det.norm())) == doctest::Approx(1.0).epsilon(1e-20));
    // and the production norm agrees with the high-precision one
    CHECK(p.log_norm() ==
          doctest::Approx(0.5 * static_cast<double>(log(hp.norm_squared()))).epsilon(1e-8));
}

TEST_CASE("norm is at least one") {
    auto spec = PotentialSpec::fibonacci(8.0, 0.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> un(-11.0, 11.0);
    for (int rep = 0; rep < 50; ++rep) {
        cplx z{un(rng), 0.05 * std::fabs(un(rng))};
        std::int64_t n = 1 + static_cast<std::int64_t>(std::fabs(un(rng)) * 30);
        CHECK(transfer_matrix(n, z, spec).log_norm() >= -1e-12);
        CHECK(transfer_matrix(-n, z, spec).log_norm() >= -1e-12);
    }
}

TEST_CASE("window max norm") {
    auto spec = PotentialSpec::fibonacci(8.0, 0.0);
    auto free_spec = PotentialSpec::free_potential();
    CHECK(window_max_norm_sq({0.5, 0.1}, 1, Side::Right, spec) == 1.0);
    CHECK(window_max_norm_sq({0.0, 0.0}, 200, Side::Right, free_spec) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // against a 240-bit direct product sweep
    cplx z{0.0, 0.01};
    std::vector<double> site_values(101, 0.0);
    for (std::int64_t n = 1; n <= 100; ++n)
        site_values[static_cast<std::size_t>(n)] = potential_value(spec, n);
    double best = 0.0;
    for (std::int64_t n = 1; n <= 99; ++n) {
        auto m = oracles::transfer_product<240>(n, z, site_values);
        best = std::max(best, static_cast<double>(log(m.norm_squared())));
    }
    double got = window_max_log_norm_sq(z, 100, Side::Right, spec);
    CHECK(got == doctest::Approx(best).epsilon(1e-9));
    CHECK(got >= 0.0);
}

TEST_CASE("fibonacci matrices satisfy their recursion") {
    cplx z{1.7, 0.05};
    double lambda = 8.0;
    TransferMatrix m3 = fibonacci_matrix(3, z, lambda);
    TransferMatrix m4 = fibonacci_matrix(4, z, lambda);
    TransferMatrix m5 = fibonacci_matrix(5, z, lambda);
    TransferMatrix prod = m3 * m4;
    auto close = [](cplx a, cplx b) { return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)); };
    CHECK(close(apply_scale(prod.a, prod.scale_exponent), apply_scale(m5.a, m5.scale_exponent)));
    CHECK(close(apply_scale(prod.b, prod.scale_exponent), apply_scale(m5.b, m5.scale_exponent)));
    CHECK(close(apply_scale(prod.c, prod.scale_exponent), apply_scale(m5.c, m5.scale_exponent)));
    CHECK(close(apply_scale(prod.d, prod.scale_exponent), apply_scale(m5.d, m5.scale_exponent)));
}

TEST_CASE("half-traces of M_k match the trace map") {
    double lambda = 8.0;
    // M_1 trace = z - lambda
    cplx tr1 = 2.0 * fibonacci_half_trace(1, {0.4, 0.0}, lambda);
    CHECK(std::abs(tr1 - cplx(0.4 - lambda)) < 1e-12);

    for (cplx z : {cplx{0.3, 0.0}, cplx{-1.2, 0.1}, cplx{7.9, 0.02}}) {
        TraceState ts = trace_sequence(z, 20, lambda);
        for (int k = 1; k <= 20; ++k) {
            cplx want = ts.value(k);
            if (!(std::isfinite(want.real()) && std::abs(want) < 1e100)) break;
            cplx got = fibonacci_half_trace(k, z, lambda);
            CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
        }
    }
}
