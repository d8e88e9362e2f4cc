#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "qdx/lattice.hpp"

using namespace qdx;

TEST_CASE("fibonacci potential basic values") {
    auto spec = PotentialSpec::fibonacci(8.0, 0.0);
    CHECK(potential_value(spec, 1) == 8.0);
    CHECK(potential_value(spec, 2) == 0.0);
    CHECK(potential_value(spec, 0) == 0.0);

    int expected[8] = {1, 0, 1, 1, 0, 1, 0, 1};
    for (int n = 1; n <= 8; ++n) CHECK(potential_value(spec, n) == 8.0 * expected[n - 1]);
}

TEST_CASE("fibonacci potential at adversarial indices") {
    // frozen from a 60-digit evaluation of the circle map; Fibonacci indices land
    // within 1e-12 of the wrap point, so these catch any precision loss
    struct Case {
        long long n;
        int v;
    };
    const Case cases[] = {
        {89LL, 0},        {377LL, 1},       {1597LL, 0},      {6765LL, 1},
        {28657LL, 0},     {121393LL, 1},    {514229LL, 0},    {2178309LL, 1},
        {9227465LL, 0},   {39088169LL, 1},  {447712782LL, 1}, {261973069LL, 1},
        {523938499LL, 1}, {798935572LL, 0}, {151847156LL, 1}, {177777868LL, 1},
        {981836553LL, 0}, {675398922LL, 1}, {-2LL, 1},        {-3LL, 0},
        {-5LL, 1},        {-987654321LL, 1},
    };
    auto spec = PotentialSpec::fibonacci(1.0, 0.0);
    for (const auto& c : cases) CHECK(potential_value(spec, c.n) == doctest::Approx(c.v));
}

TEST_CASE("left endpoint of the indicator interval counts as inside") {
    // frac(-1/phi) = 1 - 1/phi exactly, an exact tie in the fixed-point representation
    CHECK(detail::fib_phase_fixed(-1, 0.0) == detail::fib_boundary_fixed());
    auto spec = PotentialSpec::fibonacci(3.5, 0.0);
    CHECK(potential_value(spec, -1) == 3.5);
}

TEST_CASE("potential evaluation is deterministic") {
    auto spec = PotentialSpec::fibonacci(8.0, 0.37);
    for (long long n : {-1000000007LL, -12LL, 0LL, 71LL, 987654321LL})
        CHECK(potential_value(spec, n) == potential_value(spec, n));
}

TEST_CASE("free and custom potentials") {
    auto free_spec = PotentialSpec::free_potential();
    CHECK(potential_value(free_spec, 12345) == 0.0);
    CHECK(free_spec.sup_norm() == 0.0);

    auto table = PotentialSpec::custom({1.0, -2.0, 0.5}, -1);
    CHECK(potential_value(table, -1) == 1.0);
    CHECK(potential_value(table, 1) == 0.5);
    CHECK(table.sup_norm() == 2.0);
    CHECK_THROWS_AS(potential_value(table, 2), DomainError);
    CHECK_THROWS_AS(potential_value(table, -2), DomainError);
}

TEST_CASE("spectral bound") {
    CHECK(spectral_bound(PotentialSpec::free_potential()) == 4.0);
    CHECK(spectral_bound(PotentialSpec::fibonacci(8.0)) == 11.0);
    CHECK(spectral_bound(PotentialSpec::custom({0.0, 0.0, 0.0})) == 4.0);
}

TEST_CASE("hamiltonian stencil on delta_0") {
    LatticeWindow delta(0, 0);
    delta.at(0) = 1.0;

    auto free_spec = PotentialSpec::free_potential();
    LatticeWindow h = apply_hamiltonian(delta, free_spec);
    CHECK(h.left == -1);
    CHECK(h.right == 1);
    CHECK(h.value(-1) == std::complex<double>(1.0));
    CHECK(h.value(0) == std::complex<double>(0.0));
    CHECK(h.value(1) == std::complex<double>(1.0));

    auto fib = PotentialSpec::fibonacci(8.0, 0.0);
    LatticeWindow hf = apply_hamiltonian(delta, fib);
    CHECK(hf.value(0) == std::complex<double>(0.0));  // V(0) = 0
    CHECK(hf.value(1) == std::complex<double>(1.0));
}

TEST_CASE("hamiltonian is linear and symmetric") {
    auto spec = PotentialSpec::fibonacci(5.0, 0.2);
    LatticeWindow psi(-6, 6), chi(-6, 6);
    for (std::int64_t n = -6; n <= 6; ++n) {
        psi.at(n) = std::complex<double>(std::sin(0.3 * n), std::cos(1.1 * n));
        chi.at(n) = std::complex<double>(std::cos(0.7 * n), 0.1 * n);
    }

    // linearity
    std::complex<double> a{0.3, -1.2}, b{2.0, 0.5};
    LatticeWindow combo(-6, 6);
    for (std::int64_t n = -6; n <= 6; ++n) combo.at(n) = a * psi.value(n) + b * chi.value(n);
    LatticeWindow h_combo = apply_hamiltonian(combo, spec);
    LatticeWindow hp = apply_hamiltonian(psi, spec);
    LatticeWindow hc = apply_hamiltonian(chi, spec);
    for (std::int64_t n = -7; n <= 7; ++n)
        CHECK(std::abs(h_combo.value(n) - (a * hp.value(n) + b * hc.value(n))) < 1e-14);

    // symmetry <H psi, chi> = <psi, H chi> (windows grown, no truncation)
    auto lhs = inner_product(hp, chi);
    auto rhs = inner_product(psi, hc);
    CHECK(std::abs(lhs - rhs) < 1e-13);

    // operator norm bound ||H psi|| <= (2 + sup) ||psi||
    double hn = std::sqrt(hp.norm_squared());
    double pn = std::sqrt(psi.norm_squared());
    CHECK(hn <= (2.0 + spec.sup_norm()) * pn * (1.0 + 1e-14));
}
