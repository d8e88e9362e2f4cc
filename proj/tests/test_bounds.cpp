#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qdx/bounds.hpp"
#include "qdx/dynamics.hpp"

using namespace qdx;

TEST_CASE("coupling constants at lambda = 8") {
    CouplingConstants c = coupling_constants(8.0, {0.0, 0.1}, {1.0, 2.0});
    CHECK(c.s_lower == 3.0);  // (4 + sqrt(4)) / 2 exactly
    CHECK(c.s_upper == 38.0);
    // frozen from a 60-digit evaluation of 2 log phi / log S
    CHECK(c.alpha_upper == doctest::Approx(0.8760357589718848).epsilon(1e-12));
    CHECK(c.alpha_lower == doctest::Approx(0.2645775544163603).epsilon(1e-12));
    CHECK(c.alpha_upper_valid);
    CHECK(c.s_exponent == doctest::Approx(3.7796101116964758).epsilon(1e-12));
    CHECK(c.lambda0_at.at(0.0) == doctest::Approx(std::sqrt(24.0)).epsilon(1e-12));
    // beta lower bound for theta = 0: alpha_lower - (2/p)(1 - 2 log(sqrt(17)/4) / (5 log 38))
    double kappa = 2.0 * std::log(std::sqrt(17.0) / 4.0) / (5.0 * std::log(38.0));
    CHECK(c.beta_lower_zero_phase[1].second ==
          doctest::Approx(c.alpha_lower - (1.0 - kappa)).epsilon(1e-12));
}

TEST_CASE("coupling constants domain errors") {
    CHECK_THROWS_AS(coupling_constants(5.0), DomainError);            // (l-4)^2 < 12
    CHECK_THROWS_AS(coupling_constants(7.46), DomainError);           // below 4 + 2 sqrt 3
    CHECK_NOTHROW(coupling_constants(7.47));                          // S_l fine, lower ok
    CHECK(!coupling_constants(7.6).alpha_upper_valid);                // upper needs >= 8
}

TEST_CASE("alpha bounds order and large-coupling trend") {
    double prev_gap = 1.0;
    for (double l : {8.0, 32.0, 128.0, 512.0}) {
        CouplingConstants c = coupling_constants(l);
        CHECK(c.alpha_lower < c.alpha_upper);
        double prod = c.alpha_upper * std::log(l);
        CHECK(prod > kTwoLogPhi);  // approaches 2 log phi from above
        double gap = prod - kTwoLogPhi;
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("theorem1 rhs basic inequalities") {
    auto spec = PotentialSpec::fibonacci(8.0, 0.0);
    double t = 12.0;
    RhsResult r1 = theorem1_rhs(3, t, spec, Side::Right, 1e-5);
    RhsResult r2 = theorem1_rhs(9, t, spec, Side::Right, 1e-5);
    double k = spectral_bound(spec);
    CHECK(r1.value <= 2.0 * k * t * t * t * t * (1.0 + 1e-9));  // integrand <= 1
    CHECK(r2.value <= r1.value * (1.0 + 1e-6));                 // nonincreasing in N
    CHECK(r1.value > 0.0);
}

TEST_CASE("lemma2 rhs: free case beyond ballistic reach is negligible") {
    auto free_spec = PotentialSpec::free_potential();
    RhsResult r = lemma2_rhs(200, 2.0, free_spec, Side::Right, 1e-4);
    CHECK(r.value < 1e-8);
}

TEST_CASE("transport exponents on synthetic series") {
    // constant series: slope 0
    std::vector<std::pair<double, double>> flat;
    for (double t = 1.0; t <= 2000.0; t *= 1.15) flat.emplace_back(t, 5.0);
    TransportExponents te = transport_exponents(flat, 2.0);
    CHECK(te.beta_minus == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(te.beta_plus == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    // exact power law M = t^(2 b): beta = b for p = 2
    std::vector<std::pair<double, double>> pl;
    for (double t = 1.0; t <= 5000.0; t *= 1.1) pl.emplace_back(t, std::pow(t, 1.4));
    te = transport_exponents(pl, 2.0);
    CHECK(te.beta_minus == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(te.beta_plus == doctest::Approx(0.7).epsilon(1e-9));

    CHECK_THROWS_AS(transport_exponents({{1.0, 1.0}, {2.0, 1.0}}, 2.0), SeriesTooShort);
    std::vector<std::pair<double, double>> shortspan;
    for (double t = 1.0; t <= 50.0; t *= 1.2) shortspan.emplace_back(t, t);
    CHECK_THROWS_AS(transport_exponents(shortspan, 1.0), SeriesTooShort);
}

TEST_CASE("spreading profile recovers a synthetic power law") {
    // P identically t^{-q} should give S(alpha) = q for every alpha
    double q = 1.7;
    ProbabilityGrid g;
    g.alphas = {0.2, 0.5, 0.9};
    for (double t = 1.0; t <= 1e4 + 1; t *= 1.6) g.times.push_back(t);
    g.values.assign(3, {});
    for (double t : g.times)
        for (std::size_t a = 0; a < 3; ++a) g.values[a].push_back(std::pow(t, -q));
    SpreadingProfile p = spreading_profile(g);
    for (std::size_t a = 0; a < 3; ++a) {
        CHECK(p.s_minus[a] == doctest::Approx(q).epsilon(1e-3));
        CHECK(p.s_plus[a] == doctest::Approx(q).epsilon(1e-3));
    }
    CHECK(p.alpha_u_minus == doctest::Approx(0.9));  // q < 10 everywhere
    CHECK(p.alpha_l_minus == 0.0);                   // q > 0.05 everywhere
}

TEST_CASE("transfer power law at moderate level") {
    PowerLaw pl = transfer_power_law(8.0, 0.2, 10, 2);
    CHECK(pl.gamma > 0.5);
    CHECK(pl.gamma < 6.0);
    CHECK(pl.c >= 1.0);
    // envelope points respect C N^gamma by construction
    for (const auto& [ln_n, ln_g] : pl.envelope)
        CHECK(ln_g <= std::log(pl.c) + pl.gamma * ln_n + 1e-9);
}

TEST_CASE("envelope fit has zero violations and finite constants") {
    std::vector<EnvelopePoint> pts;
    for (double t = 10.0; t <= 1000.0; t *= 2.0)
        for (double n : {3.0, 10.0, 30.0}) {
            double rhs = 1e-3 / (t * n);
            double p = 0.7 * (std::exp(-0.4 * n) + rhs);
            pts.push_back({n, t, p, rhs});
        }
    EnvelopeFit f = fit_envelope(pts);
    CHECK(f.violations == 0);
    CHECK(f.max_ratio <= 1.0 + 1e-9);
    CHECK(f.big_c > 0.0);
    CHECK(f.small_c == doctest::Approx(0.4).epsilon(0.1));
}

TEST_CASE("sandwich rejects couplings below the upper-bound hypothesis") {
    CHECK_THROWS_AS(sandwich_report(5.0), DomainError);
    CHECK_THROWS_AS(sandwich_report(7.8), DomainError);
}
