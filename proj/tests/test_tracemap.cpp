#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "qdx/tracemap.hpp"
#include "support/oracles.hpp"

using namespace qdx;
using cplx = std::complex<double>;

TEST_CASE("trace sequence seeds and hand recursion at lambda=8, z=0") {
    TraceState ts = trace_sequence({0.0, 0.0}, 3, 8.0);
    CHECK(ts.value(-1) == cplx(1.0));
    CHECK(ts.value(0) == cplx(0.0));
    CHECK(ts.value(1) == cplx(-4.0));
    CHECK(ts.value(2) == cplx(-1.0));
    CHECK(ts.value(3) == cplx(8.0));
}

TEST_CASE("x_1 is the level-1 half trace") {
    for (double zr : {-3.0, 0.0, 2.5, 9.0}) {
        TraceState ts = trace_sequence({zr, 0.4}, 1, 8.0);
        CHECK(std::abs(ts.value(1) - cplx{(zr - 8.0) / 2.0, 0.2}) < 1e-14);
    }
}

TEST_CASE("stored values satisfy the recursion after unscaling") {
    TraceState ts = trace_sequence({1.3, 0.2}, 25, 8.0);
    for (int j = 1; j < 25; ++j) {
        cplx a = ts.value(j), b = ts.value(j - 1), c = ts.value(j - 2), n = ts.value(j + 1);
        double mag = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(n)});
        if (!(mag < 1e90)) break;
        CHECK(std::abs(n - (2.0 * a * b - c)) <= 1e-9 * std::max(1.0, std::abs(n)));
    }
}

TEST_CASE("fricke invariant equals lambda^2/4") {
    // algebraic identity at the seeds: x_2^2 + x_1^2 + x_0^2 - 2 x_2 x_1 x_0 - 1 = 16
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ur(-11.0, 11.0), ui(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        cplx z{ur(rng), ui(rng)};
        TraceState ts = trace_sequence(z, 30, 8.0);
        CHECK(std::abs(ts.invariant_value() - 16.0) < 1e-9 * 16.0);
        for (int j = 0; j < 30; ++j) {
            if (ts.fricke_certified_bound(j) > 0.5e-9) break;
            CHECK(ts.fricke_relative_deviation(j) < 1e-9);
        }
    }
}

TEST_CASE("fricke invariant at 768 bits holds up to magnitude 1e100") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ur(-11.0, 11.0), ui(0.0, 1.0);
    for (double lambda : {8.0, 12.0}) {
        double quarter = lambda * lambda / 4.0;
        for (int rep = 0; rep < 60; ++rep) {
            cplx z{ur(rng), ui(rng)};
            auto xs = oracles::trace_orbit<768>(z, 30, lambda);
            TraceState prod = trace_sequence(z, 30, lambda);
            for (int j = 0; j < 30; ++j) {
                double biggest = 0.0;
                for (int l = j - 1; l <= j + 1; ++l)
                    biggest = std::max(
                        biggest,
                        static_cast<double>(sqrt(xs[static_cast<std::size_t>(l + 1)].norm())));
                if (biggest > 1e100) break;
                double inv = static_cast<double>(oracles::fricke_invariant<768>(xs, j));
                CHECK(std::fabs(inv - quarter) < 1e-9 * quarter);
                // production values track the high-precision orbit in relative terms
                cplx hi{static_cast<double>(xs[static_cast<std::size_t>(j + 2)].re),
                        static_cast<double>(xs[static_cast<std::size_t>(j + 2)].im)};
                cplx lo = prod.value(j + 1);
                CHECK(std::abs(lo - hi) <= 1e-9 * std::max(1.0, std::abs(hi)));
            }
        }
    }
}

TEST_CASE("lambda_zero values and monotonicity") {
    CHECK(std::fabs(lambda_zero(0.0) - std::sqrt(24.0)) < 1e-12);
    CHECK(lambda_zero(0.1) == doctest::Approx(5.4007406899424453).epsilon(1e-12));
    double prev = lambda_zero(0.0);
    for (double d = 0.05; d < 1.0; d += 0.05) {
        CHECK(lambda_zero(d) > prev);
        prev = lambda_zero(d);
    }
}

TEST_CASE("level-2 bands against the quadratic formula") {
    BandSet bs = real_bands(2, 0.0, 8.0);
    REQUIRE(bs.bands.size() == 2);
    double s18 = std::sqrt(18.0), s20 = std::sqrt(20.0);
    CHECK(bs.bands[0].root == doctest::Approx(4.0 - s18).epsilon(1e-12));
    CHECK(bs.bands[1].root == doctest::Approx(4.0 + s18).epsilon(1e-12));
    // |x_2| = 1 edges: x_2 = (E^2 - 8E - 2)/2
    CHECK(bs.bands[0].left == doctest::Approx(4.0 - s20).epsilon(1e-10));
    CHECK(bs.bands[0].right == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(bs.bands[1].left == doctest::Approx(8.0).epsilon(1e-10));
    CHECK(bs.bands[1].right == doctest::Approx(4.0 + s20).epsilon(1e-10));
}

TEST_CASE("band counts, disjointness, nesting") {
    double lambda = 8.0, delta = 0.2;
    std::vector<BandSet> sets;
    for (int k = 1; k <= 10; ++k) sets.push_back(real_bands(k, delta, lambda));
    for (int k = 1; k <= 10; ++k) {
        CHECK(static_cast<std::int64_t>(sets[k - 1].bands.size()) == fibonacci(k));
        for (std::size_t j = 0; j + 1 < sets[k - 1].bands.size(); ++j)
            CHECK(sets[k - 1].bands[j].right < sets[k - 1].bands[j + 1].left);
        for (const auto& b : sets[k - 1].bands) {
            CHECK(b.left < b.root);
            CHECK(b.root < b.right);
        }
    }
    // sigma_{k+1} u sigma_k inside sigma_k u sigma_{k-1}, sampled at roots and edges
    auto member = [](const BandSet& s, double e) {
        for (const auto& b : s.bands)
            if (e >= b.left - 1e-13 && e <= b.right + 1e-13) return true;
        return false;
    };
    for (int k = 2; k <= 9; ++k) {
        const BandSet& up = sets[static_cast<std::size_t>(k)];  // level k+1
        for (const auto& b : up.bands) {
            for (double e : {b.left, b.root, b.right}) {
                bool in = member(sets[static_cast<std::size_t>(k - 1)], e) ||
                          member(sets[static_cast<std::size_t>(k - 2)], e);
                CHECK(in);
            }
        }
    }
    // triple intersection empty
    for (int k = 1; k <= 8; ++k) {
        const BandSet& s1 = sets[static_cast<std::size_t>(k - 1)];
        const BandSet& s2 = sets[static_cast<std::size_t>(k)];
        const BandSet& s3 = sets[static_cast<std::size_t>(k + 1)];
        for (const auto& b : s3.bands)
            for (double e : {b.left, b.root, b.right})
                CHECK(!(member(s1, e) && member(s2, e)));
    }
}

TEST_CASE("band count mismatch reported below lambda_zero") {
    CHECK_THROWS_AS(real_bands(6, 0.0, 4.0), DomainError);  // below sqrt(24): precondition
}

TEST_CASE("root profiles at k=2 and the k=3 cubic") {
    auto p2 = root_profiles(2, 8.0);
    REQUIRE(p2.size() == 2);
    CHECK(p2[0].second == 1);
    CHECK(p2[1].second == 1);

    // roots of 2*x_3 = z^3 - 16 z^2 + 61 z + 16 by bisection, then count |x_l| <= 1
    auto cubic = [](double z) { return ((z - 16.0) * z + 61.0) * z + 16.0; };
    auto bisect = [&](double a, double b) {
        for (int i = 0; i < 200; ++i) {
            double m = 0.5 * (a + b);
            if (m == a || m == b) break;
            if ((cubic(a) < 0) == (cubic(m) < 0))
                a = m;
            else
                b = m;
        }
        return 0.5 * (a + b);
    };
    double r0 = bisect(-1.0, 0.0), r1 = bisect(6.0, 8.0), r2 = bisect(8.5, 10.0);
    auto count_small = [](double z) {
        double x0 = z / 2.0, x1 = (z - 8.0) / 2.0, x2 = z * (z - 8.0) / 2.0 - 1.0;
        int m = 0;
        for (double v : {x0, x1, x2})
            if (std::fabs(v) <= 1.0) ++m;
        return m;
    };
    auto p3 = root_profiles(3, 8.0);
    REQUIRE(p3.size() == 3);
    CHECK(p3[0].first == doctest::Approx(r0).epsilon(1e-10));
    CHECK(p3[1].first == doctest::Approx(r1).epsilon(1e-10));
    CHECK(p3[2].first == doctest::Approx(r2).epsilon(1e-10));
    CHECK(p3[0].second == count_small(r0));
    CHECK(p3[1].second == count_small(r1));
    CHECK(p3[2].second == count_small(r2));
}

TEST_CASE("histogram support is [floor(k/2), floor(2k/3)]") {
    // measured support of the literal profile count; the floor at odd k is real
    // (2^{floor(k/2)} roots sit there), confirmed by exact algebra at k=3
    for (double lambda : {8.0, 12.0}) {
        for (int k = 2; k <= 12; ++k) {
            auto h = c_histogram(k, lambda);
            std::int64_t total = 0;
            for (const auto& [m, c] : h) total += c;
            CHECK(total == fibonacci(k));
            int lo = k / 2, hi = (2 * k) / 3;
            CHECK(h.begin()->first == lo);
            CHECK(h.rbegin()->first == hi);
            for (int m = lo; m <= hi; ++m) CHECK(h.count(m) == 1);
        }
    }
}

TEST_CASE("band widths shrink with m") {
    BandScaling s = band_scaling(8, 0.2, 8.0);
    CHECK(s.slope < 0.0);
    CHECK(s.correlation < -0.3);
    CHECK(s.m_values.size() == static_cast<std::size_t>(fibonacci(8)));
}

TEST_CASE("box dimension basics") {
    BoxDimension d = box_dimension(8.0, 12, 0.0);
    CHECK(d.estimate > 0.0);
    CHECK(d.estimate < 1.0);
    CHECK(d.scales_used >= 4);
    CHECK_THROWS_AS(box_dimension(8.0, 2, 0.0), DegenerateFit);
}
