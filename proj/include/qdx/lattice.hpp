#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qdx/common.hpp"

namespace qdx {

enum class PotentialKind { Fibonacci, Free, CustomTable };

// On-site potential V(n). Fibonacci: V(n) = lambda * chi_[1-1/phi, 1)(n/phi + theta mod 1).
// The fractional part is evaluated in 96-bit fixed point so that site indices up to
// |n| ~ 1e9 cannot be misclassified near the interval endpoints; the left endpoint
// itself counts as inside (half-open interval).
struct PotentialSpec {
    PotentialKind kind = PotentialKind::Free;
    double lambda = 0.0;            // coupling, > 0 for fibonacci
    double theta = 0.0;             // phase in [0,1)
    std::vector<double> table;      // custom kind only
    std::int64_t table_first = 0;   // site index of table[0]

    static PotentialSpec fibonacci(double lambda, double theta = 0.0);
    static PotentialSpec free_potential();
    static PotentialSpec custom(std::vector<double> table, std::int64_t first_site = 0);

    double sup_norm() const;
    bool operator==(const PotentialSpec&) const = default;
};

double potential_value(const PotentialSpec& spec, std::int64_t n);

// K >= 4 with sigma(H) inside [-K+1, K-1]; K = max(4, sup_norm + 3).
double spectral_bound(const PotentialSpec& spec);

// Complex amplitudes on the sites [left, right]; zero outside.
struct LatticeWindow {
    std::int64_t left = 0;
    std::int64_t right = 0;
    std::vector<std::complex<double>> amplitudes;  // size right-left+1

    LatticeWindow() : amplitudes(1) {}
    LatticeWindow(std::int64_t l, std::int64_t r)
        : left(l), right(r), amplitudes(static_cast<std::size_t>(r - l + 1)) {
        if (l > 0 || r < 0) throw DomainError("lattice window must contain site 0");
    }

    std::complex<double>& at(std::int64_t n) { return amplitudes[static_cast<std::size_t>(n - left)]; }
    std::complex<double> value(std::int64_t n) const {
        if (n < left || n > right) return {0.0, 0.0};
        return amplitudes[static_cast<std::size_t>(n - left)];
    }
    std::int64_t size() const { return right - left + 1; }
    double norm_squared() const;
};

// (H psi)(n) = psi(n+1) + psi(n-1) + V(n) psi(n); result window grows by one site per side.
LatticeWindow apply_hamiltonian(const LatticeWindow& psi, const PotentialSpec& spec);

std::complex<double> inner_product(const LatticeWindow& a, const LatticeWindow& b);

namespace detail {
// frac(n/phi + theta) in units of 2^-96, as a 96-bit value held in unsigned __int128.
unsigned __int128 fib_phase_fixed(std::int64_t n, double theta);
// 1 - 1/phi in the same units (indicator boundary).
unsigned __int128 fib_boundary_fixed();
}  // namespace detail

}  // namespace qdx
