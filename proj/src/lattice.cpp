#include "qdx/lattice.hpp"

#include <cmath>
#include <cstdlib>

namespace qdx {

namespace {

using u128 = unsigned __int128;

constexpr u128 kOne96 = static_cast<u128>(1) << 96;

// round((phi^-1) * 2^96), phi = (sqrt(5)+1)/2.  0x9e3779b97f4a7c15f39cc060
constexpr u128 kPhiInv96 = (static_cast<u128>(0x9e3779b97f4a7c15ULL) << 32) | 0xf39cc060ULL;

u128 theta_fixed(double theta) {
    if (!(theta >= 0.0 && theta < 1.0)) throw DomainError("theta must lie in [0,1)");
    long double x = static_cast<long double>(theta) * 0x1p64L;
    auto hi = static_cast<std::uint64_t>(x);
    long double rem = (x - static_cast<long double>(hi)) * 0x1p32L;
    auto lo = static_cast<std::uint32_t>(rem);
    return ((static_cast<u128>(hi) << 32) | lo) % kOne96;
}

}  // namespace

namespace detail {

u128 fib_phase_fixed(std::int64_t n, double theta) {
    u128 frac;
    if (n >= 0) {
        frac = (kPhiInv96 * static_cast<u128>(n)) % kOne96;
    } else {
        u128 m = (kPhiInv96 * static_cast<u128>(-n)) % kOne96;
        frac = (kOne96 - m) % kOne96;
    }
    return (frac + theta_fixed(theta)) % kOne96;
}

u128 fib_boundary_fixed() { return kOne96 - kPhiInv96; }

}  // namespace detail

PotentialSpec PotentialSpec::fibonacci(double lambda, double theta) {
    if (!(lambda > 0.0)) throw DomainError("fibonacci coupling must be positive");
    PotentialSpec s;
    s.kind = PotentialKind::Fibonacci;
    s.lambda = lambda;
    s.theta = theta;
    (void)theta_fixed(theta);  // validate range
    return s;
}

PotentialSpec PotentialSpec::free_potential() { return PotentialSpec{}; }

PotentialSpec PotentialSpec::custom(std::vector<double> table, std::int64_t first_site) {
    if (table.empty()) throw DomainError("custom potential table must be nonempty");
    PotentialSpec s;
    s.kind = PotentialKind::CustomTable;
    s.table = std::move(table);
    s.table_first = first_site;
    return s;
}

double PotentialSpec::sup_norm() const {
    switch (kind) {
        case PotentialKind::Free: return 0.0;
        case PotentialKind::Fibonacci: return lambda;
        case PotentialKind::CustomTable: {
            double m = 0.0;
            for (double v : table) m = std::max(m, std::abs(v));
            return m;
        }
    }
    return 0.0;
}

double potential_value(const PotentialSpec& spec, std::int64_t n) {
    switch (spec.kind) {
        case PotentialKind::Free:
            return 0.0;
        case PotentialKind::Fibonacci:
            return detail::fib_phase_fixed(n, spec.theta) >= detail::fib_boundary_fixed()
                       ? spec.lambda
                       : 0.0;
        case PotentialKind::CustomTable: {
            std::int64_t i = n - spec.table_first;
            if (i < 0 || i >= static_cast<std::int64_t>(spec.table.size()))
                throw DomainError("custom potential queried outside its table (site " +
                                  std::to_string(n) + ")");
            return spec.table[static_cast<std::size_t>(i)];
        }
    }
    return 0.0;
}

double spectral_bound(const PotentialSpec& spec) { return std::max(4.0, spec.sup_norm() + 3.0); }

double LatticeWindow::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
}

LatticeWindow apply_hamiltonian(const LatticeWindow& psi, const PotentialSpec& spec) {
    LatticeWindow out(psi.left - 1, psi.right + 1);
    for (std::int64_t n = out.left; n <= out.right; ++n) {
        std::complex<double> v = psi.value(n + 1) + psi.value(n - 1);
        if (n >= psi.left && n <= psi.right) v += potential_value(spec, n) * psi.value(n);
        out.at(n) = v;
    }
    return out;
}

std::complex<double> inner_product(const LatticeWindow& a, const LatticeWindow& b) {
    std::int64_t lo = std::max(a.left, b.left), hi = std::min(a.right, b.right);
    std::complex<double> s{0.0, 0.0};
    for (std::int64_t n = lo; n <= hi; ++n) s += std::conj(a.value(n)) * b.value(n);
    return s;
}

}  // namespace qdx
