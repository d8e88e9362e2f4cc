#pragma once

#include <complex>
#include <cstdint>

#include "qdx/lattice.hpp"

namespace qdx {

// 2x2 unimodular transfer matrix stored as entries * 2^scale_exponent. Entries are
// rescaled whenever their magnitude passes 2^512, so products stay representable
// through exponential growth; norms are reported in log space.
struct TransferMatrix {
    std::complex<double> a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};
    std::int64_t scale_exponent = 0;

    static TransferMatrix identity() { return {}; }
    // one-step matrix T(m,z) = [[z - V(m), -1], [1, 0]]
    static TransferMatrix one_step(std::complex<double> z, double v) {
        return {{z.real() - v, z.imag()}, {-1.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}, 0};
    }
    // [T(m,z)]^{-1} = [[0, 1], [-1, z - V(m)]]
    static TransferMatrix one_step_inverse(std::complex<double> z, double v) {
        return {{0.0, 0.0}, {1.0, 0.0}, {-1.0, 0.0}, {z.real() - v, z.imag()}, 0};
    }

    // determinant of the represented matrix: det(entries) * 2^(2*scale_exponent)
    std::complex<double> det_mantissa() const { return a * d - b * c; }

    // log of the spectral norm of the represented matrix
    double log_norm() const;
    // squared spectral norm of the entry block (scale excluded)
    double norm_squared_mantissa() const;

    void rescale_if_needed();
};

TransferMatrix operator*(const TransferMatrix& lhs, const TransferMatrix& rhs);

// Phi(n, z): product T(n)...T(1) for n >= 1, identity at n = 0,
// [T(n+1)]^{-1}...[T(0)]^{-1} for n <= -1.
TransferMatrix transfer_matrix(std::int64_t n, std::complex<double> z, const PotentialSpec& spec);

enum class Side { Right, Left };

// log of max_{window} ||Phi(n,z)||^2 with the window 0..N-1 (right) or -N+1..0 (left).
// One sweep, one matrix product per step; the n = 0 term makes the result >= 0.
double window_max_log_norm_sq(std::complex<double> z, std::int64_t N, Side side,
                              const PotentialSpec& spec);

// exp of the above; +inf if it overflows a double.
double window_max_norm_sq(std::complex<double> z, std::int64_t N, Side side,
                          const PotentialSpec& spec);

// M_k(z) = Phi_{theta=0}(F_k, z) via M_{k+1} = M_{k-1} M_k, M_1 = T(1,z), M_2 = T(2,z)T(1,z).
TransferMatrix fibonacci_matrix(int k, std::complex<double> z, double lambda);

// half-trace of M_k as a complex number (callers on-spectrum only; overflows to inf otherwise)
std::complex<double> fibonacci_half_trace(int k, std::complex<double> z, double lambda);

}  // namespace qdx
