#include "qdx/transfer.hpp"

#include <algorithm>
#include <cmath>

namespace qdx {

namespace {
constexpr double kRescaleThreshold = 0x1p512;
constexpr double kRescaleFactor = 0x1p-512;

double max_abs_entry(const TransferMatrix& m) {
    auto mag = [](std::complex<double> v) { return std::max(std::fabs(v.real()), std::fabs(v.imag())); };
    return std::max(std::max(mag(m.a), mag(m.b)), std::max(mag(m.c), mag(m.d)));
}
}  // namespace

void TransferMatrix::rescale_if_needed() {
    while (max_abs_entry(*this) > kRescaleThreshold) {
        a *= kRescaleFactor;
        b *= kRescaleFactor;
        c *= kRescaleFactor;
        d *= kRescaleFactor;
        scale_exponent += 512;
    }
}

TransferMatrix operator*(const TransferMatrix& lhs, const TransferMatrix& rhs) {
    TransferMatrix out;
    out.a = lhs.a * rhs.a + lhs.b * rhs.c;
    out.b = lhs.a * rhs.b + lhs.b * rhs.d;
    out.c = lhs.c * rhs.a + lhs.d * rhs.c;
    out.d = lhs.c * rhs.b + lhs.d * rhs.d;
    out.scale_exponent = lhs.scale_exponent + rhs.scale_exponent;
    out.rescale_if_needed();
    return out;
}

double TransferMatrix::norm_squared_mantissa() const {
    // spectral norm of a 2x2 in closed form: with f = ||.||_F^2 and g = |det|^2,
    // sigma_max^2 = (f + sqrt(f^2 - 4 g)) / 2
    double f = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
    double g = std::norm(a * d - b * c);
    double disc = f * f - 4.0 * g;
    if (disc < 0.0) disc = 0.0;
    return 0.5 * (f + std::sqrt(disc));
}

double TransferMatrix::log_norm() const {
    return 0.5 * std::log(norm_squared_mantissa()) +
           static_cast<double>(scale_exponent) * 0.6931471805599453;
}

TransferMatrix transfer_matrix(std::int64_t n, std::complex<double> z, const PotentialSpec& spec) {
    TransferMatrix phi = TransferMatrix::identity();
    if (n >= 1) {
        for (std::int64_t m = 1; m <= n; ++m)
            phi = TransferMatrix::one_step(z, potential_value(spec, m)) * phi;
    } else if (n <= -1) {
        // [T(n+1)]^{-1} ... [T(0)]^{-1}: grow the product leftward from [T(0)]^{-1}
        for (std::int64_t m = 0; m >= n + 1; --m)
            phi = TransferMatrix::one_step_inverse(z, potential_value(spec, m)) * phi;
    }
    return phi;
}

double window_max_log_norm_sq(std::complex<double> z, std::int64_t N, Side side,
                              const PotentialSpec& spec) {
    if (N < 1) throw DomainError("window_max_norm needs N >= 1");
    TransferMatrix phi = TransferMatrix::identity();
    double best = 0.0;  // n = 0 contributes log ||Id||^2 = 0
    for (std::int64_t j = 1; j <= N - 1; ++j) {
        if (side == Side::Right) {
            phi = TransferMatrix::one_step(z, potential_value(spec, j)) * phi;
        } else {
            phi = TransferMatrix::one_step_inverse(z, potential_value(spec, 1 - j)) * phi;
        }
        best = std::max(best, 2.0 * phi.log_norm());
    }
    return best;
}

double window_max_norm_sq(std::complex<double> z, std::int64_t N, Side side,
                          const PotentialSpec& spec) {
    return std::exp(window_max_log_norm_sq(z, N, side, spec));
}

TransferMatrix fibonacci_matrix(int k, std::complex<double> z, double lambda) {
    if (k < 1) throw DomainError("fibonacci_matrix needs k >= 1");
    PotentialSpec spec = PotentialSpec::fibonacci(lambda, 0.0);
    TransferMatrix m1 = TransferMatrix::one_step(z, potential_value(spec, 1));
    if (k == 1) return m1;
    TransferMatrix m2 = TransferMatrix::one_step(z, potential_value(spec, 2)) * m1;
    TransferMatrix prev = m1, cur = m2;
    for (int j = 2; j < k; ++j) {
        TransferMatrix next = prev * cur;  // M_{j+1} = M_{j-1} M_j
        prev = cur;
        cur = next;
    }
    return cur;
}

std::complex<double> fibonacci_half_trace(int k, std::complex<double> z, double lambda) {
    TransferMatrix m = fibonacci_matrix(k, z, lambda);
    std::complex<double> tr = 0.5 * (m.a + m.d);
    double s = std::ldexp(1.0, static_cast<int>(std::min<std::int64_t>(m.scale_exponent, 2000)));
    return tr * s;
}

}  // namespace qdx
