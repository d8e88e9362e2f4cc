#include "qdx/bessel.hpp"

#include <cmath>

#include "qdx/common.hpp"

namespace qdx {

std::vector<double> bessel_j_array(double x, int m_max) {
    if (x < 0.0 || m_max < 0) throw DomainError("bessel_j_array needs x >= 0, m_max >= 0");
    std::vector<double> out(static_cast<std::size_t>(m_max) + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    // start far enough into the decaying tail that the downward recurrence has
    // converged by the time it reaches m_max
    int start = static_cast<int>(std::max(static_cast<double>(m_max), x) +
                                 15.0 * std::cbrt(std::max(x, 1.0)) + 40.0);
    if (start % 2 == 1) ++start;

    double jp = 0.0;   // J_{m+1} (unnormalized)
    double jc = 1e-300;  // J_m
    double norm = 0.0;   // J_0 + 2 sum_{k>=1} J_{2k}
    for (int m = start; m >= 1; --m) {
        double jm = (2.0 * m / x) * jc - jp;
        jp = jc;
        jc = jm;
        if (m - 1 <= m_max) out[static_cast<std::size_t>(m - 1)] = jc;
        if ((m - 1) % 2 == 0) norm += (m - 1 == 0 ? 1.0 : 2.0) * jc;
        if (std::fabs(jc) > 1e250) {
            jc *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            for (auto& v : out) v *= 1e-250;
        }
    }
    for (auto& v : out) v /= norm;
    return out;
}

}  // namespace qdx
