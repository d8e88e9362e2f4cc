#pragma once

#include <vector>

namespace qdx {

// J_0(x) ... J_mmax(x) for x >= 0 by Miller's backward recurrence, normalized with
// J_0 + 2 sum J_{2k} = 1. Relative accuracy ~1e-13 on the non-negligible entries.
std::vector<double> bessel_j_array(double x, int m_max);

}  // namespace qdx
